"""Finite-difference weight sequences, their spectra, and differentiation."""

from .weights import (
    LimitWeight,
    Stencil,
    StencilKind,
    build,
    central_first,
    central_first_limit,
    central_second,
    central_second_limit,
    half_point,
    half_point_limit,
    harmonic_number,
    one_sided_first,
    one_sided_nth,
    product_form_one_sided,
    stencil_from_dict,
    stencil_to_dict,
)
from .oracle import (
    ExactnessReport,
    MomentSystem,
    SingularSystemError,
    alternating_series_sum,
    delta_m1_closed_form,
    exactness_check,
    solve_moment_system,
    vandermonde_det,
)
from .spectra import (
    CurveDomainError,
    CurveFamily,
    DeviationReport,
    EmbeddingMode,
    EmbeddingOverflowError,
    FilterSpectrum,
    ReferenceCurve,
    deviation,
    dft_spectrum,
    freq_differentiate,
    omega_grid,
    reference_value,
    truncated_limit_spectrum,
    truncated_limit_spectrum_dft_grid,
    truncated_limit_spectrum_grid,
)
from .signals import (
    BoundaryError,
    ConvergenceStudy,
    DerivativeResult,
    ModulatedAlternating,
    Polynomial,
    SampledSignal,
    Sinusoid,
    alternating_second_derivative_check,
    apply_stencil,
    apply_stencil_at,
    convergence_study,
    differentiate,
    differentiate_half_point,
    make_signal,
    parse_test_function,
)

__version__ = "0.1.0"
