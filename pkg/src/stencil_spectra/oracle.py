"""Independent brute-force verifiers for the weight families.

Everything here is deliberately plain: exact fraction-free elimination for
the moment systems, literal determinant formulas, degree-by-degree
polynomial exactness, and unaccelerated partial sums. The point is to have
a second route that shares no code with the generators in `weights`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .weights import Stencil


class SingularSystemError(ValueError):
    pass


@dataclass(frozen=True)
class MomentSystem:
    """Square system sum_m a_m * offset_m**k = delta(target_order, k),
    k = 0..degree, with the convention 0**0 = 1."""

    offsets: tuple[int, ...]
    degree: int
    target_order: int

    def __post_init__(self):
        if len(self.offsets) != self.degree + 1:
            raise ValueError("need degree+1 offsets for a square system")
        if not 0 <= self.target_order <= self.degree:
            raise ValueError("target_order must lie in 0..degree")


@dataclass(frozen=True)
class ExactnessReport:
    stencil: Stencil
    max_exact_degree: int
    first_failing_degree: int | None
    residuals: tuple[Fraction, ...]

    def describe(self) -> str:
        tail = (
            f"first failure at degree {self.first_failing_degree}"
            if self.first_failing_degree is not None
            else "no failure within the searched range"
        )
        return (
            f"{self.stencil.label()}: exact through degree "
            f"{self.max_exact_degree}, {tail}"
        )


def _bareiss_eliminate(rows):
    """Fraction-free forward elimination in place; returns the sign of the
    row permutation. Integer entries stay integer (divisions are exact)."""
    size = len(rows)
    sign = 1
    prev = 1
    for col in range(size - 1):
        if rows[col][col] == 0:
            swap = next(
                (r for r in range(col + 1, size) if rows[r][col] != 0), None
            )
            if swap is None:
                raise SingularSystemError("zero pivot column")
            rows[col], rows[swap] = rows[swap], rows[col]
            sign = -sign
        for r in range(col + 1, size):
            for c in range(col + 1, len(rows[r])):
                rows[r][c] = (
                    rows[r][c] * rows[col][col] - rows[r][col] * rows[col][c]
                ) // prev
            rows[r][col] = 0
        prev = rows[col][col]
    return sign


def solve_moment_system(system: MomentSystem) -> list[Fraction]:
    """Exact solution of the moment system by fraction-free elimination.

    Raises SingularSystemError for repeated offsets.
    """
    if len(set(system.offsets)) != len(system.offsets):
        raise SingularSystemError("repeated offsets")
    size = system.degree + 1
    rows = [
        [o ** k for o in system.offsets] + [1 if k == system.target_order else 0]
        for k in range(size)
    ]
    _bareiss_eliminate(rows)
    solution = [Fraction(0)] * size
    for i in reversed(range(size)):
        acc = Fraction(rows[i][size])
        for j in range(i + 1, size):
            acc -= rows[i][j] * solution[j]
        solution[i] = acc / rows[i][i]
    return solution


def vandermonde_det(n: int) -> int:
    """Determinant of the (n+1) x (n+1) power matrix over nodes 0..n,
    computed by fraction-free elimination (never zero)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rows = [[m ** k for m in range(n + 1)] for k in range(n + 1)]
    sign = _bareiss_eliminate(rows)
    return sign * rows[n][n]


def delta_m1_closed_form(m: int, n: int) -> int:
    """Numerator determinant for the first-derivative weight at offset m:
    (-1)**(m+1) * (n!/m)**2 * prod over 1 <= i < j <= n, i,j != m of (j-i)."""
    if not 1 <= m <= n:
        raise ValueError("require 1 <= m <= n")
    prod = 1
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if i != m and j != m:
                prod *= j - i
    return (-1) ** (m + 1) * (math.factorial(n) // m) ** 2 * prod


def exactness_check(stencil: Stencil, max_degree: int) -> ExactnessReport:
    """Apply the stencil symbolically to x**k for k = 0..max_degree and
    compare with the exact derivative at 0.

    h is factored out through h_power, so the residuals are h-independent
    rationals: residual(k) = prefactor * sum w_m m**k - d! * delta(k, d).
    """
    if max_degree > 2 * stencil.n + 4:
        raise ValueError("bounded search: max_degree must be <= 2n + 4")
    d = stencil.derivative_order
    exact_at_d = Fraction(math.factorial(d))
    residuals = []
    first_failing = None
    for k in range(max_degree + 1):
        applied = stencil.prefactor * sum(
            (w * o ** k for o, w in stencil.nodes), Fraction(0)
        )
        res = applied - (exact_at_d if k == d else 0)
        residuals.append(res)
        if res != 0 and first_failing is None:
            first_failing = k
    max_exact = max_degree if first_failing is None else first_failing - 1
    return ExactnessReport(
        stencil=stencil,
        max_exact_degree=max_exact,
        first_failing_degree=first_failing,
        residuals=tuple(residuals),
    )


def alternating_series_sum(
    term: Callable[[int], float], count: int
) -> tuple[float, float]:
    """Partial sum of term(1..count) with the magnitude of the first omitted
    term as the error bound. Summation uses math.fsum for a correctly
    rounded result."""
    if count < 1:
        raise ValueError("count must be >= 1")
    value = math.fsum(float(term(m)) for m in range(1, count + 1))
    bound = abs(float(term(count + 1)))
    return value, bound
