"""Finite-difference weight families in exact rational arithmetic.

All generators return weights as `fractions.Fraction` (always reduced,
positive denominator), so every stated identity can be checked bit-exactly.
Floating point enters only when a consumer converts a weight for evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction


class StencilKind(Enum):
    CENTRAL_FIRST = "central-first"
    CENTRAL_SECOND = "central-second"
    HALF_POINT_FIRST = "half-point-first"
    ONE_SIDED_FIRST = "one-sided-first"
    ONE_SIDED_NTH = "one-sided-nth"


@dataclass(frozen=True)
class Stencil:
    """A derivative-approximation rule on integer grid offsets.

    The rule reads: d^order f / dx^order at the anchor point is approximated
    by  prefactor / h**h_power * sum_m weights[m] * f[anchor + offsets[m]].
    Only nonzero weights are stored; absent offsets count as zero.
    """

    kind: StencilKind
    n: int
    derivative_order: int
    offsets: tuple[int, ...]
    weights: tuple[Fraction, ...]
    h_power: int
    prefactor: Fraction

    def __post_init__(self):
        if len(self.offsets) != len(self.weights):
            raise ValueError("offsets and weights must have equal length")
        if any(b <= a for a, b in zip(self.offsets, self.offsets[1:])):
            raise ValueError("offsets must be strictly increasing")

    @property
    def nodes(self) -> tuple[tuple[int, Fraction], ...]:
        return tuple(zip(self.offsets, self.weights))

    def weight_at(self, offset: int) -> Fraction:
        for o, w in zip(self.offsets, self.weights):
            if o == offset:
                return w
        return Fraction(0)

    def label(self) -> str:
        return f"{self.kind.value}(n={self.n})"


@dataclass(frozen=True)
class LimitWeight:
    """One coefficient of an infinite-family weight sequence.

    The numeric value is rational_part * pi**pi_power; the pi factor is kept
    symbolic so the half-point limit stays exact until evaluation.
    """

    index: int
    rational_part: Fraction
    pi_power: int = 0

    def __post_init__(self):
        if self.pi_power not in (0, -1):
            raise ValueError("pi_power must be 0 or -1")

    def value(self) -> float:
        if self.pi_power == 0:
            return float(self.rational_part)
        return float(self.rational_part) / math.pi


def harmonic_number(n: int) -> Fraction:
    """Exact n-th harmonic number sum(1/m, m=1..n)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return sum((Fraction(1, m) for m in range(1, n + 1)), Fraction(0))


def _solve_rational_system(matrix, rhs):
    """Gauss-Jordan over Fractions. Private to this module; the oracle has
    its own independent fraction-free solver."""
    a = [[Fraction(x) for x in row] for row in matrix]
    b = [Fraction(x) for x in rhs]
    size = len(a)
    for col in range(size):
        pivot = next((r for r in range(col, size) if a[r][col] != 0), None)
        if pivot is None:
            raise ValueError("singular moment system")
        a[col], a[pivot] = a[pivot], a[col]
        b[col], b[pivot] = b[pivot], b[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        b[col] *= inv
        for r in range(size):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                b[r] -= f * b[col]
    return b


def central_first(n: int) -> Stencil:
    """Central first-derivative weights for offsets -n..-1, 1..n.

    The positive-side coefficients solve the odd moment conditions
    sum_m w_m * m**(2j+1) = delta(j, 0) for j = 0..n-1; the negative side is
    the antisymmetric mirror.  Evaluation rule: 1/(2h) * sum w_m (f_m - f_-m).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    matrix = [[(i + 1) ** (2 * j + 1) for i in range(n)] for j in range(n)]
    rhs = [1] + [0] * (n - 1)
    alpha = _solve_rational_system(matrix, rhs)
    offsets = tuple(range(-n, 0)) + tuple(range(1, n + 1))
    weights = tuple(-alpha[-m - 1] for m in range(-n, 0)) + tuple(alpha)
    return Stencil(
        kind=StencilKind.CENTRAL_FIRST,
        n=n,
        derivative_order=1,
        offsets=offsets,
        weights=weights,
        h_power=1,
        prefactor=Fraction(1, 2),
    )


def central_second(n: int) -> Stencil:
    """Central second-derivative weights for offsets -n..n.

    Positive-side coefficients solve the even moment conditions
    sum_m w_m * m**(2j) = delta(j, 1) for j = 1..n; the center weight is
    -2 * sum of the positive-side weights and the negative side mirrors
    symmetrically.  Evaluation rule: 1/h**2 * sum over all offsets.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    matrix = [[(i + 1) ** (2 * j) for i in range(n)] for j in range(1, n + 1)]
    rhs = [1] + [0] * (n - 1)
    alpha = _solve_rational_system(matrix, rhs)
    center = -2 * sum(alpha)
    offsets = tuple(range(-n, n + 1))
    weights = (
        tuple(alpha[-m - 1] for m in range(-n, 0))
        + (center,)
        + tuple(alpha)
    )
    return Stencil(
        kind=StencilKind.CENTRAL_SECOND,
        n=n,
        derivative_order=2,
        offsets=offsets,
        weights=weights,
        h_power=2,
        prefactor=Fraction(1),
    )


def half_point(n: int) -> Stencil:
    """First-derivative weights using only the odd offsets +-1, +-3, ...

    Weight at offset 2m+1 is 1 / ((2m+1) * p) where p is the exact product
    over k != m of (1 - (2m+1)**2 / (2k+1)**2).  Even offsets carry weight
    zero and are not stored.  Evaluation rule matches central_first:
    1/(2h) * sum over stored offsets.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    positive = []
    for m in range(n):
        prod = Fraction(1)
        for k in range(n):
            if k != m:
                prod *= 1 - Fraction((2 * m + 1) ** 2, (2 * k + 1) ** 2)
        positive.append(Fraction(1, 2 * m + 1) / prod)
    offsets = tuple(-(2 * m + 1) for m in reversed(range(n)))
    offsets += tuple(2 * m + 1 for m in range(n))
    weights = tuple(-w for w in reversed(positive)) + tuple(positive)
    return Stencil(
        kind=StencilKind.HALF_POINT_FIRST,
        n=n,
        derivative_order=1,
        offsets=offsets,
        weights=weights,
        h_power=1,
        prefactor=Fraction(1, 2),
    )


def one_sided_first(n: int) -> Stencil:
    """One-sided first-derivative weights on offsets 0..n.

    Weight at offset m >= 1 is (-1)**(m+1) * C(n, m) / m; the weight at 0 is
    the negated harmonic number so the weights sum to zero.  Evaluation
    rule: 1/h * sum.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    weights = [-harmonic_number(n)]
    for m in range(1, n + 1):
        weights.append(Fraction((-1) ** (m + 1) * math.comb(n, m), m))
    return Stencil(
        kind=StencilKind.ONE_SIDED_FIRST,
        n=n,
        derivative_order=1,
        offsets=tuple(range(n + 1)),
        weights=tuple(weights),
        h_power=1,
        prefactor=Fraction(1),
    )


def one_sided_nth(n: int) -> Stencil:
    """n-th-derivative weights on offsets 0..n (alternating binomial row).

    Weight at offset m is (-1)**(m+n) * C(n, m) / n!; with the stored
    prefactor n! the rule reduces to the n-th forward difference / h**n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    fact = math.factorial(n)
    weights = tuple(
        Fraction((-1) ** (m + n) * math.comb(n, m), fact) for m in range(n + 1)
    )
    return Stencil(
        kind=StencilKind.ONE_SIDED_NTH,
        n=n,
        derivative_order=n,
        offsets=tuple(range(n + 1)),
        weights=weights,
        h_power=n,
        prefactor=Fraction(fact),
    )


def product_form_one_sided(m: int, n: int) -> Fraction:
    """One-sided first-derivative weight at offset m via the product form
    1 / (m * prod over k != m of (1 - m/k)); equals one_sided_first(n)'s
    weight at m."""
    if not 1 <= m <= n:
        raise ValueError("require 1 <= m <= n")
    prod = Fraction(1)
    for k in range(1, n + 1):
        if k != m:
            prod *= 1 - Fraction(m, k)
    return 1 / (Fraction(m) * prod)


def central_first_limit(m: int) -> LimitWeight:
    """Infinite-family central first-derivative coefficient (-1)**(m+1)*2/m."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return LimitWeight(index=m, rational_part=Fraction((-1) ** (m + 1) * 2, m))


def central_second_limit(m: int) -> LimitWeight:
    """Infinite-family central second-derivative coefficient (-1)**(m+1)*2/m**2."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return LimitWeight(index=m, rational_part=Fraction((-1) ** (m + 1) * 2, m * m))


def half_point_limit(m: int) -> LimitWeight:
    """Infinite-family half-point coefficient at odd offset 2m+1:
    (-1)**m * 4 / ((2m+1)**2 * pi), kept exact as rational_part / pi."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return LimitWeight(
        index=2 * m + 1,
        rational_part=Fraction((-1) ** m * 4, (2 * m + 1) ** 2),
        pi_power=-1,
    )


_KIND_BUILDERS = {
    StencilKind.CENTRAL_FIRST: central_first,
    StencilKind.CENTRAL_SECOND: central_second,
    StencilKind.HALF_POINT_FIRST: half_point,
    StencilKind.ONE_SIDED_FIRST: one_sided_first,
    StencilKind.ONE_SIDED_NTH: one_sided_nth,
}


def build(kind: StencilKind, n: int) -> Stencil:
    """Generate the stencil of the given kind and family parameter n."""
    return _KIND_BUILDERS[kind](n)


def stencil_to_dict(stencil: Stencil) -> dict:
    """JSON-ready form with weights as exact fraction strings."""
    return {
        "kind": stencil.kind.value,
        "n": stencil.n,
        "derivative_order": stencil.derivative_order,
        "h_power": stencil.h_power,
        "prefactor": str(stencil.prefactor),
        "nodes": [
            {"offset": o, "weight": str(w)} for o, w in stencil.nodes
        ],
    }


def stencil_from_dict(data: dict) -> Stencil:
    """Inverse of stencil_to_dict; reconstruction is bit-exact."""
    nodes = sorted(data["nodes"], key=lambda d: d["offset"])
    return Stencil(
        kind=StencilKind(data["kind"]),
        n=int(data["n"]),
        derivative_order=int(data["derivative_order"]),
        offsets=tuple(int(d["offset"]) for d in nodes),
        weights=tuple(Fraction(d["weight"]) for d in nodes),
        h_power=int(data["h_power"]),
        prefactor=Fraction(data["prefactor"]),
    )
