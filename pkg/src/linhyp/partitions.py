"""Part-size vectors and exact elementary symmetric functions over them.

Vertices 1..n are laid out in consecutive blocks: part 0 holds 1..n_0,
part 1 holds the next n_1 integers, and so on.  Everything here is exact
integer or rational arithmetic except log_sigma, which works in floating
point with rescaling so that huge part counts stay representable.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import DomainError


def falling_factorial(x: int, t: int) -> int:
    """x (x-1) ... (x-t+1) with the empty product equal to 1."""
    if t < 0:
        raise DomainError(f"falling factorial needs t >= 0, got {t}")
    out = 1
    for i in range(t):
        out *= x - i
    return out


@dataclass(frozen=True)
class PartitionVector:
    """Immutable vector of part sizes, all at least 1."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes:
            raise DomainError("a partition vector needs at least one part")
        if any(s < 1 for s in sizes):
            raise DomainError(f"part sizes must be >= 1, got {sizes}")
        object.__setattr__(self, "sizes", sizes)
        bounds = []
        acc = 0
        for s in sizes:
            acc += s
            bounds.append(acc)
        # bounds[i] = last vertex id of part i
        object.__setattr__(self, "_bounds", tuple(bounds))

    @property
    def k(self) -> int:
        return len(self.sizes)

    @property
    def n(self) -> int:
        return self._bounds[-1]

    def part_of(self, v: int) -> int:
        """0-based index of the part containing vertex v (1-based)."""
        if not 1 <= v <= self.n:
            raise DomainError(f"vertex {v} outside 1..{self.n}")
        return bisect_right(self._bounds, v - 1)

    def part_vertices(self, i: int) -> range:
        """Vertices of part i as a range."""
        lo = 1 if i == 0 else self._bounds[i - 1] + 1
        return range(lo, self._bounds[i] + 1)

    def reciprocal_sum(self) -> Fraction:
        return sum((Fraction(1, s) for s in self.sizes), Fraction(0))


def partition(sizes: Iterable[int]) -> PartitionVector:
    return PartitionVector(tuple(sizes))


def uniform_partition(n: int) -> PartitionVector:
    """n singleton parts: the fully uniform (unpartitioned) case."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    return PartitionVector((1,) * n)


def _check_order(pv: PartitionVector, s: int) -> None:
    if not 0 <= s <= pv.k:
        raise DomainError(f"symmetric function order {s} outside 0..{pv.k}")


def sigma(pv: PartitionVector, s: int) -> int:
    """Elementary symmetric function of the part sizes, exact.

    Computed by the truncated product DP (k*s multiplications), never by
    summing the binomial(k, s) monomials.
    """
    _check_order(pv, s)
    coeff = [0] * (s + 1)
    coeff[0] = 1
    top = 0
    for size in pv.sizes:
        top = min(top + 1, s)
        for j in range(top, 0, -1):
            coeff[j] += coeff[j - 1] * size
    return coeff[s]


def log_sigma(pv: PartitionVector, s: int) -> float:
    """Natural log of sigma(pv, s) in floating point.

    Same DP as sigma but on floats, rescaling whenever coefficients grow
    past 1e280 so nothing overflows.  All terms are positive, so there is
    no cancellation and the relative error stays near k*s ulps (within
    1e-9 up to a million parts).
    """
    _check_order(pv, s)
    if s == 0:
        return 0.0
    coeff = [0.0] * (s + 1)
    coeff[0] = 1.0
    shift = 0.0
    top = 0
    for size in pv.sizes:
        top = min(top + 1, s)
        for j in range(top, 0, -1):
            coeff[j] += coeff[j - 1] * size
        big = max(coeff)
        if big > 1e280:
            inv = 1.0 / big
            for j in range(s + 1):
                coeff[j] *= inv
            shift += math.log(big)
    return math.log(coeff[s]) + shift


def normalized_sigma(pv: PartitionVector, j: int) -> Fraction:
    """Symmetric mean S_j = sigma_j / binomial(k, j), exact rational."""
    _check_order(pv, j)
    return Fraction(sigma(pv, j), math.comb(pv.k, j))


def newton_gap(pv: PartitionVector, j: int) -> Fraction:
    """S_j^2 - S_{j-1} S_{j+1}, exact; nonnegative by Newton's inequality."""
    if not 1 <= j <= pv.k - 1:
        raise DomainError(f"newton gap needs 1 <= j <= k-1, got j={j}, k={pv.k}")
    gap = normalized_sigma(pv, j) ** 2 - normalized_sigma(pv, j - 1) * normalized_sigma(pv, j + 1)
    if gap < 0:
        raise AssertionError(f"Newton inequality violated for {pv.sizes}, j={j}: {gap}")
    return gap


def balance_constant(pv: PartitionVector) -> Fraction:
    """Smallest C with sum(1/n_i) <= C k^2 / n, i.e. n sum(1/n_i) / k^2.

    Equals 1 exactly when all parts have the same size and grows with
    imbalance.
    """
    return Fraction(pv.n) * pv.reciprocal_sum() / (pv.k ** 2)


@dataclass(frozen=True)
class SigmaRatioCheck:
    """Ratio sigma_s/sigma_r against its balance-driven upper bound."""

    ratio: float
    bound: float
    holds: bool


def sigma_ratio_check(pv: PartitionVector, s: int, r: int) -> SigmaRatioCheck:
    """Check sigma_s/sigma_r <= ([r]_{r-s} / [k-s]_{r-s}) (C k / n)^{r-s}.

    C is the minimal balance constant, so C k / n is exactly the mean of
    the reciprocal part sizes.  The comparison is done in exact rational
    arithmetic; the returned ratio and bound are floats for reporting.
    """
    if not 1 <= s <= r <= pv.k:
        raise DomainError(f"need 1 <= s <= r <= k, got s={s}, r={r}, k={pv.k}")
    ratio = Fraction(sigma(pv, s), sigma(pv, r))
    mean_recip = pv.reciprocal_sum() / pv.k  # equals C k / n
    bound = Fraction(falling_factorial(r, r - s), falling_factorial(pv.k - s, r - s))
    bound *= mean_recip ** (r - s)
    return SigmaRatioCheck(ratio=float(ratio), bound=float(bound), holds=ratio <= bound)
