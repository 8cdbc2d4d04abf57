"""Switchings between cluster strata, their counts, and series bounds.

A forward move removes one two-edge cluster and appends two edges that
are link-free against everything kept; a reverse move removes an ordered
pair of link-free edges and inserts an unordered pair overlapping in
exactly two vertices.  The two move sets biject, which bijection_audit
verifies by aggregate counting with both sides computed independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, NamedTuple

from .census import DEFAULT_WORK_CEILING, EdgeSpaceIndex, _guard
from .errors import DomainError
from .hypergraphs import (
    Classification,
    Edge,
    Hypergraph,
    classify,
    cluster_threshold,
    decompose,
    edge_space,
    make_edge,
)
from .partitions import PartitionVector, falling_factorial, sigma


class ForwardMove(NamedTuple):
    """Cluster to delete (unordered) and ordered replacement pair."""

    cluster: frozenset[Edge]
    replacement: tuple[Edge, Edge]


class ReverseMove(NamedTuple):
    """Ordered pair of link-free edges to delete and cluster to insert."""

    removed: tuple[Edge, Edge]
    inserted: frozenset[Edge]


def _overlap(a: Edge, b: Edge) -> int:
    return len(set(a.vertices) & set(b.vertices))


def _classified(h: Hypergraph) -> Classification:
    cap = cluster_threshold(h.pv, h.r, h.m)
    cls = classify(h, cap)
    if not cls.in_plus:
        raise DomainError(f"hypergraph is not plus-classified ({cls.reason})")
    return cls


def enumerate_forward(h: Hypergraph) -> list[ForwardMove]:
    """All forward moves available from a plus hypergraph with clusters."""
    cls = _classified(h)
    if cls.clusters == 0:
        raise DomainError("no cluster to switch away")
    dec = decompose(h)
    pool = list(edge_space(h.pv, h.r))
    moves: list[ForwardMove] = []
    for ci in range(len(dec.clusters)):
        pair = dec.cluster_edges(ci)
        kept = [e for e in dec.edge_order if e not in pair]
        stage1 = [x for x in pool if all(_overlap(x, g) <= 1 for g in kept)]
        for e1 in stage1:
            for e2 in stage1:
                if e2 != e1 and _overlap(e1, e2) <= 1:
                    moves.append(ForwardMove(frozenset(pair), (e1, e2)))
    return moves


def apply_forward(h: Hypergraph, move: ForwardMove) -> Hypergraph:
    """Perform one forward move, validating every constraint."""
    if len(move.cluster) != 2:
        raise DomainError("a cluster holds exactly two edges")
    e, f = sorted(move.cluster, key=lambda x: x.vertices)
    if e not in h.edges or f not in h.edges:
        raise DomainError("cluster edges not in the hypergraph")
    if _overlap(e, f) != 2:
        raise DomainError("cluster edges must share exactly two vertices")
    kept = [g for g in h.edges if g not in (e, f)]
    for g in kept:
        if _overlap(e, g) >= 2 or _overlap(f, g) >= 2:
            raise DomainError("selected pair is not a whole cluster")
    e1, e2 = move.replacement
    for x in (e1, e2):
        if len(x.vertices) != h.r:
            raise DomainError(f"replacement edge {x.vertices} has the wrong size")
    if any(_overlap(e1, g) >= 2 for g in kept):
        raise DomainError("first replacement edge shares a link with a kept edge")
    if any(_overlap(e2, g) >= 2 for g in kept) or _overlap(e2, e1) >= 2 or e1 == e2:
        raise DomainError("second replacement edge shares a link")
    out = Hypergraph(h.pv, h.r, frozenset(kept) | {e1, e2})
    cls = _classified(out)
    if cls.clusters != len(decompose(h).clusters) - 1:
        raise AssertionError("forward move did not lower the cluster count by one")
    return out


def enumerate_reverse(h: Hypergraph) -> list[ReverseMove]:
    """All reverse moves available from a plus hypergraph."""
    _classified(h)
    dec = decompose(h)
    clustered = set()
    for comp in dec.clusters:
        clustered |= comp
    free = [dec.edge_order[i] for i in range(h.m) if i not in clustered]
    pool = list(edge_space(h.pv, h.r))
    moves: list[ReverseMove] = []
    for e1 in free:
        for e2 in free:
            if e1 == e2:
                continue
            kept = [g for g in dec.edge_order if g not in (e1, e2)]
            stage = [x for x in pool if all(_overlap(x, g) <= 1 for g in kept)]
            for i, j in combinations(range(len(stage)), 2):
                if _overlap(stage[i], stage[j]) == 2:
                    moves.append(ReverseMove((e1, e2), frozenset({stage[i], stage[j]})))
    return moves


def apply_reverse(h: Hypergraph, move: ReverseMove) -> Hypergraph:
    """Perform one reverse move, validating every constraint."""
    e1, e2 = move.removed
    if e1 == e2 or e1 not in h.edges or e2 not in h.edges:
        raise DomainError("removed edges must be two distinct members")
    for x in (e1, e2):
        if any(_overlap(x, g) >= 2 for g in h.edges if g != x):
            raise DomainError("removed edges must be link-free")
    kept = [g for g in h.edges if g not in (e1, e2)]
    if len(move.inserted) != 2:
        raise DomainError("the inserted pair holds exactly two edges")
    e, f = sorted(move.inserted, key=lambda x: x.vertices)
    if e == f or _overlap(e, f) != 2:
        raise DomainError("inserted pair must share exactly two vertices")
    for x in (e, f):
        if len(x.vertices) != h.r:
            raise DomainError(f"inserted edge {x.vertices} has the wrong size")
        if any(_overlap(x, g) >= 2 for g in kept):
            raise DomainError("inserted edge shares a link with a kept edge")
    out = Hypergraph(h.pv, h.r, frozenset(kept) | {e, f})
    cls = _classified(out)
    if cls.clusters != len(decompose(h).clusters) + 1:
        raise AssertionError("reverse move did not raise the cluster count by one")
    return out


def _index_ids(index: EdgeSpaceIndex, h: Hypergraph) -> tuple[int, ...]:
    try:
        return tuple(sorted(index.position[e.vertices] for e in h.edges))
    except KeyError as exc:
        raise DomainError(f"edge {exc.args[0]} outside the edge space") from exc


def count_forward_moves(h: Hypergraph, index: EdgeSpaceIndex | None = None) -> int:
    """|forward moves| without materializing them (cross-checked in tests)."""
    index = index or EdgeSpaceIndex(h.pv, h.r)
    cap = cluster_threshold(h.pv, h.r, h.m)
    ids = _index_ids(index, h)
    t, reason, clusters, _ = index.classify_combo(ids, cap)
    if reason is not None:
        raise DomainError(f"hypergraph is not plus-classified ({reason})")
    if t == 0:
        raise DomainError("no cluster to switch away")
    total = 0
    for a, b in clusters:
        h0 = tuple(i for i in ids if i != a and i != b)
        size, n_ge2, _ = index.compat_stats(h0)
        total += size * (size - 1) - 2 * n_ge2
    return total


def count_reverse_moves(h: Hypergraph, index: EdgeSpaceIndex | None = None) -> int:
    """|reverse moves| without materializing them (cross-checked in tests)."""
    index = index or EdgeSpaceIndex(h.pv, h.r)
    cap = cluster_threshold(h.pv, h.r, h.m)
    ids = _index_ids(index, h)
    _, reason, _, free = index.classify_combo(ids, cap)
    if reason is not None:
        raise DomainError(f"hypergraph is not plus-classified ({reason})")
    total = 0
    for g1, g2 in combinations(free, 2):
        h0 = tuple(i for i in ids if i != g1 and i != g2)
        _, _, n_eq2 = index.compat_stats(h0)
        total += 2 * n_eq2
    return total


@dataclass(frozen=True)
class CountBrackets:
    """Exact lower and upper brackets for the per-hypergraph move counts."""

    forward_low: Fraction
    forward_high: Fraction
    reverse_low: Fraction
    reverse_high: Fraction


def count_brackets(pv: PartitionVector, r: int, m: int, t: int) -> CountBrackets:
    """Brackets for |forward moves| on stratum t and |reverse moves| below.

    The upper brackets are the plain product counts; the lower brackets
    subtract the explicit overcount bounds (linked candidates against
    kept edges, inserted pairs overlapping in three or more vertices,
    inserted edges sharing a link with a kept edge).
    """
    if not 3 <= r <= pv.k:
        raise DomainError(f"need 3 <= r <= k, got r={r}, k={pv.k}")
    if t < 1 or m < 2 * t:
        raise DomainError(f"stratum t={t} needs m >= 2t, got m={m}")

    def sig(s: int) -> int:
        return sigma(pv, s) if s >= 0 else 0

    s_r, s_1, s_2 = sig(r), sig(1), sig(2)
    s_rm2, s_rm3, s_rm4 = sig(r - 2), sig(r - 3), sig(r - 4)
    pair_per_edge = math.comb(r, 2)

    fwd_hi = Fraction(t * s_r * s_r)
    first = max(0, s_r - pair_per_edge * (m - 2) * s_rm2)
    second = max(0, s_r - 1 - pair_per_edge * (m - 1) * s_rm2)
    fwd_lo = Fraction(t * first * second)

    removals = 2 * math.comb(m - 2 * (t - 1), 2)
    insert_hi = Fraction(s_2 * s_rm2 * s_rm2, 2)
    overcount = (
        Fraction(r, 2) * s_2 * s_rm2 * s_rm3
        + m * r * r * (s_rm2 * s_rm2 + s_1 * s_rm3 * s_rm2 + s_2 * s_rm4 * s_rm2)
    )
    rev_hi = removals * insert_hi
    rev_lo = max(Fraction(0), removals * (insert_hi - overcount))
    return CountBrackets(fwd_lo, fwd_hi, rev_lo, rev_hi)


@dataclass(frozen=True)
class AuditStratum:
    """One row of the switching audit, pairing stratum t with t-1."""

    t: int
    count_t: int
    count_prev: int
    sum_forward: int
    sum_reverse: int
    matched: bool
    ratio_exact: Fraction | None
    ratio_formula: Fraction
    forward_measured: tuple[int, int] | None
    reverse_measured: tuple[int, int] | None
    brackets: CountBrackets

    def to_json_dict(self) -> dict:
        return {
            "t": self.t,
            "count_t": str(self.count_t),
            "count_prev": str(self.count_prev),
            "sum_forward": str(self.sum_forward),
            "sum_reverse": str(self.sum_reverse),
            "matched": self.matched,
            "ratio_exact": None if self.ratio_exact is None else str(self.ratio_exact),
            "ratio_formula": str(self.ratio_formula),
            "forward_measured": self.forward_measured,
            "reverse_measured": self.reverse_measured,
            "forward_bracket": [str(self.brackets.forward_low), str(self.brackets.forward_high)],
            "reverse_bracket": [str(self.brackets.reverse_low), str(self.brackets.reverse_high)],
        }


@dataclass(frozen=True)
class AuditReport:
    """Aggregate switching audit over every m-subset of one instance."""

    sizes: tuple[int, ...]
    r: int
    m: int
    cluster_cap: int
    strata: dict[int, int]
    not_plus: int
    records: tuple[AuditStratum, ...]

    @property
    def all_matched(self) -> bool:
        return all(rec.matched for rec in self.records)

    def to_json_dict(self) -> dict:
        return {
            "parts": list(self.sizes),
            "r": self.r,
            "m": self.m,
            "cluster_cap": str(self.cluster_cap),
            "strata": {str(t): str(c) for t, c in sorted(self.strata.items())},
            "not_plus": str(self.not_plus),
            "all_matched": self.all_matched,
            "records": [rec.to_json_dict() for rec in self.records],
        }


def bijection_audit(
    pv: PartitionVector,
    r: int,
    m: int,
    work_ceiling: int = DEFAULT_WORK_CEILING,
) -> AuditReport:
    """Count both move sets independently over the whole subset space.

    For every plus hypergraph the forward moves are counted per cluster
    and the reverse moves per link-free pair; the audit then reports,
    per stratum t, the forward total from stratum t against the reverse
    total from stratum t-1, which an exact bijection forces to agree.
    """
    _guard(pv, r, m, work_ceiling)
    cap = cluster_threshold(pv, r, m)
    index = EdgeSpaceIndex(pv, r)
    counts: dict[int, int] = {}
    not_plus = 0
    fwd_sum: dict[int, int] = {}
    rev_sum: dict[int, int] = {}
    fwd_range: dict[int, tuple[int, int]] = {}
    rev_range: dict[int, tuple[int, int]] = {}
    stats_memo: dict[tuple[int, ...], tuple[int, int, int]] = {}

    def stats(h0: tuple[int, ...]) -> tuple[int, int, int]:
        got = stats_memo.get(h0)
        if got is None:
            got = index.compat_stats(h0)
            stats_memo[h0] = got
        return got

    for combo in combinations(range(index.count), m):
        t, reason, clusters, free = index.classify_combo(combo, cap)
        if reason is not None:
            not_plus += 1
            continue
        counts[t] = counts.get(t, 0) + 1
        if t >= 1:
            fwd = 0
            for a, b in clusters:
                h0 = tuple(i for i in combo if i != a and i != b)
                size, n_ge2, _ = stats(h0)
                fwd += size * (size - 1) - 2 * n_ge2
            fwd_sum[t] = fwd_sum.get(t, 0) + fwd
            lo, hi = fwd_range.get(t, (fwd, fwd))
            fwd_range[t] = (min(lo, fwd), max(hi, fwd))
        rev = 0
        for g1, g2 in combinations(free, 2):
            h0 = tuple(i for i in combo if i != g1 and i != g2)
            _, _, n_eq2 = stats(h0)
            rev += 2 * n_eq2
        rev_sum[t] = rev_sum.get(t, 0) + rev
        lo, hi = rev_range.get(t, (rev, rev))
        rev_range[t] = (min(lo, rev), max(hi, rev))

    s_2, s_rm2, s_r = sigma(pv, 2), sigma(pv, r - 2), sigma(pv, r)
    records = []
    for t in range(1, m // 2 + 1):
        count_t = counts.get(t, 0)
        count_prev = counts.get(t - 1, 0)
        sum_fwd = fwd_sum.get(t, 0)
        sum_rev = rev_sum.get(t - 1, 0)
        formula = Fraction(
            math.comb(m - 2 * (t - 1), 2) * s_2 * s_rm2 * s_rm2,
            t * s_r * s_r,
        )
        records.append(
            AuditStratum(
                t=t,
                count_t=count_t,
                count_prev=count_prev,
                sum_forward=sum_fwd,
                sum_reverse=sum_rev,
                matched=sum_fwd == sum_rev,
                ratio_exact=Fraction(count_t, count_prev) if count_prev else None,
                ratio_formula=formula,
                forward_measured=fwd_range.get(t),
                reverse_measured=rev_range.get(t - 1),
                brackets=count_brackets(pv, r, m, t),
            )
        )
    return AuditReport(
        sizes=pv.sizes,
        r=r,
        m=m,
        cluster_cap=cap,
        strata=counts,
        not_plus=not_plus,
        records=tuple(records),
    )


@dataclass(frozen=True)
class SeriesSpec:
    """Term-ratio data for the bounded series: A(i), B(i) for i = 1..N."""

    a: tuple[float, ...]
    b: tuple[float, ...]
    c_hat: float

    @property
    def n_terms(self) -> int:
        return len(self.a)


@dataclass(frozen=True)
class SeriesBounds:
    """Terms, their sum, and the closed-form enclosure of the sum."""

    h: tuple[float, ...]
    total: float
    lower: float
    upper: float


def _series_terms(a: Iterable[float], b: Iterable[float]) -> list[float]:
    h = [1.0]
    for i, (ai, bi) in enumerate(zip(a, b), start=1):
        h.append(h[-1] * (ai / i) * (1.0 - (i - 1) * bi))
    return h


def series_sum_bounds(spec: SeriesSpec) -> SeriesBounds:
    """Sum h_0..h_N from the term ratios and enclose it in closed form.

    h_0 = 1 and h_i / h_{i-1} = (A(i)/i)(1 - (i-1)B(i)); once a term
    hits zero everything after stays zero.  Requires A(i) >= 0, the
    bracket factors nonnegative, and max(A_max/N, |AB|) <= c_hat < 1/3;
    then the sum lies between
    exp(A_min - A_min C_max / 2) - (2 e c_hat)^N and
    exp(A_max - A_max C_min / 2 + A_max C_min^2 / 2) + (2 e c_hat)^N.
    """
    n = spec.n_terms
    if n < 2:
        raise DomainError(f"need at least 2 terms, got {n}")
    if len(spec.b) != n:
        raise DomainError("A and B sequences must have equal length")
    if not 0 < spec.c_hat < 1.0 / 3.0:
        raise DomainError(f"need 0 < c_hat < 1/3, got {spec.c_hat}")
    for i, (ai, bi) in enumerate(zip(spec.a, spec.b), start=1):
        if ai < 0:
            raise DomainError(f"A({i}) = {ai} is negative")
        if 1.0 - (i - 1) * bi < 0:
            raise DomainError(f"term factor 1-(i-1)B(i) negative at i={i}")
    a_min, a_max = min(spec.a), max(spec.a)
    products = [ai * bi for ai, bi in zip(spec.a, spec.b)]
    c_min, c_max = min(products), max(products)
    worst = max(a_max / n, abs(c_min), abs(c_max))
    if worst > spec.c_hat:
        raise DomainError(f"need max(A/N, |AB|) <= c_hat, got {worst} > {spec.c_hat}")
    h = _series_terms(spec.a, spec.b)
    total = math.fsum(h)
    tail = (2 * math.e * spec.c_hat) ** n
    lower = math.exp(a_min - a_min * c_max / 2) - tail
    upper = math.exp(a_max - a_max * c_min / 2 + a_max * c_min * c_min / 2) + tail
    slack = 1e-12 * max(1.0, abs(total))
    if not (lower <= total + slack and total <= upper + slack):
        raise AssertionError(f"series sum {total} escaped [{lower}, {upper}]")
    return SeriesBounds(h=tuple(h), total=total, lower=lower, upper=upper)


@dataclass(frozen=True)
class RatioSeriesReport:
    """Model of sum_t |stratum t| / |stratum 0| with optional exact check."""

    a_value: float
    shift: float
    n_terms: int
    t_prime: int
    c_hat: float
    model_sum: float
    h_prefix: tuple[float, ...]
    lower: float | None
    upper: float | None
    applicability: tuple[str, ...]
    exact_sum: Fraction | None
    exact_gap: float | None

    def to_json_dict(self) -> dict:
        return {
            "a_value": self.a_value,
            "shift": self.shift,
            "n_terms": self.n_terms,
            "t_prime": self.t_prime,
            "c_hat": self.c_hat,
            "model_sum": self.model_sum,
            "h_prefix": list(self.h_prefix),
            "lower": self.lower,
            "upper": self.upper,
            "applicability": list(self.applicability),
            "exact_sum": None if self.exact_sum is None else str(self.exact_sum),
            "exact_gap": self.exact_gap,
        }


RATIO_C_HAT = 1.0 / 110.0


def ratio_series(
    pv: PartitionVector,
    r: int,
    m: int,
    t_prime: int | None = None,
    budget_constant: float = 1.0,
    with_census: bool = False,
    work_ceiling: int = DEFAULT_WORK_CEILING,
) -> RatioSeriesReport:
    """Build the stratum-ratio series and, when possible, its enclosure.

    The term ratio uses A(t) = sigma_2 sigma_{r-2}^2 [m]_2 / (2 sigma_r^2)
    with a symmetric uncertainty of budget_constant * (m^2/n^3 + m^3/n^4),
    and B(t) = 2(2m-2t+1)/(m(m-1)) below the cutoff t_prime, 1/(t-1) at
    and above it.  The cutoff defaults to the smallest t whose stratum
    must be empty (2t > m); with_census replaces it by the first stratum
    the exact census finds empty and records the exact ratio sum.
    """
    if not 3 <= r <= pv.k:
        raise DomainError(f"need 3 <= r <= k, got r={r}, k={pv.k}")
    if m < 0:
        raise DomainError(f"need m >= 0, got {m}")
    applicability: list[str] = []
    exact_sum: Fraction | None = None
    census = None
    if with_census:
        from .census import census_by_cluster

        census = census_by_cluster(pv, r, m, work_ceiling=work_ceiling)
        if census.linear > 0:
            exact_sum = Fraction(sum(census.by_cluster.values()), census.linear)
        else:
            applicability.append("no linear hypergraphs; exact ratio undefined")
        if t_prime is None:
            t = 1
            while census.by_cluster.get(t, 0) > 0:
                t += 1
            t_prime = t
    if m < 2:
        return RatioSeriesReport(
            a_value=0.0,
            shift=0.0,
            n_terms=0,
            t_prime=1,
            c_hat=RATIO_C_HAT,
            model_sum=1.0,
            h_prefix=(1.0,),
            lower=1.0,
            upper=1.0,
            applicability=tuple(applicability),
            exact_sum=exact_sum,
            exact_gap=None if exact_sum is None else 1.0 - float(exact_sum),
        )
    if t_prime is None:
        t_prime = m // 2 + 1
    if t_prime < 1:
        raise DomainError(f"cutoff t_prime must be >= 1, got {t_prime}")

    n_terms = cluster_threshold(pv, r, m)
    s_r = sigma(pv, r)
    a_exact = Fraction(
        sigma(pv, 2) * sigma(pv, r - 2) ** 2 * falling_factorial(m, 2),
        2 * s_r * s_r,
    )
    a_value = float(a_exact)
    n = pv.n
    shift = budget_constant * (m * m / n ** 3 + m ** 3 / n ** 4)

    def b_of(t: int) -> float:
        if t < t_prime:
            return 2.0 * (2 * m - 2 * t + 1) / (m * (m - 1))
        return 1.0 / (t - 1)

    b_seq = tuple(b_of(t) for t in range(1, n_terms + 1)) if t_prime >= 2 else None
    if t_prime < 2:
        applicability.append("stratum 1 already empty; term-ratio cutoff not expressible")
        h = [1.0] + [0.0] * n_terms
    else:
        h = _series_terms((a_value,) * n_terms, b_seq)
        for t in range(t_prime, n_terms + 1):
            h[t] = 0.0
    model_sum = math.fsum(h)
    prefix_len = min(len(h), t_prime + 1)
    lower = upper = None
    if b_seq is not None:
        a_lo = max(0.0, a_value - shift)
        a_hi = a_value + shift
        try:
            low_bounds = series_sum_bounds(SeriesSpec((a_lo,) * n_terms, b_seq, RATIO_C_HAT))
            high_bounds = series_sum_bounds(SeriesSpec((a_hi,) * n_terms, b_seq, RATIO_C_HAT))
            lower, upper = low_bounds.lower, high_bounds.upper
        except DomainError as exc:
            applicability.append(str(exc))
    return RatioSeriesReport(
        a_value=a_value,
        shift=shift,
        n_terms=n_terms,
        t_prime=t_prime,
        c_hat=RATIO_C_HAT,
        model_sum=model_sum,
        h_prefix=tuple(h[:prefix_len]),
        lower=lower,
        upper=upper,
        applicability=tuple(applicability),
        exact_sum=exact_sum,
        exact_gap=None if exact_sum is None else model_sum - float(exact_sum),
    )
