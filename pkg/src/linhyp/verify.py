"""Built-in desk-scale grid and the cross-module invariant suite.

The grid spans r in {3, 4} with uniform instances up to n = 10 and a
fixed set of multipartite shapes, at edge counts up to 4.  Checks that
need an exhaustive census restrict themselves to instances whose subset
space stays below an enumeration cap.  Every check prints one line;
the suite passes only if all of them do.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement

from .asymptotics import estimate_partite
from .census import census_by_cluster, count_linear, count_linear_naive
from .hypergraphs import cluster_threshold
from .montecarlo import (
    draw_subset_ids,
    edge_subset_probability,
    estimate_linear_probability,
    expected_overlap_pairs,
    make_rng,
)
from .partitions import (
    PartitionVector,
    newton_gap,
    partition,
    sigma,
    sigma_ratio_check,
    uniform_partition,
)
from .switching import SeriesSpec, bijection_audit, series_sum_bounds

MULTIPARTITE_SHAPES = ((2, 2, 2), (3, 1, 2), (2, 2, 2, 2), (3, 3, 3))
MAX_UNIFORM_N = 10
MAX_GRID_M = 4
ENUMERATION_CAP = 10 ** 5


@dataclass(frozen=True)
class GridInstance:
    """One (partition, uniformity, edge count) cell of the built-in grid."""

    sizes: tuple[int, ...]
    r: int
    m: int

    @property
    def pv(self) -> PartitionVector:
        return PartitionVector(self.sizes)

    @property
    def label(self) -> str:
        return f"parts={','.join(str(s) for s in self.sizes)} r={self.r} m={self.m}"

    def subset_count(self) -> int:
        return math.comb(sigma(self.pv, self.r), self.m)


def grid_shapes(r: int) -> list[tuple[int, ...]]:
    shapes = [tuple([1] * n) for n in range(r, MAX_UNIFORM_N + 1)]
    shapes.extend(s for s in MULTIPARTITE_SHAPES if len(s) >= r)
    return shapes


def census_grid() -> list[GridInstance]:
    """Every grid cell, including those too large to census."""
    out = []
    for r in (3, 4):
        for sizes in grid_shapes(r):
            top = min(MAX_GRID_M, sigma(PartitionVector(sizes), r))
            for m in range(top + 1):
                out.append(GridInstance(sizes, r, m))
    return out


def enumerable_grid(cap: int = ENUMERATION_CAP) -> list[GridInstance]:
    """The grid cells whose full subset space fits under the cap."""
    return [g for g in census_grid() if g.subset_count() <= cap]


class _Suite:
    def __init__(self, emit):
        self.emit = emit
        self.failures = 0

    def check(self, name: str, ok: bool, detail: str = "") -> bool:
        mark = "pass" if ok else "FAIL"
        tail = f" ({detail})" if detail else ""
        self.emit(f"{mark}: {name}{tail}")
        if not ok:
            self.failures += 1
        return ok


def _check_census(suite: _Suite, workers: int) -> None:
    pinned = [
        ((2, 2, 2), 3, 2, 28, 16, {0: 16, 1: 12}, 0),
        (tuple([1] * 6), 3, 2, 190, 100, {0: 100, 1: 90}, 0),
    ]
    for sizes, r, m, total, linear, strata, not_plus in pinned:
        res = census_by_cluster(PartitionVector(sizes), r, m)
        ok = (
            res.total == total
            and res.linear == linear
            and res.by_cluster == strata
            and res.not_plus == not_plus
        )
        suite.check(f"census pinned on parts={sizes} r={r} m={m}", ok, str(res.by_cluster))

    mismatches = []
    for g in enumerable_grid():
        fast = count_linear(g.pv, g.r, g.m, workers=workers)
        slow = count_linear_naive(g.pv, g.r, g.m)
        if fast != slow:
            mismatches.append(f"{g.label}: {fast} != {slow}")
    suite.check(
        "pruned count_linear agrees with naive filter on the whole grid",
        not mismatches,
        "; ".join(mismatches[:3]),
    )


def _check_switchings(suite: _Suite) -> None:
    bad_sums = []
    bad_brackets = []
    soft_nonempty = []
    pinned_384 = None
    for g in enumerable_grid():
        rep = bijection_audit(g.pv, g.r, g.m)
        for t, c in rep.strata.items():
            if t >= 1 and c > 0 and g.m < 2 * t:
                soft_nonempty.append(f"{g.label} t={t}")
        for rec in rep.records:
            if not rec.matched:
                bad_sums.append(f"{g.label} t={rec.t}: {rec.sum_forward} != {rec.sum_reverse}")
            br = rec.brackets
            if rec.forward_measured is not None:
                lo, hi = rec.forward_measured
                if not (br.forward_low <= lo and hi <= br.forward_high):
                    bad_brackets.append(f"{g.label} t={rec.t} fwd {lo}..{hi}")
            if rec.reverse_measured is not None:
                lo, hi = rec.reverse_measured
                if not (br.reverse_low <= lo and hi <= br.reverse_high):
                    bad_brackets.append(f"{g.label} t={rec.t} rev {lo}..{hi}")
        if g.sizes == (2, 2, 2) and g.r == 3 and g.m == 2:
            pinned_384 = (rep.records[0].sum_forward, rep.records[0].sum_reverse)
    suite.check(
        "forward and reverse switching totals agree on every stratum pair",
        not bad_sums,
        "; ".join(bad_sums[:3]),
    )
    suite.check(
        "every measured move count lies inside its bracket",
        not bad_brackets,
        "; ".join(bad_brackets[:3]),
    )
    suite.check(
        "parts=2,2,2 r=3 m=2 switching totals equal 384",
        pinned_384 == (384, 384),
        str(pinned_384),
    )
    suite.check(
        "occupied strata satisfy m >= 2t",
        not soft_nonempty,
        "; ".join(soft_nonempty[:3]),
    )


def _check_inequalities(suite: _Suite) -> None:
    bad = []
    count = 0
    for k in range(1, 9):
        for sizes in combinations_with_replacement(range(1, 5), k):
            pv = partition(sizes)
            for j in range(1, k):
                if newton_gap(pv, j) < 0:
                    bad.append(f"newton {sizes} j={j}")
            for s in range(1, k + 1):
                for r in range(s, k + 1):
                    count += 1
                    if not sigma_ratio_check(pv, s, r).holds:
                        bad.append(f"ratio {sizes} s={s} r={r}")
    rng = make_rng(20240501)
    for _ in range(2000):
        k = int(rng.integers(2, 13))
        sizes = tuple(int(rng.integers(1, 30)) for _ in range(k))
        pv = partition(sizes)
        j = int(rng.integers(1, k))
        if newton_gap(pv, j) < 0:
            bad.append(f"newton fuzz {sizes} j={j}")
        s = int(rng.integers(1, k + 1))
        r = int(rng.integers(s, k + 1))
        if not sigma_ratio_check(pv, s, r).holds:
            bad.append(f"ratio fuzz {sizes} s={s} r={r}")
    suite.check(
        f"newton gaps and sigma ratio bounds hold ({count} exhaustive + fuzz)",
        not bad,
        "; ".join(bad[:3]),
    )


def _check_series(suite: _Suite) -> None:
    spec = SeriesSpec((1.0,) * 10, (0.0,) * 10, 0.1)
    res = series_sum_bounds(spec)
    tail = (2 * math.e / 10) ** 10
    ok = (
        abs(res.total - 2.7182818) < 1e-6
        and abs(res.lower - (math.e - tail)) < 1e-12
        and abs(res.upper - (math.e + tail)) < 1e-12
    )
    suite.check("factorial series reproduces e within its bounds", ok, f"sum={res.total:.9f}")

    rng = make_rng(20240502)
    bad = 0
    for _ in range(300):
        n = int(rng.integers(2, 16))
        c_hat = 0.02 + 0.30 * float(rng.random())
        a = tuple(float(rng.random()) * c_hat * n for _ in range(n))
        b = []
        for i in range(1, n + 1):
            cap = min(2.0, c_hat / a[i - 1] if a[i - 1] > 0 else 2.0)
            if i > 1:
                cap = min(cap, 1.0 / (i - 1))
            b.append(cap * (2.0 * float(rng.random()) - 1.0) if i > 1 else cap * float(rng.random()))
        try:
            out = series_sum_bounds(SeriesSpec(a, tuple(b), c_hat))
        except AssertionError:
            bad += 1
            continue
        slack = 1e-12 * max(1.0, abs(out.total))
        if not (out.lower <= out.total + slack and out.total <= out.upper + slack):
            bad += 1
    suite.check("fuzzed series specs stay inside their bounds", bad == 0, f"{bad} escapes")


def _check_sampling(suite: _Suite, workers: int) -> None:
    pinned = [
        ((2, 2, 2), Fraction(4, 7)),
        (tuple([1] * 6), Fraction(10, 19)),
    ]
    for sizes, truth in pinned:
        rep = estimate_linear_probability(
            PartitionVector(sizes), 3, 2, trials=10 ** 5, seed=42, workers=workers
        )
        ok = abs(rep.p_hat - float(truth)) <= 3 * rep.stderr
        suite.check(
            f"sampled linear probability near {truth} on parts={sizes}",
            ok,
            f"p_hat={rep.p_hat:.5f}",
        )

    bad = []
    for g in census_grid():
        if g.m < 1:
            continue
        total = sigma(g.pv, g.r)
        for t in range(g.m + 1):
            p = edge_subset_probability(g.pv, g.r, g.m, t)
            if p > Fraction(g.m, total) ** t:
                bad.append(f"{g.label} t={t}")
    suite.check("subset probabilities respect the power bound", not bad, "; ".join(bad[:3]))

    exp = expected_overlap_pairs(PartitionVector((2, 2, 2)), 3, 2)
    exp6 = expected_overlap_pairs(uniform_partition(6), 3, 2)
    suite.check(
        "expected linked pairs pinned (12 -> 3/7 and 90 -> 9/19)",
        (exp.linked_pair_count, exp.exact) == (12, Fraction(3, 7))
        and (exp6.linked_pair_count, exp6.exact) == (90, Fraction(9, 19)),
        f"{exp.exact}, {exp6.exact}",
    )
    rep = estimate_linear_probability(
        PartitionVector((2, 2, 2)), 3, 2, trials=10 ** 5, seed=7,
        workers=workers, track_overlaps=True,
    )
    p = float(exp.exact)
    spread = 4 * math.sqrt(p * (1 - p) / rep.trials)
    suite.check(
        "observed linked-pair mean matches its expectation",
        abs(rep.overlap_mean - p) <= spread,
        f"mean={rep.overlap_mean:.5f} expect={p:.5f}",
    )


def _check_subset_inclusion(suite: _Suite, trials: int) -> None:
    bad = []
    rng = make_rng(20240503)
    checked = 0
    for g in census_grid():
        if g.m < 1:
            continue
        total = sigma(g.pv, g.r)
        samples = [frozenset(c) for c in draw_subset_ids(g.pv, g.r, g.m, trials, seed=11)]
        for _ in range(10):
            t = int(rng.integers(1, g.m + 1))
            fixed = frozenset(int(x) for x in rng.choice(total, size=t, replace=False))
            hits = sum(1 for s in samples if fixed <= s)
            p = float(edge_subset_probability(g.pv, g.r, g.m, t))
            spread = 4 * math.sqrt(p * (1 - p) / trials)
            checked += 1
            if abs(hits / trials - p) > spread:
                bad.append(f"{g.label} t={t}: {hits / trials:.6f} vs {p:.6f}")
    suite.check(
        f"inclusion frequencies match exact probabilities ({checked} triples)",
        not bad,
        "; ".join(bad[:3]),
    )


def _check_estimates(suite: _Suite) -> None:
    bad = []
    for g in census_grid():
        if g.m > 1 or g.r > g.pv.k:
            continue
        est = estimate_partite(g.pv, g.r, g.m)
        exact = count_linear(g.pv, g.r, g.m)
        if est.correction_exact != 0:
            bad.append(f"{g.label}: correction {est.correction_exact}")
        elif not math.isclose(math.exp(est.log_value), exact, rel_tol=1e-9):
            bad.append(f"{g.label}: exp({est.log_value}) vs {exact}")
    suite.check("estimates are exact at m in {0, 1}", not bad, "; ".join(bad[:3]))


def run_verification(workers: int = 1, trials: int = 10 ** 4, emit=print) -> bool:
    """Run the whole invariant suite; True when every check passes."""
    suite = _Suite(emit)
    stages = [
        ("census", lambda: _check_census(suite, workers)),
        ("switchings", lambda: _check_switchings(suite)),
        ("inequalities", lambda: _check_inequalities(suite)),
        ("series", lambda: _check_series(suite)),
        ("sampling", lambda: _check_sampling(suite, workers)),
        ("subset inclusion", lambda: _check_subset_inclusion(suite, trials)),
        ("estimates", lambda: _check_estimates(suite)),
    ]
    start = time.perf_counter()
    for name, stage in stages:
        t0 = time.perf_counter()
        stage()
        emit(f"[{name} stage took {time.perf_counter() - t0:.1f}s]")
    emit(
        f"{'all checks passed' if suite.failures == 0 else f'{suite.failures} checks failed'}"
        f" in {time.perf_counter() - start:.1f}s"
    )
    return suite.failures == 0
