"""Uniform sampling of edge sets and the linearity hit-rate estimator.

Single edges are drawn exactly uniformly by unranking a uniform index
through the part-suffix product counts, so part subsets come out with
probability proportional to the product of their part sizes.  Trials
are grouped into fixed-size blocks keyed (seed, block) on a counter
RNG, which makes every report reproducible for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .census import EdgeSpaceIndex
from .errors import DomainError
from .hypergraphs import Hypergraph, cluster_threshold, make_edge
from .partitions import PartitionVector, falling_factorial, sigma

BLOCK_TRIALS = 4096


def make_rng(seed: int, lane: int = 0) -> np.random.Generator:
    """Counter-based generator for one lane of a seeded experiment."""
    if seed < 0 or lane < 0:
        raise DomainError("seed and lane must be nonnegative")
    return np.random.Generator(np.random.Philox(key=[seed & (2 ** 64 - 1), lane]))


def _randbelow(rng: np.random.Generator, bound: int) -> int:
    if bound <= 0:
        raise DomainError(f"bound must be positive, got {bound}")
    if bound < 2 ** 63:
        return int(rng.integers(0, bound))
    nbits = bound.bit_length()
    nbytes = (nbits + 7) // 8
    while True:
        value = int.from_bytes(rng.bytes(nbytes), "big") >> (8 * nbytes - nbits)
        if value < bound:
            return value


class EdgeSampler:
    """Exact uniform draws from the edge space of one instance."""

    def __init__(self, pv: PartitionVector, r: int):
        if not 1 <= r <= pv.k:
            raise DomainError(f"need 1 <= r <= k, got r={r}, k={pv.k}")
        self.pv = pv
        self.r = r
        # suffix[i][j] = weighted count of j-part choices among parts i..k-1
        suffix = [[0] * (r + 1) for _ in range(pv.k + 1)]
        suffix[pv.k][0] = 1
        for i in range(pv.k - 1, -1, -1):
            suffix[i][0] = 1
            for j in range(1, r + 1):
                suffix[i][j] = suffix[i + 1][j] + pv.sizes[i] * suffix[i + 1][j - 1]
        self.suffix = suffix
        self.total = suffix[0][r]

    def unrank(self, idx: int) -> tuple[int, ...]:
        """Vertex tuple of the idx-th edge in the canonical order."""
        if not 0 <= idx < self.total:
            raise DomainError(f"index {idx} outside [0, {self.total})")
        verts = []
        i, j = 0, self.r
        while j > 0:
            used = self.pv.sizes[i] * self.suffix[i + 1][j - 1]
            if idx < used:
                local, idx = divmod(idx, self.suffix[i + 1][j - 1])
                verts.append(self.pv.part_vertices(i)[local])
                j -= 1
            else:
                idx -= used
            i += 1
        return tuple(verts)

    def draw(self, rng: np.random.Generator) -> tuple[int, ...]:
        return self.unrank(_randbelow(rng, self.total))


def sample_hypergraph(
    pv: PartitionVector, r: int, m: int, rng: np.random.Generator
) -> Hypergraph:
    """One uniform m-subset of the edge space, as a hypergraph."""
    sampler = EdgeSampler(pv, r)
    if not 0 <= m <= sampler.total:
        raise DomainError(f"need 0 <= m <= {sampler.total}, got {m}")
    chosen: set[tuple[int, ...]] = set()
    while len(chosen) < m:
        chosen.add(sampler.draw(rng))
    return Hypergraph(pv, r, frozenset(make_edge(pv, v) for v in chosen))


def cluster_signature(vertex_sets: list[tuple[int, ...]]) -> tuple[int, str | None]:
    """(cluster count, violation reason) by direct pairwise overlap.

    Standalone re-derivation used to cross-check the indexed classifier.
    """
    m = len(vertex_sets)
    sets = [set(v) for v in vertex_sets]
    parent = list(range(m))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    linked = 0
    for i, j in combinations(range(m), 2):
        shared = len(sets[i] & sets[j])
        if shared >= 3:
            return 0, "overlap_ge3"
        if shared == 2:
            linked += 1
            parent[find(i)] = find(j)
    comp_size: dict[int, int] = {}
    for i in range(m):
        root = find(i)
        comp_size[root] = comp_size.get(root, 0) + 1
    if any(size > 2 for size in comp_size.values()):
        return 0, "cluster_gt2_edges"
    clusters = sum(1 for size in comp_size.values() if size == 2)
    if clusters != linked:
        return 0, "cluster_gt2_edges"
    return clusters, None


@dataclass(frozen=True)
class SampleReport:
    """Outcome tallies of a seeded sampling experiment."""

    sizes: tuple[int, ...]
    r: int
    m: int
    trials: int
    seed: int
    hits: int
    cluster_histogram: dict[int, int]
    violation_counts: dict[str, int]
    overlap_total: int | None = None

    @property
    def p_hat(self) -> float:
        return self.hits / self.trials

    @property
    def stderr(self) -> float:
        p = self.p_hat
        return math.sqrt(p * (1.0 - p) / self.trials)

    @property
    def overlap_mean(self) -> float | None:
        if self.overlap_total is None:
            return None
        return self.overlap_total / self.trials

    def to_json_dict(self) -> dict:
        out = {
            "parts": list(self.sizes),
            "r": self.r,
            "m": self.m,
            "trials": str(self.trials),
            "seed": self.seed,
            "hits": str(self.hits),
            "p_hat": self.p_hat,
            "stderr": self.stderr,
            "cluster_histogram": {str(t): str(c) for t, c in sorted(self.cluster_histogram.items())},
            "violation_counts": {k: str(v) for k, v in sorted(self.violation_counts.items())},
        }
        if self.overlap_total is not None:
            out["overlap_total"] = str(self.overlap_total)
            out["overlap_mean"] = self.overlap_mean
        return out


def _run_block(
    index: EdgeSpaceIndex,
    m: int,
    cap: int,
    seed: int,
    block: int,
    trials: int,
    track_overlaps: bool,
) -> tuple[int, dict[int, int], dict[str, int], int]:
    rng = make_rng(seed, block)
    total = index.count
    hits = 0
    hist: dict[int, int] = {}
    viol: dict[str, int] = {}
    overlap = 0
    cat = index.cat if track_overlaps else None
    for _ in range(trials):
        chosen: set[int] = set()
        while len(chosen) < m:
            chosen.add(_randbelow(rng, total))
        combo = tuple(sorted(chosen))
        t, reason, _, _ = index.classify_combo(combo, cap)
        if reason is None:
            hist[t] = hist.get(t, 0) + 1
            if t == 0:
                hits += 1
        else:
            viol[reason] = viol.get(reason, 0) + 1
        if cat is not None:
            for i, j in combinations(combo, 2):
                if cat[i][j]:
                    overlap += 1
    return hits, hist, viol, overlap


def estimate_linear_probability(
    pv: PartitionVector,
    r: int,
    m: int,
    trials: int,
    seed: int = 0,
    workers: int = 1,
    cluster_cap: int | None = None,
    track_overlaps: bool = False,
) -> SampleReport:
    """Hit-rate estimate of the linearity probability at m uniform edges.

    Also tallies the cluster histogram of the plus samples and the
    violation reasons of the rest; optionally the number of edge pairs
    sharing two or more vertices, for the overlap-expectation check.
    """
    if trials < 1:
        raise DomainError(f"need at least one trial, got {trials}")
    if workers < 1:
        raise DomainError(f"need workers >= 1, got {workers}")
    index = EdgeSpaceIndex(pv, r)
    if not 0 <= m <= index.count:
        raise DomainError(f"need 0 <= m <= {index.count}, got m={m}")
    cap = cluster_threshold(pv, r, m) if cluster_cap is None else cluster_cap
    blocks = [
        (b, min(BLOCK_TRIALS, trials - b * BLOCK_TRIALS))
        for b in range((trials + BLOCK_TRIALS - 1) // BLOCK_TRIALS)
    ]
    if workers == 1:
        results = [
            _run_block(index, m, cap, seed, b, size, track_overlaps) for b, size in blocks
        ]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(
                    lambda job: _run_block(index, m, cap, seed, job[0], job[1], track_overlaps),
                    blocks,
                )
            )
    hits = 0
    hist: dict[int, int] = {}
    viol: dict[str, int] = {}
    overlap = 0
    for bh, bhist, bviol, bover in results:
        hits += bh
        for t, c in bhist.items():
            hist[t] = hist.get(t, 0) + c
        for k, c in bviol.items():
            viol[k] = viol.get(k, 0) + c
        overlap += bover
    return SampleReport(
        sizes=pv.sizes,
        r=r,
        m=m,
        trials=trials,
        seed=seed,
        hits=hits,
        cluster_histogram=hist,
        violation_counts=viol,
        overlap_total=overlap if track_overlaps else None,
    )


def draw_subset_ids(
    pv: PartitionVector, r: int, m: int, trials: int, seed: int = 0
) -> list[tuple[int, ...]]:
    """Raw uniform m-subsets as sorted edge-index tuples, one per trial.

    Same block layout as estimate_linear_probability, so a seed pins
    the exact draws here too.
    """
    sampler = EdgeSampler(pv, r)
    if not 0 <= m <= sampler.total:
        raise DomainError(f"need 0 <= m <= {sampler.total}, got {m}")
    if trials < 1:
        raise DomainError(f"need at least one trial, got {trials}")
    out: list[tuple[int, ...]] = []
    for block in range((trials + BLOCK_TRIALS - 1) // BLOCK_TRIALS):
        rng = make_rng(seed, block)
        for _ in range(min(BLOCK_TRIALS, trials - block * BLOCK_TRIALS)):
            chosen: set[int] = set()
            while len(chosen) < m:
                chosen.add(_randbelow(rng, sampler.total))
            out.append(tuple(sorted(chosen)))
    return out


def edge_subset_probability(pv: PartitionVector, r: int, m: int, t: int) -> Fraction:
    """P(t fixed distinct edges all land in a uniform m-subset)."""
    total = sigma(pv, r)
    if not 0 <= t <= m <= total:
        raise DomainError(f"need 0 <= t <= m <= {total}, got t={t}, m={m}")
    return Fraction(falling_factorial(m, t), falling_factorial(total, t))


def linked_pair_count(pv: PartitionVector, r: int) -> int:
    """Unordered pairs of distinct edges sharing at least two vertices.

    Computed from vertex-subset occupancies by inclusion-exclusion over
    the exact shared-subset size, never by scanning edge pairs.
    """
    if not 2 <= r <= pv.k:
        raise DomainError(f"need 2 <= r <= k, got r={r}, k={pv.k}")
    index = EdgeSpaceIndex(pv, r)
    t_counts: dict[int, int] = {}
    for alpha in range(2, r + 1):
        occupancy: dict[int, int] = {}
        if alpha == r:
            t_counts[alpha] = 0  # distinct edges never share all r vertices
            continue
        for row in index.subset_ids[alpha]:
            for sid in row:
                occupancy[sid] = occupancy.get(sid, 0) + 1
        t_counts[alpha] = sum(math.comb(c, 2) for c in occupancy.values())
    total = 0
    for j in range(2, r + 1):
        total += sum(
            (-1) ** (alpha - j) * math.comb(alpha, j) * t_counts[alpha]
            for alpha in range(j, r + 1)
        )
    return total


@dataclass(frozen=True)
class OverlapExpectation:
    """Exact expected number of linked pairs in a uniform m-subset."""

    linked_pair_count: int
    exact: Fraction


def expected_overlap_pairs(pv: PartitionVector, r: int, m: int) -> OverlapExpectation:
    """Linked pairs in the edge space and their expected hit count at m."""
    total = sigma(pv, r)
    if not 0 <= m <= total:
        raise DomainError(f"need 0 <= m <= {total}, got {m}")
    pairs = linked_pair_count(pv, r)
    if m < 2:
        return OverlapExpectation(pairs, Fraction(0))
    return OverlapExpectation(
        pairs, pairs * Fraction(falling_factorial(m, 2), falling_factorial(total, 2))
    )
