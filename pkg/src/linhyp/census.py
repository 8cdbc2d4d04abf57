"""Exact censuses of the edge-subset space.

count_linear walks a canonical-order search tree with vertex-pair
occupancy pruning; count_linear_naive filters every subset and exists to
cross-check it.  census_by_cluster classifies every m-subset into the
plus strata by cluster count.  All counts are exact integers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import DomainError, WorkCeilingError
from .hypergraphs import CLUSTER_GT2_EDGES, OVERLAP_GE3, TOO_MANY_CLUSTERS, cluster_threshold, edge_space
from .partitions import PartitionVector, sigma

DEFAULT_WORK_CEILING = 10 ** 8


class EdgeSpaceIndex:
    """Precomputed structures over the full edge space of one instance.

    Edges are indexed by their canonical enumeration order.  The index
    carries, per edge, the ids of its vertex subsets of each size from 2
    to r-1, and the set of edges linked to it (sharing >= 2 vertices,
    self included so that membership tests also exclude duplication).
    """

    def __init__(self, pv: PartitionVector, r: int):
        self.pv = pv
        self.r = r
        self.edges: list[tuple[int, ...]] = [e.vertices for e in edge_space(pv, r)]
        self.count = len(self.edges)
        self.position = {vs: i for i, vs in enumerate(self.edges)}

        # intern vertex subsets of sizes 2..r-1 as small integers
        self.subset_ids: dict[int, list[tuple[int, ...]]] = {}
        for alpha in range(2, max(r, 2)):
            table: dict[tuple[int, ...], int] = {}
            rows = []
            for vs in self.edges:
                row = []
                for sub in combinations(vs, alpha):
                    sid = table.setdefault(sub, len(table))
                    row.append(sid)
                rows.append(tuple(row))
            self.subset_ids[alpha] = rows
        self.pair_sets: list[frozenset[int]] = [
            frozenset(row) for row in self.subset_ids.get(2, [()] * self.count)
        ]

        # linked[i]: edges sharing a vertex pair with edge i, plus i itself
        occupants: dict[int, list[int]] = {}
        for i, row in enumerate(self.subset_ids.get(2, [])):
            for pid in row:
                occupants.setdefault(pid, []).append(i)
        linked: list[set[int]] = [{i} for i in range(self.count)]
        for group in occupants.values():
            if len(group) > 1:
                for i in group:
                    linked[i].update(group)
        self.linked: list[frozenset[int]] = [frozenset(s) for s in linked]
        self._cat: list[bytearray] | None = None

    @property
    def cat(self) -> list[bytearray]:
        """Pairwise overlap category: 0 for <=1 shared, 1 for exactly 2, 2 for >=3."""
        if self._cat is None:
            cat = [bytearray(self.count) for _ in range(self.count)]
            pair_rows = self.subset_ids.get(2, [])
            cooccur: dict[tuple[int, int], int] = {}
            occupants: dict[int, list[int]] = {}
            for i, row in enumerate(pair_rows):
                for pid in row:
                    occupants.setdefault(pid, []).append(i)
            for group in occupants.values():
                for i, j in combinations(group, 2):
                    cooccur[(i, j)] = cooccur.get((i, j), 0) + 1
            # c shared vertices co-occur in binomial(c, 2) pair lists
            for (i, j), times in cooccur.items():
                value = 1 if times == 1 else 2
                cat[i][j] = value
                cat[j][i] = value
            self._cat = cat
        return self._cat

    def classify_combo(self, combo: tuple[int, ...], cap: int):
        """Stratify one subset of edge indices.

        Returns (t, reason, clusters, free): cluster count and cluster
        pairs when plus-classified (reason None), else t is None and
        reason names the violation.
        """
        cat = self.cat
        m = len(combo)
        linked_pairs = []
        for x in range(m - 1):
            row = cat[combo[x]]
            for y in range(x + 1, m):
                c = row[combo[y]]
                if c:
                    if c == 2:
                        return None, OVERLAP_GE3, None, None
                    linked_pairs.append((x, y))
        if not linked_pairs:
            return 0, None, (), combo
        parent = list(range(m))

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for x, y in linked_pairs:
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[ry] = rx
        members: dict[int, list[int]] = {}
        for x in range(m):
            members.setdefault(find(x), []).append(x)
        clusters = []
        free = []
        for group in members.values():
            if len(group) == 1:
                free.append(combo[group[0]])
            elif len(group) == 2:
                clusters.append((combo[group[0]], combo[group[1]]))
            else:
                return None, CLUSTER_GT2_EDGES, None, None
        if len(clusters) > cap:
            return None, TOO_MANY_CLUSTERS, None, None
        return len(clusters), None, tuple(clusters), tuple(free)

    def compat_stats(self, h0: tuple[int, ...]) -> tuple[int, int, int]:
        """Statistics of the edges compatible with a fixed edge set h0.

        Compatible means sharing at most one vertex with every edge of
        h0 (which also rules out duplicating one).  Returns the count of
        compatible edges, the number of unordered compatible pairs
        sharing >= 2 vertices, and the number sharing exactly 2.
        """
        bad: set[int] = set()
        for g in h0:
            bad.update(self.linked[g])
        pool = [i for i in range(self.count) if i not in bad]
        # T[alpha] = sum over alpha-subsets of binomial(occupancy, 2)
        t_by_alpha: dict[int, int] = {}
        for alpha in range(2, max(self.r, 2)):
            rows = self.subset_ids[alpha]
            occ: dict[int, int] = {}
            for i in pool:
                for sid in rows[i]:
                    occ[sid] = occ.get(sid, 0) + 1
            t_by_alpha[alpha] = sum(c * (c - 1) // 2 for c in occ.values() if c > 1)
        # binomial inversion: N_j pairs share exactly j vertices
        n_ge2 = 0
        n_eq2 = 0
        for j in range(2, self.r):
            nj = sum(
                (-1) ** (alpha - j) * math.comb(alpha, j) * t_by_alpha[alpha]
                for alpha in range(j, self.r)
            )
            n_ge2 += nj
            if j == 2:
                n_eq2 = nj
        return len(pool), n_ge2, n_eq2


def _guard(pv: PartitionVector, r: int, m: int, work_ceiling: int) -> int:
    edge_count = sigma(pv, r)
    if not 0 <= m <= edge_count:
        raise DomainError(f"m={m} outside 0..{edge_count}")
    work = math.comb(edge_count, m) * max(1, m * (m - 1) // 2)
    if work > work_ceiling:
        raise WorkCeilingError(work, work_ceiling, "census")
    return edge_count


def count_all(pv: PartitionVector, r: int, m: int) -> int:
    """Number of m-subsets of the edge space, binomial(sigma_r, m)."""
    edge_count = sigma(pv, r)
    if not 0 <= m <= edge_count:
        raise DomainError(f"m={m} outside 0..{edge_count}")
    return math.comb(edge_count, m)


def count_linear(
    pv: PartitionVector,
    r: int,
    m: int,
    work_ceiling: int = DEFAULT_WORK_CEILING,
    workers: int = 1,
) -> int:
    """Exact number of linear hypergraphs with m edges.

    Depth-first over edges in canonical order; a partial selection keeps
    the set of vertex pairs it occupies, and a candidate edge survives
    exactly when none of its pairs is occupied.  The search forest is
    split by first-edge index across workers, so the result does not
    depend on the worker count.
    """
    _guard(pv, r, m, work_ceiling)
    if m == 0:
        return 1
    index = EdgeSpaceIndex(pv, r)
    total_edges = index.count
    if m == 1:
        return total_edges
    pair_sets = index.pair_sets

    def tail_count(start: int, used: frozenset, left: int) -> int:
        if left == 1:
            c = 0
            isd = used.isdisjoint
            for i in range(start, total_edges):
                if isd(pair_sets[i]):
                    c += 1
            return c
        tot = 0
        for i in range(start, total_edges - left + 1):
            ps = pair_sets[i]
            if used.isdisjoint(ps):
                tot += tail_count(i + 1, used | ps, left - 1)
        return tot

    first_limit = total_edges - m + 1
    if workers <= 1:
        return sum(tail_count(i + 1, pair_sets[i], m - 1) for i in range(first_limit))
    chunks = [range(w, first_limit, workers) for w in range(workers)]

    def run(chunk: range) -> int:
        return sum(tail_count(i + 1, pair_sets[i], m - 1) for i in chunk)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(run, chunks))


def count_linear_naive(
    pv: PartitionVector,
    r: int,
    m: int,
    work_ceiling: int = DEFAULT_WORK_CEILING,
) -> int:
    """Filter every m-subset for pairwise overlaps <= 1.

    Deliberately independent of count_linear: no pruning, no shared
    search logic.  Kept as a cross-check oracle for the fast path.
    """
    _guard(pv, r, m, work_ceiling)
    if m == 0:
        return 1
    index = EdgeSpaceIndex(pv, r)
    if m == 1:
        return index.count
    cat = index.cat
    count = 0
    for combo in combinations(range(index.count), m):
        ok = True
        for x in range(m - 1):
            row = cat[combo[x]]
            for y in range(x + 1, m):
                if row[combo[y]]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            count += 1
    return count


@dataclass(frozen=True)
class CensusResult:
    """Exact stratification of all m-subsets by cluster count."""

    total: int
    linear: int
    by_cluster: dict[int, int]
    not_plus: int
    cluster_cap: int

    def __post_init__(self):
        if self.linear != self.by_cluster.get(0, 0):
            raise AssertionError("linear count disagrees with stratum zero")
        if sum(self.by_cluster.values()) + self.not_plus != self.total:
            raise AssertionError("strata do not add up to the subset total")

    def to_json_dict(self) -> dict:
        return {
            "total": str(self.total),
            "linear": str(self.linear),
            "by_cluster": {str(t): str(c) for t, c in sorted(self.by_cluster.items())},
            "not_plus": str(self.not_plus),
            "cluster_cap": str(self.cluster_cap),
        }


def census_by_cluster(
    pv: PartitionVector,
    r: int,
    m: int,
    work_ceiling: int = DEFAULT_WORK_CEILING,
) -> CensusResult:
    """Classify every m-subset of the edge space into plus strata."""
    _guard(pv, r, m, work_ceiling)
    cap = cluster_threshold(pv, r, m)
    index = EdgeSpaceIndex(pv, r)
    by_cluster: dict[int, int] = {0: 0}
    not_plus = 0
    total = 0
    for combo in combinations(range(index.count), m):
        total += 1
        t, reason, _, _ = index.classify_combo(combo, cap)
        if reason is None:
            by_cluster[t] = by_cluster.get(t, 0) + 1
        else:
            not_plus += 1
    return CensusResult(
        total=total,
        linear=by_cluster[0],
        by_cluster=by_cluster,
        not_plus=not_plus,
        cluster_cap=cap,
    )


def exact_linear_probability(
    pv: PartitionVector,
    r: int,
    m: int,
    work_ceiling: int = DEFAULT_WORK_CEILING,
) -> Fraction:
    """count_linear / count_all as an exact rational."""
    return Fraction(
        count_linear(pv, r, m, work_ceiling=work_ceiling),
        count_all(pv, r, m),
    )
