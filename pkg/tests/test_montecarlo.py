"""Tests for uniform sampling: exactness, determinism, and statistics."""

import math
from collections import Counter
from fractions import Fraction

import pytest
from scipy import stats

from linhyp import (
    DomainError,
    EdgeSampler,
    census_by_cluster,
    edge_subset_probability,
    estimate_linear_probability,
    expected_overlap_pairs,
    linked_pair_count,
    make_rng,
    partition,
    sample_hypergraph,
    sigma,
    uniform_partition,
)
from linhyp.census import EdgeSpaceIndex
from linhyp.montecarlo import draw_subset_ids


def test_unrank_matches_canonical_order():
    for sizes, r in [((2, 2, 2), 3), ((3, 1, 2), 3), ((2, 2, 2, 3, 2), 3), ((2, 2, 2, 2), 4)]:
        pv = partition(sizes)
        sampler = EdgeSampler(pv, r)
        index = EdgeSpaceIndex(pv, r)
        assert sampler.total == sigma(pv, r)
        assert [sampler.unrank(i) for i in range(sampler.total)] == index.edges
    with pytest.raises(DomainError):
        EdgeSampler(partition((2, 2, 2)), 3).unrank(8)


def test_sample_hypergraph_trivial_cases():
    rng = make_rng(5)
    pv1 = partition((1, 1, 1))
    for _ in range(5):
        h = sample_hypergraph(pv1, 3, 1, rng)
        assert [e.vertices for e in h.sorted_edges()] == [(1, 2, 3)]
    pv = partition((2, 2, 2))
    full = sample_hypergraph(pv, 3, 8, rng)
    assert full.m == 8
    with pytest.raises(DomainError):
        sample_hypergraph(pv, 3, 9, rng)


def test_draws_are_seed_deterministic_and_lane_split():
    pv = partition((2, 2, 2))
    a = draw_subset_ids(pv, 3, 2, 500, seed=9)
    b = draw_subset_ids(pv, 3, 2, 500, seed=9)
    c = draw_subset_ids(pv, 3, 2, 500, seed=10)
    assert a == b
    assert a != c
    r0 = make_rng(3, 0).integers(0, 1 << 62, size=4).tolist()
    r1 = make_rng(3, 1).integers(0, 1 << 62, size=4).tolist()
    assert r0 != r1


def test_report_is_worker_count_independent():
    pv = uniform_partition(6)
    base = estimate_linear_probability(pv, 3, 3, trials=9000, seed=21, workers=1)
    for workers in (2, 4):
        rep = estimate_linear_probability(pv, 3, 3, trials=9000, seed=21, workers=workers)
        assert rep.hits == base.hits
        assert rep.cluster_histogram == base.cluster_histogram
        assert rep.violation_counts == base.violation_counts


def test_hit_rate_pins():
    rep = estimate_linear_probability(partition((2, 2, 2)), 3, 2, trials=10 ** 5, seed=42)
    assert abs(rep.p_hat - 4 / 7) <= 3 * rep.stderr
    rep6 = estimate_linear_probability(uniform_partition(6), 3, 2, trials=10 ** 5, seed=42)
    assert abs(rep6.p_hat - 10 / 19) <= 3 * rep6.stderr
    one = estimate_linear_probability(partition((2, 2, 2)), 3, 1, trials=2000, seed=1)
    assert one.p_hat == 1.0 and one.stderr == 0.0


def test_report_tallies_sum_to_trials():
    rep = estimate_linear_probability(partition((2, 2, 2)), 3, 3, trials=20000, seed=3)
    assert sum(rep.cluster_histogram.values()) + sum(rep.violation_counts.values()) == rep.trials
    assert rep.hits == rep.cluster_histogram.get(0, 0)


def test_histogram_tracks_census_strata():
    pv = partition((2, 2, 2))
    res = census_by_cluster(pv, 3, 3)
    rep = estimate_linear_probability(pv, 3, 3, trials=10 ** 5, seed=17)
    for t, count in res.by_cluster.items():
        p = count / res.total
        spread = 4 * math.sqrt(p * (1 - p) / rep.trials)
        assert abs(rep.cluster_histogram.get(t, 0) / rep.trials - p) <= spread, t
    p_bad = res.not_plus / res.total
    spread = 4 * math.sqrt(p_bad * (1 - p_bad) / rep.trials)
    assert abs(sum(rep.violation_counts.values()) / rep.trials - p_bad) <= spread


def test_single_edge_chi_square_uniform():
    # irregular parts: the part-subset weighting must still be uniform per edge
    pv = partition((2, 2, 2, 3, 2))
    total = sigma(pv, 3)
    trials = 2 * 10 ** 5
    counts = Counter(c[0] for c in draw_subset_ids(pv, 3, 1, trials, seed=6))
    observed = [counts.get(i, 0) for i in range(total)]
    res = stats.chisquare(observed)
    assert res.pvalue > 1e-3


def test_subset_chi_square_uniform():
    # all binom(8,2)=28 pair subsets equally likely
    pv = partition((2, 2, 2))
    trials = 10 ** 6
    counts = Counter(draw_subset_ids(pv, 3, 2, trials, seed=4))
    assert len(counts) == 28
    res = stats.chisquare(list(counts.values()))
    assert res.pvalue > 1e-3


def test_subset_chi_square_uniform_sixvertex():
    pv = uniform_partition(6)
    trials = 4 * 10 ** 5
    counts = Counter(draw_subset_ids(pv, 3, 2, trials, seed=12))
    assert len(counts) == 190
    res = stats.chisquare(list(counts.values()))
    assert res.pvalue > 1e-3


def test_edge_subset_probability_pins_and_bound():
    pv = partition((2, 2, 2))
    assert edge_subset_probability(pv, 3, 2, 0) == 1
    assert edge_subset_probability(pv, 3, 2, 1) == Fraction(1, 4)
    assert edge_subset_probability(pv, 3, 2, 2) == Fraction(1, 28)
    for sizes, r in [((2, 2, 2), 3), ((3, 3, 3), 3), ((1,) * 8, 4)]:
        pvx = partition(sizes)
        total = sigma(pvx, r)
        for m in range(0, min(5, total) + 1):
            for t in range(m + 1):
                p = edge_subset_probability(pvx, r, m, t)
                assert p <= Fraction(m, total) ** t
    with pytest.raises(DomainError):
        edge_subset_probability(pv, 3, 2, 3)


def test_expected_overlap_pairs_pins():
    got = expected_overlap_pairs(partition((2, 2, 2)), 3, 2)
    assert (got.linked_pair_count, got.exact) == (12, Fraction(3, 7))
    got6 = expected_overlap_pairs(uniform_partition(6), 3, 2)
    assert (got6.linked_pair_count, got6.exact) == (90, Fraction(9, 19))
    tiny = expected_overlap_pairs(partition((1, 1, 1)), 3, 1)
    assert tiny.linked_pair_count == 0 and tiny.exact == 0


def test_linked_pair_count_brute_force():
    for sizes, r in [((2, 2, 2, 2), 4), ((1,) * 7, 3), ((3, 1, 2), 3)]:
        pv = partition(sizes)
        index = EdgeSpaceIndex(pv, r)
        vsets = [set(v) for v in index.edges]
        brute = sum(
            1
            for i in range(index.count)
            for j in range(i + 1, index.count)
            if len(vsets[i] & vsets[j]) >= 2
        )
        assert linked_pair_count(pv, r) == brute, (sizes, r)


def test_overlap_mean_near_expectation():
    # at m=2 the linked-pair count is 0/1-valued, so its variance is exact
    for pv in (partition((2, 2, 2)), uniform_partition(6)):
        rep = estimate_linear_probability(pv, 3, 2, trials=10 ** 5, seed=13, track_overlaps=True)
        p = float(expected_overlap_pairs(pv, 3, 2).exact)
        spread = 4 * math.sqrt(p * (1 - p) / rep.trials)
        assert abs(rep.overlap_mean - p) <= spread


def test_violation_rates_fall_with_n():
    # property-(b) failures at fixed m thin out as the vertex pool grows
    rates = []
    for n in (6, 8, 10):
        rep = estimate_linear_probability(uniform_partition(n), 3, 3, trials=4 * 10 ** 4, seed=29)
        rates.append(sum(rep.violation_counts.values()) / rep.trials)
    assert rates[0] > rates[1] > rates[2]
    # property-(a) failures need r >= 4 to be possible at all
    rates4 = []
    for n in (8, 10, 12):
        rep = estimate_linear_probability(uniform_partition(n), 4, 3, trials=4 * 10 ** 4, seed=31)
        rates4.append(rep.violation_counts.get("overlap_ge3", 0) / rep.trials)
    assert rates4[0] > rates4[1] > rates4[2]


def test_sample_report_json_shape():
    rep = estimate_linear_probability(partition((2, 2, 2)), 3, 2, trials=4096, seed=2)
    payload = rep.to_json_dict()
    assert payload["trials"] == "4096"
    assert set(payload["cluster_histogram"]) <= {"0", "1"}
    assert isinstance(payload["p_hat"], float)
