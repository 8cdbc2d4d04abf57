"""Tests for log-space count estimates and their exact correction terms."""

import math
from fractions import Fraction

import pytest

from linhyp import (
    DomainError,
    count_linear,
    estimate_partite,
    estimate_refined_uniform,
    estimate_uniform,
    log_factorial,
    partition,
    uniform_partition,
)


def test_log_factorial_small_exact():
    for m in (0, 1, 2, 5, 20, 170, 3000):
        assert log_factorial(m) == pytest.approx(math.lgamma(m + 1), rel=1e-13, abs=1e-12)


def test_log_factorial_stirling_branch():
    m = 10 ** 6 + 3
    assert log_factorial(m) == pytest.approx(math.lgamma(m + 1), rel=1e-12)


def test_estimate_partite_pinned_correction():
    est = estimate_partite(partition((2, 2, 2)), 3, 2)
    assert est.correction_exact == Fraction(-27, 4)
    assert est.leading_log == pytest.approx(2 * math.log(8) - math.log(2))
    assert est.log_value == pytest.approx(2 * math.log(8) - math.log(2) - 6.75)
    assert est.error_budget == pytest.approx(4 / 216 + 8 / 1296)


def test_estimate_uniform_pinned():
    est = estimate_uniform(20, 3, 1)
    assert est.correction_exact == 0
    assert est.log_value == pytest.approx(math.log(1140), rel=1e-12)
    est2 = estimate_uniform(20, 3, 2)
    assert est2.correction_exact == Fraction(-36 * 2, 4 * 400)


def test_estimate_refined_uniform_adds_cubic_term():
    base = estimate_uniform(10, 3, 2)
    fine = estimate_refined_uniform(10, 3, 2)
    # r=3 makes 3r^2-15r+20 = 2, so the extra term is -18 m^3 / n^4
    assert fine.correction_exact - base.correction_exact == Fraction(-18 * 8, 10 ** 4)
    assert fine.error_budget == pytest.approx(4 / 1000)
    assert fine.correction_exact < base.correction_exact <= 0


def test_refined_extra_term_never_positive():
    # the quadratic 3r^2-15r+20 is positive at every admissible r
    for r in range(3, 12):
        assert 3 * r * r - 15 * r + 20 > 0
        n = 2 * r + 3
        fine = estimate_refined_uniform(n, r, 3)
        base = estimate_uniform(n, r, 3)
        assert fine.correction_exact <= base.correction_exact


def test_trivial_m_exactness():
    for sizes, r in [((2, 2, 2), 3), ((3, 1, 2), 3), ((2, 2, 2, 2), 4)]:
        pv = partition(sizes)
        for m in (0, 1):
            est = estimate_partite(pv, r, m)
            assert est.correction_exact == 0
            exact = count_linear(pv, r, m)
            assert math.exp(est.log_value) == pytest.approx(exact, rel=1e-12)


def test_partite_reduces_to_uniform_at_rate_n_cubed():
    # on all-singleton parts the two corrections differ by Theta(m^2/n^3)
    m, r = 3, 3
    scaled = []
    last = None
    for n in range(10, 70, 10):
        diff = (
            estimate_partite(uniform_partition(n), r, m).correction_exact
            - estimate_uniform(n, r, m).correction_exact
        )
        assert diff < 0
        if last is not None:
            assert abs(diff) < abs(last)
        last = diff
        scaled.append(abs(float(diff)) * n ** 3 / m ** 2)
    assert max(scaled) / min(scaled) < 1.5


def test_error_budget_shrinks_with_n():
    budgets = [estimate_uniform(n, 3, 3).error_budget for n in (10, 20, 40)]
    assert budgets == sorted(budgets, reverse=True)


def test_domain_errors():
    with pytest.raises(DomainError):
        estimate_partite(partition((2, 2)), 3, 1)
    with pytest.raises(DomainError):
        estimate_partite(partition((2, 2, 2)), 2, 1)
    with pytest.raises(DomainError):
        estimate_uniform(5, 6, 1)
    with pytest.raises(DomainError):
        estimate_uniform(8, 3, -1)


def test_json_payload_round_numbers():
    est = estimate_partite(partition((2, 2, 2)), 3, 2)
    payload = est.to_json_dict()
    assert payload["correction_exact"] == "-27/4"
    assert payload["log_value"] == est.log_value
