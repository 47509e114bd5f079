import math
import threading

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gibbs_partitions.factorials import rising_factorial
from gibbs_partitions.oracle import noncentral_stirling_recurrence, stirling_by_compositions, unsigned_stirling_first
from gibbs_partitions.stirling import (
    central_stirling,
    factorial_coefficient,
    noncentral_stirling,
    stirling_table,
)


def test_central_examples():
    for a in (-1.0, 0.0, 0.3, 0.9):
        assert central_stirling(3, 3, a).to_real() == pytest.approx(1.0)
        assert central_stirling(3, 1, a).to_real() == pytest.approx((1 - a) * (2 - a))
    assert stirling_table(0.0, 3).value(3, 2) == 3.0


def test_frozen_table_alpha_half():
    # oracle: composition sum
    expected = [[1.0], [0.0, 1.0], [0.0, 0.5, 1.0], [0.0, 0.75, 1.5, 1.0], [0.0, 1.875, 3.75, 3.0, 1.0]]
    for n, row in enumerate(expected):
        for k, v in enumerate(row):
            assert central_stirling(n, k, 0.5).to_real() == pytest.approx(v, rel=1e-14)


def test_noncentral_examples():
    assert noncentral_stirling(4, 4, 0.5, 2.7).to_real() == pytest.approx(1.0)
    assert noncentral_stirling(1, 0, 0.5, 2.0).to_real() == pytest.approx(-2.0)
    for n in range(6):
        for k in range(n + 1):
            assert noncentral_stirling(n, k, 0.4, 0.0).to_real() == pytest.approx(central_stirling(n, k, 0.4).to_real())


def test_noncentral_frozen():
    # oracle: non-central triangular recurrence
    expected = [59.0625, 70.125, 35.25, 9.0, 1.0]
    for k, v in enumerate(expected):
        assert noncentral_stirling(4, k, 0.5, -1.5).to_real() == pytest.approx(v, rel=1e-13)


def test_factorial_coefficient_examples():
    assert factorial_coefficient(2, 2, 0.5).to_real() == pytest.approx(0.25)
    assert factorial_coefficient(2, 1, 0.5).to_real() == pytest.approx(0.25)
    assert factorial_coefficient(1, 0, 0.5, 2.0).to_real() == pytest.approx(-2.0)


def test_alpha_zero_matches_unsigned_first_kind_exactly():
    for n in range(12):
        for k in range(n + 1):
            assert stirling_table(0.0, 11).value(n, k) == unsigned_stirling_first(n, k)


@pytest.mark.parametrize("alpha", [-1.0, -0.5, 0.0, 0.25, 0.5, 0.75])
def test_recurrence_matches_composition_sum(alpha):
    for n in range(1, 10):
        for k in range(1, n + 1):
            assert central_stirling(n, k, alpha).to_real() == pytest.approx(
                stirling_by_compositions(n, k, alpha), rel=1e-11
            )


@settings(max_examples=40)
@given(st.floats(min_value=-3, max_value=3), st.floats(min_value=-1, max_value=0.95), st.integers(0, 10))
def test_connection_identity(x, alpha, n):
    lhs = rising_factorial(x, n).to_real()
    terms = [central_stirling(n, k, alpha).to_real() * rising_factorial(x, k, alpha).to_real() for k in range(n + 1)]
    scale = max(1.0, math.fsum(map(abs, terms)))
    assert abs(lhs - math.fsum(terms)) <= 1e-10 * scale


@settings(max_examples=40)
@given(
    st.floats(min_value=-3, max_value=3),
    st.floats(min_value=-1, max_value=0.95),
    st.floats(min_value=-4, max_value=4),
    st.integers(0, 10),
)
def test_noncentral_connection_identity(y, alpha, gamma, n):
    lhs = rising_factorial(y * alpha - gamma, n).to_real()
    terms = [
        noncentral_stirling(n, k, alpha, gamma).to_real() * rising_factorial(y * alpha, k, alpha).to_real()
        for k in range(n + 1)
    ]
    scale = max(1.0, math.fsum(map(abs, terms)))
    assert abs(lhs - math.fsum(terms)) <= 1e-10 * scale


@settings(max_examples=40)
@given(st.floats(min_value=-1, max_value=0.95), st.floats(min_value=-6, max_value=6))
def test_convolution_matches_recurrence(alpha, gamma):
    for n in range(10):
        for k in range(n + 1):
            ref = noncentral_stirling_recurrence(n, k, alpha, gamma)
            got = noncentral_stirling(n, k, alpha, gamma).to_real()
            scale = max(1.0, abs(ref))
            assert abs(got - ref) <= 1e-10 * scale


def test_index_and_domain_errors():
    with pytest.raises(ValueError):
        stirling_table(1.0, 5)
    with pytest.raises(ValueError):
        central_stirling(2, 3, 0.5)


def test_cache_returns_same_table_and_grows():
    a = stirling_table(0.123, 5)
    assert stirling_table(0.123, 5) is a
    b = stirling_table(0.123, 200)
    assert b.max_n >= 200
    assert b.value(5, 2) == pytest.approx(a.value(5, 2))


def test_concurrent_lookups():
    results = []

    def work():
        results.append(noncentral_stirling(40, 7, 0.321, -3.5).to_real())

    threads = [threading.Thread(target=work) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(set(results)) == 1
