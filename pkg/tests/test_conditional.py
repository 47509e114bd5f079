import math

import pytest

from gibbs_partitions import conditional as cond
from gibbs_partitions.models import PitmanYor
from gibbs_partitions.oracle import iter_extensions
from gibbs_partitions.structures import ObservedSample, compositions, counts_vectors
from gibbs_partitions.verification import verify_conditional

SAMPLE = ObservedSample((2, 1, 1))


def ratio(model, n1, k1, n0, k0):
    return model.weight(n1, k1).to_real() / model.weight(n0, k0).to_real()


def test_crp_examples(model):
    n, j = SAMPLE.n, SAMPLE.j
    a = model.alpha
    assert cond.crp_all_old(model, SAMPLE, (0, 0, 0)) == 1.0
    assert cond.crp_all_new(model, SAMPLE, (1,)) == pytest.approx(ratio(model, n + 1, j + 1, n, j))
    m = 3
    expected = ratio(model, n + m, j + 1, n, j) * math.prod(1 - a + i for i in range(m - 1))
    assert cond.crp_all_new(model, SAMPLE, (m,)) == pytest.approx(expected)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_crp_tree_total(model, m):
    total = math.fsum(
        cond.crp_mixed(model, SAMPLE, ext.old_increments, ext.new_sizes)
        for ext, _ in iter_extensions(model, SAMPLE, m)
    )
    assert total == pytest.approx(1.0, abs=1e-13)


def test_new_block_examples(model):
    n, j = SAMPLE.n, SAMPLE.j
    assert cond.new_block_joint(model, SAMPLE, 1, (1,)) == pytest.approx(ratio(model, n + 1, j + 1, n, j))
    m = 4
    empty = ratio(model, n + m, j, n, j) * math.prod(n - j * model.alpha + i for i in range(m))
    assert cond.new_block_joint(model, SAMPLE, m, ()) == pytest.approx(empty)
    total = math.fsum(cond.new_block_joint(model, SAMPLE, m, c) for s in range(m + 1) for c in compositions(s))
    assert total == pytest.approx(1.0, abs=1e-13)


def test_given_s_and_size_laws(model):
    assert cond.new_block_given_s(model, SAMPLE, 3, (1,)) == pytest.approx(1.0)
    for s in range(1, 5):
        total = math.fsum(cond.new_block_given_s(model, SAMPLE, 5, c) for c in compositions(s))
        assert total == pytest.approx(1.0, abs=1e-13)
    for s in range(1, 9):
        assert cond.new_sizes_given_k_s(model.alpha, (1,) * s) == pytest.approx(1.0)
        for k in range(1, s + 1):
            total = math.fsum(cond.new_sizes_given_k_s(model.alpha, c) for c in compositions(s, k))
            assert total == pytest.approx(1.0, abs=1e-12)


def test_conditional_marginal_consistency(model):
    m = 4
    for comp in [(2, 1), (1, 1, 2), (4,)]:
        full = cond.conditional_marginal(model, SAMPLE, m, comp, len(comp))
        assert full == pytest.approx(cond.conditional_multivariate_gibbs(model, SAMPLE, m, comp), rel=1e-12)
    total = math.fsum(cond.conditional_marginal(model, SAMPLE, m, (l,), k) for l in range(1, m + 1) for k in range(1, m + 1))
    total += cond.km_distribution(model, SAMPLE, m, 0)
    assert total == pytest.approx(1.0, abs=1e-13)


def test_sampling_formula_normalizes(model):
    m = 5
    total = sum(cond.conditional_sampling_formula(model, SAMPLE, m, c) for s in range(m + 1) for c in _padded(s, m))
    assert total == pytest.approx(1.0, abs=1e-13)


def _padded(s, m):
    if s == 0:
        yield (0,) * m
        return
    for c in counts_vectors(s):
        yield tuple(c) + (0,) * (m - s)


def test_w_examples(model):
    n, j = SAMPLE.n, SAMPLE.j
    assert cond.w_joint_factorial_moments(model, SAMPLE, 3, {}) == 1.0
    assert cond.w_joint_factorial_moments(model, SAMPLE, 1, {1: 1}) == pytest.approx(ratio(model, n + 1, j + 1, n, j))


def test_frozen_values():
    # oracle: conditional enumeration
    km = [0.1875, 0.3660714285714285, 0.3214285714285711, 0.125]
    assert list(cond.km_pmf(PitmanYor(0.5, 1.0), SAMPLE, 3)) == pytest.approx(km, abs=1e-14)
    w1 = [0.8404017857142843, 0.15959821428571397, 0.0, 0.0]
    assert list(cond.w_pmf(PitmanYor.fisher(-0.5, 4), SAMPLE, 3, 1)) == pytest.approx(w1, abs=1e-14)


@pytest.mark.parametrize("counts,m", [((2, 1, 1), 3), ((1,), 4), ((3, 2), 2)])
def test_matches_oracle(model, counts, m):
    dev = verify_conditional(model, ObservedSample(counts), m)
    assert max(dev.values()) < 1e-12, {k: v for k, v in dev.items() if v >= 1e-12}


def test_v_freeness():
    sizes = [(1,), (2, 1), (1, 1, 3), (2, 2)]
    vals = {t: [cond.new_sizes_given_k_s(0.4, c) for c in sizes] for t in (0.5, 1.0, 5.0)}
    assert vals[0.5] == vals[1.0] == vals[5.0]


def test_sample_with_too_many_species_rejected():
    with pytest.raises(ValueError):
        cond.km_pmf(PitmanYor.fisher(-1.0, 2), ObservedSample((1, 1, 1)), 2)
