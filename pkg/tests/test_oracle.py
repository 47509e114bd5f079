import pytest

from gibbs_partitions.models import PitmanYor
from gibbs_partitions.oracle import (
    GuardError,
    bell_number,
    enumerate_extensions,
    enumerate_partitions,
    oracle_conditional,
    oracle_distribution,
)
from gibbs_partitions.structures import ObservedSample


@pytest.mark.parametrize("n,count", [(1, 1), (3, 5), (5, 52), (8, 4140)])
def test_bell_counts(n, count):
    parts = list(enumerate_partitions(n))
    assert len(parts) == count == bell_number(n)
    assert len(set(parts)) == count


def test_guard(monkeypatch):
    with pytest.raises(GuardError):
        next(enumerate_partitions(14))
    monkeypatch.setenv("GIBBS_MAX_N", "3")
    with pytest.raises(GuardError):
        oracle_distribution(PitmanYor(0.5, 1.0), 4, len)


def test_constant_statistic(model):
    assert oracle_distribution(model, 6, lambda s: "x") == pytest.approx({"x": 1.0})


def test_one_step_discovery(model):
    sample = ObservedSample((2, 1))
    table = oracle_conditional(model, sample, 1, lambda e: len(e.new_sizes))
    disc = model.weight(4, 3).to_real() / model.weight(3, 2).to_real()
    assert table[1] == pytest.approx(disc)
    assert table[0] == pytest.approx(1 - disc)


def test_extension_count():
    # extensions of j blocks by m observations <-> partitions of [j+m] keeping 1..j apart
    for j, m in [(1, 2), (2, 3), (3, 3)]:
        expected = sum(1 for rgs in enumerate_partitions(j + m) if len(set(rgs[:j])) == j)
        assert len(list(enumerate_extensions(j, m))) == expected
    assert len(list(enumerate_extensions(2, 3))) == 52 - 15
