"""Allocation of an additional sample to the old blocks.

Given the basic sample, ``M_i`` counts the new observations joining old
block ``i`` and ``S_m`` those falling in new blocks. Their joint law is a
Polya-type mixture (for Pitman-Yor weights an exact multivariate Polya
law). ``O_{l,m}`` is the number of old blocks of final size ``l`` and
``Z_{l,m}`` the number of old or new blocks of size ``l``.

Subset sums run over combinations of eligible old blocks (``n_i <= l``),
so cost grows like ``C(j, r)``; fine for the sample sizes this targets.
"""
from __future__ import annotations

import itertools
from typing import Mapping, Sequence

import numpy as np

from ._common import inv_fact, invert_factorial_moments, lfact, rising
from .conditional import base_weight
from .models import GibbsModel
from .numeric import ZERO, SignedLogValue, slv_prod, slv_sum, to_probability
from .stirling import stirling_table
from .structures import ObservedSample, as_orders, as_sample


def polya_gibbs_joint(model: GibbsModel, sample, m: int, increments: Sequence[int], s_new: int) -> float:
    """``P(M_1=m_1, ..., M_j=m_j, S_m=s | basic sample)``."""
    sample = as_sample(sample)
    increments = tuple(int(x) for x in increments)
    if len(increments) != sample.j or any(x < 0 for x in increments) or s_new < 0:
        raise ValueError(f"invalid allocation {increments}, s={s_new} for {sample.j} old blocks")
    if sum(increments) + s_new != m:
        raise ValueError(f"allocation uses {sum(increments) + s_new} observations, expected m={m}")
    a = model.alpha
    coef = SignedLogValue(1, lfact(m) - sum(lfact(x) for x in increments) - lfact(s_new))
    olds = slv_prod(rising(ni - a, mi) for ni, mi in zip(sample.multiplicities, increments))
    table = stirling_table(a, s_new)
    top = sample.n + m
    inner = slv_sum(model.weight(top, sample.j + k) * table(s_new, k) for k in range(0, s_new + 1))
    return to_probability(coef * olds * inner / base_weight(model, sample), "Polya-Gibbs joint")


def multivariate_polya(alpha: float, theta: float, sample, m: int, increments: Sequence[int], s_new: int) -> float:
    """Multivariate Polya mass with parameters ``(n_1-alpha, ..., n_j-alpha, theta+j*alpha)``."""
    sample = as_sample(sample)
    increments = tuple(int(x) for x in increments)
    if sum(increments) + s_new != m:
        raise ValueError("allocation does not sum to m")
    coef = SignedLogValue(1, lfact(m) - sum(lfact(x) for x in increments) - lfact(s_new))
    olds = slv_prod(rising(ni - alpha, mi) for ni, mi in zip(sample.multiplicities, increments))
    value = coef * olds * rising(theta + sample.j * alpha, s_new) / rising(sample.n + theta, m)
    return to_probability(value, "multivariate Polya")


def _blocks_joint(
    model: GibbsModel,
    sample: ObservedSample,
    m: int,
    blocks: Sequence[int],
    increments: Sequence[int],
    shift: int = 0,
) -> SignedLogValue:
    """``P(M_b = inc_b for b in blocks)``; with ``shift=1`` each ``K_m=k`` term is
    reweighted by ``V(n+m+1, j+k) / V(n+m, j+k)``."""
    rest = m - sum(increments)
    if rest < 0 or any(x < 0 for x in increments):
        return ZERO
    a = model.alpha
    mult = sample.multiplicities
    chosen = sum(mult[b] for b in blocks)
    gamma = -(sample.n - (sample.j - len(blocks)) * a - chosen)
    coef = SignedLogValue(1, lfact(m) - sum(lfact(x) for x in increments) - lfact(rest))
    olds = slv_prod(rising(mult[b] - a, x) for b, x in zip(blocks, increments))
    table = stirling_table(a, rest, gamma)
    top = sample.n + m + shift
    inner = slv_sum(model.weight(top, sample.j + k) * table(rest, k) for k in range(0, rest + 1))
    return coef * olds * inner / base_weight(model, sample)


def old_increments_marginal(model: GibbsModel, sample, m: int, first: Sequence[int]) -> float:
    """``P(M_1=m_1, ..., M_r=m_r | basic sample)`` for the first ``r`` old blocks."""
    sample = as_sample(sample)
    first = tuple(int(x) for x in first)
    if len(first) > sample.j or any(x < 0 for x in first) or sum(first) > m:
        raise ValueError(f"invalid increments {first} for j={sample.j}, m={m}")
    return to_probability(_blocks_joint(model, sample, m, range(len(first)), first), "old-block marginal")


def old_block_marginal(model: GibbsModel, sample, m: int, block: int, target: int) -> float:
    """``P(n_i + M_i = target)`` for old block ``i``."""
    sample = as_sample(sample)
    inc = target - sample.multiplicities[block]
    if inc < 0 or inc > m:
        return 0.0
    return to_probability(_blocks_joint(model, sample, m, (block,), (inc,)), "old-block marginal")


def _eligible(sample: ObservedSample, l: int) -> list[int]:
    return [i for i, ni in enumerate(sample.multiplicities) if ni <= l]


def _o_moment(model: GibbsModel, sample: ObservedSample, m: int, orders: dict[int, int], shift: int = 0) -> SignedLogValue:
    sizes = sorted(orders)
    terms: list[SignedLogValue] = []

    def assign(idx: int, used: frozenset, blocks: list, targets: list):
        if idx == len(sizes):
            incs = [t - sample.multiplicities[b] for b, t in zip(blocks, targets)]
            terms.append(_blocks_joint(model, sample, m, blocks, incs, shift))
            return
        l = sizes[idx]
        pool = [i for i in _eligible(sample, l) if i not in used]
        for combo in itertools.combinations(pool, orders[l]):
            assign(idx + 1, used | set(combo), blocks + list(combo), targets + [l] * len(combo))

    assign(0, frozenset(), [], [])
    scale = SignedLogValue(1, sum(lfact(r) for r in orders.values()))
    return scale * slv_sum(terms)


def o_joint_factorial_moments(model: GibbsModel, sample, m: int, orders: Sequence[int] | Mapping[int, int]) -> float:
    """``E[prod_l (O_{l,m})_[r_l] | basic sample]`` for ``l = 1..n+m``."""
    sample = as_sample(sample)
    orders = as_orders(orders)
    if any(l > sample.n + m for l in orders):
        raise ValueError(f"block size beyond n+m={sample.n + m} in {orders}")
    if not orders:
        return 1.0
    if sum(orders.values()) > sample.j:
        return 0.0
    return _o_moment(model, sample, m, orders).to_real()


def o_factorial_moment(model: GibbsModel, sample, m: int, l: int, r: int) -> float:
    return o_joint_factorial_moments(model, sample, m, {l: r})


def o_law(model: GibbsModel, sample, m: int, l: int, y: int) -> float:
    """``P(O_{l,m} = y | basic sample)``: number of old blocks of final size ``l``."""
    sample = as_sample(sample)
    if not 1 <= l <= sample.n + m:
        raise ValueError(f"l={l} outside 1..{sample.n + m}")
    eligible = len(_eligible(sample, l))
    if y < 0:
        raise ValueError("y must be nonnegative")
    if y > eligible:
        return 0.0
    value = invert_factorial_moments(y, eligible, lambda q: _o_moment(model, sample, m, {l: q} if q else {}))
    return to_probability(value, f"P(O_{l},{m}={y})")


def o_pmf(model: GibbsModel, sample, m: int, l: int) -> np.ndarray:
    sample = as_sample(sample)
    return np.array([o_law(model, sample, m, l, y) for y in range(len(_eligible(sample, l)) + 1)])


def o_mean(model: GibbsModel, sample, m: int, l: int) -> float:
    """``E(O_{l,m}) = sum_{i: n_i <= l} P(M_i = l - n_i)``."""
    sample = as_sample(sample)
    terms = [
        _blocks_joint(model, sample, m, (i,), (l - sample.multiplicities[i],)) for i in _eligible(sample, l)
    ]
    return slv_sum(terms).to_real()


def z_factorial_moment(model: GibbsModel, sample, m: int, l: int, r: int) -> float:
    """``E[(Z_{l,m})_[r]]`` for the number of old or new blocks of size ``l``."""
    sample = as_sample(sample)
    if r < 0 or l < 1:
        raise ValueError("need l >= 1 and r >= 0")
    if r == 0:
        return 1.0
    a = model.alpha
    mult = sample.multiplicities
    base = base_weight(model, sample)
    top = sample.n + m
    terms = []
    for t in range(0, r + 1):
        new = r - t
        for combo in itertools.combinations(_eligible(sample, l), t):
            chosen = sum(mult[i] for i in combo)
            rest = m - t * l + chosen - new * l
            if rest < 0:
                continue
            gamma = -(sample.n - sample.j * a - chosen + t * a)
            coef = slv_prod(
                [
                    SignedLogValue(1, lfact(r) - lfact(r - t) + lfact(m) - lfact(rest) - new * lfact(l)),
                    rising(1.0 - a, l - 1) ** new,
                    slv_prod(rising(mult[i] - a, l - mult[i]) * inv_fact(l - mult[i]) for i in combo),
                ]
            )
            table = stirling_table(a, rest, gamma)
            inner = slv_sum(model.weight(top, sample.j + k) * table(rest, k - new) for k in range(new, new + rest + 1))
            terms.append(coef * inner)
    return (slv_sum(terms) / base).to_real()
