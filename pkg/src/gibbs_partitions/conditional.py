"""Laws of the new blocks created by an additional sample of size ``m``.

Everything is conditional on a basic sample of ``n`` observations in ``j``
blocks with multiplicities ``n_1..n_j``. Laws of new-block quantities
depend on the basic sample only through ``(n, j)``; the old multiplicities
matter only for the sequential seating probabilities.
"""
from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from ._common import fact, inv_fact, invert_factorial_moments, lfact, rising
from .models import GibbsModel
from .numeric import ZERO, SignedLogValue, slv_prod, slv_sum, to_probability
from .stirling import stirling_table
from .structures import ObservedSample, as_orders, as_sample


def base_weight(model: GibbsModel, sample: ObservedSample) -> SignedLogValue:
    """``V(n, j)`` of the basic sample; raises when it is zero."""
    if model.capacity is not None and sample.j > model.capacity:
        raise ValueError(f"sample has {sample.j} species but the model allows at most {model.capacity}")
    v = model.weight(sample.n, sample.j)
    if v.sign == 0:
        raise ValueError("basic sample has zero probability under the model")
    return v


def old_mass(alpha: float, sample: ObservedSample) -> float:
    """``n - j*alpha``: the total seating weight of the old blocks."""
    return sample.n - sample.j * alpha


def _new_weights(alpha: float, sizes: Sequence[int]) -> SignedLogValue:
    return slv_prod(rising(1.0 - alpha, s - 1) for s in sizes)


def _old_weights(alpha: float, sample: ObservedSample, m_alloc: Sequence[int]) -> SignedLogValue:
    return slv_prod(rising(ni - alpha, mi) for ni, mi in zip(sample.multiplicities, m_alloc))


def _check_sizes(sizes: Sequence[int]) -> tuple[int, ...]:
    sizes = tuple(int(s) for s in sizes)
    if any(s < 1 for s in sizes):
        raise ValueError(f"new block sizes must be positive: {sizes}")
    return sizes


def _check_alloc(sample: ObservedSample, m_alloc: Sequence[int]) -> tuple[int, ...]:
    m_alloc = tuple(int(x) for x in m_alloc)
    if len(m_alloc) != sample.j:
        raise ValueError(f"allocation has {len(m_alloc)} entries for {sample.j} old blocks")
    if any(x < 0 for x in m_alloc):
        raise ValueError(f"allocation entries must be nonnegative: {m_alloc}")
    return m_alloc


def _crp(model: GibbsModel, sample: ObservedSample, m_alloc: tuple[int, ...], sizes: tuple[int, ...]) -> SignedLogValue:
    m = sum(m_alloc) + sum(sizes)
    ratio = model.weight(sample.n + m, sample.j + len(sizes)) / base_weight(model, sample)
    return ratio * _old_weights(model.alpha, sample, m_alloc) * _new_weights(model.alpha, sizes)


def crp_all_old(model: GibbsModel, sample, m_alloc: Sequence[int]) -> float:
    """Probability that the next ``m`` customers sit at the old tables as ``m_alloc``."""
    sample = as_sample(sample)
    return to_probability(_crp(model, sample, _check_alloc(sample, m_alloc), ()), "all-old seating")


def crp_all_new(model: GibbsModel, sample, sizes: Sequence[int]) -> float:
    """Probability of one seating of ``m = sum(sizes)`` customers at new tables only."""
    sample = as_sample(sample)
    sizes = _check_sizes(sizes)
    if not sizes:
        raise ValueError("at least one new table is required")
    return to_probability(_crp(model, sample, (0,) * sample.j, sizes), "all-new seating")


def crp_mixed(model: GibbsModel, sample, m_alloc: Sequence[int], sizes: Sequence[int]) -> float:
    """Probability of one seating with ``m_alloc`` at old tables and ``sizes`` at new ones."""
    sample = as_sample(sample)
    return to_probability(_crp(model, sample, _check_alloc(sample, m_alloc), _check_sizes(sizes)), "mixed seating")


def _new_block_joint(model: GibbsModel, sample: ObservedSample, m: int, sizes: tuple[int, ...]) -> SignedLogValue:
    k, s = len(sizes), sum(sizes)
    if s > m:
        return ZERO
    a = model.alpha
    coef = SignedLogValue(1, lfact(m) - sum(lfact(x) for x in sizes) - lfact(k) - lfact(m - s))
    ratio = model.weight(sample.n + m, sample.j + k) / base_weight(model, sample)
    return coef * ratio * rising(old_mass(a, sample), m - s) * _new_weights(a, sizes)


def new_block_joint(model: GibbsModel, sample, m: int, sizes: Sequence[int]) -> float:
    """``P(K_m=k, S_m=s, S_1=s_1, ..., S_k=s_k | basic sample)``.

    ``sizes`` are the new-block sizes in exchangeable random order, ``k`` and
    ``s`` are their count and sum. Empty ``sizes`` is the no-new-block atom.
    """
    sample = as_sample(sample)
    sizes = _check_sizes(sizes)
    if sum(sizes) > m:
        raise ValueError(f"new blocks hold {sum(sizes)} > m={m} observations")
    return to_probability(_new_block_joint(model, sample, m, sizes), "new-block joint")


# The Definition of the conditional multivariate law marginalizes the joint over
# S_m, but S_m = sum(sizes) is determined by the sizes, so only one term survives.
def conditional_multivariate_gibbs(model: GibbsModel, sample, m: int, sizes: Sequence[int]) -> float:
    """``P(S_1=s_1, ..., S_k=s_k, K_m=k | basic sample)`` with ``k = len(sizes)``."""
    return new_block_joint(model, sample, m, sizes)


def new_block_given_s(model: GibbsModel, sample, m: int, sizes: Sequence[int]) -> float:
    """``P(K_m=k, S_1..S_k | K_n=j, S_m=s)`` with ``s = sum(sizes)``."""
    sample = as_sample(sample)
    sizes = _check_sizes(sizes)
    k, s = len(sizes), sum(sizes)
    if s > m:
        raise ValueError(f"new blocks hold {s} > m={m} observations")
    a, top = model.alpha, sample.n + m
    table = stirling_table(a, s)
    denom = slv_sum(model.weight(top, sample.j + i) * table(s, i) for i in range(0, s + 1))
    coef = SignedLogValue(1, lfact(s) - sum(lfact(x) for x in sizes) - lfact(k))
    return to_probability(coef * model.weight(top, sample.j + k) / denom * _new_weights(a, sizes), "new blocks given S_m")


def new_sizes_given_k_s(alpha: float, sizes: Sequence[int]) -> float:
    """``P(S_1..S_k | K_m=k, S_m=s, K_n=j)``; free of the Gibbs weights."""
    sizes = _check_sizes(sizes)
    if not sizes:
        return 1.0
    k, s = len(sizes), sum(sizes)
    coef = SignedLogValue(1, lfact(s) - sum(lfact(x) for x in sizes) - lfact(k))
    value = coef * _new_weights(alpha, sizes) / stirling_table(alpha, s)(s, k)
    return to_probability(value, "new sizes given K_m, S_m")


def _gamma_new(alpha: float, sample: ObservedSample) -> float:
    return -old_mass(alpha, sample)


def _conditional_marginal(model: GibbsModel, sample: ObservedSample, m: int, parts: tuple[int, ...], k: int) -> SignedLogValue:
    r, used = len(parts), sum(parts)
    rest = m - used
    if rest < 0 or k - r < 0 or k - r > rest:
        return ZERO
    a = model.alpha
    coef = SignedLogValue(1, lfact(m) - sum(lfact(x) for x in parts) - lfact(rest) + lfact(k - r) - lfact(k))
    ratio = model.weight(sample.n + m, sample.j + k) / base_weight(model, sample)
    s = stirling_table(a, rest, _gamma_new(a, sample))(rest, k - r)
    return coef * _new_weights(a, parts) * ratio * s


def conditional_marginal(model: GibbsModel, sample, m: int, parts: Sequence[int], k: int) -> float:
    """``P(S_1=s_1, ..., S_r=s_r, K_m=k | basic sample)``."""
    sample = as_sample(sample)
    parts = _check_sizes(parts)
    if sum(parts) > m or not 0 <= k <= m:
        raise ValueError(f"new blocks {parts} with k={k} do not fit m={m}")
    if not 0 <= k - len(parts) <= m - sum(parts):
        return 0.0
    return to_probability(_conditional_marginal(model, sample, m, parts, k), "conditional marginal")


def km_distribution(model: GibbsModel, sample, m: int, k: int) -> float:
    """``P(K_m = k | basic sample) = V(n+m, j+k)/V(n, j) S(m, k; alpha, -(n - j alpha))``."""
    sample = as_sample(sample)
    if not 0 <= k <= m:
        raise ValueError(f"k={k} outside 0..{m}")
    return to_probability(_conditional_marginal(model, sample, m, (), k), "P(K_m=k)")


def km_pmf(model: GibbsModel, sample, m: int) -> np.ndarray:
    sample = as_sample(sample)
    return np.array([km_distribution(model, sample, m, k) for k in range(m + 1)])


def conditional_sampling_formula(model: GibbsModel, sample, m: int, counts: Sequence[int]) -> float:
    """``P(W_{1,m}=w_1, ..., W_{m,m}=w_m | basic sample)`` for new-block counts."""
    sample = as_sample(sample)
    counts = tuple(int(c) for c in counts)
    if len(counts) > m or any(c < 0 for c in counts):
        raise ValueError(f"invalid new-block counts {counts} for m={m}")
    s = sum(i * c for i, c in enumerate(counts, start=1))
    if s > m:
        raise ValueError(f"new-block counts {counts} use {s} > m={m} observations")
    k = sum(counts)
    a = model.alpha
    terms = [
        fact(m),
        model.weight(sample.n + m, sample.j + k) / base_weight(model, sample),
        rising(old_mass(a, sample), m - s),
        inv_fact(m - s),
    ]
    for i, c in enumerate(counts, start=1):
        if c:
            terms.append(rising(1.0 - a, i - 1) ** c)
            terms.append(SignedLogValue(1, -c * lfact(i) - lfact(c)))
    return to_probability(slv_prod(terms), "conditional sampling formula")


def _w_moment(model: GibbsModel, sample: ObservedSample, m: int, orders: dict[int, int]) -> SignedLogValue:
    big_r = sum(orders.values())
    rest = m - sum(l * r for l, r in orders.items())
    if rest < 0:
        return ZERO
    a = model.alpha
    coef = [fact(m), inv_fact(rest)]
    for l, r in orders.items():
        coef.append((rising(1.0 - a, l - 1) * SignedLogValue(1, -lfact(l))) ** r)
    table = stirling_table(a, rest, _gamma_new(a, sample))
    top = sample.n + m
    inner = slv_sum(model.weight(top, sample.j + k) * table(rest, k - big_r) for k in range(big_r, big_r + rest + 1))
    return slv_prod(coef) * inner / base_weight(model, sample)


def w_joint_factorial_moments(model: GibbsModel, sample, m: int, orders: Sequence[int] | Mapping[int, int]) -> float:
    """``E[prod_l (W_{l,m})_[r_l] | basic sample]`` for new-block counts ``W_{l,m}``."""
    sample = as_sample(sample)
    orders = as_orders(orders)
    if not orders:
        return 1.0
    if sum(l * r for l, r in orders.items()) > m:
        return 0.0
    return _w_moment(model, sample, m, orders).to_real()


def w_factorial_moment(model: GibbsModel, sample, m: int, l: int, r: int) -> float:
    """``E[(W_{l,m})_[r]]``."""
    sample = as_sample(sample)
    if l * r > m:
        return 0.0
    return _w_moment(model, sample, m, {l: r} if r else {}).to_real()


def w_law(model: GibbsModel, sample, m: int, l: int, x: int) -> float:
    """``P(W_{l,m} = x | basic sample)``: number of new blocks of size ``l``."""
    sample = as_sample(sample)
    if not 1 <= l <= m:
        raise ValueError(f"l={l} outside 1..{m}")
    if x < 0 or x > -(-m // l):
        raise ValueError(f"x={x} outside 0..ceil(m/l)")
    value = invert_factorial_moments(x, m // l, lambda q: _w_moment(model, sample, m, {l: q} if q else {}))
    return to_probability(value, f"P(W_{l},{m}={x})")


def w_pmf(model: GibbsModel, sample, m: int, l: int) -> np.ndarray:
    sample = as_sample(sample)
    return np.array([w_law(model, sample, m, l, x) for x in range(m // l + 1)])


def w_mean(model: GibbsModel, sample, m: int, l: int) -> float:
    """``E(W_{l,m})``, the posterior-mean number of new species seen ``l`` times."""
    sample = as_sample(sample)
    if l < 1:
        raise ValueError(f"l={l} must be positive")
    if l > m:
        return 0.0
    a = model.alpha
    table = stirling_table(a, m - l, _gamma_new(a, sample))
    top = sample.n + m
    inner = slv_sum(model.weight(top, sample.j + k) * table(m - l, k - 1) for k in range(1, m - l + 2))
    coef = SignedLogValue(1, lfact(m) - lfact(l) - lfact(m - l)) * rising(1.0 - a, l - 1)
    return (coef * inner / base_weight(model, sample)).to_real()


def new_singleton_law(model: GibbsModel, sample, m: int, x: int) -> float:
    """``P(W_{1,m} = x)`` written out for singletons."""
    sample = as_sample(sample)
    if not 0 <= x <= m:
        raise ValueError(f"x={x} outside 0..{m}")
    a = model.alpha
    table = stirling_table(a, m, _gamma_new(a, sample))
    top = sample.n + m
    terms = []
    for r in range(0, m - x + 1):
        rest = m - r - x
        inner = slv_sum(model.weight(top, sample.j + k) * table(rest, k - r - x) for k in range(r + x, m + 1))
        terms.append(SignedLogValue(-1 if r % 2 else 1, lfact(m) - lfact(x) - lfact(r) - lfact(rest)) * inner)
    return to_probability(slv_sum(terms) / base_weight(model, sample), f"P(W_1,{m}={x})")
