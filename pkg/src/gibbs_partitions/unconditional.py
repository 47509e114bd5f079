"""Unconditional laws of a Gibbs partition of ``[n]``.

Covers the EPPF, the block-size vectors in size-biased and exchangeable
random order, the sampling formula on counts ``C_{l,n}`` (number of blocks
of size ``l``), marginals of the exchangeable-order vector, the law of the
number of blocks ``K_n``, and joint falling factorial moments of the
counts with the laws they determine.
"""
from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from ._common import fact, inv_fact, invert_factorial_moments, lfact, rising
from .models import GibbsModel
from .numeric import ZERO, SignedLogValue, slv_prod, slv_sum, to_probability
from .stirling import stirling_table
from .structures import as_composition, as_counts, as_orders


def _block_weights(alpha: float, parts: Sequence[int]) -> SignedLogValue:
    return slv_prod(rising(1.0 - alpha, p - 1) for p in parts)


def _eppf(model: GibbsModel, parts: tuple[int, ...]) -> SignedLogValue:
    return model.weight(sum(parts), len(parts)) * _block_weights(model.alpha, parts)


def eppf(model: GibbsModel, parts: Sequence[int]) -> float:
    """Probability of one particular set partition with block sizes ``parts``."""
    parts = as_composition(parts)
    return to_probability(_eppf(model, parts), "eppf")


def size_biased_joint(model: GibbsModel, parts: Sequence[int]) -> float:
    """``P(N_1=n_1, ..., N_k=n_k, K_n=k)`` with blocks in order of least element."""
    parts = as_composition(parts)
    n = sum(parts)
    tails, acc = [], 0
    for p in reversed(parts):
        acc += p
        tails.append(acc)
    log_coef = lfact(n) - sum(np.log(tails)) - sum(lfact(p - 1) for p in parts)
    return to_probability(SignedLogValue(1, float(log_coef)) * _eppf(model, parts), "size-biased joint")


def _multivariate(model: GibbsModel, parts: tuple[int, ...]) -> SignedLogValue:
    n, k = sum(parts), len(parts)
    coef = SignedLogValue(1, lfact(n) - sum(lfact(p) for p in parts) - lfact(k))
    return coef * _eppf(model, parts)


def multivariate_gibbs(model: GibbsModel, parts: Sequence[int]) -> float:
    """Block sizes in exchangeable random order: ``P(N_1=n_1, ..., K_n=k)``."""
    return to_probability(_multivariate(model, as_composition(parts)), "multivariate Gibbs")


def gibbs_sampling_formula(model: GibbsModel, counts: Sequence[int]) -> float:
    """``P(C_{1,n}=c_1, ..., C_{n,n}=c_n)``."""
    counts = as_counts(counts)
    n, k = len(counts), sum(counts)
    terms = [fact(n), model.weight(n, k)]
    for i, c in enumerate(counts, start=1):
        if c:
            terms.append(rising(1.0 - model.alpha, i - 1) ** c)
            terms.append(SignedLogValue(1, -c * lfact(i) - lfact(c)))
    return to_probability(slv_prod(terms), "sampling formula")


def _r_marginal(model: GibbsModel, parts: tuple[int, ...], n: int, k: int) -> SignedLogValue:
    r, used = len(parts), sum(parts)
    rest = n - used
    if k - r < 0 or k - r > rest or k < 1:
        return ZERO
    coef = SignedLogValue(1, lfact(n) - sum(lfact(p) for p in parts) - lfact(rest) - (lfact(k) - lfact(k - r)))
    return coef * _block_weights(model.alpha, parts) * model.weight(n, k) * stirling_table(model.alpha, rest)(rest, k - r)


def _check_marginal_args(parts, n: int, k: int) -> tuple[int, ...]:
    parts = tuple(int(p) for p in parts)
    if any(p < 1 for p in parts):
        raise ValueError(f"block sizes must be positive: {parts}")
    if sum(parts) > n:
        raise ValueError(f"block sizes {parts} exceed n={n}")
    if not 1 <= k <= n:
        raise ValueError(f"k={k} outside 1..{n}")
    return parts


def _marginal_support(parts, n: int, k: int) -> bool:
    return 0 <= k - len(parts) <= n - sum(parts)


def r_marginal(model: GibbsModel, parts: Sequence[int], k: int, n: int) -> float:
    """``P(N_1=n_1, ..., N_r=n_r, K_n=k)`` for the exchangeable-order sizes."""
    parts = _check_marginal_args(parts, n, k)
    if not _marginal_support(parts, n, k):
        return 0.0
    return to_probability(_r_marginal(model, parts, n, k), "r-marginal")


def size_marginal(model: GibbsModel, parts: Sequence[int], n: int) -> float:
    """``P(N_1=n_1, ..., N_r=n_r)`` summed over ``K_n``."""
    parts = tuple(int(p) for p in parts)
    if sum(parts) > n or any(p < 1 for p in parts):
        raise ValueError(f"invalid block sizes {parts} for n={n}")
    r = len(parts)
    terms = [_r_marginal(model, parts, n, k) for k in range(max(r, 1), r + n - sum(parts) + 1)]
    return to_probability(slv_sum(terms), "size marginal")


def _kn(model: GibbsModel, n: int, k: int) -> SignedLogValue:
    return model.weight(n, k) * stirling_table(model.alpha, n)(n, k)


def kn_distribution(model: GibbsModel, n: int, k: int) -> float:
    """``P(K_n = k) = V(n,k) S(n,k; alpha)``."""
    if not 1 <= k <= n:
        raise ValueError(f"k={k} outside 1..{n}")
    return to_probability(_kn(model, n, k), "P(K_n=k)")


def kn_pmf(model: GibbsModel, n: int) -> np.ndarray:
    """Array ``p[k] = P(K_n = k)`` for ``k = 0..n``."""
    out = np.zeros(n + 1)
    for k in range(1, n + 1):
        out[k] = kn_distribution(model, n, k)
    return out


def marginal_given_kn(alpha: float, parts: Sequence[int], n: int, k: int) -> float:
    """``P(N_1=n_1, ..., N_r=n_r | K_n=k)``; depends on alpha only."""
    parts = _check_marginal_args(parts, n, k)
    if not _marginal_support(parts, n, k):
        return 0.0
    r, rest = len(parts), n - sum(parts)
    table = stirling_table(alpha, n)
    coef = SignedLogValue(1, lfact(n) - sum(lfact(p) for p in parts) - lfact(rest) - (lfact(k) - lfact(k - r)))
    value = coef * _block_weights(alpha, parts) * table(rest, k - r) / table(n, k)
    return to_probability(value, "marginal given K_n")


def first_block_mean_given_kn(alpha: float, n: int, k: int) -> float:
    """``E(N_1 | K_n = k) = (n/k) S(n-1, k-1; alpha, -(1-alpha)) / S(n, k; alpha)``."""
    if not 1 <= k <= n:
        raise ValueError(f"k={k} outside 1..{n}")
    num = stirling_table(alpha, n - 1, -(1.0 - alpha))(n - 1, k - 1)
    return (SignedLogValue.from_real(n / k) * num / stirling_table(alpha, n)(n, k)).to_real()


def _joint_moment(model: GibbsModel, n: int, orders: dict[int, int]) -> SignedLogValue:
    big_r = sum(orders.values())
    used = sum(l * r for l, r in orders.items())
    rest = n - used
    if rest < 0:
        return ZERO
    a = model.alpha
    coef = [fact(n), inv_fact(rest)]
    for l, r in orders.items():
        coef.append((rising(1.0 - a, l - 1) * SignedLogValue(1, -lfact(l))) ** r)
    table = stirling_table(a, rest)
    inner = slv_sum(
        model.weight(n, k) * table(rest, k - big_r) for k in range(max(big_r, 1), big_r + rest + 1)
    )
    return slv_prod(coef) * inner


def joint_factorial_moments(model: GibbsModel, n: int, orders: Sequence[int] | Mapping[int, int]) -> float:
    """``E[prod_l (C_{l,n})_[r_l]]``; ``orders`` is ``(r_1, r_2, ...)`` or ``{l: r_l}``."""
    orders = as_orders(orders)
    if not orders:
        return 1.0
    # (C)_[r] vanishes once the requested blocks cannot fit
    return _joint_moment(model, n, orders).to_real()


def cl_factorial_moment(model: GibbsModel, n: int, l: int, r: int) -> float:
    """``E[(C_{l,n})_[r]]``."""
    if l * r > n:
        return 0.0
    return _joint_moment(model, n, {l: r} if r else {}).to_real()


def _check_cl(n: int, l: int, x: int) -> None:
    if not 1 <= l <= n:
        raise ValueError(f"l={l} outside 1..{n}")
    if x < 0 or x > -(-n // l):
        raise ValueError(f"x={x} outside 0..ceil(n/l)")


def cl_law(model: GibbsModel, n: int, l: int, x: int) -> float:
    """``P(C_{l,n} = x)`` by inverting the falling factorial moments.

    The series is summed to the support bound ``floor(n/l)``; the extra
    terms up to ``ceil(n/l)`` vanish identically.
    """
    _check_cl(n, l, x)
    value = invert_factorial_moments(x, n // l, lambda q: _joint_moment(model, n, {l: q} if q else {}))
    return to_probability(value, f"P(C_{l},{n}={x})")


def cl_pmf(model: GibbsModel, n: int, l: int) -> np.ndarray:
    """Array ``p[x] = P(C_{l,n} = x)`` for ``x = 0..floor(n/l)``."""
    return np.array([cl_law(model, n, l, x) for x in range(n // l + 1)])


def cl_mean(model: GibbsModel, n: int, l: int) -> float:
    """``E(C_{l,n}) = C(n,l) (1-alpha)_{l-1} sum_k V(n,k) S(n-l, k-1)``."""
    if not 1 <= l <= n:
        raise ValueError(f"l={l} outside 1..{n}")
    a = model.alpha
    table = stirling_table(a, n - l)
    inner = slv_sum(model.weight(n, k) * table(n - l, k - 1) for k in range(1, n - l + 2))
    coef = SignedLogValue(1, lfact(n) - lfact(l) - lfact(n - l)) * rising(1.0 - a, l - 1)
    return (coef * inner).to_real()


def singleton_law(model: GibbsModel, n: int, x: int) -> float:
    """``P(C_{1,n} = x)`` written out for singletons."""
    if not 0 <= x <= n:
        raise ValueError(f"x={x} outside 0..{n}")
    table = stirling_table(model.alpha, n)
    terms = []
    for r in range(0, n - x + 1):
        rest = n - r - x
        inner = slv_sum(model.weight(n, k) * table(rest, k - r - x) for k in range(max(r + x, 1), n + 1))
        sign = -1 if r % 2 else 1
        terms.append(SignedLogValue(sign, lfact(n) - lfact(x) - lfact(r) - lfact(rest)) * inner)
    return to_probability(slv_sum(terms), f"P(C_1,{n}={x})")


def singleton_mean(model: GibbsModel, n: int) -> float:
    """``E(C_{1,n}) = n sum_k V(n,k) S(n-1, k-1)``."""
    table = stirling_table(model.alpha, n - 1)
    inner = slv_sum(model.weight(n, k) * table(n - 1, k - 1) for k in range(1, n + 1))
    return (SignedLogValue.from_real(n) * inner).to_real()


def probability_from_factorial_moments(moments: Sequence[float], x: int) -> float:
    """``P(X = x)`` from ``moments[q] = E[(X)_[q]]``, ``q = 0..len-1``."""
    vals = [SignedLogValue.from_real(float(m)) for m in moments]
    return to_probability(invert_factorial_moments(x, len(vals) - 1, lambda q: vals[q]))
