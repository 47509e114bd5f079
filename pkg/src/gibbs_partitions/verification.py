"""Closed forms against exhaustive enumeration, reported as max deviations."""
from __future__ import annotations

import itertools
import math
from collections import defaultdict

from . import conditional as cond
from . import estimators as est
from . import polya
from . import unconditional as unc
from .models import GibbsModel
from .oracle import (
    block_sizes,
    enumerate_partitions,
    eppf_float,
    expectation,
    falling,
    iter_extensions,
    oracle_conditional,
    oracle_conditional_exchangeable,
    oracle_exchangeable_order,
)
from .structures import ObservedSample, as_sample, counts_vectors


def _orders(total: int, max_parts: int = 2):
    """Factorial-moment orders ``{l: r}`` with at most ``max_parts`` distinct sizes."""
    yield {}
    for l1 in range(1, total + 1):
        for r1 in range(1, total // l1 + 1):
            yield {l1: r1}
            if max_parts < 2:
                continue
            for l2 in range(l1 + 1, total + 1):
                for r2 in range(1, (total - l1 * r1) // l2 + 1):
                    yield {l1: r1, l2: r2}


def _counts_stat(sizes, l):
    return sum(1 for s in sizes if s == l)


def _moment(table, orders: dict, counter):
    return expectation(table, lambda v: math.prod(falling(counter(v, l), r) for l, r in orders.items()))


def _dev(store: dict, name: str, a: float, b: float) -> None:
    store[name] = max(store.get(name, 0.0), abs(a - b))


def verify_unconditional(model: GibbsModel, n: int) -> dict[str, float]:
    out: dict[str, float] = {}
    atoms = [(sizes, eppf_float(model, sizes)) for sizes in map(block_sizes, enumerate_partitions(n))]
    total = math.fsum(p for _, p in atoms)
    if abs(total - 1.0) > 1e-12:
        raise AssertionError(f"oracle mass {total!r} != 1")

    def table(stat):
        agg = defaultdict(float)
        for sizes, p in atoms:
            agg[stat(sizes)] += p
        return dict(agg)

    ex = oracle_exchangeable_order(model, n)
    for comp, p in ex.items():
        _dev(out, "multivariate_gibbs", unc.multivariate_gibbs(model, comp), p)
        _dev(out, "eppf", unc.eppf(model, comp),
             p * math.factorial(len(comp)) * math.prod(math.factorial(c) for c in comp) / math.factorial(n))
    sb = table(lambda sizes: sizes)
    for comp, p in sb.items():
        _dev(out, "size_biased_joint", unc.size_biased_joint(model, comp), p)
    counts = table(lambda sizes: tuple(_counts_stat(sizes, l) for l in range(1, n + 1)))
    for cv in counts_vectors(n):
        _dev(out, "gibbs_sampling_formula", unc.gibbs_sampling_formula(model, cv), counts.get(cv, 0.0))
    kn = table(len)
    for k in range(1, n + 1):
        _dev(out, "kn_distribution", unc.kn_distribution(model, n, k), kn.get(k, 0.0))
    for r in (1, 2):
        marg = defaultdict(float)
        for comp, p in ex.items():
            if len(comp) >= r:
                marg[(comp[:r], len(comp))] += p
        for (parts, k), p in marg.items():
            _dev(out, "r_marginal", unc.r_marginal(model, parts, k, n), p)
            pk = kn[k]
            if pk > 0:
                _dev(out, "marginal_given_kn", unc.marginal_given_kn(model.alpha, parts, n, k), p / pk)
        sm = defaultdict(float)
        for (parts, k), p in marg.items():
            sm[parts] += p
        for parts, p in sm.items():
            _dev(out, "size_marginal", unc.size_marginal(model, parts, n), p)
    first = defaultdict(float)
    for comp, p in ex.items():
        first[len(comp)] += p * comp[0]
    for k in range(1, n + 1):
        if kn.get(k, 0.0) > 0:
            _dev(out, "first_block_mean_given_kn", unc.first_block_mean_given_kn(model.alpha, n, k), first[k] / kn[k])
    for orders in _orders(n):
        _dev(out, "joint_factorial_moments", unc.joint_factorial_moments(model, n, orders),
             _moment(counts, orders, lambda v, l: v[l - 1]))
    for l in range(1, n + 1):
        cl = table(lambda sizes: _counts_stat(sizes, l))
        for x in range(n // l + 1):
            _dev(out, "cl_law", unc.cl_law(model, n, l, x), cl.get(x, 0.0))
        _dev(out, "cl_mean", unc.cl_mean(model, n, l), expectation(cl))
        if l == 1:
            for x in range(n + 1):
                _dev(out, "singleton_law", unc.singleton_law(model, n, x), cl.get(x, 0.0))
            _dev(out, "singleton_mean", unc.singleton_mean(model, n), expectation(cl))
    return out


def verify_conditional(model: GibbsModel, sample, m: int, estimators: bool = True) -> dict[str, float]:
    sample = as_sample(sample)
    out: dict[str, float] = {}
    j = sample.j
    exts = list(iter_extensions(model, sample, m))
    total = math.fsum(p for _, p in exts)
    if abs(total - 1.0) > 1e-12:
        raise AssertionError(f"conditional oracle mass {total!r} != 1")

    def table(stat):
        agg = defaultdict(float)
        for ext, p in exts:
            agg[stat(ext)] += p
        return dict(agg)

    for ext, p in exts:
        _dev(out, "crp_seating", cond.crp_mixed(model, sample, ext.old_increments, ext.new_sizes), p)
    ex = oracle_conditional_exchangeable(model, sample, m)
    ks = defaultdict(float)
    for sizes, p in ex.items():
        ks[(len(sizes), sum(sizes))] += p
    s_tot = defaultdict(float)
    for (k, s), p in ks.items():
        s_tot[s] += p
    for sizes, p in ex.items():
        if p == 0.0:
            continue
        _dev(out, "new_block_joint", cond.new_block_joint(model, sample, m, sizes), p)
        _dev(out, "conditional_multivariate_gibbs", cond.conditional_multivariate_gibbs(model, sample, m, sizes), p)
        _dev(out, "new_block_given_s", cond.new_block_given_s(model, sample, m, sizes), p / s_tot[sum(sizes)])
        _dev(out, "new_sizes_given_k_s", cond.new_sizes_given_k_s(model.alpha, sizes),
             p / ks[(len(sizes), sum(sizes))])
    for r in (1, 2):
        marg = defaultdict(float)
        for sizes, p in ex.items():
            if len(sizes) >= r:
                marg[(sizes[:r], len(sizes))] += p
        for (parts, k), p in marg.items():
            _dev(out, "conditional_marginal", cond.conditional_marginal(model, sample, m, parts, k), p)
    km = table(lambda e: len(e.new_sizes))
    for k in range(m + 1):
        _dev(out, "km_distribution", cond.km_distribution(model, sample, m, k), km.get(k, 0.0))
    wc = table(lambda e: tuple(_counts_stat(e.new_sizes, l) for l in range(1, m + 1)))
    for w, p in wc.items():
        _dev(out, "conditional_sampling_formula", cond.conditional_sampling_formula(model, sample, m, w), p)
    for orders in _orders(m):
        _dev(out, "w_joint_factorial_moments", cond.w_joint_factorial_moments(model, sample, m, orders),
             _moment(wc, orders, lambda v, l: v[l - 1]))
    for l in range(1, m + 1):
        wl = table(lambda e: _counts_stat(e.new_sizes, l))
        for x in range(m // l + 1):
            _dev(out, "w_law", cond.w_law(model, sample, m, l, x), wl.get(x, 0.0))
        _dev(out, "w_mean", cond.w_mean(model, sample, m, l), expectation(wl))
    w1 = table(lambda e: _counts_stat(e.new_sizes, 1))
    for x in range(m + 1):
        _dev(out, "new_singleton_law", cond.new_singleton_law(model, sample, m, x), w1.get(x, 0.0))

    alloc = table(lambda e: (e.old_increments, sum(e.new_sizes)))
    for (inc, s), p in alloc.items():
        _dev(out, "polya_gibbs_joint", polya.polya_gibbs_joint(model, sample, m, inc, s), p)
    for r in range(1, min(j, 2) + 1):
        marg = defaultdict(float)
        for (inc, s), p in alloc.items():
            marg[inc[:r]] += p
        for first in itertools.product(range(m + 1), repeat=r):
            if sum(first) <= m:
                _dev(out, "old_increments_marginal", polya.old_increments_marginal(model, sample, m, first),
                     marg.get(first, 0.0))
    top = sample.n + m
    oc = table(lambda e: tuple(_counts_stat(e.final_old_sizes(sample), l) for l in range(1, top + 1)))
    for orders in _orders(min(top, 6)):
        if sum(orders.values()) <= j:
            _dev(out, "o_joint_factorial_moments", polya.o_joint_factorial_moments(model, sample, m, orders),
                 _moment(oc, orders, lambda v, l: v[l - 1]))
    for l in range(1, top + 1):
        ol = table(lambda e: _counts_stat(e.final_old_sizes(sample), l))
        for y in range(j + 1):
            _dev(out, "o_law", polya.o_law(model, sample, m, l, y), ol.get(y, 0.0))
        _dev(out, "o_mean", polya.o_mean(model, sample, m, l), expectation(ol))
        zl = table(lambda e: _counts_stat(e.final_old_sizes(sample) + e.new_sizes, l))
        for r in range(0, 4):
            _dev(out, "z_factorial_moment", polya.z_factorial_moment(model, sample, m, l, r),
                 expectation(zl, lambda v: falling(v, r)))
    if estimators:
        out.update(verify_estimators(model, sample, m))
    return out


def next_hit(sample: ObservedSample):
    """Statistic on an ``(m+1)``-extension: what the last observation joined."""

    def stat(e):
        last, earlier = e.labels[-1], e.labels[:-1]
        before = sum(1 for b in earlier if b == last)
        if last < sample.j:
            return ("old", sample.multiplicities[last] + before)
        return ("new", before) if before else ("discovery", 0)

    return stat


def verify_estimators(model: GibbsModel, sample, m: int) -> dict[str, float]:
    sample = as_sample(sample)
    out: dict[str, float] = {}
    hits = oracle_conditional(model, sample, m + 1, next_hit(sample))
    _dev(out, "discovery_probability", est.discovery_probability(model, sample, m), hits.get(("discovery", 0), 0.0))
    for l in range(1, m + 1):
        _dev(out, "estimate_new_l", est.estimate_new_l(model, sample, m, l), hits.get(("new", l), 0.0))
    for l in range(1, sample.n + m + 1):
        _dev(out, "estimate_old_l", est.estimate_old_l(model, sample, m, l), hits.get(("old", l), 0.0))
        _dev(out, "estimate_old_l_blockwise", est.estimate_old_l_blockwise(model, sample, m, l),
             hits.get(("old", l), 0.0))
    if m == 0:
        for l in range(1, sample.n + 1):
            _dev(out, "one_step_old_l", est.one_step_old_l(model, sample, l), hits.get(("old", l), 0.0))
    return out


def run_verification(model: GibbsModel, n: int, m: int | None = None, sample=None) -> dict:
    """Full suite at size ``n`` (and conditional at extension ``m`` if given).

    Without an explicit basic sample the conditional checks use a fixed
    sample of size ``n``: ``(2, 1, 1, ...)``.
    """
    checks = {f"unconditional.{k}": v for k, v in verify_unconditional(model, n).items()}
    if m is not None:
        if sample is None:
            sample = ObservedSample((2,) + (1,) * (n - 2)) if n >= 2 else ObservedSample((1,))
        sample = as_sample(sample)
        checks.update({f"conditional.{k}": v for k, v in verify_conditional(model, sample, m).items()})
    return {"max_deviation": max(checks.values()), "checks": checks}
