"""Brute-force ground truth by exhaustive set-partition enumeration.

Everything here is plain float arithmetic over explicit partitions, kept
deliberately independent of the log-space machinery it is used to check.
Sizes are guarded: Bell(13) is already about 2.8e7 partitions.
"""
from __future__ import annotations

import itertools
import math
import os
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Hashable, Iterator, Sequence

from .models import GibbsModel
from .structures import ObservedSample, as_sample

DEFAULT_MAX_N = 13


class GuardError(ValueError):
    """Requested enumeration exceeds the size guard."""


def max_n_guard() -> int:
    """Enumeration guard; ``GIBBS_MAX_N`` overrides it at the caller's risk."""
    env = os.environ.get("GIBBS_MAX_N")
    return int(env) if env else DEFAULT_MAX_N


def _guard(size: int) -> None:
    limit = max_n_guard()
    if size > limit:
        raise GuardError(f"enumeration of size {size} exceeds guard {limit} (set GIBBS_MAX_N to override)")


def enumerate_partitions(n: int) -> Iterator[tuple[int, ...]]:
    """Yield every set partition of ``[n]`` once, as a restricted growth string."""
    if n < 1:
        raise ValueError("n must be positive")
    _guard(n)
    a = [0] * n
    top = [0] * n  # top[i] = max(a[:i+1])
    while True:
        yield tuple(a)
        i = n - 1
        while i > 0 and a[i] > top[i - 1]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        top[i] = max(top[i - 1], a[i])
        for t in range(i + 1, n):
            a[t] = 0
            top[t] = top[i]


def block_sizes(rgs: Sequence[int]) -> tuple[int, ...]:
    """Block sizes in order of appearance."""
    sizes = [0] * (max(rgs) + 1)
    for b in rgs:
        sizes[b] += 1
    return tuple(sizes)


def bell_number(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def _rising(x: float, n: int) -> float:
    out = 1.0
    for i in range(n):
        out *= x + i
    return out


def eppf_float(model: GibbsModel, sizes: Sequence[int]) -> float:
    w = model.weight(sum(sizes), len(sizes)).to_real()
    for s in sizes:
        w *= _rising(1.0 - model.alpha, s - 1)
    return w


def _check_mass(total: float, tol: float = 1e-12) -> None:
    if abs(total - 1.0) > tol:
        raise AssertionError(f"oracle total mass {total!r} differs from 1")


def _aggregate(items) -> dict:
    acc: dict = defaultdict(list)
    for key, p in items:
        acc[key].append(p)
    table = {key: math.fsum(ps) for key, ps in acc.items()}
    _check_mass(math.fsum(table.values()))
    return table


def oracle_distribution(model: GibbsModel, n: int, statistic: Callable[[tuple[int, ...]], Hashable]) -> dict:
    """Law of ``statistic(block_sizes)`` under the model, by enumeration of ``[n]``."""
    return _aggregate((statistic(block_sizes(rgs)), eppf_float(model, block_sizes(rgs))) for rgs in enumerate_partitions(n))


def oracle_exchangeable_order(model: GibbsModel, n: int) -> dict[tuple[int, ...], float]:
    """Law of block sizes listed in uniformly random order."""

    by_multiset = _aggregate(
        (tuple(sorted(block_sizes(rgs))), eppf_float(model, block_sizes(rgs))) for rgs in enumerate_partitions(n)
    )

    def spread():
        # each distinct ordering of a multiset is equally likely
        for sizes, p in by_multiset.items():
            perms = set(_distinct_permutations(sizes))
            for perm in perms:
                yield perm, p / len(perms)

    return _aggregate(spread())


def _distinct_permutations(items: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    if not items:
        yield ()
        return
    for value in sorted(set(items)):
        i = items.index(value)
        for rest in _distinct_permutations(items[:i] + items[i + 1 :]):
            yield (value,) + rest


@dataclass(frozen=True)
class Extension:
    """One way of seating ``m`` further labeled observations.

    ``labels[t]`` is the block of observation ``n+1+t``: indices below ``j``
    are old blocks, larger ones are new blocks in order of appearance.
    """

    j: int
    labels: tuple[int, ...]
    old_increments: tuple[int, ...]
    new_sizes: tuple[int, ...]

    def final_old_sizes(self, sample: ObservedSample) -> tuple[int, ...]:
        return tuple(a + b for a, b in zip(sample.multiplicities, self.old_increments))


def enumerate_extensions(j: int, m: int) -> Iterator[tuple[int, ...]]:
    """Label strings for ``m`` new observations given ``j`` old blocks."""

    def rec(prefix: list[int], top: int):
        if len(prefix) == m:
            yield tuple(prefix)
            return
        for b in range(top + 1):
            prefix.append(b)
            yield from rec(prefix, max(top, b + 1) if b == top else top)
            prefix.pop()

    # `top` is the index a brand-new block would receive
    yield from rec([], j)


def _extension(j: int, labels: tuple[int, ...]) -> Extension:
    inc = [0] * j
    new: list[int] = []
    for b in labels:
        if b < j:
            inc[b] += 1
        else:
            if b - j == len(new):
                new.append(0)
            new[b - j] += 1
    return Extension(j, labels, tuple(inc), tuple(new))


def iter_extensions(model: GibbsModel, sample, m: int) -> Iterator[tuple[Extension, float]]:
    """Every seating of ``m`` new observations with its conditional probability."""
    sample = as_sample(sample)
    _guard(sample.n + m)
    base = eppf_float(model, sample.multiplicities)
    if base == 0:
        raise ValueError("basic sample has zero probability")
    for labels in enumerate_extensions(sample.j, m):
        ext = _extension(sample.j, labels)
        sizes = ext.final_old_sizes(sample) + ext.new_sizes
        yield ext, eppf_float(model, sizes) / base


def oracle_conditional(model: GibbsModel, sample, m: int, statistic: Callable[[Extension], Hashable]) -> dict:
    """Law of ``statistic(extension)`` given the basic sample."""
    sample = as_sample(sample)
    return _aggregate((statistic(ext), p) for ext, p in iter_extensions(model, sample, m))


def oracle_conditional_exchangeable(model: GibbsModel, sample, m: int) -> dict[tuple[int, ...], float]:
    """Law of new-block sizes listed in uniformly random order."""

    def spread():
        for ext, p in iter_extensions(model, sample, m):
            k = len(ext.new_sizes)
            for perm in itertools.permutations(ext.new_sizes):
                yield perm, p / math.factorial(k)

    return _aggregate(spread())


def expectation(table: dict, fn: Callable = lambda v: v) -> float:
    return math.fsum(p * fn(v) for v, p in table.items())


def falling(x: int, r: int) -> int:
    out = 1
    for i in range(r):
        out *= x - i
    return out


# --- independent closed forms and brute-force special numbers --------------


def unsigned_stirling_first(n: int, k: int) -> int:
    """``|s(n, k)|`` by the integer recurrence."""
    row = [1]
    for i in range(n):
        nxt = [0] * (len(row) + 1)
        for kk, v in enumerate(row):
            nxt[kk] += i * v
            nxt[kk + 1] += v
        row = nxt
    return row[k] if 0 <= k < len(row) else 0


def stirling_by_compositions(n: int, k: int, alpha: float) -> float:
    """``(n!/k!) sum over compositions prod (1-alpha)_{n_j-1}/n_j!``."""
    from .structures import compositions

    if n == 0 and k == 0:
        return 1.0
    total = math.fsum(
        math.prod(_rising(1 - alpha, p - 1) / math.factorial(p) for p in comp) for comp in compositions(n, k)
    )
    return math.factorial(n) / math.factorial(k) * total


def noncentral_stirling_recurrence(n: int, k: int, alpha: float, gamma: float) -> float:
    """``S(n+1,k) = S(n,k-1) + (n - k alpha - gamma) S(n,k)``, ``S(0,0) = 1``."""
    row = [1.0]
    for i in range(n):
        nxt = [0.0] * (len(row) + 1)
        for kk, v in enumerate(row):
            nxt[kk] += (i - kk * alpha - gamma) * v
            nxt[kk + 1] += v
        row = nxt
    return row[k] if 0 <= k < len(row) else 0.0


def ewens_factorial_moments(theta: float, n: int, orders: dict[int, int]) -> float:
    """Joint falling factorial moments of the Ewens sampling formula."""
    used = sum(l * r for l, r in orders.items())
    if used > n:
        return 0.0
    out = math.factorial(n) / math.factorial(n - used) * _rising(theta, n - used) / _rising(theta, n)
    for l, r in orders.items():
        out *= (theta / l) ** r
    return out


def pitman_yor_factorial_moments(alpha: float, theta: float, n: int, orders: dict[int, int]) -> float:
    """Joint falling factorial moments of the two-parameter sampling formula."""
    used = sum(l * r for l, r in orders.items())
    big_r = sum(orders.values())
    if used > n:
        return 0.0
    if big_r == 0:
        return 1.0
    gen = 1.0
    for i in range(big_r - 1):
        gen *= theta + alpha + i * alpha
    out = math.factorial(n) / math.factorial(n - used) * gen / _rising(theta + 1, n - 1)
    for l, r in orders.items():
        out *= (_rising(1 - alpha, l - 1) / math.factorial(l)) ** r
    return out * _rising(theta + alpha * big_r, n - used)
