"""Validated containers for compositions, count vectors and samples."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence


def as_composition(parts: Sequence[int]) -> tuple[int, ...]:
    """Validate an ordered sequence of positive block sizes."""
    parts = tuple(int(p) for p in parts)
    if not parts:
        raise ValueError("a composition needs at least one part")
    if any(p < 1 for p in parts):
        raise ValueError(f"composition parts must be positive: {parts}")
    return parts


def as_counts(counts: Sequence[int]) -> tuple[int, ...]:
    """Validate ``(c_1, ..., c_n)`` with ``sum_i i*c_i = n``."""
    counts = tuple(int(c) for c in counts)
    if any(c < 0 for c in counts):
        raise ValueError(f"counts must be nonnegative: {counts}")
    n = len(counts)
    if sum(i * c for i, c in enumerate(counts, start=1)) != n:
        raise ValueError(f"counts {counts} do not encode a partition of n={n}")
    return counts


def as_orders(orders: Sequence[int] | Mapping[int, int]) -> dict[int, int]:
    """Normalize factorial-moment orders to ``{l: r_l}`` with zero entries dropped.

    A sequence is read as ``(r_1, r_2, ...)``.
    """
    if isinstance(orders, Mapping):
        items = orders.items()
    else:
        items = enumerate(orders, start=1)
    out = {}
    for l, r in items:
        l, r = int(l), int(r)
        if l < 1 or r < 0:
            raise ValueError(f"invalid order entry l={l}, r={r}")
        if r:
            out[l] = r
    return out


def compositions(n: int, k: int | None = None) -> Iterator[tuple[int, ...]]:
    """Stream the compositions of ``n`` (into exactly ``k`` parts if given)."""
    if n == 0:
        if k in (None, 0):
            yield ()
        return
    if k is not None and (k < 1 or k > n):
        return
    if k == 1:
        yield (n,)
        return
    hi = n if k is None else n - (k - 1)
    for first in range(1, hi + 1):
        rest = n - first
        if rest == 0:
            if k is None:
                yield (first,)
            continue
        for tail in compositions(rest, None if k is None else k - 1):
            yield (first,) + tail


def integer_partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Stream partitions of ``n`` as nonincreasing tuples."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for tail in integer_partitions(n - first, first):
            yield (first,) + tail


def counts_vectors(n: int) -> Iterator[tuple[int, ...]]:
    """Stream every ``(c_1..c_n)`` with ``sum i*c_i = n``."""
    for part in integer_partitions(n):
        c = [0] * n
        for p in part:
            c[p - 1] += 1
        yield tuple(c)


@dataclass(frozen=True)
class ObservedSample:
    """Basic sample: ``j`` species observed with multiplicities ``n_1..n_j``."""

    multiplicities: tuple[int, ...]

    def __post_init__(self):
        mult = tuple(int(x) for x in self.multiplicities)
        if not mult:
            raise ValueError("an observed sample needs at least one species")
        if any(x < 1 for x in mult):
            raise ValueError(f"multiplicities must be positive: {mult}")
        object.__setattr__(self, "multiplicities", mult)

    @property
    def n(self) -> int:
        return sum(self.multiplicities)

    @property
    def j(self) -> int:
        return len(self.multiplicities)

    def count_of(self, l: int) -> int:
        """Number of species observed exactly ``l`` times."""
        return sum(1 for x in self.multiplicities if x == l)

    def __iter__(self):
        return iter(self.multiplicities)

    def __len__(self):
        return self.j


def as_sample(sample: ObservedSample | Sequence[int]) -> ObservedSample:
    if isinstance(sample, ObservedSample):
        return sample
    return ObservedSample(tuple(sample))
