"""Sequential (Chinese restaurant) samplers for Gibbs partitions.

Observation ``n+1`` joins existing block ``i`` with probability
``V(n+1, k)/V(n, k) * (n_i - alpha)`` and opens a new block with
probability ``V(n+1, k+1)/V(n, k)``; the backward recursion makes these
sum to one. Single-path functions take a ``numpy.random.Generator``; the
batch simulators vectorize over replicates and split them into chunks with
independent child seeds.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .models import GibbsModel
from .numeric import warn
from .structures import as_sample

logger = logging.getLogger(__name__)

DRIFT_TOL = 1e-9
CHUNK = 20_000


@dataclass(frozen=True)
class PartitionState:
    """Block sizes in order of appearance."""

    block_sizes: tuple[int, ...] = ()

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.block_sizes)
        if any(s < 1 for s in sizes):
            raise ValueError(f"block sizes must be positive: {sizes}")
        object.__setattr__(self, "block_sizes", sizes)

    @property
    def n(self) -> int:
        return sum(self.block_sizes)

    @property
    def k(self) -> int:
        return len(self.block_sizes)


def _log_ratio(model: GibbsModel, n1: int, k1: int, n0: int, k0: int) -> float:
    num = model.weight(n1, k1)
    if num.sign == 0:
        return -math.inf
    den = model.weight(n0, k0)
    return num.logmag - den.logmag


def step_probabilities(model: GibbsModel, sizes) -> np.ndarray:
    """Seating probabilities: one entry per existing block, then the new block."""
    sizes = tuple(sizes)
    n, k = sum(sizes), len(sizes)
    if n == 0:
        return np.array([1.0])
    old = math.exp(_log_ratio(model, n + 1, k, n, k))
    p = np.array([old * (s - model.alpha) for s in sizes] + [math.exp(_log_ratio(model, n + 1, k + 1, n, k))])
    return p


def _normalized(p: np.ndarray) -> np.ndarray:
    total = p.sum()
    if abs(total - 1.0) > DRIFT_TOL:
        warn(f"seating probabilities sum to {total!r}; renormalizing")
    return p / total


def sample_step(model: GibbsModel, state: PartitionState, rng: np.random.Generator) -> PartitionState:
    """Seat one more observation."""
    p = _normalized(step_probabilities(model, state.block_sizes))
    choice = int(rng.choice(len(p), p=p))
    sizes = list(state.block_sizes)
    if choice == len(sizes):
        sizes.append(1)
    else:
        sizes[choice] += 1
    return PartitionState(tuple(sizes))


def sample_partition(model: GibbsModel, n: int, rng: np.random.Generator) -> PartitionState:
    state = PartitionState()
    for _ in range(n):
        state = sample_step(model, state, rng)
    return state


def sample_conditional(
    model: GibbsModel, sample, m: int, rng: np.random.Generator
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Extend a basic sample by ``m`` observations.

    Returns ``(new_sizes, old_increments)``: sizes of the blocks opened by
    the extension and the number of new observations each old block got.
    """
    sample = as_sample(sample)
    state = PartitionState(sample.multiplicities)
    for _ in range(m):
        state = sample_step(model, state, rng)
    sizes = state.block_sizes
    inc = tuple(b - a for a, b in zip(sample.multiplicities, sizes[: sample.j]))
    return sizes[sample.j :], inc


# --- vectorized replicates --------------------------------------------------


class _RatioTable:
    def __init__(self, model: GibbsModel, max_n: int, max_k: int):
        self.alpha = model.alpha
        logv = np.full((max_n + 2, max_k + 2), -np.inf)
        for n in range(1, max_n + 2):
            for k in range(1, min(n, max_k + 1) + 1):
                w = model.weight(n, k)
                if w.sign:
                    logv[n, k] = w.logmag
        self.logv = logv

    def step(self, n: int, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        base = self.logv[n, k]
        with np.errstate(invalid="ignore"):
            old = np.exp(self.logv[n + 1, k] - base)
            new = np.exp(self.logv[n + 1, k + 1] - base)
        return np.nan_to_num(old), np.nan_to_num(new)


def _advance(table: _RatioTable, sizes: np.ndarray, k: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """One vectorized seating step; mutates ``sizes``/``k`` and returns chosen columns."""
    reps, width = sizes.shape
    cols = np.arange(width)
    old, new = table.step(n, k)
    w = np.where(cols[None, :] < k[:, None], (sizes - table.alpha) * old[:, None], 0.0)
    rows = np.arange(reps)
    w[rows, k] = new
    cum = np.cumsum(w, axis=1)
    total = cum[:, -1]
    drift = np.max(np.abs(total - 1.0))
    if drift > DRIFT_TOL:
        warn(f"seating probabilities drift by {drift:.3e}; renormalizing")
    u = rng.random(reps) * total
    choice = (cum <= u[:, None]).sum(axis=1)
    choice = np.minimum(choice, k)
    sizes[rows, choice] += 1
    k += choice == k
    return choice


def _chunks(reps: int, seed: int):
    n_chunks = max(1, -(-reps // CHUNK))
    seqs = np.random.SeedSequence(seed).spawn(n_chunks)
    for i, seq in enumerate(seqs):
        yield min(CHUNK, reps - i * CHUNK), np.random.default_rng(seq)


def simulate_partitions(model: GibbsModel, n: int, reps: int, seed: int = 0) -> np.ndarray:
    """Block sizes of ``reps`` independent partitions of ``[n]`` (rows padded with 0)."""
    table = _RatioTable(model, n, n)
    out = []
    for size, rng in _chunks(reps, seed):
        sizes = np.zeros((size, n + 1), dtype=np.int64)
        sizes[:, 0] = 1
        k = np.ones(size, dtype=np.int64)
        for t in range(1, n):
            _advance(table, sizes, k, t, rng)
        out.append(sizes[:, :n])
    return np.concatenate(out)


def simulate_assignments(model: GibbsModel, n: int, reps: int, seed: int = 0) -> np.ndarray:
    """Block label of each observation (restricted growth strings), shape ``(reps, n)``."""
    table = _RatioTable(model, n, n)
    out = []
    for size, rng in _chunks(reps, seed):
        sizes = np.zeros((size, n + 1), dtype=np.int64)
        sizes[:, 0] = 1
        k = np.ones(size, dtype=np.int64)
        labels = np.zeros((size, n), dtype=np.int64)
        for t in range(1, n):
            labels[:, t] = _advance(table, sizes, k, t, rng)
        out.append(labels)
    return np.concatenate(out)


@dataclass
class ConditionalDraws:
    """Replicates of an ``m``-step extension of a basic sample.

    ``old_sizes``: final sizes of the ``j`` old blocks; ``new_sizes``: sizes
    of new blocks (zero padded); when the next observation was also drawn,
    ``next_kind`` is 0 for an old block, 1 for a new block from the
    extension, 2 for a fresh block, and ``next_size`` is the size of the hit
    block before it joined.
    """

    old_sizes: np.ndarray
    new_sizes: np.ndarray
    next_kind: np.ndarray | None = None
    next_size: np.ndarray | None = None

    def w_counts(self, l: int) -> np.ndarray:
        return (self.new_sizes == l).sum(axis=1)

    def o_counts(self, l: int) -> np.ndarray:
        return (self.old_sizes == l).sum(axis=1)

    def k_new(self) -> np.ndarray:
        return (self.new_sizes > 0).sum(axis=1)


def simulate_conditional(
    model: GibbsModel, sample, m: int, reps: int, seed: int = 0, observe_next: bool = False
) -> ConditionalDraws:
    """Extend the basic sample ``reps`` times by ``m`` observations."""
    sample = as_sample(sample)
    j, n0 = sample.j, sample.n
    steps = m + (1 if observe_next else 0)
    table = _RatioTable(model, n0 + steps, j + steps)
    parts = {"old": [], "new": [], "kind": [], "size": []}
    for size, rng in _chunks(reps, seed):
        sizes = np.zeros((size, j + steps + 1), dtype=np.int64)
        sizes[:, :j] = sample.multiplicities
        k = np.full(size, j, dtype=np.int64)
        for t in range(m):
            _advance(table, sizes, k, n0 + t, rng)
        parts["old"].append(sizes[:, :j].copy())
        parts["new"].append(sizes[:, j : j + m].copy())
        if observe_next:
            before = sizes.copy()
            k_before = k.copy()
            choice = _advance(table, sizes, k, n0 + m, rng)
            rows = np.arange(size)
            kind = np.where(choice < j, 0, np.where(choice < k_before, 1, 2))
            parts["kind"].append(kind)
            parts["size"].append(before[rows, choice])
    return ConditionalDraws(
        np.concatenate(parts["old"]),
        np.concatenate(parts["new"]),
        np.concatenate(parts["kind"]) if observe_next else None,
        np.concatenate(parts["size"]) if observe_next else None,
    )
