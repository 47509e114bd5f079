"""Gibbs weight families ``V(n, k)``.

A Gibbs partition of ``[n]`` into blocks of sizes ``n_1..n_k`` has
probability ``V(n, k) * prod_j (1 - alpha)_{n_j - 1}``. Any weight array
satisfying ``V(1,1) = 1`` and the backward recursion
``V(n, k) = (n - k alpha) V(n+1, k) + V(n+1, k+1)`` defines one.
"""
from __future__ import annotations

import json
import math
import os
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .numeric import ZERO, SignedLogValue, slv_sum


class ModelError(ValueError):
    """Inadmissible model parameters or weight table."""


class GibbsModel(ABC):
    """Weight provider for an exchangeable Gibbs partition."""

    alpha: float

    #: largest number of blocks with positive weight (None means unbounded)
    capacity: int | None = None
    #: largest n for which weights are available (None means unbounded)
    max_n: int | None = None

    @abstractmethod
    def weight(self, n: int, k: int) -> SignedLogValue:
        """``V(n, k)`` for ``1 <= k <= n``."""

    def weight_ratio(self, n1: int, k1: int, n0: int, k0: int) -> SignedLogValue:
        return self.weight(n1, k1) / self.weight(n0, k0)

    def _check_index(self, n: int, k: int) -> None:
        if n < 1 or k < 1 or k > n:
            raise IndexError(f"weight index ({n}, {k}) outside 1 <= k <= n")
        if self.max_n is not None and n > self.max_n:
            raise ModelError(f"weight V({n}, {k}) beyond tabulated max_n={self.max_n}")


@lru_cache(maxsize=512)
def _log_rising_prefix(x: float, h: float, size: int) -> tuple[tuple[int, ...], tuple[float, ...]]:
    signs, logs = [1], [0.0]
    for i in range(size):
        f = x + i * h
        s = signs[-1]
        if s == 0 or f == 0:
            signs.append(0)
            logs.append(-math.inf)
        else:
            signs.append(s * (1 if f > 0 else -1))
            logs.append(logs[-1] + math.log(abs(f)))
    return tuple(signs), tuple(logs)


def _rising(x: float, n: int, h: float) -> SignedLogValue:
    size = 64
    while size < n:
        size *= 2
    signs, logs = _log_rising_prefix(x, h, size)
    return SignedLogValue.from_log(logs[n], signs[n])


@dataclass(frozen=True)
class PitmanYor(GibbsModel):
    """Two-parameter (alpha, theta) Poisson-Dirichlet weights.

    ``V(n, k) = (theta + alpha)_{k-1|alpha} / (theta + 1)_{n-1}``. For
    ``alpha = 0`` this is the Ewens model; for ``alpha < 0`` theta must be
    ``m * |alpha|`` for a positive integer number of classes ``m``, and
    ``V(n, k) = 0`` once ``k > m``.
    """

    alpha: float
    theta: float
    capacity: int | None = field(init=False, default=None)

    def __post_init__(self):
        a, t = float(self.alpha), float(self.theta)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "theta", t)
        if not a < 1:
            raise ModelError(f"alpha must be < 1, got {a!r}")
        if a >= 0:
            if not t > -a:
                raise ModelError(f"theta must exceed -alpha={-a!r}, got {t!r}")
        else:
            m = t / abs(a)
            if m < 0.5 or abs(m - round(m)) > 1e-9:
                raise ModelError(
                    f"alpha < 0 requires theta = m*|alpha| for a positive integer m, got theta={t!r}"
                )
            object.__setattr__(self, "capacity", int(round(m)))

    @classmethod
    def fisher(cls, alpha: float, classes: int) -> "PitmanYor":
        if alpha >= 0 or classes < 1:
            raise ModelError("Fisher model needs alpha < 0 and classes >= 1")
        return cls(alpha, classes * abs(alpha))

    def weight(self, n: int, k: int) -> SignedLogValue:
        self._check_index(n, k)
        if self.capacity is not None and k > self.capacity:
            return ZERO
        return _rising(self.theta + self.alpha, k - 1, self.alpha) / _rising(self.theta + 1, n - 1, 1.0)


def ewens(theta: float) -> PitmanYor:
    return PitmanYor(0.0, theta)


def py_weight(model: PitmanYor, n: int, k: int) -> SignedLogValue:
    return model.weight(n, k)


class TabulatedGibbs(GibbsModel):
    """User-supplied weights ``V(n, k)`` for ``n <= max_n``."""

    def __init__(self, alpha: float, rows: Sequence[Sequence[float]], *, rtol: float = 1e-10):
        if not alpha < 1:
            raise ModelError(f"alpha must be < 1, got {alpha!r}")
        self.alpha = float(alpha)
        rows = [list(map(float, r)) for r in rows]
        if not rows:
            raise ModelError("weight table is empty")
        for i, row in enumerate(rows, start=1):
            if len(row) != i:
                raise ModelError(f"row n={i} must hold {i} weights, got {len(row)}")
            if any(v < 0 or not math.isfinite(v) for v in row):
                raise ModelError(f"row n={i} holds a negative or non-finite weight")
        if abs(rows[0][0] - 1.0) > rtol:
            raise ModelError(f"V(1,1) must equal 1, got {rows[0][0]!r}")
        self.max_n = len(rows)
        self._rows = tuple(tuple(r) for r in rows)
        nz = [k for row in rows for k, v in enumerate(row, start=1) if v == 0]
        self.capacity = min(nz) - 1 if nz else None
        check = verify_backward_recursion(self, self.max_n - 1, rtol=rtol)
        if not check.ok:
            raise ModelError(f"weights violate the backward recursion at {check.first_violation}")

    def weight(self, n: int, k: int) -> SignedLogValue:
        self._check_index(n, k)
        return SignedLogValue.from_real(self._rows[n - 1][k - 1])

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "maxN": self.max_n, "rows": [list(r) for r in self._rows]}

    def __repr__(self) -> str:
        return f"TabulatedGibbs(alpha={self.alpha!r}, max_n={self.max_n})"


def tabulate(model: GibbsModel, max_n: int) -> TabulatedGibbs:
    """Freeze any model's weights into a table (e.g. to write a weights file)."""
    rows = [[model.weight(n, k).to_real() for k in range(1, n + 1)] for n in range(1, max_n + 1)]
    return TabulatedGibbs(model.alpha, rows)


def load_weights(path: str | os.PathLike) -> TabulatedGibbs:
    """Read a JSON weight file ``{"alpha": a, "maxN": N, "rows": [[V11], [V21, V22], ...]}``."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        alpha, max_n, rows = doc["alpha"], int(doc["maxN"]), doc["rows"]
    except (KeyError, TypeError) as exc:
        raise ModelError(f"weight file needs fields alpha, maxN, rows: {exc}") from None
    if len(rows) != max_n:
        raise ModelError(f"maxN={max_n} but {len(rows)} rows given")
    return TabulatedGibbs(alpha, rows)


@dataclass(frozen=True)
class RecursionCheck:
    ok: bool
    first_violation: tuple[int, int] | None = None
    max_rel_error: float = 0.0

    def __bool__(self) -> bool:
        return self.ok


def verify_backward_recursion(model: GibbsModel, max_n: int, rtol: float = 1e-10) -> RecursionCheck:
    """Check ``V(n,k) = (n - k alpha) V(n+1,k) + V(n+1,k+1)`` for all ``k <= n <= max_n``."""
    a = model.alpha
    worst = 0.0
    if abs(model.weight(1, 1).to_real() - 1.0) > rtol:
        return RecursionCheck(False, (1, 1), math.inf)
    for n in range(1, max_n + 1):
        for k in range(1, n + 1):
            lhs = model.weight(n, k)
            rhs = slv_sum((SignedLogValue.from_real(n - k * a) * model.weight(n + 1, k), model.weight(n + 1, k + 1)))
            err = _rel_err(lhs, rhs)
            worst = max(worst, err)
            if err > rtol:
                return RecursionCheck(False, (n, k), err)
    return RecursionCheck(True, None, worst)


def _rel_err(a: SignedLogValue, b: SignedLogValue) -> float:
    if a.sign == 0 and b.sign == 0:
        return 0.0
    if a.sign == 0 or b.sign == 0:
        # a zero weight against a tiny remainder from the other side
        other = b if a.sign == 0 else a
        return 0.0 if other.logmag < math.log(1e-300) else math.inf
    if a.sign != b.sign:
        return math.inf
    return abs(math.expm1(b.logmag - a.logmag))


def weight_matrix(model: GibbsModel, max_n: int) -> np.ndarray:
    """Dense float array ``W[n, k] = V(n, k)`` (zero outside the triangle)."""
    out = np.zeros((max_n + 1, max_n + 1))
    for n in range(1, max_n + 1):
        for k in range(1, n + 1):
            out[n, k] = model.weight(n, k).to_real()
    return out
