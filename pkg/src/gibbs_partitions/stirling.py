"""Central and non-central generalized Stirling numbers.

``S(n, k; alpha)`` are the connection coefficients of ``(x)_n`` on the
generalized rising factorials ``(x)_{k|alpha}``; the non-central variant
``S(n, k; alpha, gamma)`` connects ``(y*alpha - gamma)_n`` on the same
basis. Tables are triangular, stored as sign/log arrays, and shared
through a process-wide cache keyed on the exact float bits of the
parameters.
"""
from __future__ import annotations

import math
import threading

import numpy as np

from .numeric import ONE, ZERO, SignedLogValue, slv_sum

_MIN_TABLE = 32


class StirlingTable:
    """Immutable triangular table of (non-)central generalized Stirling numbers."""

    def __init__(self, alpha: float, max_n: int, gamma: float | None = None):
        _check_alpha(alpha)
        if max_n < 0:
            raise ValueError("max_n must be nonnegative")
        self.alpha = float(alpha)
        self.gamma = None if gamma is None else float(gamma)
        self.max_n = int(max_n)
        if self.gamma is None:
            sign, logv = _central_tables(self.alpha, self.max_n)
            direct = _central_direct(self.alpha, self.max_n)
        else:
            sign, logv = _noncentral_tables(self.alpha, self.gamma, self.max_n)
            direct = np.where(sign != 0, sign * np.exp(logv), 0.0)
        for arr in (sign, logv, direct):
            arr.setflags(write=False)
        self._sign = sign
        self._log = logv
        self._direct = direct

    def __call__(self, n: int, k: int) -> SignedLogValue:
        if n < 0 or k < 0 or n > self.max_n:
            raise IndexError(f"({n}, {k}) outside table of size {self.max_n}")
        if k > n:
            return ZERO
        s = int(self._sign[n, k])
        if s == 0:
            return ZERO
        return SignedLogValue(s, float(self._log[n, k]))

    def value(self, n: int, k: int) -> float:
        """Float value; central entries come from a linear-scale recurrence when
        it does not overflow, so integer tables (alpha = 0) are exact."""
        if n < 0 or k < 0 or n > self.max_n:
            raise IndexError(f"({n}, {k}) outside table of size {self.max_n}")
        if k > n:
            return 0.0
        d = float(self._direct[n, k])
        return d if math.isfinite(d) else self(n, k).to_real()

    def __repr__(self) -> str:
        g = "" if self.gamma is None else f", gamma={self.gamma!r}"
        return f"StirlingTable(alpha={self.alpha!r}{g}, max_n={self.max_n})"


def _check_alpha(alpha: float) -> None:
    if not alpha < 1:
        raise ValueError(f"alpha must be < 1, got {alpha!r}")


def _central_tables(alpha: float, max_n: int) -> tuple[np.ndarray, np.ndarray]:
    # S(n+1, k) = S(n, k-1) + (n - k*alpha) S(n, k); every term is >= 0 for alpha < 1.
    logv = np.full((max_n + 1, max_n + 1), -np.inf)
    logv[0, 0] = 0.0
    for n in range(max_n):
        k = np.arange(1, n + 1)
        stay = np.full(n + 2, -np.inf)
        stay[1 : n + 1] = np.log(n - k * alpha) + logv[n, 1 : n + 1]
        shift = np.full(n + 2, -np.inf)
        shift[1:] = logv[n, : n + 1]
        logv[n + 1, : n + 2] = np.logaddexp(stay, shift)
    sign = np.where(np.isfinite(logv), 1, 0).astype(np.int8)
    return sign, logv


def _central_direct(alpha: float, max_n: int) -> np.ndarray:
    out = np.zeros((max_n + 1, max_n + 1))
    out[0, 0] = 1.0
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(max_n):
            k = np.arange(1, n + 2)
            out[n + 1, 1 : n + 2] = out[n, 0 : n + 1] + (n - k * alpha) * out[n, 1 : n + 2]
    return out


def _rising_prefix(x: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Sign and log|.| of (x)_i for i = 0..n."""
    sign = np.ones(n + 1, dtype=np.int8)
    logv = np.zeros(n + 1)
    for i in range(1, n + 1):
        f = x + i - 1
        if f == 0 or sign[i - 1] == 0:
            sign[i:] = 0
            logv[i:] = -np.inf
            break
        sign[i] = sign[i - 1] * (1 if f > 0 else -1)
        logv[i] = logv[i - 1] + math.log(abs(f))
    return sign, logv


def _noncentral_tables(alpha: float, gamma: float, max_n: int) -> tuple[np.ndarray, np.ndarray]:
    # S(n, k; gamma) = sum_{s=k}^{n} C(n, s) S(s, k) (-gamma)_{n-s}
    central = stirling_table(alpha, max_n)
    csign, clog = central._sign, central._log
    rsign, rlog = _rising_prefix(-gamma, max_n)
    lfact = np.array([math.lgamma(i + 1) for i in range(max_n + 1)])
    sign = np.zeros((max_n + 1, max_n + 1), dtype=np.int8)
    logv = np.full((max_n + 1, max_n + 1), -np.inf)
    if not np.all(rsign >= 0):
        # alternating (-gamma)_i makes the convolution cancel badly
        return _noncentral_recurrence(alpha, gamma, max_n)
    for n in range(max_n + 1):
        s = np.arange(n + 1)
        logc = lfact[n] - lfact[s] - lfact[n - s]
        # terms[s, k]
        tlog = logc[:, None] + rlog[n - s][:, None] + clog[: n + 1, : n + 1]
        tsign = rsign[n - s][:, None] * csign[: n + 1, : n + 1]
        tlog = np.where(tsign != 0, tlog, -np.inf)
        col = np.logaddexp.reduce(tlog, axis=0)
        logv[n, : n + 1] = col
        sign[n, : n + 1] = np.isfinite(col)
    return sign, logv


def _noncentral_recurrence(alpha: float, gamma: float, max_n: int) -> tuple[np.ndarray, np.ndarray]:
    # S(n+1, k; gamma) = S(n, k-1; gamma) + (n - k alpha - gamma) S(n, k; gamma), signed
    sign = np.zeros((max_n + 1, max_n + 1), dtype=np.int8)
    logv = np.full((max_n + 1, max_n + 1), -np.inf)
    prev = [ONE]
    sign[0, 0], logv[0, 0] = 1, 0.0
    for n in range(max_n):
        row = []
        for k in range(n + 2):
            terms = []
            if k >= 1:
                terms.append(prev[k - 1])
            if k <= n:
                terms.append(prev[k] * SignedLogValue.from_real(n - k * alpha - gamma))
            row.append(slv_sum(terms, tol=0.0))
        for k, v in enumerate(row):
            sign[n + 1, k] = v.sign
            logv[n + 1, k] = v.logmag if v.sign else -np.inf
        prev = row
    return sign, logv


_cache: dict[tuple[str, str | None], StirlingTable] = {}
_cache_lock = threading.RLock()


def stirling_table(alpha: float, max_n: int, gamma: float | None = None) -> StirlingTable:
    """Cached table covering at least ``0..max_n``."""
    _check_alpha(alpha)
    if gamma is not None and float(gamma) == 0.0:
        gamma = None
    key = (float(alpha).hex(), None if gamma is None else float(gamma).hex())
    table = _cache.get(key)
    if table is not None and table.max_n >= max_n:
        return table
    with _cache_lock:
        table = _cache.get(key)
        if table is None or table.max_n < max_n:
            size = max(max_n, _MIN_TABLE, 0 if table is None else 2 * table.max_n)
            table = StirlingTable(alpha, size, gamma)
            _cache[key] = table
    return table


def clear_cache() -> None:
    with _cache_lock:
        _cache.clear()


def _check_indices(n: int, k: int) -> None:
    if n < 0 or k < 0:
        raise ValueError("n and k must be nonnegative")
    if k > n:
        raise ValueError(f"k={k} exceeds n={n}")


def central_stirling(n: int, k: int, alpha: float) -> SignedLogValue:
    """Generalized central Stirling number ``S(n, k; alpha)``."""
    _check_indices(n, k)
    return stirling_table(alpha, n)(n, k)


def noncentral_stirling(n: int, k: int, alpha: float, gamma: float) -> SignedLogValue:
    """Non-central generalized Stirling number ``S(n, k; alpha, gamma)``."""
    _check_indices(n, k)
    return stirling_table(alpha, n, gamma)(n, k)


def factorial_coefficient(n: int, k: int, alpha: float, gamma: float = 0.0) -> SignedLogValue:
    """Generalized factorial coefficient ``alpha**k * S(n, k; alpha, gamma)``."""
    _check_indices(n, k)
    s = noncentral_stirling(n, k, alpha, gamma)
    if k == 0:
        return s
    if alpha == 0:
        return ZERO
    return s * SignedLogValue.from_real(alpha) ** k
