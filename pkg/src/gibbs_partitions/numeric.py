"""Sign-tracked log-space arithmetic.

Products of factorials and Gibbs weights overflow double precision well
before n reaches a few hundred, so every exact formula in the package is
evaluated on :class:`SignedLogValue` numbers and only converted back to
floats at the very end.
"""
from __future__ import annotations

import contextlib
import contextvars
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

logger = logging.getLogger(__name__)

#: relative size (w.r.t. the largest term) below which a signed sum is zero
CANCELLATION_TOL = 1e-12
#: probability excursions outside [0, 1] larger than this are reported
CLAMP_REPORT_TOL = 1e-9


@dataclass(frozen=True, slots=True)
class SignedLogValue:
    """A real number stored as ``sign * exp(logmag)``.

    ``sign == 0`` encodes exact zero whatever ``logmag`` holds.
    """

    sign: int
    logmag: float = -math.inf

    @classmethod
    def from_real(cls, x: float) -> "SignedLogValue":
        if x == 0:
            return ZERO
        if math.isnan(x):
            raise ValueError("cannot represent NaN")
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    @classmethod
    def from_log(cls, logmag: float, sign: int = 1) -> "SignedLogValue":
        if sign == 0 or logmag == -math.inf:
            return ZERO
        return cls(sign, logmag)

    def to_real(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.logmag)

    __float__ = to_real

    def is_zero(self) -> bool:
        return self.sign == 0

    def __mul__(self, other: "SignedLogValue | float | int") -> "SignedLogValue":
        return slv_mul(self, _coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other: "SignedLogValue | float | int") -> "SignedLogValue":
        other = _coerce(other)
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero SignedLogValue")
        if self.sign == 0:
            return ZERO
        return SignedLogValue(self.sign * other.sign, self.logmag - other.logmag)

    def __rtruediv__(self, other: float | int) -> "SignedLogValue":
        return _coerce(other) / self

    def __pow__(self, p: int) -> "SignedLogValue":
        if p == 0:
            return ONE
        if self.sign == 0:
            return ZERO
        return SignedLogValue(self.sign**p, self.logmag * p)

    def __neg__(self) -> "SignedLogValue":
        if self.sign == 0:
            return ZERO
        return SignedLogValue(-self.sign, self.logmag)

    def __add__(self, other: "SignedLogValue | float | int") -> "SignedLogValue":
        return slv_sum((self, _coerce(other)))

    __radd__ = __add__

    def __sub__(self, other: "SignedLogValue | float | int") -> "SignedLogValue":
        return slv_sum((self, -_coerce(other)))

    def __repr__(self) -> str:
        if self.sign == 0:
            return "SignedLogValue(0)"
        return f"SignedLogValue({'+' if self.sign > 0 else '-'}exp({self.logmag!r}))"


ZERO = SignedLogValue(0)
ONE = SignedLogValue(1, 0.0)


def _coerce(x: "SignedLogValue | float | int") -> SignedLogValue:
    if isinstance(x, SignedLogValue):
        return x
    return SignedLogValue.from_real(float(x))


def slv_mul(a: SignedLogValue, b: SignedLogValue) -> SignedLogValue:
    if a.sign == 0 or b.sign == 0:
        return ZERO
    return SignedLogValue(a.sign * b.sign, a.logmag + b.logmag)


def slv_prod(factors: Iterable[SignedLogValue]) -> SignedLogValue:
    sign, logmag = 1, []
    for f in factors:
        if f.sign == 0:
            return ZERO
        sign *= f.sign
        logmag.append(f.logmag)
    return SignedLogValue(sign, math.fsum(logmag))


def slv_sum(terms: Iterable[SignedLogValue], tol: float = CANCELLATION_TOL) -> SignedLogValue:
    """Sum scaled to the largest magnitude, accumulated with ``math.fsum``.

    A result smaller than ``tol`` times the largest term is returned as
    exact zero.
    """
    live = [t for t in terms if t.sign != 0]
    if not live:
        return ZERO
    top = max(t.logmag for t in live)
    total = math.fsum(t.sign * math.exp(t.logmag - top) for t in live)
    if total == 0 or abs(total) <= tol:
        return ZERO
    return SignedLogValue(1 if total > 0 else -1, top + math.log(abs(total)))


def log_factorial(n: int) -> float:
    return math.lgamma(n + 1)


def factorial_slv(n: int) -> SignedLogValue:
    if n < 0:
        raise ValueError("factorial of a negative integer")
    return SignedLogValue(1, math.lgamma(n + 1))


def binomial_slv(n: int, k: int) -> SignedLogValue:
    if k < 0 or k > n:
        return ZERO
    return SignedLogValue(1, math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1))


# --- probability clamping -------------------------------------------------


@dataclass
class Diagnostics:
    """Collects clamping events and warnings raised while computing."""

    clamps: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"clamps": list(self.clamps), "warnings": list(self.warnings)}


_active: contextvars.ContextVar[Diagnostics | None] = contextvars.ContextVar(
    "gibbs_partitions_diagnostics", default=None
)


@contextlib.contextmanager
def collect_diagnostics() -> Iterator[Diagnostics]:
    diag = Diagnostics()
    token = _active.set(diag)
    try:
        yield diag
    finally:
        _active.reset(token)


def warn(message: str) -> None:
    logger.warning(message)
    diag = _active.get()
    if diag is not None:
        diag.warnings.append(message)


def to_probability(value: SignedLogValue | float, what: str = "probability") -> float:
    """Convert to float and clamp into [0, 1]."""
    x = value.to_real() if isinstance(value, SignedLogValue) else float(value)
    if 0.0 <= x <= 1.0:
        return x
    clamped = min(max(x, 0.0), 1.0)
    excursion = abs(x - clamped)
    if excursion > CLAMP_REPORT_TOL:
        logger.warning("clamped %s %.3e to %s", what, x, clamped)
        diag = _active.get()
        if diag is not None:
            diag.clamps.append({"quantity": what, "raw": x, "clamped": clamped})
    return clamped
