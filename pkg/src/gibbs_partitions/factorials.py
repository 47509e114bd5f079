"""Generalized rising and falling factorial powers."""
from __future__ import annotations

import math
import sys

from .numeric import ONE, ZERO, SignedLogValue


def rising_factorial(x: float, n: int, h: float = 1.0) -> SignedLogValue:
    """``x (x+h) ... (x+(n-1)h)``; ``h = 0`` gives ``x**n``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return ONE
    sign = 1
    logs = []
    for i in range(n):
        f = x + i * h
        if f == 0:
            return ZERO
        if f < 0:
            sign = -sign
        logs.append(math.log(abs(f)))
    return SignedLogValue(sign, math.fsum(logs))


def falling_factorial(x: float, n: int) -> SignedLogValue:
    """``x (x-1) ... (x-n+1)``."""
    return rising_factorial(x, n, -1.0)


def check_multiplicative_law(x: float, n: int, r: int, h: float, rtol: float = 1e-12) -> bool:
    """Check ``(x)_{n+r|h} == (x)_{n|h} (x+nh)_{r|h}``."""
    lhs = rising_factorial(x, n + r, h)
    rhs = rising_factorial(x, n, h) * rising_factorial(x + n * h, r, h)
    return _close(lhs, rhs, rtol)


def _close(a: SignedLogValue, b: SignedLogValue, rtol: float) -> bool:
    if a.sign == 0 or b.sign == 0:
        return a.sign == b.sign
    if a.sign != b.sign:
        return False
    # log-space rounding grows with |log|; allow a few ulps of it
    slack = 8 * sys.float_info.epsilon * max(abs(a.logmag), abs(b.logmag))
    return abs(math.expm1(a.logmag - b.logmag)) <= rtol + slack
