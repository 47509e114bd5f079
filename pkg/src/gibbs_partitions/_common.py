"""Small cached building blocks shared by the distribution modules."""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable

from .factorials import rising_factorial
from .numeric import ZERO, SignedLogValue, slv_sum


@lru_cache(maxsize=65536)
def rising(x: float, n: int) -> SignedLogValue:
    """Cached ordinary rising factorial ``(x)_n``."""
    return rising_factorial(x, n, 1.0)


def lfact(n: int) -> float:
    return math.lgamma(n + 1)


def inv_fact(n: int) -> SignedLogValue:
    return SignedLogValue(1, -math.lgamma(n + 1))


def fact(n: int) -> SignedLogValue:
    return SignedLogValue(1, math.lgamma(n + 1))


def invert_factorial_moments(x: int, max_order: int, moment: Callable[[int], SignedLogValue]) -> SignedLogValue:
    """``P(X = x) = sum_r (-1)^r / (x! r!) E[(X)_[x+r]]`` for orders up to ``max_order``."""
    if x > max_order:
        return ZERO
    terms = []
    for r in range(0, max_order - x + 1):
        m = moment(x + r)
        if m.sign == 0:
            continue
        coeff = SignedLogValue(-1 if r % 2 else 1, -lfact(x) - lfact(r))
        terms.append(coeff * m)
    return slv_sum(terms)
