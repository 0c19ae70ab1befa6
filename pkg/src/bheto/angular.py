"""Angular coefficients for closed-shell atomic Fock operators."""

from __future__ import annotations

import math
from functools import lru_cache

__all__ = ["three_j_zero_squared", "allowed_k", "angular_table"]


def three_j_zero_squared(l1: int, l2: int, l3: int) -> float:
    """Square of the Wigner 3j symbol (l1 l2 l3; 0 0 0).

    Zero when the triangle condition fails or ``l1 + l2 + l3`` is odd.
    """
    if min(l1, l2, l3) < 0:
        return 0.0
    if l3 < abs(l1 - l2) or l3 > l1 + l2:
        return 0.0
    two_g = l1 + l2 + l3
    if two_g % 2:
        return 0.0
    g = two_g // 2
    lf = math.lgamma
    log_val = (
        lf(two_g - 2 * l1 + 1) + lf(two_g - 2 * l2 + 1) + lf(two_g - 2 * l3 + 1) - lf(two_g + 2)
        + 2.0 * (lf(g + 1) - lf(g - l1 + 1) - lf(g - l2 + 1) - lf(g - l3 + 1))
    )
    return math.exp(log_val)


def allowed_k(l: int, lp: int) -> list[int]:
    return [k for k in range(abs(l - lp), l + lp + 1) if (l + k + lp) % 2 == 0]


@lru_cache(maxsize=None)
def angular_table(l_max: int) -> dict[tuple[int, int], tuple[tuple[int, float], ...]]:
    """Exchange weights ``Lambda_k(l, l') = (l k l'; 0 0 0)^2`` for l, l' <= l_max.

    The closed-shell Fock matrix for channel ``l`` subtracts
    ``1/2 sum_k Lambda_k(l, l') R^k`` for every occupied channel ``l'``.
    """
    return {
        (l, lp): tuple((k, three_j_zero_squared(l, k, lp)) for k in allowed_k(l, lp))
        for l in range(l_max + 1)
        for lp in range(l_max + 1)
    }
