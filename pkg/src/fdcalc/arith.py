"""Small exact integer helpers: primality, p-adic valuation, digit sums."""
from __future__ import annotations

import math

INF = math.inf
NEG_INF = -math.inf


def is_prime(n: int) -> bool:
    """Deterministic trial division; inputs here are tiny."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def ord_p(n: int, p: int):
    """Exponent of the largest power of ``p`` dividing ``n``; ``inf`` for 0."""
    if n == 0:
        return INF
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def digit_sum(d: int, p: int) -> int:
    """Sum of the base-``p`` digits of ``d >= 0`` (the p-weight of d)."""
    if d < 0:
        raise ValueError("p-weight is defined for nonnegative integers")
    s = 0
    while d:
        d, r = divmod(d, p)
        s += r
    return s


def ceil_div(a: int, b: int) -> int:
    """Exact ceiling of a / b for integers, b > 0."""
    return -((-a) // b)


def degree_to_json(d):
    """Encode an element of N u {-inf, inf} for JSON."""
    if d == NEG_INF:
        return "-inf"
    if d == INF:
        return "inf"
    return int(d)


def degree_from_json(v):
    if v == "-inf":
        return NEG_INF
    if v == "inf":
        return INF
    return int(v)
