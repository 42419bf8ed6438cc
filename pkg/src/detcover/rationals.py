"""Exact rational arithmetic substrate: heights and height-bounded enumeration.

Rationals are plain ``fractions.Fraction`` values; the stdlib already stores
them reduced with positive denominator, which is exactly the invariant the
height function needs.  Vectors are tuples of Fractions.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

Rational = Fraction
RationalVector = tuple  # tuple[Fraction, ...]


def as_fraction(x) -> Fraction:
    """Coerce ints, 'a/b' strings, decimal strings and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def height(q: Fraction) -> int:
    """max(|numerator|, denominator) of the reduced fraction; height(0) = 1."""
    q = as_fraction(q)
    return max(abs(q.numerator), q.denominator)


def height_vector(v: Sequence[Fraction]) -> int:
    if len(v) == 0:
        raise ValueError("height of an empty vector is undefined")
    return max(height(q) for q in v)


def check_height_bound(H: int) -> int:
    if not isinstance(H, int) or H < 1:
        raise ValueError(f"height bound must be an integer >= 1, got {H!r}")
    return H


def enumerate_rationals(H: int, lo, hi) -> list[Fraction]:
    """All reduced a/b with max(|a|, b) <= H lying in [lo, hi], ascending.

    Loops denominators 1..H and the admissible numerator window for each;
    non-reduced pairs are skipped so every value appears exactly once.
    """
    check_height_bound(H)
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        raise ValueError("empty interval: lo > hi")
    out = []
    for b in range(1, H + 1):
        a_min = max(-H, math.ceil(lo * b))
        a_max = min(H, math.floor(hi * b))
        for a in range(a_min, a_max + 1):
            if math.gcd(abs(a), b) == 1:
                out.append(Fraction(a, b))
    out.sort()
    return out


def enumerate_grid(H: int, box: Sequence[tuple]) -> list[tuple]:
    """Cartesian product of per-coordinate enumerations, lexicographic order.

    ``box`` is a sequence of (lo, hi) pairs; a vector has height <= H exactly
    when every coordinate does, so no extra filter is needed.
    """
    if len(box) < 1:
        raise ValueError("box must have at least one coordinate")
    axes = [enumerate_rationals(H, lo, hi) for lo, hi in box]
    return [tuple(p) for p in product(*axes)]


def nearest_rational(x: Fraction, H: int) -> Fraction:
    """Closest rational to x with denominator <= H (continued fractions)."""
    return as_fraction(x).limit_denominator(H)


def count_rationals_reference(H: int) -> int:
    """Totient-style count of rationals with height <= H in [-H, H]."""
    total = 1  # zero
    for b in range(1, H + 1):
        total += 2 * sum(1 for a in range(1, H + 1) if math.gcd(a, b) == 1)
    return total


def format_vector(v: Iterable[Fraction]) -> list[str]:
    """Serialize coordinates as 'a/b' strings ('a' when the denominator is 1)."""
    return [str(as_fraction(q)) for q in v]
