"""Sparse multivariate polynomial / truncated power-series arithmetic.

A series is a dict mapping exponent tuples to coefficients.  Coefficients are
Fractions on the exact paths and mpmath numbers elsewhere; all helpers are
agnostic.  Zero coefficients are never stored.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import comb


def s_clean(p: dict) -> dict:
    return {a: c for a, c in p.items() if c != 0}


def s_add(p: dict, q: dict) -> dict:
    out = dict(p)
    for a, c in q.items():
        out[a] = out.get(a, 0) + c
        if out[a] == 0:
            del out[a]
    return out


def s_neg(p: dict) -> dict:
    return {a: -c for a, c in p.items()}


def s_sub(p: dict, q: dict) -> dict:
    return s_add(p, s_neg(q))


def s_scale(p: dict, c) -> dict:
    if c == 0:
        return {}
    return {a: c * v for a, v in p.items()}


def s_mul(p: dict, q: dict, trunc: int | None = None) -> dict:
    """Product, optionally discarding terms of total degree > trunc."""
    out: dict = {}
    for a, ca in p.items():
        da = sum(a)
        for b, cb in q.items():
            if trunc is not None and da + sum(b) > trunc:
                continue
            key = tuple(x + y for x, y in zip(a, b))
            out[key] = out.get(key, 0) + ca * cb
    return s_clean(out)


def s_pow(p: dict, k: int, trunc: int | None = None) -> dict:
    if k < 0:
        raise ValueError("negative power")
    nvars = len(next(iter(p))) if p else 1
    out = {(0,) * nvars: Fraction(1)}
    base = dict(p)
    while k:
        if k & 1:
            out = s_mul(out, base, trunc)
        k >>= 1
        if k:
            base = s_mul(base, base, trunc)
    return out


def s_truncate(p: dict, order: int) -> dict:
    return {a: c for a, c in p.items() if sum(a) <= order}


def s_degree(p: dict) -> int:
    return max((sum(a) for a in p), default=-1)


def s_var_degree(p: dict, var: int) -> int:
    return max((a[var] for a in p), default=-1)


def s_diff(p: dict, var: int) -> dict:
    out = {}
    for a, c in p.items():
        if a[var] > 0:
            b = list(a)
            b[var] -= 1
            out[tuple(b)] = c * a[var]
    return out


def s_shift(p: dict, delta: tuple) -> dict:
    """Taylor shift: substitute x_i -> x_i + delta_i (exact binomial expansion)."""
    nvars = len(delta)
    out: dict = {}
    for a, c in p.items():
        # expand prod_i (x_i + d_i)^(a_i)
        per_var = []
        for i, ai in enumerate(a):
            d = delta[i]
            if d == 0:
                per_var.append([(ai, 1)])
                continue
            per_var.append([(k, comb(ai, k) * d ** (ai - k)) for k in range(ai + 1)])
        for combo in product(*per_var):
            key = tuple(k for k, _ in combo)
            coef = c
            for _, w in combo:
                coef = coef * w
            out[key] = out.get(key, 0) + coef
    return s_clean(out)


def s_eval(p: dict, point: tuple):
    """Evaluate at a point; exact when coefficients and point are Fractions."""
    total = 0
    for a, c in p.items():
        term = c
        for x, e in zip(point, a):
            if e:
                term = term * x ** e
        total = total + term
    return total


def s_coeff_majorant(p: dict, radii: tuple) -> Fraction:
    """Sum of |c_alpha| * r^alpha -- an upper bound for the sup norm on the
    closed polydisc of the given polyradii about the expansion center."""
    total = Fraction(0)
    for a, c in p.items():
        term = abs(c)
        for r, e in zip(radii, a):
            if e:
                term = term * Fraction(r) ** e
        total += term
    return total


def s_substitute_var(p: dict, var: int, sub: dict, trunc: int | None = None) -> dict:
    """Substitute a series (in the same variables) for one variable of p."""
    nvars = len(next(iter(p))) if p else len(next(iter(sub), ()))
    out: dict = {}
    # cache powers of the substituted series
    powers = {0: {(0,) * nvars: Fraction(1)}}

    def power(k):
        if k not in powers:
            powers[k] = s_mul(power(k - 1), sub, trunc)
        return powers[k]

    for a, c in p.items():
        rest = list(a)
        k = rest[var]
        rest[var] = 0
        term = s_mul({tuple(rest): c}, power(k), trunc)
        out = s_add(out, term)
    return out


def s_inverse_unit(p: dict, order: int) -> dict:
    """Multiplicative inverse of a series with nonzero constant term, mod
    total degree > order."""
    nvars = len(next(iter(p)))
    zero = (0,) * nvars
    c0 = p.get(zero, 0)
    if c0 == 0:
        raise ZeroDivisionError("series has no constant term")
    inv = {zero: Fraction(1, 1) / c0 if isinstance(c0, (int, Fraction)) else 1 / c0}
    # Newton iteration: inv <- inv * (2 - p*inv)
    k = 1
    while k <= order:
        k *= 2
        t = s_mul(p, inv, min(k, order))
        t = s_sub({zero: 2}, t)
        inv = s_mul(inv, t, min(k, order))
    return s_truncate(inv, order)
