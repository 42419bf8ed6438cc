"""Polydiscs, real boxes, function handles and rigorously bounded Taylor models.

A TaylorModel stores exact Fraction coefficients (inexact built-ins snapshot
their mpmath coefficients into Fractions and fold the snapshot error into the
tail bound), the truncation order, a domain polydisc, a certified sup-norm
majorant for the whole domain, and a tail bound that dominates the truncation
error everywhere on the domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .errors import ConfigError, DomainError
from .rationals import as_fraction
from .series import (
    s_add,
    s_clean,
    s_coeff_majorant,
    s_degree,
    s_diff,
    s_eval,
    s_mul,
    s_scale,
    s_shift,
    s_truncate,
)

DEFAULT_ORDER = 24
DEFAULT_PREC = 192

# generous rational upper bound for e, used when rounding tail bounds outward
_E_UPPER = Fraction(27182818285, 10**10)


@dataclass(frozen=True)
class Polydisc:
    """Product of discs: center (per coordinate) and positive polyradii."""

    center: tuple
    radii: tuple

    def __post_init__(self):
        if len(self.center) != len(self.radii):
            raise ValueError("center/radii length mismatch")
        if any(Fraction(r) <= 0 for r in self.radii):
            raise ValueError("polyradii must be positive")
        object.__setattr__(self, "radii", tuple(Fraction(r) for r in self.radii))

    @property
    def nvars(self) -> int:
        return len(self.center)

    def contains_point(self, z, slack=Fraction(1, 10**12)) -> bool:
        for c, r, x in zip(self.center, self.radii, z):
            if isinstance(x, (int, Fraction)) and isinstance(c, (int, Fraction)):
                if abs(as_fraction(x) - as_fraction(c)) > r * (1 + slack):
                    return False
            elif abs(complex(x) - complex(c)) > float(r) * (1 + float(slack)):
                return False
        return True

    def contains_disc(self, other: "Polydisc") -> bool:
        """Concentric containment check (the only case the package needs)."""
        if not _same_center(self.center, other.center):
            return False
        return all(ro <= rs for ro, rs in zip(other.radii, self.radii))


@dataclass(frozen=True)
class RealBox:
    """Product of closed real intervals."""

    intervals: tuple

    def __post_init__(self):
        ivs = tuple((as_fraction(lo), as_fraction(hi)) for lo, hi in self.intervals)
        if any(lo > hi for lo, hi in ivs):
            raise ValueError("interval with lo > hi")
        object.__setattr__(self, "intervals", ivs)

    @property
    def nvars(self) -> int:
        return len(self.intervals)

    def sides(self) -> tuple:
        return tuple(hi - lo for lo, hi in self.intervals)

    def contains(self, point: Sequence[Fraction]) -> bool:
        return all(lo <= x <= hi for (lo, hi), x in zip(self.intervals, point))

    def center(self) -> tuple:
        return tuple((lo + hi) / 2 for lo, hi in self.intervals)


def _same_center(a, b) -> bool:
    return all(complex(x) == complex(y) for x, y in zip(a, b))


def rescale(region, delta, p):
    """delta^{-1}-dilation of a polydisc or real box about the point p."""
    delta = as_fraction(delta)
    if not 0 < delta <= 1:
        raise ValueError("rescaling factor must lie in (0, 1]")
    if isinstance(region, Polydisc):
        center = tuple(
            pi + (ci - pi) / delta for ci, pi in zip(region.center, p)
        )
        return Polydisc(center, tuple(r / delta for r in region.radii))
    if isinstance(region, RealBox):
        ivs = []
        for (lo, hi), pi in zip(region.intervals, p):
            pi = as_fraction(pi)
            ivs.append((pi + (lo - pi) / delta, pi + (hi - pi) / delta))
        return RealBox(tuple(ivs))
    raise TypeError("rescale expects a Polydisc or RealBox")


# ---------------------------------------------------------------------------
# Function handles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolyHandle:
    nvars: int
    coeffs: tuple  # sorted ((exponent tuple, Fraction), ...)

    @staticmethod
    def from_dict(nvars: int, d: dict) -> "PolyHandle":
        items = tuple(sorted((a, as_fraction(c)) for a, c in s_clean(d).items()))
        return PolyHandle(nvars, items)

    def as_dict(self) -> dict:
        return dict(self.coeffs)


@dataclass(frozen=True)
class ExpHandle:
    nvars: int
    var: int
    scale: Fraction


@dataclass(frozen=True)
class SinHandle:
    nvars: int
    var: int
    scale: Fraction


@dataclass(frozen=True)
class SumHandle:
    nvars: int
    parts: tuple


@dataclass(frozen=True)
class ProdHandle:
    nvars: int
    parts: tuple


def coordinate_handle(nvars: int, var: int) -> PolyHandle:
    exp = tuple(1 if i == var else 0 for i in range(nvars))
    return PolyHandle.from_dict(nvars, {exp: Fraction(1)})


def handle_eval_float(h, point) -> float:
    """Plain float evaluation of a handle; used for screening only."""
    if isinstance(h, PolyHandle):
        return float(s_eval({a: float(c) for a, c in h.coeffs}, tuple(map(float, point))))
    if isinstance(h, ExpHandle):
        return math.exp(float(h.scale) * float(point[h.var]))
    if isinstance(h, SinHandle):
        return math.sin(float(h.scale) * float(point[h.var]))
    if isinstance(h, SumHandle):
        return sum(handle_eval_float(p, point) for p in h.parts)
    if isinstance(h, ProdHandle):
        out = 1.0
        for p in h.parts:
            out *= handle_eval_float(p, point)
        return out
    raise TypeError(f"unknown handle {h!r}")


# ---------------------------------------------------------------------------
# Expression parser: exp(a*x), sin(a*x), polynomial literals, + - * / ^ ( )
# ---------------------------------------------------------------------------


def parse_handle(text: str, variables: Sequence[str]):
    """Parse an expression string into a handle over the named variables."""
    tokens = _tokenize(text)
    parser = _Parser(tokens, list(variables))
    node = parser.parse_expr()
    parser.expect_end()
    return node


def _tokenize(text: str):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < len(text) and text[i + 1].isdigit()):
            j = i
            while j < len(text) and (text[j].isdigit() or text[j] == "."):
                j += 1
            tokens.append(("num", text[i:j]))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j]))
            i = j
            continue
        if ch in "+-*/^(),":
            tokens.append((ch, ch))
            i += 1
            continue
        raise ConfigError(f"unexpected character {ch!r} in expression")
    tokens.append(("end", ""))
    return tokens


class _Parser:
    def __init__(self, tokens, variables):
        self.tokens = tokens
        self.pos = 0
        self.variables = variables
        self.nvars = len(variables)

    def peek(self):
        return self.tokens[self.pos][0]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise ConfigError(f"expected {kind!r}, got {tok[1]!r}")
        return tok

    def expect_end(self):
        if self.peek() != "end":
            raise ConfigError(f"trailing input near {self.tokens[self.pos][1]!r}")

    def parse_expr(self):
        node = self.parse_term()
        while self.peek() in "+-":
            op = self.next()[0]
            rhs = self.parse_term()
            if op == "-":
                rhs = self._scale(rhs, Fraction(-1))
            node = self._sum(node, rhs)
        return node

    def parse_term(self):
        node = self.parse_power()
        while self.peek() in "*/":
            op = self.next()[0]
            rhs = self.parse_power()
            if op == "/":
                const = self._as_constant(rhs)
                if const is None or const == 0:
                    raise ConfigError("division is only allowed by a nonzero constant")
                node = self._scale(node, Fraction(1) / const)
            else:
                node = self._product(node, rhs)
        return node

    def parse_power(self):
        base = self.parse_atom()
        if self.peek() == "^":
            self.next()
            sign = 1
            if self.peek() == "-":
                raise ConfigError("negative exponents are not supported")
            tok = self.expect("num")
            if "." in tok[1]:
                raise ConfigError("exponents must be integers")
            k = sign * int(tok[1])
            node = self._const(Fraction(1))
            for _ in range(k):
                node = self._product(node, base)
            return node
        return base

    def parse_atom(self):
        kind, value = self.next()
        if kind == "num":
            return self._const(Fraction(value))
        if kind == "-":
            return self._scale(self.parse_atom(), Fraction(-1))
        if kind == "(":
            node = self.parse_expr()
            self.expect(")")
            return node
        if kind == "name":
            if value in self.variables:
                return coordinate_handle(self.nvars, self.variables.index(value))
            if value in ("exp", "sin"):
                self.expect("(")
                arg = self.parse_expr()
                self.expect(")")
                var, scale = self._linear_arg(arg)
                cls = ExpHandle if value == "exp" else SinHandle
                return cls(self.nvars, var, scale)
            raise ConfigError(f"unknown name {value!r}")
        raise ConfigError(f"unexpected token {value!r}")

    # --- handle algebra (folds polynomial subtrees) ---

    def _const(self, c: Fraction) -> PolyHandle:
        return PolyHandle.from_dict(self.nvars, {(0,) * self.nvars: c})

    def _as_constant(self, h):
        if isinstance(h, PolyHandle):
            d = h.as_dict()
            if not d:
                return Fraction(0)
            if len(d) == 1 and (0,) * self.nvars in d:
                return d[(0,) * self.nvars]
        return None

    def _scale(self, h, c: Fraction):
        if isinstance(h, PolyHandle):
            return PolyHandle.from_dict(self.nvars, s_scale(h.as_dict(), c))
        return ProdHandle(self.nvars, (self._const(c), h))

    def _sum(self, a, b):
        if isinstance(a, PolyHandle) and isinstance(b, PolyHandle):
            return PolyHandle.from_dict(self.nvars, s_add(a.as_dict(), b.as_dict()))
        parts = []
        for h in (a, b):
            parts.extend(h.parts if isinstance(h, SumHandle) else (h,))
        return SumHandle(self.nvars, tuple(parts))

    def _product(self, a, b):
        if isinstance(a, PolyHandle) and isinstance(b, PolyHandle):
            return PolyHandle.from_dict(self.nvars, s_mul(a.as_dict(), b.as_dict()))
        parts = []
        for h in (a, b):
            parts.extend(h.parts if isinstance(h, ProdHandle) else (h,))
        return ProdHandle(self.nvars, tuple(parts))

    def _linear_arg(self, h):
        if not isinstance(h, PolyHandle):
            raise ConfigError("exp/sin argument must be a*<variable>")
        var = None
        scale = None
        for a, c in h.coeffs:
            if sum(a) != 1:
                raise ConfigError("exp/sin argument must be a*<variable>")
            var = a.index(1)
            scale = c
        if var is None:
            raise ConfigError("exp/sin argument must be a*<variable>")
        return var, scale


# ---------------------------------------------------------------------------
# Taylor models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TaylorModel:
    nvars: int
    center: tuple
    coeffs: dict = field(hash=False)
    order: int
    domain: Polydisc
    majorant: Fraction
    tail_bound: Fraction
    exact: bool

    def coefficient(self, alpha: tuple) -> Fraction:
        return self.coeffs.get(alpha, Fraction(0))


def _exp_tail(t: Fraction, order: int, extra: int = 32) -> Fraction:
    """Upper bound for sum_{k>order} t^k / k! (t >= 0 rational)."""
    t = as_fraction(t)
    if t == 0:
        return Fraction(0)
    total = Fraction(0)
    term = t ** (order + 1) / math.factorial(order + 1)
    k = order + 1
    for _ in range(extra):
        total += term
        k += 1
        term = term * t / k
    if t >= k + 1:
        raise DomainError("domain too large for the exponential tail majorant")
    total += term / (1 - t / (k + 1))
    return total


def mpf_to_fraction(value) -> Fraction:
    """Exact Fraction equal to an mpmath mpf (binary floats are rational)."""
    sign, man, exp, _ = mpmath.mpf(value)._mpf_
    if man == 0:
        if exp != 0:
            raise ValueError("cannot convert a non-finite value")
        return Fraction(0)
    out = Fraction(-man if sign else man)
    return out * 2 ** exp if exp >= 0 else out / 2 ** (-exp)


def _to_mpf(x):
    """Lossless conversion of ints, Fractions and floats to mpf at working precision."""
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / mpmath.mpf(x.denominator)
    return mpmath.mpf(x)


def _to_mpnum(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / mpmath.mpf(x.denominator)
    if isinstance(x, complex):
        return mpmath.mpc(x)
    return mpmath.mpmathify(x)


def build_model(handle, center, order: int = DEFAULT_ORDER, domain: Polydisc | None = None,
                prec: int = DEFAULT_PREC) -> TaylorModel:
    """Taylor-expand a handle about ``center`` with a certified tail bound.

    Coefficients are exact Fractions when the handle and center allow it
    (polynomials anywhere, exp/sin at centers where the argument vanishes);
    otherwise mpmath values are snapshotted and the snapshot error is folded
    into the tail bound.
    """
    if domain is None:
        nvars = handle.nvars
        domain = Polydisc(tuple(center), (Fraction(1),) * nvars)
    if order < 0:
        raise ValueError("order must be >= 0")
    center = tuple(center)
    if not _same_center(domain.center, center):
        raise DomainError("model center must coincide with the domain center")

    if isinstance(handle, PolyHandle):
        shifted = s_shift(handle.as_dict(), center)
        k_eff = max(order, s_degree(shifted))
        maj = s_coeff_majorant(shifted, domain.radii)
        return TaylorModel(handle.nvars, center, shifted, k_eff, domain, maj,
                           Fraction(0), all(isinstance(c, (int, Fraction)) for c in center))

    if isinstance(handle, (ExpHandle, SinHandle)):
        return _build_elementary(handle, center, order, domain, prec)

    if isinstance(handle, SumHandle):
        parts = [build_model(p, center, order, domain, prec) for p in handle.parts]
        coeffs: dict = {}
        for m in parts:
            coeffs = s_add(coeffs, m.coeffs)
        tail = sum((m.tail_bound for m in parts), Fraction(0))
        maj = s_coeff_majorant(coeffs, domain.radii) + tail
        k_eff = max([order] + [m.order for m in parts])
        return TaylorModel(handle.nvars, center, coeffs, k_eff, domain, maj, tail,
                           all(m.exact for m in parts))

    if isinstance(handle, ProdHandle):
        parts = [build_model(p, center, order, domain, prec) for p in handle.parts]
        acc = parts[0]
        for m in parts[1:]:
            acc = _multiply_models(acc, m, order)
        return acc

    raise TypeError(f"cannot build a model from {handle!r}")


def _build_elementary(handle, center, order, domain, prec):
    var, a = handle.var, handle.scale
    c_var = center[var]
    r_var = domain.radii[var]
    exact_center = isinstance(c_var, (int, Fraction)) and a * as_fraction(c_var) == 0
    nvars = handle.nvars
    coeffs = {}
    t = abs(a) * r_var

    if isinstance(handle, ExpHandle):
        if exact_center:
            front_abs = Fraction(1)
            front = Fraction(1)
        else:
            if not isinstance(c_var, (int, Fraction, float)):
                raise DomainError("inexact expansion centers must be real")
            with mpmath.workprec(prec):
                val = mpmath.exp(_to_mpf(c_var) * _to_mpf(a))
                front = mpf_to_fraction(val)
            front_abs = abs(front) * (1 + Fraction(1, 2 ** (prec - 8)))
        term = front
        for k in range(order + 1):
            exp = tuple(k if i == var else 0 for i in range(nvars))
            if term != 0:
                coeffs[exp] = term
            term = term * a / (k + 1)
        tail = front_abs * _exp_tail(t, order)
        if not exact_center:
            # snapshot error on every stored coefficient, summed over the disc
            tail += front_abs * Fraction(1, 2 ** (prec - 8)) * sum(
                t ** k / math.factorial(k) for k in range(order + 1))
    else:  # SinHandle
        if exact_center:
            table = [Fraction(0), Fraction(1), Fraction(0), Fraction(-1)]
            term = Fraction(1)
            for k in range(order + 1):
                exp = tuple(k if i == var else 0 for i in range(nvars))
                c = table[k % 4] * term
                if c != 0:
                    coeffs[exp] = c
                term = term * a / (k + 1)
        else:
            if not isinstance(c_var, (int, Fraction, float)):
                raise DomainError("inexact expansion centers must be real")
            with mpmath.workprec(prec):
                arg = _to_mpf(c_var) * _to_mpf(a)
                s_val = mpf_to_fraction(mpmath.sin(arg))
                c_val = mpf_to_fraction(mpmath.cos(arg))
            table = [s_val, c_val, -s_val, -c_val]
            term = Fraction(1)
            for k in range(order + 1):
                exp = tuple(k if i == var else 0 for i in range(nvars))
                c = table[k % 4] * term
                if c != 0:
                    coeffs[exp] = c
                term = term * a / (k + 1)
        # |d^k sin| <= 1 at real centers, so the exp-style tail dominates
        tail = _exp_tail(t, order)
        if not exact_center:
            tail += Fraction(1, 2 ** (prec - 8)) * sum(
                t ** k / math.factorial(k) for k in range(order + 1))

    maj = s_coeff_majorant(coeffs, domain.radii) + tail
    return TaylorModel(nvars, center, coeffs, order, domain, maj, tail, exact_center)


def _multiply_models(a: TaylorModel, b: TaylorModel, order: int) -> TaylorModel:
    full = s_mul(a.coeffs, b.coeffs)
    kept = s_truncate(full, order)
    dropped = {e: c for e, c in full.items() if sum(e) > order}
    radii = a.domain.radii
    ma = s_coeff_majorant(a.coeffs, radii)
    mb = s_coeff_majorant(b.coeffs, radii)
    tail = (s_coeff_majorant(dropped, radii)
            + ma * b.tail_bound + mb * a.tail_bound + a.tail_bound * b.tail_bound)
    maj = s_coeff_majorant(kept, radii) + tail
    return TaylorModel(a.nvars, a.center, kept, order, a.domain, maj, tail,
                       a.exact and b.exact)


def evaluate_exact(model: TaylorModel, point: Sequence[Fraction]) -> tuple:
    """(exact truncated value, error radius) at a rational point of the domain."""
    pt = tuple(as_fraction(x) for x in point)
    if not model.domain.contains_point(pt):
        raise DomainError("point outside the model domain")
    rel = tuple(x - as_fraction(c) for x, c in zip(pt, model.center))
    return s_eval(model.coeffs, rel), model.tail_bound


def evaluate(model: TaylorModel, point, prec: int = DEFAULT_PREC) -> tuple:
    """(value, error radius): truncated sum at ``point`` plus tracked rounding."""
    if all(isinstance(x, (int, Fraction)) for x in point):
        return evaluate_exact(model, point)
    if not model.domain.contains_point(point):
        raise DomainError("point outside the model domain")
    with mpmath.workprec(prec):
        rel = tuple(_to_mpnum(x) - _to_mpnum(c) for x, c in zip(point, model.center))
        radii_at_point = tuple(float(abs(r)) for r in rel)
        total = mpmath.mpf(0)
        for alpha, c in model.coeffs.items():
            term = _to_mpnum(c)
            for x, e in zip(rel, alpha):
                if e:
                    term = term * x ** e
            total = total + term
        mag = sum((abs(float(c)) * math.prod(r ** e for r, e in zip(radii_at_point, alpha))
                   for alpha, c in model.coeffs.items()), 0.0)
        rounding = mpmath.mpf(max(mag, 1.0)) * (len(model.coeffs) + 4) * mpmath.mpf(2) ** (4 - prec)
        radius = _to_mpf(model.tail_bound) + rounding
        return total, radius


def sup_norm_bound(model: TaylorModel, region: Polydisc) -> Fraction:
    """Certified upper bound for the sup norm of the modeled function on a
    concentric sub-polydisc: coefficient majorant plus tail."""
    if not model.domain.contains_disc(region):
        raise DomainError("region not contained in the model domain")
    return s_coeff_majorant(model.coeffs, region.radii) + model.tail_bound


def derivative(model: TaylorModel, var: int) -> TaylorModel:
    """Coefficientwise derivative; only valid for tail-free (polynomial) models."""
    if model.tail_bound != 0:
        raise DomainError("derivative is only supported for tail-free models")
    d = s_diff(model.coeffs, var)
    maj = s_coeff_majorant(d, model.domain.radii)
    return TaylorModel(model.nvars, model.center, d, max(model.order - 1, 0),
                       model.domain, maj, Fraction(0), model.exact)
