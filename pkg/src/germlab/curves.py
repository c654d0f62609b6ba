"""Curve families: finite Laurent expansions in t with polynomial spectators.

A witness curve gamma(t) and its coefficient path c(t) are vectors of
LaurentPoly values: finitely many powers of t, each weighted by an exact
polynomial in the spectator parameters.  Substituting such a vector into a
germ component stays inside the same ring, so limits as t -> 0 reduce to
reading off the minimal surviving power of t.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from germlab.poly import Polynomial, VarContext


class LaurentPoly:
    """sum_k p_k(s) * t^k with integer k of either sign and p_k exact."""

    __slots__ = ("ctx", "parts")

    def __init__(self, ctx: VarContext, parts: Mapping[int, Polynomial]):
        self.ctx = ctx
        clean = {}
        for k, p in parts.items():
            assert isinstance(k, int)
            assert p.ctx == ctx, "spectator context mismatch"
            if not p.is_zero():
                clean[k] = p
        self.parts = clean

    # -- constructors ----------------------------------------------------

    @staticmethod
    def t_power(ctx: VarContext, k: int) -> "LaurentPoly":
        return LaurentPoly(ctx, {k: ctx.one()})

    @staticmethod
    def from_poly(p: Polynomial) -> "LaurentPoly":
        return LaurentPoly(p.ctx, {0: p})

    @staticmethod
    def const(ctx: VarContext, c) -> "LaurentPoly":
        return LaurentPoly(ctx, {0: ctx.const(c)})

    # -- queries ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.parts

    def valuation(self) -> int:
        """Smallest power of t with a surviving coefficient."""
        assert self.parts, "zero expansion has no valuation"
        return min(self.parts)

    def leading(self) -> Polynomial:
        return self.parts[self.valuation()]

    def coefficient(self, k: int) -> Polynomial:
        return self.parts.get(k, self.ctx.zero())

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, (int, Fraction)):
            return LaurentPoly.const(self.ctx, other)
        if isinstance(other, Polynomial):
            return LaurentPoly.from_poly(other)
        return other

    def __add__(self, other):
        other = self._coerce(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        parts = dict(self.parts)
        for k, p in other.parts.items():
            s = parts.get(k)
            s = p if s is None else s + p
            if s.is_zero():
                parts.pop(k, None)
            else:
                parts[k] = s
        return LaurentPoly(self.ctx, parts)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.ctx, {k: -p for k, p in self.parts.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        parts: dict[int, Polynomial] = {}
        for k1, p1 in self.parts.items():
            for k2, p2 in other.parts.items():
                k = k1 + k2
                prod = p1 * p2
                s = parts.get(k)
                s = prod if s is None else s + prod
                if s.is_zero():
                    parts.pop(k, None)
                else:
                    parts[k] = s
        return LaurentPoly(self.ctx, parts)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        assert isinstance(k, int)
        if k < 0:
            # Only monomials in t with constant coefficient invert exactly.
            assert len(self.parts) == 1, f"cannot invert {self}"
            (kk, p), = self.parts.items()
            assert p.is_constant(), f"cannot invert non-constant coefficient {p}"
            c = p.constant_value()
            inv = LaurentPoly(self.ctx, {-kk: self.ctx.const(Fraction(1) / c)})
            return inv ** (-k)
        out = LaurentPoly.const(self.ctx, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.ctx == other.ctx and self.parts == other.parts

    def __hash__(self):
        return hash((self.ctx.names, frozenset((k, p) for k, p in self.parts.items())))

    # -- evaluation and printing ----------------------------------------

    def evaluate(self, t: float, svals: Sequence[float]) -> float:
        return sum(float(p.evaluate(svals)) * t**k for k, p in self.parts.items())

    def text(self) -> str:
        if not self.parts:
            return "0"
        out = []
        for k in sorted(self.parts, reverse=True):
            p = self.parts[k]
            body = p.text()
            if len(p.terms) > 1:
                body = f"({body})"
            if k == 0:
                out.append(body)
            else:
                tk = "t" if k == 1 else f"t^{k}"
                out.append(tk if body == "1" else f"{body}*{tk}")
        return " + ".join(out)

    def __str__(self) -> str:
        return self.text()

    def __repr__(self) -> str:
        return f"LaurentPoly({self.text()})"


@dataclass(frozen=True)
class CurveFamily:
    """A parametrized arc t -> gamma(t; s) into a germ's source space."""

    target: VarContext
    params: VarContext
    coords: tuple[LaurentPoly, ...]

    def __post_init__(self):
        assert len(self.coords) == self.target.arity, (
            f"{len(self.coords)} coordinates for {self.target.arity} variables"
        )
        for c in self.coords:
            assert c.ctx == self.params

    def pullback(self, p: Polynomial) -> LaurentPoly:
        """p(gamma(t)), exact in the Laurent ring."""
        assert p.ctx == self.target, "polynomial not over the curve's target"
        v = p.evaluate(list(self.coords))
        if isinstance(v, Fraction):
            return LaurentPoly.const(self.params, v)
        return v

    def limit_coords(self) -> tuple[Polynomial, ...] | None:
        """Coordinates of gamma(0), or None when some coordinate blows up."""
        out = []
        for c in self.coords:
            if c.is_zero():
                out.append(self.params.zero())
                continue
            if c.valuation() < 0:
                return None
            out.append(c.coefficient(0))
        return tuple(out)

    def evaluate(self, t: float, svals: Sequence[float]) -> list[float]:
        return [c.evaluate(t, svals) for c in self.coords]

    def text(self) -> str:
        return "(" + ", ".join(c.text() for c in self.coords) + ")"


@dataclass(frozen=True)
class DirectionLimit:
    """Leading direction of a Laurent vector as t -> 0.

    The valuation is the minimal power of t appearing in any coordinate;
    leading collects each coordinate's coefficient at that power.  The
    degenerate flag marks a leading vector that vanishes identically on a
    declared admissible region, in which case no conclusion is drawn.
    """

    valuation: int
    leading: tuple[Polynomial, ...]
    degenerate: bool = False

    def norm_sq(self) -> Polynomial:
        acc = self.leading[0].ctx.zero()
        for p in self.leading:
            acc = acc + p * p
        return acc

    def text(self) -> str:
        return "(" + ", ".join(p.text() for p in self.leading) + ")"


def direction_limit(vec: Sequence[LaurentPoly]) -> DirectionLimit:
    nonzero = [v for v in vec if not v.is_zero()]
    assert nonzero, "direction limit of the zero vector"
    nu = min(v.valuation() for v in nonzero)
    ctx = vec[0].ctx
    leading = tuple(v.coefficient(nu) if not v.is_zero() else ctx.zero() for v in vec)
    return DirectionLimit(valuation=nu, leading=leading)
