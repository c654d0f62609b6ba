"""Map germs, their Milnor sets, and rational parametrizations.

The central computation stacks the component gradients of a germ G on top
of the radial direction and takes the Gram determinant: its zero set is
where the fibers of G fail to meet spheres transversally.  The radial row
is the coordinate vector itself; the displayed determinants downstream are
all normalized to that choice, and rescaling the row by 2 would only square
an overall constant into them.

Parametrizations are tuples of rational functions used for declared set
components.  Membership claims never decompose varieties: they are checked
by exact pullback, with denominators cleared monomial by monomial.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from germlab.poly import Polynomial, PolyMatrix, VarContext


class GermlabRejection(Exception):
    """An analysis precondition failed; carries a structured reason."""

    def __init__(self, reason: str, **details):
        super().__init__(reason)
        self.reason = reason
        self.details = details


@dataclass(frozen=True)
class RealMapGerm:
    """Polynomial map germ (R^m, 0) -> (R^p, 0), components over one context."""

    ctx: VarContext
    components: tuple[Polynomial, ...]
    name: str = ""

    def __post_init__(self):
        assert self.components, "a germ needs at least one component"
        p, m = self.target_arity, self.source_arity
        assert p >= 1 and m >= p, f"arities m={m}, p={p} out of range"
        zero = (Fraction(0),) * m
        for g in self.components:
            assert g.ctx == self.ctx, "component over a foreign context"
            assert g.evaluate(zero) == 0, f"component {g} does not vanish at 0"

    @property
    def source_arity(self) -> int:
        return self.ctx.arity

    @property
    def target_arity(self) -> int:
        return len(self.components)

    def jacobian(self) -> PolyMatrix:
        return PolyMatrix([list(g.gradient()) for g in self.components])

    def stacked(self) -> PolyMatrix:
        """Jacobian rows plus the radial row (the coordinate vector)."""
        rows = [list(g.gradient()) for g in self.components]
        rows.append(list(self.ctx.gens()))
        return PolyMatrix(rows)

    def singular_minors(self) -> list[Polynomial]:
        """All p x p minors of the Jacobian; their common zeros are Sing G."""
        return self.jacobian().minors(self.target_arity)

    def evaluate(self, values: Sequence) -> list:
        return [g.evaluate(values) for g in self.components]

    def label(self) -> str:
        return self.name or "germ"


@dataclass(frozen=True)
class MilnorData:
    """The Milnor set's defining polynomial plus the routes that led to it."""

    germ: RealMapGerm
    stacked: PolyMatrix
    milnor_poly: Polynomial
    square_det: Polynomial | None  # det of the stacked matrix when square

    def to_json_dict(self, seed: int | None = None) -> dict:
        out = {
            "germ": self.germ.label(),
            "milnor_poly": self.milnor_poly.text(),
            "stacked_shape": list(self.stacked.shape),
            "variables": list(self.germ.ctx.names),
        }
        if self.square_det is not None:
            out["square_det"] = self.square_det.text()
        if seed is not None:
            out["seed"] = seed
        return out


def milnor_data(germ: RealMapGerm) -> MilnorData:
    """Gram determinant of the stacked matrix; det itself in the square case.

    When the stacked matrix is square the Gram determinant is its square,
    an identity the test suite checks rather than assumes.
    """
    a = germ.stacked()
    gram = a @ a.transpose()
    mp = gram.det()
    square = a.det() if a.rows == a.cols else None
    return MilnorData(germ=germ, stacked=a, milnor_poly=mp, square_det=square)


def cauchy_binet_sum(germ: RealMapGerm) -> Polynomial:
    """Sum of squared maximal minors of the stacked matrix.

    Equal to the Gram determinant; kept as an independent route for
    property tests and as the residual vector source for sampled probes.
    """
    a = germ.stacked()
    acc = germ.ctx.zero()
    for m in a.minors(a.rows):
        acc = acc + m * m
    return acc


# -- rational parametrizations ------------------------------------------


@dataclass(frozen=True)
class Parametrization:
    """Tuple of rational functions s -> (n_1/d_1, ..., n_m/d_m).

    Declares one component of a semialgebraic set inside the target
    context's space.  Denominators must not vanish identically.
    """

    target: VarContext
    params: VarContext
    numerators: tuple[Polynomial, ...]
    denominators: tuple[Polynomial, ...]
    name: str = ""

    def __post_init__(self):
        assert len(self.numerators) == self.target.arity
        assert len(self.denominators) == self.target.arity
        for n, d in zip(self.numerators, self.denominators):
            assert n.ctx == self.params and d.ctx == self.params
            assert not d.is_zero(), "denominator identically zero"

    @staticmethod
    def from_polys(target: VarContext, params: VarContext,
                   values: Sequence[Polynomial], name: str = "") -> "Parametrization":
        one = params.one()
        return Parametrization(
            target=target, params=params,
            numerators=tuple(values), denominators=tuple(one for _ in values),
            name=name,
        )

    @property
    def dim(self) -> int:
        """Declared dimension: the number of parameters."""
        return self.params.arity

    def is_polynomial(self) -> bool:
        return all(d.is_constant() for d in self.denominators)

    def evaluate(self, svals: Sequence) -> list:
        out = []
        for n, d in zip(self.numerators, self.denominators):
            dv = d.evaluate(svals)
            assert dv != 0, f"denominator {d} vanishes at {svals}"
            out.append(n.evaluate(svals) / dv)
        return out

    def tangent_numerators(self, name: str) -> tuple[Polynomial, ...]:
        """Quotient-rule numerators of d/ds_name; denominators are d_i^2."""
        out = []
        for n, d in zip(self.numerators, self.denominators):
            out.append(n.diff(name) * d - n * d.diff(name))
        return tuple(out)

    def text(self) -> str:
        parts = []
        for n, d in zip(self.numerators, self.denominators):
            if d.is_constant() and d.constant_value() == 1:
                parts.append(n.text())
            else:
                parts.append(f"({n.text()})/({d.text()})")
        return "(" + ", ".join(parts) + ")"


@dataclass(frozen=True)
class PullbackResult:
    """Outcome of substituting a parametrization into one polynomial."""

    vanishes: bool
    numerator: Polynomial
    witness: tuple[Fraction, ...] | None = None
    witness_value: Fraction | None = None


def pullback_numerator(p: Polynomial, phi: Parametrization) -> Polynomial:
    """Numerator of p(phi(s)) after clearing denominators.

    Each variable x_i is cleared to its degree in p: the monomial
    c * prod x_i^{e_i} contributes c * prod n_i^{e_i} d_i^{deg_i - e_i}.
    The result vanishes identically exactly when the pullback does, since
    the cleared factor prod d_i^{deg_i} is not identically zero.
    """
    assert phi.target == p.ctx, (
        f"parametrization targets {phi.target!r}, polynomial lives in {p.ctx!r}"
    )
    degs = [p.degree_in(n) for n in p.ctx.names]
    cache: dict[tuple[int, int, bool], Polynomial] = {}

    def power(i: int, k: int, num: bool) -> Polynomial:
        key = (i, k, num)
        if key not in cache:
            base = phi.numerators[i] if num else phi.denominators[i]
            cache[key] = base**k
        return cache[key]

    acc = phi.params.zero()
    for e, c in p.terms.items():
        term = phi.params.const(c)
        for i, k in enumerate(e):
            if degs[i] == 0:
                continue
            if k:
                term = term * power(i, k, True)
            if degs[i] - k:
                term = term * power(i, degs[i] - k, False)
        acc = acc + term
    return acc


def pullback_vanishes(p: Polynomial, phi: Parametrization,
                      rng=None) -> PullbackResult:
    """Exact vanishing of p along phi, with a rational witness otherwise."""
    num = pullback_numerator(p, phi)
    if num.is_zero():
        return PullbackResult(vanishes=True, numerator=num)
    witness = _nonzero_point(num, avoid=list(phi.denominators), rng=rng)
    value = num.evaluate(witness)
    return PullbackResult(vanishes=False, numerator=num,
                          witness=witness, witness_value=value)


def _nonzero_point(p: Polynomial, avoid: list[Polynomial], rng=None):
    """Rational point where p != 0 and every avoid-polynomial is nonzero.

    Such points are dense, so the seeded search terminates fast; the
    deterministic fallback walks integer points outward.
    """
    from germlab.sampling import derive_rng, rational_point, DEFAULT_SEED

    rng = rng or derive_rng(DEFAULT_SEED, "pullback-witness")
    arity = p.ctx.arity
    for _ in range(400):
        pt = rational_point(rng, arity, radius=2)
        if p.evaluate(pt) != 0 and all(q.evaluate(pt) != 0 for q in avoid):
            return pt
    for k in range(1, 50):  # pragma: no cover - fallback for adversarial inputs
        pt = tuple(Fraction(k + i) for i in range(arity))
        if p.evaluate(pt) != 0 and all(q.evaluate(pt) != 0 for q in avoid):
            return pt
    raise AssertionError(f"could not find a nonzero point for {p}")


def germ_pullback(germ: RealMapGerm, phi: Parametrization) -> list[PullbackResult]:
    """Pull every component of the germ back along phi."""
    return [pullback_vanishes(g, phi) for g in germ.components]


def annihilates(polys: Sequence[Polynomial], phi: Parametrization) -> bool:
    return all(pullback_numerator(p, phi).is_zero() for p in polys)


# -- realification of mixed maps ----------------------------------------


def realify_mixed(fs, name: str = "") -> RealMapGerm:
    """Realified germ of a tuple of mixed polynomials over one context.

    Each complex component contributes its real and imaginary part, in
    order, over the interleaved real coordinates of the shared context.
    """
    from germlab.mixed import realified_context

    fs = list(fs)
    assert fs, "no components"
    ctx = fs[0].ctx
    rctx = realified_context(ctx)
    comps = []
    for f in fs:
        assert f.ctx == ctx, "mixed components over different contexts"
        re, im = f.realify(rctx)
        comps.extend([re, im])
    return RealMapGerm(ctx=rctx, components=tuple(comps), name=name)
