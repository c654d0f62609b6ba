"""Regularity of compositions H = G o F.

Two exact instruments and one numeric one:

* composition_milnor_check verifies declared Milnor-set components of H,
  classifies which of them sit inside Sing H, and checks a claimed closure
  equation for the F-image of the rest; a component whose F-image lies in
  Sing G without collapsing to the origin is an exact violation witness.
* image_in_milnor_check pulls G's Milnor polynomial through F along each
  declared component; if every component annihilates it, the image of
  H's Milnor set stays inside M(G).
* composition_sampled_probe hunts for Milnor-set points of H (off Sing H)
  whose F-images approach Sing G away from the origin.  Its findings are
  reported with distances and scales but never become certificate facts:
  near-tangency of a regular composition can look identical to a genuine
  violation at any finite sample resolution.
"""

from __future__ import annotations

from dataclasses import dataclass

from germlab.certify import RegularityReport
from germlab.germs import (
    GermlabRejection,
    Parametrization,
    RealMapGerm,
    milnor_data,
    pullback_numerator,
)
from germlab.poly import Polynomial, VarContext


def compose_exact(outer: RealMapGerm, inner: RealMapGerm,
                  name: str = "") -> RealMapGerm:
    """H = outer o inner, expanded exactly over inner's source context."""
    if outer.source_arity != inner.target_arity:
        raise GermlabRejection(
            "arity mismatch in composition",
            outer_source=outer.source_arity, inner_target=inner.target_arity)
    vals = list(inner.components)
    comps = tuple(g.evaluate(vals) for g in outer.components)
    comps = tuple(
        c if isinstance(c, Polynomial) else inner.ctx.const(c) for c in comps
    )
    return RealMapGerm(ctx=inner.ctx, components=comps,
                       name=name or f"{outer.label()}o{inner.label()}")


def compose_parametrization(inner: RealMapGerm, phi: Parametrization,
                            target: VarContext | None = None) -> Parametrization:
    """F o phi as a rational parametrization into F's target coordinates.

    Component i clears to the common denominator prod_j d_j^{deg_j F_i};
    exactness of the cleared numerator is the pullback identity used
    everywhere else.
    """
    nums, dens = [], []
    for g in inner.components:
        nums.append(pullback_numerator(g, phi))
        d = phi.params.one()
        for j, n in enumerate(inner.ctx.names):
            k = g.degree_in(n)
            if k:
                d = d * phi.denominators[j] ** k
        dens.append(d)
    if target is None:
        target = VarContext([f"y{i + 1}" for i in range(inner.target_arity)])
    return Parametrization(
        target=target, params=phi.params,
        numerators=tuple(nums), denominators=tuple(dens),
        name=f"F({phi.name})")


@dataclass(frozen=True)
class ComponentFinding:
    name: str
    inside_sing_h: bool
    image_origin_only: bool
    image_in_sing_g: bool
    closure_verified: bool | None  # None: no claim to check


@dataclass(frozen=True)
class CompositionCheck:
    components: tuple[ComponentFinding, ...]
    violation: str | None  # off-Sing H component with image inside Sing G
    flagged: tuple[str, ...]  # Sing H components with image inside Sing G
    closure_meets_sing_g_only_at_0: bool | None
    detail: str


def composition_milnor_check(outer: RealMapGerm, inner: RealMapGerm,
                             milnor_components: list[Parametrization],
                             closure_claim: Polynomial | None = None,
                             config=None) -> CompositionCheck:
    """Exact componentwise analysis of M(H) under F.

    Every declared component is first verified against milnor_poly(H).
    Each F-image is then checked against Sing G.  By the chain rule a
    component whose image lands inside Sing G necessarily lies inside
    Sing H, so such a component is flagged as a violation candidate: it
    witnesses a genuine fiber-limit failure only when M(H) off Sing H
    accumulates on it, which this exact pass cannot decide (the sampled
    probe hunts for that).  When a closure claim is supplied it must
    annihilate every F-image of the components off Sing H; its
    intersection with Sing G is then probed at seeded points of the
    Sing G locus - a sampled statement, flagged as such.
    """
    h = compose_exact(outer, inner)
    md_h = milnor_data(h)
    jac_minors_h = h.singular_minors()
    sing_minors_g = outer.singular_minors()

    findings = []
    violation = None
    flagged = []
    for phi in milnor_components:
        num = pullback_numerator(md_h.milnor_poly, phi)
        if not num.is_zero():
            raise GermlabRejection(
                f"declared component {phi.name} does not annihilate the "
                "Milnor polynomial of the composition",
                component=phi.name, pullback=num.text())
        inside_sing = all(
            pullback_numerator(m, phi).is_zero() for m in jac_minors_h)
        image_g = compose_parametrization(inner, phi, target=outer.ctx)
        origin_only = all(n.is_zero() for n in image_g.numerators)
        in_sing_g = all(
            pullback_numerator(m, image_g).is_zero() for m in sing_minors_g)
        closure_ok = None
        if closure_claim is not None and not inside_sing:
            closure_ok = pullback_numerator(closure_claim, image_g).is_zero()
        findings.append(ComponentFinding(
            name=phi.name, inside_sing_h=inside_sing,
            image_origin_only=origin_only, image_in_sing_g=in_sing_g,
            closure_verified=closure_ok))
        if in_sing_g and not origin_only:
            if inside_sing:
                flagged.append(phi.name)
            else:
                violation = phi.name

    closure_sep = None
    if closure_claim is not None and violation is None:
        closure_sep = _closure_meets_sing_g_only_at_0(
            outer, closure_claim, config)

    if violation is not None:
        detail = (f"component {violation} lies off Sing H yet its F-image "
                  "stays inside Sing G away from the origin")
    elif closure_claim is not None:
        active = [f.name for f in findings if not f.inside_sing_h]
        bad = [f.name for f in findings if f.closure_verified is False]
        if bad:
            detail = f"closure claim fails on {', '.join(bad)}"
        else:
            detail = ("closure claim verified exactly on " +
                      (", ".join(active) if active else "no active components"))
    elif flagged:
        detail = ("F-image of " + ", ".join(flagged) + " sits inside Sing G "
                  "away from the origin; a fiber-limit failure follows only "
                  "if M(H) off Sing H accumulates there")
    else:
        detail = "no exact violation among the declared components"
    return CompositionCheck(
        components=tuple(findings), violation=violation, flagged=tuple(flagged),
        closure_meets_sing_g_only_at_0=closure_sep, detail=detail)


def _closure_meets_sing_g_only_at_0(outer: RealMapGerm,
                                    closure_claim: Polynomial,
                                    config) -> bool:
    """Sampled separation of the claimed closure from Sing G.

    Seeded points on Sing G (where some coordinate subset vanishes is not
    assumed; the locus is taken as the common zeros of the maximal minors,
    approached by exact evaluation on random rational points of the
    ambient space filtered through the minors) away from the origin must
    not satisfy the closure equation.  With no such point found the
    separation holds at the sampled scale.
    """
    from germlab.sampling import RunConfig, derive_rng, rational_points

    config = config or RunConfig()
    minors = outer.singular_minors()
    rng = derive_rng(config.seed, "closure-sep")
    pts = rational_points(rng, outer.source_arity, config.samples * 5,
                          radius=config.radius)
    for pt in pts:
        if any(m.evaluate(pt) != 0 for m in minors):
            continue
        if all(v == 0 for v in pt):
            continue
        if closure_claim.evaluate(pt) == 0:
            return False
    # Random rational points rarely land on a proper subvariety; probe the
    # sparse grid as well so axis-aligned strata get exercised.
    from germlab.sampling import sparse_grid

    for pt in sparse_grid(outer.source_arity):
        if any(m.evaluate(pt) != 0 for m in minors):
            continue
        if closure_claim.evaluate(pt) == 0:
            return False
    return True


def composition_report(outer: RealMapGerm, inner: RealMapGerm,
                       check: CompositionCheck,
                       declared_inner: set[str] | None = None,
                       declared_outer: set[str] | None = None) -> RegularityReport:
    """Certificate for the composition from an exact component analysis.

    The fiber-limit fact for H transfers from declared facts about F and
    G when the exact analysis found no violation and, when a closure was
    claimed, the image closure stays clear of Sing G away from 0.  The
    declared inputs are recorded as assumptions; nothing here verifies
    them.
    """
    h_name = f"{outer.label()}o{inner.label()}"
    report = RegularityReport(germ_name=h_name)
    declared_inner = declared_inner or set()
    declared_outer = declared_outer or set()
    for fact in sorted(declared_inner):
        report.assumptions.append(f"inner germ {inner.label()}: {fact} (declared)")
    for fact in sorted(declared_outer):
        report.assumptions.append(f"outer germ {outer.label()}: {fact} (declared)")

    have = ({"condition_b", "disc_zero"} <= declared_inner
            and "disc_zero" in declared_outer)
    if check.violation is not None:
        report.note(check.detail)
        if have:
            report.add_fact("not_condition_b", "compose-closure")
            report.derive()
        else:
            report.note(
                "the fiber-limit failure for H follows only under declared "
                "facts for both germs; none installed")
        return report

    closure_ok = all(
        f.closure_verified is not False for f in check.components)
    separated = check.closure_meets_sing_g_only_at_0
    if have and closure_ok and separated:
        report.add_fact("condition_b", "compose-closure")
        report.derive()
        report.note(
            "image closure verified exactly on the declared components and "
            "separated from Sing G at sampled scale; fiber-limit regularity "
            "transfers under the declared hypotheses")
    else:
        if check.flagged:
            report.note(
                "flagged candidates " + ", ".join(check.flagged) + ": image "
                "inside Sing G but the component lies inside Sing H, so no "
                "exact conclusion; run the sampled probe for accumulation")
        missing = []
        if not have:
            missing.append("declared fiber-limit and critical-value facts")
        if not closure_ok:
            missing.append("closure verification")
        if separated is not True:
            missing.append("closure separation from Sing G")
        report.note("no transfer: missing " + ", ".join(missing))
    return report


@dataclass(frozen=True)
class InclusionCheck:
    verified: tuple[str, ...]
    failed: tuple[str, ...]
    no_data: bool

    @property
    def holds(self) -> bool:
        return not self.no_data and not self.failed


def image_in_milnor_check(outer: RealMapGerm, inner: RealMapGerm,
                          milnor_components: list[Parametrization]) -> InclusionCheck:
    """Does F map the declared M(H) components into M(G)?

    Pulls milnor_poly(G) back through F o phi for each declared component
    of H's Milnor set.  An empty component list yields no data rather
    than a vacuous success.
    """
    if not milnor_components:
        return InclusionCheck(verified=(), failed=(), no_data=True)
    h = compose_exact(outer, inner)
    md_h = milnor_data(h)
    mp_g = milnor_data(outer).milnor_poly
    ok, bad = [], []
    for phi in milnor_components:
        num = pullback_numerator(md_h.milnor_poly, phi)
        if not num.is_zero():
            raise GermlabRejection(
                f"declared component {phi.name} does not annihilate the "
                "Milnor polynomial of the composition",
                component=phi.name, pullback=num.text())
        image = compose_parametrization(inner, phi, target=outer.ctx)
        if pullback_numerator(mp_g, image).is_zero():
            ok.append(phi.name)
        else:
            bad.append(phi.name)
    return InclusionCheck(verified=tuple(ok), failed=tuple(bad), no_data=False)


def inclusion_report(outer: RealMapGerm, inner: RealMapGerm,
                     check: InclusionCheck,
                     declared_inner: set[str] | None = None,
                     declared_outer: set[str] | None = None) -> RegularityReport:
    """Fiber-limit transfer along a verified Milnor-set inclusion."""
    h_name = f"{outer.label()}o{inner.label()}"
    report = RegularityReport(germ_name=h_name)
    declared_inner = declared_inner or set()
    declared_outer = declared_outer or set()
    for fact in sorted(declared_inner):
        report.assumptions.append(f"inner germ {inner.label()}: {fact} (declared)")
    for fact in sorted(declared_outer):
        report.assumptions.append(f"outer germ {outer.label()}: {fact} (declared)")
    if check.no_data:
        report.note("no declared Milnor components; no data")
        return report
    if check.failed:
        report.note("inclusion fails on " + ", ".join(check.failed))
        return report
    needed = {"condition_b", "disc_zero"}
    if needed <= declared_inner and "condition_b" in declared_outer:
        report.add_fact("condition_b", "compose-inclusion")
        report.derive()
        report.note(
            "F-image of every declared Milnor component verified inside "
            "M(G): " + ", ".join(check.verified))
    else:
        report.note(
            "inclusion verified on " + ", ".join(check.verified) +
            ", but the transfer needs declared fiber-limit facts for both germs")
    return report


# -- sampled probe -------------------------------------------------------


@dataclass(frozen=True)
class SampledCompositionFinding:
    suspicious: bool
    detail: str
    record: dict


def composition_sampled_probe(outer: RealMapGerm, inner: RealMapGerm,
                              config=None) -> SampledCompositionFinding:
    """Continuation search for M(H) points whose F-images near Sing G.

    Accumulation onto Sing G away from 0 means: points of M(H), genuinely
    off Sing H, whose images approach a Sing G point of fixed nonzero
    norm.  Each seed first lands on M(H) with the Sing H proxy sigma (sum
    of squared Jacobian minors of H) held at a moderate target, and the
    image is projected onto Sing G to fix a reference norm rho and
    direction.  Deeper rungs then shrink sigma while the refinement keeps
    the point exactly on M(H) and pins the image component along the
    reference direction, so the image cannot follow sigma down the cone
    to the origin; near mere tangency those constraints are inconsistent
    and the minor residuals stay large, which aborts the ladder.  A seed
    is suspicious when its deepest rung keeps the image within tolerance
    of a Sing G point of norm at least r_min.  The verdict is still
    sampled evidence, not a certificate: no fact is ever installed.
    """
    import numpy as np

    from germlab.sampling import (
        RunConfig, compile_float, derive_rng, nearest_on_variety,
        refine_on_variety,
    )

    config = config or RunConfig()
    h = compose_exact(outer, inner)
    a = h.stacked()
    milnor_res = a.minors(a.rows)
    sing_h = h.singular_minors()
    sing_g = outer.singular_minors()
    f_fn = compile_float(list(inner.components))
    sigma_fn = compile_float(sing_h)
    mil_fn = compile_float(milnor_res)

    rng = derive_rng(config.seed, f"compose:{h.label()}")
    m = inner.source_arity
    top = 1e-4
    targets = [1e-6, 1e-8, 1e-10, 1e-12]
    best = None
    for k in range(8):
        # Seeds at half radius leave room for the refinement to move
        # without the continuation escaping the sampling ball.
        x = np.array([rng.uniform(-config.radius / 2, config.radius / 2)
                      for _ in range(m)])

        # Relative gap: at the origin every polynomial residual dies, so
        # an absolute gap would read as converged and the continuation
        # would collapse down the trivial cone.
        def top_gap(pt):
            s = sigma_fn(pt)
            return float(np.sum(s * s) / top - 1.0)

        x = refine_on_variety(milnor_res, x, extra_residual=top_gap)
        s = sigma_fn(x)
        sigma = float(np.sum(s * s))
        if not (top / 4 <= sigma <= 4 * top) or np.max(np.abs(mil_fn(x))) > 1e-7:
            continue
        q = nearest_on_variety(sing_g, f_fn(x))
        rho = float(np.linalg.norm(q))
        if rho < config.r_min:
            continue
        uhat = q / rho
        traj = []
        for tgt in targets:
            def pinned(pt, tgt=tgt, uhat=uhat):
                s = sigma_fn(pt)
                gap = float(np.sum(s * s) / tgt - 1.0)
                pin = 10.0 * (float(np.dot(f_fn(pt), uhat)) / rho - 1.0)
                return np.array([gap, pin])

            x = refine_on_variety(milnor_res, x, extra_residual=pinned)
            s = sigma_fn(x)
            sigma = float(np.sum(s * s))
            res = np.max(np.abs(mil_fn(x)))
            img = f_fn(x)
            q = nearest_on_variety(sing_g, img)
            qn = float(np.linalg.norm(q))
            dist = float(np.linalg.norm(q - img))
            norm = float(np.linalg.norm(x))
            if (not (tgt / 4 <= sigma <= 4 * tgt) or res > 1e-7
                    or not (0.75 <= qn / rho <= 1.25)
                    or not (config.r_min <= norm <= config.radius)):
                break
            uhat = q / qn
            traj.append({
                "sigma": sigma, "preimage_norm": norm,
                "image_distance_to_sing": dist, "nearest_sing_norm": qn,
                "point": x.tolist(), "image": img.tolist(),
            })
        if len(traj) < len(targets):
            continue
        last = traj[-1]
        if (last["image_distance_to_sing"] <= config.tol_accum
                and last["nearest_sing_norm"] >= config.r_min
                and (best is None or last["image_distance_to_sing"]
                     < best["image_distance_to_sing"])):
            best = dict(
                last,
                distance_trajectory=[
                    c["image_distance_to_sing"] for c in traj],
                sing_norm_trajectory=[
                    c["nearest_sing_norm"] for c in traj])
    if best is not None:
        return SampledCompositionFinding(
            suspicious=True,
            detail="Milnor-set points of the composition, held exactly on "
                   "M(H) and off Sing H, carry F-images within tolerance "
                   "of Sing G points away from 0; exact follow-up needed, "
                   "no fact installed",
            record={"seed": config.seed, **best})
    return SampledCompositionFinding(
        suspicious=False,
        detail="no F-image approached Sing G at scale under pinned "
               "continuation",
        record=None)
