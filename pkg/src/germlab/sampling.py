"""Seeded sampling, float compilation, and numeric refinement helpers.

Exact identities never depend on anything here; these utilities exist for
cross-checks (finite differences, rank comparisons) and for the sampled
probes, all of which must be reproducible bit-for-bit.  Every random draw
goes through a Random instance derived from one master seed plus a task
label, so parallel and serial runs see identical streams.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from germlab.poly import Polynomial

DEFAULT_SEED = 0xC0FFEE


def default_seed() -> int:
    env = os.environ.get("GERMLAB_SEED")
    return int(env, 0) if env else DEFAULT_SEED


@dataclass(frozen=True)
class RunConfig:
    """Frozen defaults shared by every probe and report."""

    seed: int = field(default_factory=default_seed)
    samples: int = 200
    radius: float = 2.0
    max_denominator: int = 64
    tol_variety: float = 1e-9     # point-on-variety acceptance, scaled
    tol_accum: float = 1e-3       # accumulation detection, relative
    r_min: float = 0.05           # witnesses must keep this norm
    fd_h: float = 1e-6
    fd_rel: float = 1e-4

    def with_overrides(self, **kw) -> "RunConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw) if kw else self


def derive_rng(seed: int, label: str) -> random.Random:
    # String seeding hashes with sha512 internally, stable across platforms.
    return random.Random(f"{seed}:{label}")


def rational_point(rng: random.Random, arity: int, radius=2,
                   max_den: int = 64) -> tuple[Fraction, ...]:
    """One rational point in the closed cube [-radius, radius]^arity."""
    out = []
    bound = Fraction(radius).limit_denominator(10**6)
    for _ in range(arity):
        den = rng.randint(1, max_den)
        hi = int(bound * den)
        out.append(Fraction(rng.randint(-hi, hi), den))
    return tuple(out)


def rational_points(rng: random.Random, arity: int, count: int, radius=2,
                    max_den: int = 64) -> list[tuple[Fraction, ...]]:
    return [rational_point(rng, arity, radius, max_den) for _ in range(count)]


def sparse_grid(arity: int, values: Sequence[Fraction] | None = None,
                max_support: int = 2) -> list[tuple[Fraction, ...]]:
    """Deterministic grid of points supported on few coordinates.

    Vanishing loci of interest (axes, coordinate planes) are invisible to
    generic random points; this grid hits them.  The origin is excluded.
    """
    from itertools import combinations, product

    if values is None:
        values = [Fraction(v) for v in (1, -1, 2, -2)] + [Fraction(1, 2), Fraction(-1, 2)]
    out = []
    zero = tuple([Fraction(0)] * arity)
    for k in range(1, min(max_support, arity) + 1):
        for support in combinations(range(arity), k):
            for vals in product(values, repeat=k):
                pt = list(zero)
                for i, v in zip(support, vals):
                    pt[i] = v
                out.append(tuple(pt))
    return out


# -- float evaluation -----------------------------------------------------

def compile_float(polys: Sequence[Polynomial]):
    """Vectorized float evaluator for a list of polynomials.

    Returns f with f(X) of shape (..., len(polys)) for X of shape (..., m).
    """
    compiled = []
    for p in polys:
        if p.is_zero():
            compiled.append(None)
            continue
        E = np.array(list(p.terms.keys()), dtype=np.int64)
        C = np.array([float(c) for c in p.terms.values()])
        compiled.append((C, E))

    def f(X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        cols = []
        for item in compiled:
            if item is None:
                cols.append(np.zeros(X.shape[:-1]))
            else:
                C, E = item
                cols.append((C * np.prod(X[..., None, :] ** E, axis=-1)).sum(axis=-1))
        return np.stack(cols, axis=-1)

    return f


def compile_scale(polys: Sequence[Polynomial]):
    """Evaluator for the absolute-value envelope 1 + sum |c| |x|^e.

    Residual tolerances are taken relative to this envelope so that the
    acceptance threshold means the same thing at every sampled point.
    """
    absd = [Polynomial(p.ctx, {e: abs(c) for e, c in p.terms.items()}) for p in polys]
    g = compile_float(absd)

    def f(X: np.ndarray) -> np.ndarray:
        return 1.0 + g(np.abs(np.asarray(X, dtype=float)))

    return f


def refine_on_variety(polys: Sequence[Polynomial], x0: np.ndarray,
                      extra_residual=None, bounds=None):
    """Least-squares refinement of x0 onto the common zero set of polys.

    extra_residual, when given, is a callable appended to the residual
    vector (used to pin continuation targets).  Deterministic: scipy's trf
    with fixed start, no stochastic restarts.
    """
    from scipy.optimize import least_squares

    fn = compile_float(polys)

    def resid(x):
        r = fn(x)
        if extra_residual is not None:
            r = np.concatenate([r, np.atleast_1d(extra_residual(x))])
        return r

    kw = {"method": "trf", "xtol": 1e-14, "ftol": 1e-14, "gtol": 1e-14,
          "max_nfev": 400}
    if bounds is not None:
        kw["bounds"] = bounds
    sol = least_squares(resid, np.asarray(x0, dtype=float), **kw)
    return sol.x


def nearest_on_variety(polys: Sequence[Polynomial], target: np.ndarray,
                       weight: float = 1e4) -> np.ndarray:
    """Approximate metric projection of `target` onto the zero set of polys.

    The variety residuals are weighted far above the distance pull so the
    constraint binds first and the leftover degrees of freedom minimize
    the distance to target; a weak pull would let the solver trade
    constraint satisfaction against drifting toward small-residual
    regions such as the origin.
    """
    from scipy.optimize import least_squares

    t = np.asarray(target, dtype=float)
    fn = compile_float(polys)

    def resid(x):
        return np.concatenate([weight * fn(x), x - t])

    sol = least_squares(resid, t, method="trf", xtol=1e-14, ftol=1e-14,
                        gtol=1e-14, max_nfev=400)
    return sol.x


def fd_gradient(p: Polynomial, point: Sequence[float], h: float = 1e-6) -> list[float]:
    """Central finite differences; cross-check only, never an oracle for truth."""
    pt = [float(v) for v in point]
    out = []
    for i in range(len(pt)):
        hi = pt.copy()
        lo = pt.copy()
        hi[i] += h
        lo[i] -= h
        out.append((p.evaluate(hi) - p.evaluate(lo)) / (2 * h))
    return out
