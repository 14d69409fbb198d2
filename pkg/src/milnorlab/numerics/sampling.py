"""Sampling spheres, annuli and real varieties; penalty minimisation."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from ..determinantal import Ideal, normalized_generators
from ..poly import Poly
from .rng import RngSpec, chunked_map
from .solve import SUCCESS, PolySystem, SolveConfig, lm_batch, radial_clamp

DEDUP_RADIUS = 1e-8
CHUNK = 256


@dataclass(frozen=True)
class Annulus:
    """The shell ``inner <= |x| <= outer`` in R^dim."""

    inner: float
    outer: float
    dim: int

    def __post_init__(self):
        if not 0 <= self.inner < self.outer:
            raise ValueError(f"need 0 <= inner < outer, got [{self.inner}, {self.outer}]")
        if self.dim < 1:
            raise ValueError("dim must be positive")

    def contains(self, X, rel: float = 1e-12) -> np.ndarray:
        n = np.linalg.norm(np.atleast_2d(X), axis=1)
        return (n >= self.inner * (1 - rel)) & (n <= self.outer * (1 + rel))


def sample_sphere(dim: int, radius: float, n: int, rng: RngSpec) -> np.ndarray:
    """``n`` points uniform on the sphere of ``radius`` (normalised Gaussians)."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    if n < 1:
        raise ValueError("n must be at least 1")
    gen = rng.generator()
    Z = gen.standard_normal((n, dim))
    norms = np.linalg.norm(Z, axis=1)
    while np.any(norms == 0):  # measure zero, but keep the contract
        bad = norms == 0
        Z[bad] = gen.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(Z, axis=1)
    X = radius * Z / norms[:, None]
    r = np.linalg.norm(X, axis=1)
    if np.any(np.abs(r - radius) > 1e-14 * radius):
        # renormalise once more; rounding of the division can leave 1 ulp
        X = radius * X / r[:, None]
    return X


def sample_annulus(region: Annulus, n: int, gen: np.random.Generator) -> np.ndarray:
    """Uniform directions with radii uniform in [inner, outer]."""
    Z = gen.standard_normal((n, region.dim))
    Z /= np.linalg.norm(Z, axis=1)[:, None]
    r = gen.uniform(region.inner, region.outer, n)
    return Z * r[:, None]


def sample_ball(dim: int, radius: float, n: int, gen: np.random.Generator) -> np.ndarray:
    """Uniform in the closed ball (volume measure)."""
    Z = gen.standard_normal((n, dim))
    Z /= np.linalg.norm(Z, axis=1)[:, None]
    r = radius * gen.uniform(0.0, 1.0, n) ** (1.0 / dim)
    return Z * r[:, None]


def dedupe(X: np.ndarray, radius: float = DEDUP_RADIUS) -> np.ndarray:
    """Drop every point lying within ``radius`` of an earlier kept point."""
    if len(X) < 2:
        return X
    pairs = cKDTree(X).query_pairs(radius, output_type="ndarray")
    if len(pairs) == 0:
        return X
    pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
    removed = np.zeros(len(X), dtype=bool)
    for i, j in pairs:
        if not removed[i]:
            removed[j] = True
    return X[~removed]


def variety_sample(
    I: Ideal,
    region: Annulus,
    n_seeds: int,
    cfg: SolveConfig = SolveConfig(),
    rng: RngSpec = RngSpec(),
    workers: int = 1,
) -> np.ndarray:
    """Points of the real zero set of ``I`` inside ``region``.

    Seeds are drawn in the annulus and pushed onto the variety by LM, each
    held to the sphere through its seed so that the samples spread over the
    whole annulus instead of piling up on its inner boundary.  Generators are normalised to the outer radius, so the
    tolerance is relative.  Deduplicated at 1e-8; an empty result means
    nothing was found.
    """
    if I.whole_space:
        raise ValueError("whole-space ideal: every point qualifies, sample the region directly")
    if I.nvars != region.dim:
        raise ValueError("ideal and region dimensions differ")
    gens = normalized_generators(I, region.outer)
    if not gens:
        # only zero generators: the zero set is the whole region
        X = sample_annulus(region, n_seeds, rng.generator())
        return dedupe(X)
    system = PolySystem(gens)

    def run(count, r):
        seeds = sample_annulus(region, count, r.generator())
        X, cost, status = lm_batch(
            system, seeds, cfg, lo=region.inner, hi=region.outer, sphere=np.linalg.norm(seeds, axis=1)
        )
        return X[status == SUCCESS]

    X = np.concatenate(chunked_map(run, n_seeds, CHUNK, rng, workers) or [np.zeros((0, region.dim))])
    X = X.reshape(-1, region.dim)
    if len(X):
        cost = system.cost(X)
        inside = region.contains(X)
        if not (np.all(cost <= cfg.tol_residual) and np.all(inside)):
            raise RuntimeError("variety_sample postcondition violated")
    return dedupe(X)


def residual_norm(I: Ideal, X, scale: float) -> np.ndarray:
    """sqrt of the sum of squared normalised generators at each row of X."""
    X = np.atleast_2d(X)
    if I.whole_space:
        return np.zeros(len(X))
    gens = normalized_generators(I, scale)
    if not gens:
        return np.zeros(len(X))
    return np.sqrt(PolySystem(gens).cost(X))


class NoFeasiblePoint(RuntimeError):
    pass


@dataclass
class MinResult:
    value: float
    argmin: np.ndarray
    trace: list = field(default_factory=list)
    points: np.ndarray = None  # all feasible end points
    values: np.ndarray = None  # objective at each feasible end point


def constrained_min(
    objective: Sequence[Poly],
    constraint: Ideal | None,
    region: Annulus,
    cfg: SolveConfig = SolveConfig(),
    rng: RngSpec = RngSpec(),
    n_seeds: int = 64,
    seeds=None,
    mu0: float = 1.0,
    stages: int = 7,
    feas_tol: float | None = None,
    normalize_objective: bool = True,
) -> MinResult:
    """Minimise sum(o_i(x)^2) over the zero set of ``constraint`` in ``region``.

    Quadratic penalty with weights mu_k = 10^k * mu0, k = 0..stages-1, each
    stage solved by LM (warm started, radially clamped).  The end points are
    then pushed onto the constraint by LM and kept if their normalised
    constraint residual is at most ``feas_tol``.  A whole-space or missing
    constraint is dropped.  With ``normalize_objective=False`` the objective
    polynomials are used as given (caller already scaled them).
    """
    objective = list(objective)
    m = region.dim
    feas_tol = cfg.tol_residual if feas_tol is None else feas_tol
    if constraint is not None and constraint.whole_space:
        constraint = None
    obj_raw = PolySystem(objective, nvars=m) if objective else None
    obj_norm = normalized_generators(Ideal(m, objective), region.outer) if normalize_objective else objective
    cons = normalized_generators(constraint, region.outer) if constraint is not None else []
    if seeds is None:
        X = sample_annulus(region, n_seeds, rng.generator())
    else:
        X = radial_clamp(np.asarray(seeds, dtype=float), region.inner, region.outer)

    def raw_objective(P):
        return obj_raw.cost(P) if obj_raw is not None else np.zeros(len(P))

    trace = []
    if obj_norm or cons:
        system = PolySystem(obj_norm + cons, nvars=m)
        for k in range(stages):
            mu = mu0 * 10.0**k
            w = np.concatenate([np.ones(len(obj_norm)), np.full(len(cons), np.sqrt(mu))])
            X, _, _ = lm_batch(system, X, cfg, lo=region.inner, hi=region.outer, weights=w, minimize=True)
            vals = raw_objective(X)
            cres = np.sqrt(PolySystem(cons, nvars=m).cost(X)) if cons else np.zeros(len(X))
            trace.append({"mu": mu, "best_objective": float(vals.min()), "median_constraint_residual": float(np.median(cres))})
    if cons:
        cs = PolySystem(cons, nvars=m)
        X, cost, status = lm_batch(cs, X, cfg, lo=region.inner, hi=region.outer)
        feasible = cost <= feas_tol
    else:
        feasible = np.ones(len(X), dtype=bool)
    X = X[feasible]
    if len(X) == 0:
        raise NoFeasiblePoint("no end point met the constraint tolerance")
    vals = raw_objective(X)
    best = int(np.argmin(vals))
    return MinResult(float(vals[best]), X[best].copy(), trace, X, vals)

