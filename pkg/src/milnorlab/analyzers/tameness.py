"""Witness search for failure of rho-regularity (tameness).

A witness at radius r is a point x with r/2 <= |x| <= r lying on the Milnor
set, with 0 < |G(x)| <= tau_G(r), and close (within 0.25 r) to a point of
the zero fibre that is itself at norm >= r/2.  A family of such points at
three consecutive radii whose limit points point the same way certifies,
up to floating point, that M(G) minus G^-1(0) accumulates on G^-1(0) away
from the origin.

Minimising |G|^2 on M(G) directly is useless when the zero fibre lies in the
singular set (it always lies in M(G) then): the minimiser simply lands on the
fibre.  So the search pins the value instead, solving |G(x)| = s on M(G) for
a level s below tau_G(r).  Points of M(G) off the fibre meet every small
level near a bad limit point; near a good one no exact solution exists.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..determinantal import milnor_ideal, zero_fiber_ideal
from ..numerics import (
    Annulus,
    NoFeasiblePoint,
    PolySystem,
    RngSpec,
    constrained_min,
    lm_batch,
    residual_norm,
    variety_sample,
)
from ..numerics.solve import SUCCESS
from ..poly import MapGerm, Poly
from .common import AnalysisConfig, fmt_vec, norms, normalized_system
from .inclusion import isolated_singular_value_check

log = logging.getLogger(__name__)

NOT_TAME = "NotTame"
TAME_UP_TO_RESOLUTION = "TameUpToResolution"
TRIVIALLY_TAME = "TriviallyTame"


@dataclass
class WitnessPoint:
    point: np.ndarray
    norm: float
    value: float  # |G(x)|
    milnor_residual: float
    distance_to_zero_fiber: float
    radius: float
    limit: np.ndarray  # nearby zero-fibre point

    def direction(self) -> np.ndarray:
        return self.limit / np.linalg.norm(self.limit)

    def verify(self, tau_m: float, tau_g: float):
        r = self.radius
        ok = (
            self.milnor_residual <= tau_m
            and r / 2 * (1 - 1e-12) <= self.norm <= r * (1 + 1e-12)
            and 0 < self.value <= tau_g
        )
        if not ok:
            raise RuntimeError(f"witness invariant violated: {self.to_dict()}")

    def to_dict(self) -> dict:
        return {
            "point": fmt_vec(self.point),
            "norm": self.norm,
            "value": self.value,
            "milnor_residual": self.milnor_residual,
            "distance_to_zero_fiber": self.distance_to_zero_fiber,
            "radius": self.radius,
            "limit_estimate": fmt_vec(self.limit),
        }


@dataclass
class StageReport:
    radius: float
    tau_g: float
    n_zero_fiber_samples: int
    n_level_solutions: int = 0
    best_score: float = float("inf")  # smallest |G| over admissible Milnor points
    witnesses: list = field(default_factory=list)

    @property
    def trivial(self) -> bool:
        return self.n_zero_fiber_samples == 0

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "tau_g": self.tau_g,
            "n_zero_fiber_samples": self.n_zero_fiber_samples,
            "n_level_solutions": self.n_level_solutions,
            "best_obstruction_score": self.best_score,
            "n_witnesses": len(self.witnesses),
        }


@dataclass
class TamenessVerdict:
    kind: str
    stages: list
    witnesses: list = field(default_factory=list)  # one per persistent stage
    limit_estimate: np.ndarray | None = None
    reason: str = ""
    warnings: list = field(default_factory=list)

    @property
    def smallest_radius(self) -> float:
        return min(s.radius for s in self.stages)

    def best_scores(self) -> list:
        return [s.best_score for s in self.stages]

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "reason": self.reason, "smallest_radius": self.smallest_radius}
        out["stages"] = [s.to_dict() for s in self.stages]
        if self.kind == NOT_TAME:
            out["witnesses"] = [w.to_dict() for w in self.witnesses]
            out["limit_estimate"] = fmt_vec(self.limit_estimate)
        out["warnings"] = list(self.warnings)
        return out


def radius_schedule(r0: float, stages: int) -> list[float]:
    """r_k = r0 * 2^-k for k = 0..stages."""
    return [r0 * 2.0**-k for k in range(stages + 1)]


def _level_objective(G: MapGerm, s: float) -> Poly:
    sq = Poly.zero(G.source_dim)
    for g in G.components:
        sq = sq + g * g
    return sq.scale(1 / Fraction(s * s)) - 1


def _scan_stage(G, M, Z, r, cfg: AnalysisConfig, rng: RngSpec) -> StageReport:
    m = G.source_dim
    region = Annulus(r / 2, r, m)
    tau_g = cfg.tau_g(r)
    zs = variety_sample(Z, region, cfg.n_seeds, cfg.solve, rng.stream(0), cfg.workers)
    stage = StageReport(r, tau_g, len(zs))
    if len(zs) == 0:
        return stage
    zsys = normalized_system(Z, r)
    tau_m = cfg.tau
    for li, frac in enumerate(cfg.witness_levels):
        s = frac * tau_g
        gen = rng.stream(1 + li).generator()
        pick = zs[np.arange(cfg.witness_seeds) % len(zs)]
        seeds = pick + cfg.witness_spread * r * gen.standard_normal(pick.shape)
        try:
            res = constrained_min(
                [_level_objective(G, s)],
                M,
                region,
                cfg.solve,
                seeds=seeds,
                normalize_objective=False,
                feas_tol=tau_m**2,
            )
        except NoFeasiblePoint:
            continue
        X = res.points
        vals = norms(G, X)
        on_level = np.abs(vals / s - 1.0) <= 0.1
        X, vals = X[on_level], vals[on_level]
        stage.n_level_solutions += len(X)
        if len(X) == 0:
            continue
        # nearest zero-fibre point by unclamped LM from each candidate
        Xs, _, status = lm_batch(zsys, X, cfg.solve)
        dist = np.linalg.norm(Xs - X, axis=1)
        ok = (status == SUCCESS) & (dist <= cfg.limit_radius * r) & (np.linalg.norm(Xs, axis=1) >= r / 2)
        mres = residual_norm(M, X, r)
        for i in np.flatnonzero(ok):
            stage.best_score = min(stage.best_score, float(vals[i]))
            if 0 < vals[i] <= tau_g and mres[i] <= tau_m:
                w = WitnessPoint(X[i], float(np.linalg.norm(X[i])), float(vals[i]), float(mres[i]), float(dist[i]), r, Xs[i])
                w.verify(tau_m, tau_g)
                stage.witnesses.append(w)
    return stage


def _persistent_chain(stages: list, length: int, tol: float):
    """First run of ``length`` consecutive stages with witnesses whose limit
    directions (unit sphere) are pairwise within ``tol``."""
    for start in range(len(stages) - length + 1):
        run = stages[start:start + length]
        if any(not s.witnesses for s in run):
            continue

        def extend(chain, depth):
            if depth == length:
                return chain
            for w in run[depth].witnesses:
                u = w.direction()
                if all(np.linalg.norm(u - c.direction()) <= tol for c in chain):
                    found = extend(chain + [w], depth + 1)
                    if found:
                        return found
            return None

        for w0 in run[0].witnesses:
            chain = extend([w0], 1)
            if chain:
                return chain
    return None


def tameness_scan(
    G: MapGerm, r0: float = 0.1, stages: int = 7, cfg: AnalysisConfig = AnalysisConfig(), rng: RngSpec = RngSpec()
) -> TamenessVerdict:
    """Probe the annuli [r_k/2, r_k], r_k = r0 * 2^-k, for tameness witnesses."""
    M = milnor_ideal(G)
    Z = zero_fiber_ideal(G)
    radii = radius_schedule(r0, stages)
    warnings = []
    # one annulus per stage: generator normalisation is only meaningful at a single scale
    isv = [
        isolated_singular_value_check(G, Annulus(r / 2, r, G.source_dim), cfg, rng.stream(0).stream(k))
        for k, r in enumerate(radii)
    ]
    if not all(c.holds for c in isv):
        msg = "isolated singular value not confirmed; only the rho-regularity specialisation is tested"
        log.warning(msg)
        warnings.append(msg)
    reports = [_scan_stage(G, M, Z, r, cfg, rng.stream(1 + k)) for k, r in enumerate(radii)]
    if all(s.trivial for s in reports):
        return TamenessVerdict(
            TRIVIALLY_TAME, reports, reason="no zero-fibre points found in any probed annulus", warnings=warnings
        )
    chain = _persistent_chain(reports, cfg.persistence, cfg.limit_radius)
    if chain:
        limit = chain[-1].limit
        return TamenessVerdict(
            NOT_TAME,
            reports,
            chain,
            limit,
            reason=f"witnesses persist over {cfg.persistence} consecutive radius stages",
            warnings=warnings,
        )
    return TamenessVerdict(
        TAME_UP_TO_RESOLUTION,
        reports,
        reason=f"no persistent witnesses down to radius {radii[-1]:.3g}",
        warnings=warnings,
    )
