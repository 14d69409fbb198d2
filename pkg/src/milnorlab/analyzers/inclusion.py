"""Sample-level checks of set inclusions between singular, Milnor and zero sets."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..determinantal import Ideal, milnor_ideal, sample_tolerance, singular_ideal, zero_fiber_ideal
from ..numerics import Annulus, RngSpec, residual_norm, sample_annulus, variety_sample
from ..poly import MapGerm
from .common import AnalysisConfig, fmt_vec, norms


@dataclass
class InclusionCheck:
    """Points sampled on one set, tested for membership in another."""

    name: str
    n_samples: int
    tolerance: float
    max_value: float
    violations: list = field(default_factory=list)
    points: np.ndarray | None = None

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n_samples": self.n_samples,
            "tolerance": self.tolerance,
            "max_value": self.max_value,
            "n_violations": len(self.violations),
            "violations": [fmt_vec(v) for v in self.violations[:20]],
            "passed": self.passed,
        }


def sample_set(I: Ideal, region: Annulus, n_seeds: int, cfg: AnalysisConfig, rng: RngSpec) -> np.ndarray:
    """Variety sample, or plain annulus sample for a whole-space ideal."""
    if I.whole_space:
        return sample_annulus(region, n_seeds, rng.generator())
    return variety_sample(I, region, n_seeds, cfg.solve, rng, cfg.workers)


def check_inclusion(name, X, target: Ideal, sampled: Ideal, region: Annulus, cfg: AnalysisConfig, mask=None) -> InclusionCheck:
    """Every row of X must have normalised ``target`` residual <= tau'."""
    X = np.atleast_2d(X).reshape(-1, region.dim)
    if mask is not None:
        X = X[mask]
    tol = sample_tolerance(cfg.tau, sampled, cfg.tau_factor)
    vals = residual_norm(target, X, region.outer) if len(X) else np.zeros(0)
    bad = X[vals > tol]
    return InclusionCheck(name, len(X), tol, float(vals.max()) if len(vals) else 0.0, list(bad), X)


@dataclass
class ISVResult:
    holds: bool
    n_samples: int
    violations: list
    points: np.ndarray

    def to_dict(self) -> dict:
        return {
            "isolated_singular_value": self.holds,
            "n_singular_samples": self.n_samples,
            "vacuous": self.n_samples == 0,
            "violations": [fmt_vec(v) for v in self.violations[:20]],
        }


def isolated_singular_value_check(
    G: MapGerm, region: Annulus | None = None, cfg: AnalysisConfig = AnalysisConfig(), rng: RngSpec = RngSpec()
) -> ISVResult:
    """Sample Sing G in ``region``; holds iff |G(x)| <= tau_G(|x|) at every sample."""
    if region is None:
        region = Annulus(*cfg.sample_radii, G.source_dim)
    X = variety_sample(singular_ideal(G), region, cfg.n_seeds, cfg.solve, rng, cfg.workers)
    vals = norms(G, X)
    bound = cfg.tau_g_factor * np.linalg.norm(X, axis=1) if len(X) else np.zeros(0)
    bad = X[vals > bound]
    return ISVResult(len(bad) == 0, len(X), list(bad), X)


def milnor_zero_fiber_check(
    G: MapGerm,
    region: Annulus | None = None,
    cfg: AnalysisConfig = AnalysisConfig(),
    rng: RngSpec = RngSpec(),
    n_seeds: int | None = None,
) -> InclusionCheck:
    """Points of M(G) n G^-1(0) in the annulus must lie on Sing G."""
    if region is None:
        region = Annulus(*cfg.sample_radii, G.source_dim)
    both = milnor_ideal(G) + zero_fiber_ideal(G)
    X = variety_sample(both, region, cfg.n_seeds if n_seeds is None else n_seeds, cfg.solve, rng, cfg.workers)
    return check_inclusion("M(G) n G^-1(0) in Sing G", X, singular_ideal(G), both, region, cfg)
