"""Composition H = G o F: chain rule and the inclusions behind tameness of H."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..determinantal import milnor_ideal, singular_ideal, zero_fiber_ideal
from ..numerics import Annulus, RngSpec, residual_norm
from ..poly import MapGerm, PolyMat, compose, jacobian
from .common import AnalysisConfig
from .inclusion import InclusionCheck, check_inclusion, sample_set
from .tameness import TamenessVerdict, tameness_scan


def chain_rule_holds(G: MapGerm, F: MapGerm) -> bool:
    """Exact check of J(G o F) = (JG o F) . JF."""
    H = compose(G, F)
    rhs = jacobian(G).subs(list(F.components)) @ jacobian(F)
    return jacobian(H).rows == rhs.rows


@dataclass
class CompositionReport:
    composed: MapGerm
    chain_rule: bool
    checks: list
    tameness_composed: TamenessVerdict | None
    tameness_inner: TamenessVerdict | None

    @property
    def total_violations(self) -> int:
        return sum(len(c.violations) for c in self.checks)

    def to_dict(self) -> dict:
        out = {
            "composed_germ": [g.to_str(self.composed.names) for g in self.composed.components],
            "chain_rule": self.chain_rule,
            "inclusion_checks": [c.to_dict() for c in self.checks],
            "total_violations": self.total_violations,
        }
        if self.tameness_composed is not None:
            out["tameness_composed"] = self.tameness_composed.to_dict()
            out["tameness_inner"] = self.tameness_inner.to_dict()
        return out


def composition_analysis(
    G: MapGerm,
    F: MapGerm,
    cfg: AnalysisConfig = AnalysisConfig(),
    rng: RngSpec = RngSpec(),
    region: Annulus | None = None,
    n_seeds: int = 2048,
    scan: bool = True,
    r0: float = 0.1,
    stages: int = 7,
) -> CompositionReport:
    """Chain rule, then sampled versions of three inclusions:

    (i)   Sing H is contained in F^-1(0),
    (ii)  M(H) minus H^-1(0) is contained in M(F),
    (iii) F^-1(0) is contained in H^-1(0),

    each on points of the annulus, then tameness scans of H and F.
    All residuals are generator-normalised at the outer radius.
    """
    if F.target_dim != G.source_dim:
        from ..poly import DimensionMismatch

        raise DimensionMismatch(f"F has {F.target_dim} components, G takes {G.source_dim} variables")
    H = compose(G, F)
    if region is None:
        region = Annulus(*cfg.sample_radii, F.source_dim)
    chain = chain_rule_holds(G, F)

    sing_h = singular_ideal(H)
    X = sample_set(sing_h, region, n_seeds, cfg, rng.stream(0))
    c1 = check_inclusion("Sing H in F^-1(0)", X, zero_fiber_ideal(F), sing_h, region, cfg)

    mil_h = milnor_ideal(H)
    X = sample_set(mil_h, region, n_seeds, cfg, rng.stream(1))
    off_zero = residual_norm(zero_fiber_ideal(H), X, region.outer) > cfg.tau
    c2 = check_inclusion("M(H) minus H^-1(0) in M(F)", X, milnor_ideal(F), mil_h, region, cfg, mask=off_zero)

    zf = zero_fiber_ideal(F)
    X = sample_set(zf, region, n_seeds, cfg, rng.stream(2))
    c3 = check_inclusion("F^-1(0) in H^-1(0)", X, zero_fiber_ideal(H), zf, region, cfg)

    tame_h = tame_f = None
    if scan:
        tame_h = tameness_scan(H, r0, stages, cfg, rng.stream(3))
        tame_f = tameness_scan(F, r0, stages, cfg, rng.stream(4))
    return CompositionReport(H, chain, [c1, c2, c3], tame_h, tame_f)
