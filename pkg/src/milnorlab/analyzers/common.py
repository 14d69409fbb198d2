"""Shared configuration and helpers for the analyzers."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from ..determinantal import Ideal, normalized_generators
from ..numerics import PolySystem, SolveConfig
from ..poly import MapGerm, Poly


@dataclass(frozen=True)
class AnalysisConfig:
    solve: SolveConfig = field(default_factory=SolveConfig)
    workers: int = 1
    # variety sampling
    n_seeds: int = 1024
    sample_radii: tuple = (0.05, 0.1)
    # witness search
    tau_g_factor: float = 1e-3  # tau_G(r) = tau_g_factor * r
    witness_seeds: int = 128
    witness_levels: tuple = (0.25,)  # levels |G| = f * tau_G(r)
    witness_spread: float = 0.1  # seed perturbation, relative to r
    limit_radius: float = 0.25  # relative to r
    persistence: int = 3
    # sample-level inclusion checks
    tau_factor: float = 10.0  # C in tau' = C * tau**(1/d)
    # fibres
    fiber_seeds: int = 4096
    local_k: int = 10
    linkage_factor: float = 3.0
    noise_floor: float = 1e-6
    # image
    image_seeds: int = 64

    @property
    def tau(self) -> float:
        """Residual norm matching the solver tolerance on squared residuals."""
        return float(np.sqrt(self.solve.tol_residual))

    def tau_g(self, r: float) -> float:
        return self.tau_g_factor * r

    def to_dict(self) -> dict:
        return asdict(self)


def norms(G: MapGerm, X) -> np.ndarray:
    """|G(x)| for each row of X."""
    X = np.atleast_2d(X)
    if len(X) == 0:
        return np.zeros(0)
    return np.linalg.norm(PolySystem(list(G.components)).values(X), axis=1)


def shifted_system(G: MapGerm, v) -> list[Poly]:
    """(G - v) / |v| as exact polynomials."""
    v = [Fraction(float(c)) for c in v]
    nv = Fraction(float(np.linalg.norm(np.asarray(v, dtype=float))))
    if nv == 0:
        raise ValueError("target must be nonzero")
    return [(g - c).scale(1 / nv) for g, c in zip(G.components, v)]


def normalized_system(I: Ideal, scale: float) -> PolySystem | None:
    gens = normalized_generators(I, scale)
    return PolySystem(gens) if gens else None


def fmt_vec(x) -> list:
    return [float(c) for c in np.asarray(x, dtype=float).ravel()]
