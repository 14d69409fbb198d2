"""Fibres G^-1(v) inside a ball: sampling, clustering, component dimensions."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..numerics import (
    ClusterTooSmall,
    PolySystem,
    RngSpec,
    chunked_map,
    choose_linkage_radius,
    lm_batch,
    local_dim,
    sample_ball,
    single_linkage,
)
from ..numerics.solve import SUCCESS
from ..poly import MapGerm
from .common import AnalysisConfig, fmt_vec, shifted_system

CHUNK = 256


class NoSolutionsFound(RuntimeError):
    def __init__(self, v, eps, n_seeds):
        super().__init__(f"no point of the fibre over {fmt_vec(v)} found in the ball of radius {eps} from {n_seeds} seeds")
        self.n_seeds = n_seeds


@dataclass
class FiberReport:
    target: np.ndarray
    eps: float
    n_seeds: int
    n_hits: int
    linkage_radius: float
    linkage_rule: str
    plateau_counts: tuple
    cluster_sizes: list = field(default_factory=list)
    cluster_dims: list = field(default_factory=list)
    points: np.ndarray | None = None
    labels: np.ndarray | None = None
    n_stragglers: int = 0

    @property
    def stable(self) -> bool:
        return len(set(self.plateau_counts)) == 1

    @property
    def n_clusters(self):
        """Cluster count, or None when the plateau scan is not flat."""
        return len(self.cluster_sizes) if self.stable else None

    def to_dict(self) -> dict:
        return {
            "target": fmt_vec(self.target),
            "eps": self.eps,
            "n_seeds": self.n_seeds,
            "n_hits": self.n_hits,
            "n_clusters": self.n_clusters,
            "cluster_sizes": list(self.cluster_sizes),
            "cluster_dims": list(self.cluster_dims),
            "linkage_radius": self.linkage_radius,
            "linkage_rule": self.linkage_rule,
            "n_stragglers": self.n_stragglers,
            "plateau_counts": list(self.plateau_counts),
            "plateau_stable": self.stable,
        }


def fiber_points(G: MapGerm, v, eps: float, n_seeds: int, cfg: AnalysisConfig, rng: RngSpec) -> np.ndarray:
    """Solutions of G(x) = v reached by LM from uniform seeds in B_eps."""
    v = np.asarray(v, dtype=float)
    if v.shape != (G.target_dim,):
        raise ValueError(f"target must have {G.target_dim} coordinates")
    system = PolySystem(shifted_system(G, v), nvars=G.source_dim)
    m = G.source_dim

    def run(count, r):
        seeds = sample_ball(m, eps, count, r.generator())
        X, _, status = lm_batch(system, seeds, cfg.solve)
        return X[status == SUCCESS]

    X = np.concatenate(chunked_map(run, n_seeds, CHUNK, rng, cfg.workers) or [np.zeros((0, m))]).reshape(-1, m)
    return X[np.linalg.norm(X, axis=1) <= eps]


def fiber_report(
    G: MapGerm, v, eps: float = 0.5, n_seeds: int | None = None, cfg: AnalysisConfig = AnalysisConfig(), rng: RngSpec = RngSpec()
) -> FiberReport:
    """Sample the fibre over ``v`` in B_eps and describe its components.

    Hits are not deduplicated: seeds that converge to the same point stack
    up, which is exactly how zero-dimensional components show themselves.
    """
    n_seeds = cfg.fiber_seeds if n_seeds is None else n_seeds
    v = np.asarray(v, dtype=float)
    X = fiber_points(G, v, eps, n_seeds, cfg, rng)
    if len(X) == 0:
        raise NoSolutionsFound(v, eps, n_seeds)
    choice = choose_linkage_radius(X, cfg.linkage_factor)
    clusters = [c for c in single_linkage(X, choice.h) if len(c) >= choice.min_size]
    labels = np.full(len(X), -1, dtype=int)  # -1 marks stragglers
    sizes, dims = [], []
    for c, idx in enumerate(clusters):
        labels[idx] = c
        sizes.append(len(idx))
        try:
            dims.append(local_dim(X[idx], k=cfg.local_k, noise_floor=cfg.noise_floor * eps))
        except ClusterTooSmall:
            dims.append(None)
    return FiberReport(v, eps, n_seeds, len(X), choice.h, choice.rule, choice.counts, sizes, dims, X, labels, int((labels < 0).sum()))


@dataclass
class ProductReport:
    delta: float
    three_or_more_components: bool
    full: FiberReport
    truncated: FiberReport
    outcome: str  # consistent / inconsistent / inconclusive
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "three_or_more_components": self.three_or_more_components,
            "outcome": self.outcome,
            "detail": self.detail,
            "fiber": self.full.to_dict(),
            "truncated_fiber": self.truncated.to_dict(),
        }


def product_structure_check(
    F: MapGerm,
    delta: float = 1e-4,
    eps: float = 0.5,
    n_seeds: int | None = None,
    truncated_seeds: int | None = None,
    cfg: AnalysisConfig = AnalysisConfig(),
    rng: RngSpec = RngSpec(),
) -> ProductReport:
    """Compare the fibre of F with that of F minus its last component.

    Product structure predicts equal component counts and one extra
    dimension per component.  Only counts and dimensions are compared.
    """
    p = F.target_dim
    if p < 2:
        raise ValueError("need at least two components")
    n_seeds = cfg.fiber_seeds if n_seeds is None else n_seeds
    # a fibre one dimension up needs more samples to stay connected
    truncated_seeds = 4 * n_seeds if truncated_seeds is None else truncated_seeds
    H = F.truncate(p - 1)
    v = np.zeros(p)
    v[0] = delta
    full = fiber_report(F, v, eps, n_seeds, cfg, rng.stream(0))
    trunc = fiber_report(H, v[:-1], eps, truncated_seeds, cfg, rng.stream(1))
    if not (full.stable and trunc.stable) or None in full.cluster_dims + trunc.cluster_dims:
        outcome, detail = "inconclusive", "no cluster-count plateau or undetermined dimension"
    elif full.n_clusters != trunc.n_clusters:
        outcome, detail = "inconsistent", f"component counts differ: {full.n_clusters} vs {trunc.n_clusters}"
    elif sorted(d + 1 for d in full.cluster_dims) != sorted(trunc.cluster_dims):
        outcome, detail = "inconsistent", f"dimensions {full.cluster_dims} vs {trunc.cluster_dims}"
    else:
        outcome, detail = "consistent with product structure", f"{full.n_clusters} component(s), dimension +1 each"
    return ProductReport(delta, p >= 3, full, trunc, outcome, detail)
