"""Floating-point machinery: solving, sampling, clustering, random streams."""
from .cluster import ClusterTooSmall, LinkageChoice, choose_linkage_radius, local_dim, single_linkage
from .rng import RngSpec, chunked_map
from .sampling import (
    Annulus,
    MinResult,
    NoFeasiblePoint,
    constrained_min,
    dedupe,
    residual_norm,
    sample_annulus,
    sample_ball,
    sample_sphere,
    variety_sample,
)
from .solve import PolySystem, SolveConfig, SolveFailure, lm_batch, lm_solve
