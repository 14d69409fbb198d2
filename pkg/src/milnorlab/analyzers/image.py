"""Image membership over small balls and stability of the image germ."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import PolySystem, RngSpec, lm_batch, sample_ball
from ..numerics.solve import SUCCESS
from ..poly import MapGerm
from .common import AnalysisConfig, fmt_vec, shifted_system

PREIMAGE_BATCH = 64


def find_preimage(G: MapGerm, v, eps: float, n_seeds: int, cfg: AnalysisConfig, rng: RngSpec):
    """A point x with |x| <= eps and G(x) = v, or None.  Iterates are kept in the ball."""
    v = np.asarray(v, dtype=float)
    system = PolySystem(shifted_system(G, v), nvars=G.source_dim)
    seeds = sample_ball(G.source_dim, eps, n_seeds, rng.generator())
    # one preimage settles membership, so stop at the first batch that has one
    for start in range(0, n_seeds, PREIMAGE_BATCH):
        X, cost, status = lm_batch(system, seeds[start : start + PREIMAGE_BATCH], cfg.solve, hi=eps)
        ok = np.flatnonzero((status == SUCCESS) & (np.linalg.norm(X, axis=1) <= eps * (1 + 1e-12)))
        if len(ok):
            return X[ok[np.argmin(cost[ok])]]
    return None


def image_membership(
    G: MapGerm, v, eps: float, n_seeds: int | None = None, cfg: AnalysisConfig = AnalysisConfig(), rng: RngSpec = RngSpec()
) -> bool:
    """True when a preimage of v was found in the closed ball B_eps.  False only
    means none was found with this seed budget."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    n_seeds = cfg.image_seeds if n_seeds is None else n_seeds
    return find_preimage(G, v, eps, n_seeds, cfg, rng) is not None


def default_directions(p: int, n_polar: int = 16) -> np.ndarray:
    """Polar grid for p = 2; coordinate directions and cube diagonals otherwise."""
    if p == 1:
        return np.array([[1.0], [-1.0]])
    if p == 2:
        a = 2 * np.pi * np.arange(n_polar) / n_polar
        return np.column_stack([np.cos(a), np.sin(a)])
    axes = np.concatenate([np.eye(p), -np.eye(p)])
    signs = np.array(np.meshgrid(*[[-1.0, 1.0]] * p, indexing="ij")).reshape(p, -1).T
    return np.concatenate([axes, signs / np.sqrt(p)])


@dataclass
class ImageGermReport:
    directions: np.ndarray
    magnitudes: tuple
    radii: tuple  # decreasing
    member: np.ndarray  # bool [direction, magnitude, radius]
    witnesses: dict  # (i, j, k) -> preimage point
    n_smallest: int = 2

    @property
    def unstable(self) -> np.ndarray:
        """Member at the largest radius but not at the smallest, for all of
        the ``n_smallest`` smallest magnitudes."""
        order = np.argsort(self.magnitudes)[: self.n_smallest]
        sub = self.member[:, order, :]
        return np.all(sub[:, :, 0] & ~sub[:, :, -1], axis=1)

    @property
    def stable(self) -> bool:
        return not self.unstable.any()

    def to_dict(self) -> dict:
        return {
            "directions": [fmt_vec(u) for u in self.directions],
            "magnitudes": list(self.magnitudes),
            "radii": list(self.radii),
            "member": self.member.astype(int).tolist(),
            "unstable_directions": [int(i) for i in np.flatnonzero(self.unstable)],
            "stable": self.stable,
        }


def image_germ_stability(
    G: MapGerm,
    directions=None,
    magnitudes=(1e-5, 1e-6, 1e-7),
    radii=(0.1, 0.05),
    n_seeds: int | None = None,
    cfg: AnalysisConfig = AnalysisConfig(),
    rng: RngSpec = RngSpec(),
) -> ImageGermReport:
    """Membership of t*u in G(B_eps) over a grid of directions, magnitudes, radii.

    A preimage found in a smaller ball also lies in every larger one, so
    hits are propagated upward and the matrix is monotone in eps.
    """
    radii = tuple(sorted(radii, reverse=True))
    if len(radii) < 2 or radii[-1] >= radii[0]:
        raise ValueError("need two distinct radii")
    n_seeds = cfg.image_seeds if n_seeds is None else n_seeds
    U = default_directions(G.target_dim) if directions is None else np.asarray(directions, dtype=float)
    U = U / np.linalg.norm(U, axis=1, keepdims=True)
    member = np.zeros((len(U), len(magnitudes), len(radii)), dtype=bool)
    witnesses = {}
    for i, u in enumerate(U):
        for j, t in enumerate(magnitudes):
            for k, eps in enumerate(radii):
                x = find_preimage(G, t * u, eps, n_seeds, cfg, rng.stream(i).stream(j).stream(k))
                if x is not None:
                    witnesses[(i, j, k)] = x
                    member[i, j, : k + 1] = True
                    for kk in range(k):
                        witnesses.setdefault((i, j, kk), x)
    for k in range(len(radii) - 1):
        if np.any(member[:, :, k + 1] & ~member[:, :, k]):
            raise RuntimeError("membership not monotone in the radius")
    return ImageGermReport(U, tuple(magnitudes), radii, member, witnesses)
