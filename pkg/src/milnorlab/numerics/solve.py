"""Vectorised polynomial systems and a batched Levenberg-Marquardt solver."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..poly import Poly

SUCCESS = 0
MAX_ITERATIONS = 1
DIVERGED = 2
SINGULAR_UPDATE = 3
STALLED = 4

REASONS = {MAX_ITERATIONS: "max_iterations", DIVERGED: "diverged", SINGULAR_UPDATE: "singular_update", STALLED: "stalled"}


@dataclass(frozen=True)
class SolveConfig:
    tol_residual: float = 1e-12
    max_iterations: int = 200
    damping: float = 1e-3
    # extra iterations after the tolerance is met (quadratic convergence
    # makes these cheap and they sharpen the root considerably)
    polish_iterations: int = 6

    def __post_init__(self):
        if not self.tol_residual > 0:
            raise ValueError("tol_residual must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not self.damping > 0:
            raise ValueError("damping must be positive")


class SolveFailure(RuntimeError):
    def __init__(self, reason: str, point=None, residual=None):
        self.reason = reason
        self.point = point
        self.residual = residual
        super().__init__(f"solver failed: {reason}")


class PolySystem:
    """A list of polynomials compiled to a shared monomial table.

    Values and the exact Jacobian (from symbolic partials) are evaluated for a
    whole batch of points at once.  ``weights`` rescale the residual rows.
    """

    def __init__(self, polys: Sequence[Poly], nvars: int | None = None):
        polys = list(polys)
        if nvars is None:
            if not polys:
                raise ValueError("empty system needs an explicit nvars")
            nvars = polys[0].nvars
        self.nvars = nvars
        self.polys = polys
        self.k = len(polys)
        partials = [p.diff(j) for p in polys for j in range(nvars)]
        everything = polys + partials
        monos = sorted({mono for p in everything for mono, _ in p.terms}) or [(0,) * nvars]
        col = {mono: t for t, mono in enumerate(monos)}
        self.exps = np.array(monos, dtype=np.int64).reshape(len(monos), nvars)
        self.coef = np.zeros((len(everything), len(monos)))
        for i, p in enumerate(everything):
            for mono, c in p.terms:
                self.coef[i, col[mono]] = float(c)
        self.max_exp = int(self.exps.max()) if self.exps.size else 0

    def _monomials(self, X):
        N = X.shape[0]
        out = np.ones((N, self.exps.shape[0]))
        ar = np.arange(self.max_exp + 1)
        for j in range(self.nvars):
            pw = X[:, j, None] ** ar
            out *= pw[:, self.exps[:, j]]
        return out

    def values(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return self._monomials(X) @ self.coef[: self.k].T

    def values_and_jacobian(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        allv = self._monomials(X) @ self.coef.T
        F = allv[:, : self.k]
        J = allv[:, self.k:].reshape(X.shape[0], self.k, self.nvars)
        return F, J

    def cost(self, X) -> np.ndarray:
        return (self.values(X) ** 2).sum(axis=1)


def radial_clamp(X, lo: float | None, hi: float | None):
    if lo is None and hi is None:
        return X
    n = np.linalg.norm(X, axis=1)
    target = np.clip(n, lo if lo is not None else 0.0, hi if hi is not None else np.inf)
    scale = np.where(n > 0, target / np.where(n > 0, n, 1.0), 1.0)
    return X * scale[:, None]


def lm_batch(system: PolySystem, X0, cfg: SolveConfig, lo=None, hi=None, weights=None, minimize=False, sphere=None):
    """Levenberg-Marquardt from every row of ``X0`` simultaneously.

    Each iterate is clamped radially into ``lo <= |x| <= hi``.  With
    ``sphere`` (one radius s per row) the residual (|x|^2 - s^2) / (2 s^2)
    is appended, which keeps each solution on its own sphere.  Returns
    ``(X, cost, status)`` with cost = sum of squared (weighted) residuals.
    In ``minimize`` mode a stalled descent ends the run without being a
    failure; otherwise success means cost <= ``cfg.tol_residual``.
    """
    # diverging rows overflow on their way out; they are flagged, not fatal
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        return _lm_batch(system, X0, cfg, lo, hi, weights, minimize, sphere)


def _lm_batch(system, X0, cfg, lo, hi, weights, minimize, sphere):
    X = radial_clamp(np.array(X0, dtype=float, copy=True), lo, hi)
    N, m = X.shape
    w = None if weights is None else np.asarray(weights, dtype=float)
    s2 = None if sphere is None else np.asarray(sphere, dtype=float) ** 2

    def evaluate(P, rows):
        with np.errstate(over="ignore", invalid="ignore"):
            F, J = system.values_and_jacobian(P)
            if w is not None:
                F = F * w
                J = J * w[:, None]
            if s2 is not None:
                t = s2[rows]
                Fs = ((P**2).sum(axis=1) - t) / (2 * t)
                Js = P / t[:, None]
                F = np.concatenate([F, Fs[:, None]], axis=1)
                J = np.concatenate([J, Js[:, None, :]], axis=1)
        return F, J

    F, J = evaluate(X, np.arange(N))
    cost = (F**2).sum(axis=1)
    A = np.einsum("nki,nkj->nij", J, J)
    g = np.einsum("nki,nk->ni", J, F)
    diag_max = np.max(np.abs(np.diagonal(A, axis1=1, axis2=2)), axis=1)
    lam = cfg.damping * np.where(diag_max > 0, diag_max, 1.0)
    nu = np.full(N, 2.0)
    status = np.full(N, MAX_ITERATIONS)
    done = np.zeros(N, dtype=bool)
    polish = np.full(N, cfg.polish_iterations)
    if not minimize:
        ok = cost <= cfg.tol_residual
        status[ok] = SUCCESS
        done |= ok & (polish <= 0)
    bad = ~np.isfinite(cost)
    status[bad] = DIVERGED
    done |= bad
    eye = np.eye(m)
    for _ in range(cfg.max_iterations):
        idx = np.flatnonzero(~done)
        if idx.size == 0:
            break
        M = A[idx] + lam[idx, None, None] * eye
        rhs = -g[idx]
        try:
            delta = np.linalg.solve(M, rhs[..., None])[..., 0]
        except np.linalg.LinAlgError:
            delta = np.stack([np.linalg.lstsq(Mi, ri, rcond=None)[0] for Mi, ri in zip(M, rhs)])
        Xn = radial_clamp(X[idx] + delta, lo, hi)
        Fn, Jn = evaluate(Xn, idx)
        costn = (Fn**2).sum(axis=1)
        finite = np.isfinite(costn) & np.all(np.isfinite(Xn), axis=1)
        pred = -(delta * g[idx]).sum(axis=1) + lam[idx] * (delta**2).sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            rho = np.where(pred > 0, (cost[idx] - costn) / pred, -1.0)
        accept = finite & (costn < cost[idx])
        a = idx[accept]
        if a.size:
            gain = cost[a] - costn[accept]
            X[a] = Xn[accept]
            F[a] = Fn[accept]
            J[a] = Jn[accept]
            cost[a] = costn[accept]
            A[a] = np.einsum("nki,nkj->nij", Jn[accept], Jn[accept])
            g[a] = np.einsum("nki,nk->ni", Jn[accept], Fn[accept])
            r = np.clip(rho[accept], 0.0, 1.0)
            lam[a] *= np.maximum(1.0 / 3.0, 1.0 - (2.0 * r - 1.0) ** 3)
            nu[a] = 2.0
            if minimize:
                stalled = gain <= 1e-14 * np.maximum(cost[a] + gain, 1e-300)
                status[a[stalled]] = STALLED
                done[a[stalled]] = True
            else:
                conv = cost[a] <= cfg.tol_residual
                polish[a[conv & (status[a] == SUCCESS)]] -= 1
                status[a[conv]] = SUCCESS
                done[a[conv & (polish[a] <= 0)]] = True
        rj = idx[~accept]
        if rj.size:
            # a converged point whose polishing step fails is finished
            fin = status[rj] == SUCCESS
            done[rj[fin]] = True
            rj = rj[~fin]
            lam[rj] *= nu[rj]
            nu[rj] *= 2.0
            diag_now = np.max(np.abs(np.diagonal(A[rj], axis1=1, axis2=2)), axis=1)
            stuck = lam[rj] > 1e16 * np.maximum(diag_now, 1e-300)
            stuck |= ~np.isfinite(lam[rj])
            status[rj[stuck]] = STALLED if minimize else SINGULAR_UPDATE
            done[rj[stuck]] = True
        far = np.linalg.norm(X, axis=1) > 1e8
        newly = far & ~done
        status[newly] = DIVERGED
        done |= newly
    return X, cost, status


def lm_solve(system: Sequence[Poly], seed, cfg: SolveConfig = SolveConfig()) -> np.ndarray:
    """Solve ``system = 0`` by Levenberg-Marquardt from ``seed``.

    Raises :class:`SolveFailure` with reason ``max_iterations``,
    ``diverged`` or ``singular_update``.
    """
    system = list(system)
    if not system:
        raise ValueError("system must be nonempty")
    seed = np.asarray(seed, dtype=float)
    if seed.ndim != 1 or seed.shape[0] != system[0].nvars:
        raise ValueError(f"seed has shape {seed.shape}, expected ({system[0].nvars},)")
    ps = PolySystem(system)
    X, cost, status = lm_batch(ps, seed[None, :], cfg)
    if status[0] != SUCCESS:
        raise SolveFailure(REASONS[int(status[0])], X[0], float(cost[0]))
    check = float(ps.cost(X)[0])
    if not check <= cfg.tol_residual:
        raise RuntimeError(f"postcondition violated: residual {check} > {cfg.tol_residual}")
    return X[0]
