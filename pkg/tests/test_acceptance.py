"""Acceptance criteria, one test each, with their runtime budgets.

Every criterion prints a PASS/FAIL line; the lines are also repeated in the
pytest terminal summary.  Run alone with ``pytest tests/test_acceptance.py``
or ``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import functools
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracle import milnor_generators, to_dict  # noqa: E402

from milnorlab import MapGerm, Poly, PolyMat, compose, det, jacobian, minors, parse_germ_file  # noqa: E402
from milnorlab.analyzers import (  # noqa: E402
    NOT_TAME,
    TAME_UP_TO_RESOLUTION,
    TRIVIALLY_TAME,
    AnalysisConfig,
    composition_analysis,
    fiber_report,
    image_germ_stability,
    milnor_zero_fiber_check,
    tameness_scan,
)
from milnorlab.cli import main  # noqa: E402
from milnorlab.determinantal import milnor_ideal, residual_system, singular_ideal, zero_fiber_ideal  # noqa: E402
from milnorlab.numerics import RngSpec  # noqa: E402
from milnorlab.parse import parse_poly  # noqa: E402

RESULTS: list[str] = []


def criterion(number: int, title: str, budget: float):
    """Time the test, record one PASS/FAIL line, fail on budget overrun."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            start = time.perf_counter()
            try:
                detail = fn(*args, **kwargs) or ""
            except BaseException as err:
                elapsed = time.perf_counter() - start
                line = f"FAIL  criterion {number:2d} {title} ({elapsed:.1f} s): {type(err).__name__}: {err}"
                RESULTS.append(line)
                print(line)
                raise
            elapsed = time.perf_counter() - start
            ok = elapsed <= budget
            line = f"{'PASS' if ok else 'FAIL'}  criterion {number:2d} {title} ({elapsed:.1f} s of {budget:.0f} s) {detail}".rstrip()
            RESULTS.append(line)
            print(line)
            assert ok, f"over the {budget} s budget"

        return run

    return wrap


# ---------------------------------------------------------------- random exact objects

RNG = np.random.default_rng(20240611)


def random_poly(n, max_deg=3, n_terms=4, min_deg=0):
    terms = []
    for _ in range(n_terms):
        while True:
            e = tuple(int(k) for k in RNG.integers(0, max_deg + 1, n))
            if min_deg <= sum(e) <= max_deg:
                break
        terms.append((e, Fraction(int(RNG.integers(-9, 10)), int(RNG.integers(1, 5)))))
    return Poly(n, terms)


def random_germ(m, p, max_deg=3):
    return MapGerm(tuple(random_poly(m, max_deg, 3, min_deg=1) for _ in range(p)), tuple(f"x{i}" for i in range(m)))


def random_point(n):
    return [Fraction(int(RNG.integers(-7, 8)), int(RNG.integers(1, 6))) for _ in range(n)]


# ---------------------------------------------------------------- 1


@criterion(1, "symbolic suite", 10)
def test_symbolic_suite():
    pairs = []
    for _ in range(20):
        p, k, m = sorted(int(v) for v in RNG.integers(1, 4, 3))
        F, G = random_germ(m, k), random_germ(k, p)
        pairs.append((G, F))
        lhs = jacobian(compose(G, F))
        rhs = jacobian(G).subs(list(F.components)) @ jacobian(F)
        assert lhs == rhs
    for i in range(1000):
        G, F = pairs[i % 20]
        x = random_point(F.source_dim)
        assert compose(G, F)(x) == G(F(x))
    for _ in range(30):
        n = int(RNG.integers(2, 5))
        M = PolyMat([[random_poly(2, 2, 2) for _ in range(n)] for _ in range(n)])
        i, j = sorted(int(v) for v in RNG.choice(n, 2, replace=False))
        assert det(M.swap_rows(i, j)) == -det(M)
        rows = [list(M.rows[r]) for r in range(n)]
        rows[j] = rows[i]
        assert det(PolyMat(rows)).is_zero()
        assert minors(M, n) == [det(M)]
        # Laplace expansion along the first row
        expansion = Poly.zero(2)
        for c in range(n):
            sub = M.submatrix(list(range(1, n)), [k for k in range(n) if k != c])
            expansion = expansion + (M[0, c] * det(sub)).scale((-1) ** c)
        assert expansion == det(M)
    names = ["x", "y", "z"]
    for _ in range(500):
        p = random_poly(3, 5, int(RNG.integers(0, 7)))
        assert parse_poly(p.to_str(names), names) == p
    return "20 chain-rule pairs, 1000 points, 30 matrices, 500 round trips"


# ---------------------------------------------------------------- 2


@criterion(2, "Milnor ideal ground truth", 1)
def test_milnor_ideal_ground_truth(corpus):
    G = corpus["sabbah"]
    I = milnor_ideal(G)
    expected = parse_poly("x*y^2 + 2*x*z", G.names)
    assert len(I.generators) == 1 and I.generators[0] in (expected, -expected)
    oracle = milnor_generators([to_dict(g) for g in G.components], 3)
    assert [to_dict(g) for g in I.generators] == oracle
    for name in ("square",):
        assert milnor_ideal(corpus[name]).whole_space
    for _ in range(10):
        n = int(RNG.integers(1, 4))
        assert milnor_ideal(random_germ(n, n)).whole_space
    return "sabbah generator x*y^2 + 2*x*z, whole_space on m = p"


# ---------------------------------------------------------------- 3


def _persistent_limits(verdict):
    assert verdict.kind == NOT_TAME and len(verdict.witnesses) == 3
    assert verdict.smallest_radius <= 1e-3
    return [w.limit / np.linalg.norm(w.limit) for w in verdict.witnesses]


@criterion(3, "non-tameness detection", 120)
def test_non_tameness(corpus):
    t0 = time.perf_counter()
    xy = tameness_scan(corpus["xy"], 0.1, 7)
    t_xy = time.perf_counter() - t0
    for u in _persistent_limits(xy):
        assert abs(u[0]) <= 0.05  # distance to {x = 0}
    t0 = time.perf_counter()
    sab = tameness_scan(corpus["sabbah"], 0.1, 7)
    t_sab = time.perf_counter() - t0
    for u in _persistent_limits(sab):
        assert np.hypot(u[0], u[1]) <= 0.05  # distance to the z-axis
    assert t_xy < 60 and t_sab < 60
    return f"xy {t_xy:.1f} s, sabbah {t_sab:.1f} s"


# ---------------------------------------------------------------- 4


@criterion(4, "tameness at resolution", 120)
def test_tame_at_resolution(corpus):
    cfg = AnalysisConfig()
    v = tameness_scan(corpus["act"], 0.1, 7, cfg)
    assert v.kind == TAME_UP_TO_RESOLUTION and v.smallest_radius <= 1e-3
    for st in v.stages:
        assert st.best_score > cfg.tau_g(st.radius)
    assert tameness_scan(corpus["square"], 0.1, 7).kind == TRIVIALLY_TAME
    return f"{len(v.stages)} stages down to r = {v.smallest_radius:.2g}"


# ---------------------------------------------------------------- 5


@criterion(5, "fibre topology", 120)
def test_fibre_topology(corpus):
    act = fiber_report(corpus["act"], (1e-4, 0), 0.5, 4096, rng=RngSpec(7))
    assert act.n_clusters == 2 and act.cluster_dims == [1, 1]
    sq = fiber_report(corpus["square"], (1e-4, 0), 0.5, 4096, rng=RngSpec(7))
    assert sq.n_clusters == 2 and sq.cluster_dims == [0, 0]
    np.testing.assert_allclose(sorted(abs(sq.points[sq.labels == c, 0].mean()) for c in range(2)), [1e-2, 1e-2], rtol=1e-6)
    H = fiber_report(corpus["composed"], (1e-8, 0), 0.5, 4096, rng=RngSpec(7))
    assert H.n_clusters == 4 and H.cluster_dims == [1, 1, 1, 1]
    return "act 2 x dim 1, square 2 x dim 0, composed 4 x dim 1"


# ---------------------------------------------------------------- 6


def xy_image_contains(a, b, eps):
    # (x, xy) = (a, b) forces x = a, y = b / a
    return a != 0 and a * a + (b / a) ** 2 <= eps * eps


@criterion(6, "image germ behaviour", 60)
def test_image_germ(corpus):
    e1, e2 = 0.1, 0.05
    slopes = np.array([-0.2, -0.075, 0.01, 0.03, 0.06, 0.075, 0.09, 0.2])
    U = np.column_stack([np.ones(len(slopes)), slopes])
    rep = image_germ_stability(corpus["xy"], U, magnitudes=(1e-5, 1e-6, 1e-7), radii=(e1, e2))
    Un = U / np.linalg.norm(U, axis=1, keepdims=True)
    for i, u in enumerate(Un):
        for j, t in enumerate(rep.magnitudes):
            for k, e in enumerate(rep.radii):
                assert rep.member[i, j, k] == xy_image_contains(*(t * u), e)
    expected = (np.abs(slopes) > e2) & (np.abs(slopes) < e1)
    assert rep.unstable.tolist() == expected.tolist()
    act = image_germ_stability(corpus["act"], magnitudes=(1e-5, 1e-6), radii=(e1, e2))
    assert act.stable and act.member[:, 0, 0].all()
    return f"xy unstable slopes {slopes[rep.unstable].tolist()}, act stable on 16 directions"


# ---------------------------------------------------------------- 7


@criterion(7, "composition ladder", 60)
def test_composition_ladder(corpus):
    rep = composition_analysis(corpus["square"], corpus["act"], n_seeds=2048)
    assert rep.chain_rule
    assert rep.composed.components == corpus["composed"].components
    for c in rep.checks:
        assert c.n_samples >= 1000 and c.passed, c.to_dict()
    assert rep.tameness_composed.kind != NOT_TAME and rep.tameness_inner.kind != NOT_TAME
    return "samples " + ", ".join(f"{c.n_samples} (max {c.max_value:.2g})" for c in rep.checks)


# ---------------------------------------------------------------- 8


@criterion(8, "Milnor set meets the zero fibre inside Sing", 30)
def test_milnor_zero_fibre(corpus):
    counts = {}
    for name, G in corpus.items():
        rep = milnor_zero_fiber_check(G, rng=RngSpec(3), n_seeds=2048)
        assert rep.passed, rep.to_dict()
        counts[name] = rep.n_samples
        if name == "square":
            assert rep.n_samples == 0  # G^-1(0) = {0}: vacuous
        else:
            assert rep.n_samples >= 1000
    return str(counts)


# ---------------------------------------------------------------- 9


@criterion(9, "determinism across worker counts", 60)
def test_determinism(tmp_path):
    outs = []
    for workers in (1, 8):
        out = tmp_path / f"w{workers}.json"
        code = main(["analyze", "act", "--seed", "11", "--seeds", "1024", "--workers", str(workers), "--out", str(out)])
        assert code == 0
        outs.append(out)
    assert outs[0].read_bytes() == outs[1].read_bytes()
    assert outs[0].with_suffix(".svg").read_bytes() == outs[1].with_suffix(".svg").read_bytes()
    return f"{outs[0].stat().st_size} byte report"


# ---------------------------------------------------------------- 10


@criterion(10, "residual gradients", 10)
def test_gradients(corpus):
    n_checked = 0
    h = 1e-6
    for G in corpus.values():
        for I in (singular_ideal(G), milnor_ideal(G), zero_fiber_ideal(G)):
            if I.whole_space or not I.generators:
                continue
            R = residual_system(I)
            for pt in RNG.uniform(-1, 1, (100, G.source_dim)):
                grad = np.array(R.grad(pt))
                num = np.array(
                    [(R.value(pt + h * e) - R.value(pt - h * e)) / (2 * h) for e in np.eye(G.source_dim)]
                )
                scale = max(np.abs(grad).max(), 1e-300)
                assert np.abs(grad - num).max() <= 1e-5 * scale
            n_checked += 1
    return f"{n_checked} ideals x 100 points"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
