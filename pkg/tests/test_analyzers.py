from __future__ import annotations

import numpy as np
import pytest

from milnorlab import MapGerm, Poly, parse_germ_file
from milnorlab.analyzers import (
    NOT_TAME,
    TAME_UP_TO_RESOLUTION,
    TRIVIALLY_TAME,
    AnalysisConfig,
    NoSolutionsFound,
    chain_rule_holds,
    composition_analysis,
    fiber_report,
    image_germ_stability,
    image_membership,
    isolated_singular_value_check,
    milnor_zero_fiber_check,
    product_structure_check,
    radius_schedule,
    tameness_scan,
)
from milnorlab.analyzers.tameness import WitnessPoint, _persistent_chain, StageReport
from milnorlab.numerics import Annulus, RngSpec

FAST = AnalysisConfig(n_seeds=256, witness_seeds=64)


def germ(text):
    return parse_germ_file(text)


# ---------------------------------------------------------------- ISV


def test_isv_examples(corpus):
    assert isolated_singular_value_check(corpus["act"], cfg=FAST).holds
    res = isolated_singular_value_check(corpus["xy"], cfg=FAST)
    assert res.holds and res.n_samples > 0
    sq = isolated_singular_value_check(corpus["square"], cfg=FAST)
    assert sq.holds and sq.n_samples == 0 and sq.to_dict()["vacuous"]


def test_isv_detects_critical_values_off_zero():
    fold = germ("vars: x y\npoly: x\npoly: y^2\n")  # Sing = {y = 0}, image of it is the x-axis
    res = isolated_singular_value_check(fold, cfg=FAST)
    assert not res.holds and len(res.violations) > 0


# ---------------------------------------------------------------- tameness


def test_radius_schedule():
    assert radius_schedule(0.1, 3) == [0.1, 0.05, 0.025, 0.0125]


def test_xy_not_tame(corpus):
    v = tameness_scan(corpus["xy"], 0.1, 3, FAST)
    assert v.kind == NOT_TAME and len(v.witnesses) == 3
    for w in v.witnesses:
        assert w.radius / 2 <= w.norm <= w.radius and 0 < w.value <= 1e-3 * w.radius
        # the limit lies on the zero fibre {x = 0}, away from the origin
        assert abs(w.limit[0]) < 1e-6 and np.linalg.norm(w.limit) >= w.radius / 2
    d = [w.direction() for w in v.witnesses]
    assert max(np.linalg.norm(a - b) for a in d for b in d) <= 0.25


def test_act_tame_up_to_resolution(corpus):
    v = tameness_scan(corpus["act"], 0.1, 3, FAST)
    assert v.kind == TAME_UP_TO_RESOLUTION
    assert all(s > 1e-3 * st.radius for s, st in zip(v.best_scores(), v.stages))
    assert v.to_dict()["smallest_radius"] == 0.0125


def test_square_trivially_tame(corpus):
    v = tameness_scan(corpus["square"], 0.1, 2, FAST)
    assert v.kind == TRIVIALLY_TAME and "zero-fibre" in v.reason


def test_isv_warning_recorded():
    fold = germ("vars: x y\npoly: x\npoly: y^2\n")
    v = tameness_scan(fold, 0.1, 1, FAST)
    assert v.warnings


def _w(direction, r):
    p = np.asarray(direction, dtype=float) * r
    return WitnessPoint(p, float(np.linalg.norm(p)), 1e-9, 0.0, 0.0, r, p)


def test_persistence_requires_consecutive_aligned_stages():
    s = [StageReport(0.1 / 2**k, 1e-4, 10) for k in range(4)]
    s[0].witnesses = [_w([0, 1], 0.1)]
    s[1].witnesses = [_w([1, 0], 0.05)]
    s[2].witnesses = [_w([1, 0.01], 0.025)]
    s[3].witnesses = [_w([1, -0.01], 0.0125)]
    chain = _persistent_chain(s, 3, 0.25)
    assert chain is not None and [w.radius for w in chain] == [0.05, 0.025, 0.0125]
    s[2].witnesses = [_w([0, 1], 0.025)]
    assert _persistent_chain(s, 3, 0.25) is None


def test_witness_invariants_are_checked():
    w = _w([1, 0], 0.1)
    w.verify(1e-6, 1e-4)
    bad = WitnessPoint(np.array([1.0, 0]), 1.0, 1e-9, 0.0, 0.0, 0.1, np.array([1.0, 0]))
    with pytest.raises(RuntimeError):
        bad.verify(1e-6, 1e-4)


# ---------------------------------------------------------------- fibres


def test_square_fibre_is_two_points(corpus):
    rep = fiber_report(corpus["square"], (1e-4, 0), 0.5, 512, FAST)
    assert rep.n_clusters == 2 and rep.cluster_dims == [0, 0]
    centres = sorted(float(rep.points[rep.labels == c, 0].mean()) for c in range(2))
    assert centres == pytest.approx([-0.01, 0.01], rel=1e-6)


def test_fibre_independent_of_target_ray(corpus):
    a = fiber_report(corpus["act"], (1e-4, 0), 0.5, 4096, FAST, RngSpec(1))
    b = fiber_report(corpus["act"], (1e-4, 1e-4), 0.5, 4096, FAST, RngSpec(2))
    assert a.n_clusters == b.n_clusters == 2
    c = fiber_report(corpus["square"], (0, -1e-4), 0.5, 512, FAST)
    assert c.n_clusters == 2


def test_fibre_not_found():
    G = germ("vars: x y\npoly: x\npoly: x*y\n")
    with pytest.raises(NoSolutionsFound):
        fiber_report(G, (0.3, 0.0), 0.01, 64, FAST)
    with pytest.raises(ValueError):
        fiber_report(G, (0.3,), 0.5, 64, FAST)


def test_product_linear_case():
    F = germ("vars: x y z\npoly: x\npoly: y\n")
    rep = product_structure_check(F, 1e-4, 0.5, 1024, 2048, FAST)
    assert rep.outcome == "consistent with product structure"
    assert rep.full.cluster_dims == [1] and rep.truncated.cluster_dims == [2]
    assert rep.three_or_more_components is False


# ---------------------------------------------------------------- image


def test_image_membership_examples(corpus):
    assert image_membership(corpus["square"], (-1e-4, 0), 0.5)
    assert not image_membership(corpus["xy"], (1e-6, 1e-2), 0.05)
    with pytest.raises(ValueError):
        image_membership(corpus["xy"], (1e-6, 1e-2), 0.0)


def _xy_image_oracle(a, b, eps):
    """Closed form: (a, b) is in the image of B_eps under (x, xy) iff a != 0 and a^2 + (b/a)^2 <= eps^2."""
    return a != 0 and a * a + (b / a) ** 2 <= eps * eps


def test_xy_image_germ_depends_on_radius(corpus):
    slopes = np.array([0.02, 0.07, 0.2])
    U = np.column_stack([np.ones(3), slopes])
    rep = image_germ_stability(corpus["xy"], U, magnitudes=(1e-5, 1e-6), radii=(0.1, 0.05))
    Un = U / np.linalg.norm(U, axis=1, keepdims=True)
    for i, u in enumerate(Un):
        for j, t in enumerate(rep.magnitudes):
            for k, e in enumerate(rep.radii):
                assert rep.member[i, j, k] == _xy_image_oracle(*(t * u), e)
    assert rep.unstable.tolist() == [False, True, False]


def test_identity_image_is_stable():
    G = MapGerm.identity(["x", "y"])
    rep = image_germ_stability(G, magnitudes=(1e-4, 1e-5))
    assert rep.stable and rep.member.all()


def test_image_radii_validated(corpus):
    with pytest.raises(ValueError):
        image_germ_stability(corpus["xy"], radii=(0.1,))


# ---------------------------------------------------------------- composition and inclusions


def test_chain_rule_and_identity_composition(corpus):
    F = corpus["act"]
    G = MapGerm.identity(["u", "v"])
    assert chain_rule_holds(corpus["square"], F)
    rep = composition_analysis(G, F, FAST, scan=False, n_seeds=256)
    assert rep.composed.components == F.components
    assert rep.total_violations == 0


def test_composition_dimension_mismatch(corpus):
    from milnorlab import DimensionMismatch

    with pytest.raises(DimensionMismatch):
        composition_analysis(corpus["act"], corpus["act"], FAST, scan=False)


def test_milnor_zero_fibre_trivial_cases(corpus):
    f = germ("vars: x y\npoly: x^2 + y^2\n")
    rep = milnor_zero_fiber_check(f, cfg=FAST)
    assert rep.passed and rep.n_samples == 0
    assert milnor_zero_fiber_check(corpus["square"], cfg=FAST).n_samples == 0


def test_milnor_zero_fibre_custom_region(corpus):
    rep = milnor_zero_fiber_check(corpus["sabbah"], Annulus(0.01, 0.02, 3), FAST)
    assert rep.passed and rep.n_samples > 100
