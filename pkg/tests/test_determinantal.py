from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from conftest import germs
from hypothesis import given
from oracle import milnor_generators, to_dict

from milnorlab import MapGerm, Poly, parse_poly
from milnorlab.determinantal import (
    Ideal,
    augmented_jacobian,
    milnor_ideal,
    normalized_generators,
    residual_system,
    sample_tolerance,
    scale_weight,
    singular_ideal,
    zero_fiber_ideal,
)

XYZ = ["x", "y", "z"]


def P(text, names=XYZ):
    return parse_poly(text, names)


def test_sabbah_milnor_ideal_matches_oracle(corpus):
    G = corpus["sabbah"]
    I = milnor_ideal(G)
    assert len(I) == 1
    want = [to_dict(P("x*y^2 + 2*x*z")), to_dict(P("-x*y^2 - 2*x*z"))]
    assert to_dict(I.generators[0]) in want
    oracle = [g for g in milnor_generators([to_dict(c) for c in G.components], 3) if g]
    assert [to_dict(g) for g in I.generators] == oracle


@given(germs(3, 2, 2))
def test_milnor_ideal_matches_oracle_on_random_germs(G):
    got = [to_dict(g) for g in milnor_ideal(G).generators]
    assert got == milnor_generators([to_dict(c) for c in G.components], 3)


def test_square_map_ideals(corpus):
    G = corpus["square"]
    assert milnor_ideal(G).whole_space
    assert singular_ideal(G).generators == (P("4*u^2 + 4*v^2", ["u", "v"]),)


def test_identity_has_whole_space_milnor_set():
    G = MapGerm.identity(XYZ)
    assert milnor_ideal(G).whole_space
    assert singular_ideal(G).generators == (Poly.constant(3, 1),)


def test_act_ideals(corpus):
    G = corpus["act"]
    assert milnor_ideal(G).generators == (P("-2*x^4*z - 2*x^2*y^2*z - 2*x^2*z^3 - 4*y^4*z"),)
    assert set(singular_ideal(G).generators) == {P("-4*x^4 - 2*x^2*z^2 - 4*y^4"), P("2*x^2*y*z"), P("2*x^3*z")}
    assert zero_fiber_ideal(G).generators == G.components


def test_augmented_jacobian_shape(corpus):
    assert augmented_jacobian(corpus["act"]).shape == (3, 3)


def test_ideal_sum_and_text(corpus):
    G = corpus["xy"]
    both = milnor_ideal(G) + zero_fiber_ideal(G)
    assert both.generators == G.components
    text = singular_ideal(G).to_text(G.names)
    assert text.splitlines()[1:] == ["vars: x y", "poly: x"]
    with pytest.raises(ValueError):
        Ideal(2, (Poly.var(3, 0),))


def test_scale_weight_and_normalisation():
    p = P("2*x^2 - 3*y*z + x")
    assert scale_weight(p, Fraction(1, 10)) == Fraction(2, 100) + Fraction(3, 100) + Fraction(1, 10)
    (q,) = normalized_generators(Ideal(3, (p, Poly.zero(3))), 0.1)
    assert scale_weight(q, Fraction(1, 10)) == 1


def test_sample_tolerance():
    I = Ideal(3, (P("x^4"),))
    assert sample_tolerance(1e-8, I) == pytest.approx(10 * 1e-2)


def test_residual_gradient_exact(corpus):
    R = residual_system(milnor_ideal(corpus["sabbah"]))
    pt = [Fraction(1, 3), Fraction(-1, 2), Fraction(2)]
    g = R.residual
    assert [d.eval(pt) for d in R.gradient] == [g.diff(i).eval(pt) for i in range(3)]
    assert R.value([0.0, 0.0, 1.0]) == 0.0


def test_residual_gradient_finite_differences(corpus):
    rng = np.random.default_rng(0)
    for G in corpus.values():
        for I in (singular_ideal(G), milnor_ideal(G), zero_fiber_ideal(G)):
            if I.whole_space:
                continue
            R = residual_system(I)
            for pt in rng.uniform(-1, 1, (5, G.source_dim)):
                num = []
                for i in range(G.source_dim):
                    e = np.zeros(G.source_dim)
                    e[i] = 1e-6
                    num.append((R.value(pt + e) - R.value(pt - e)) / 2e-6)
                np.testing.assert_allclose(R.grad(pt), num, rtol=1e-5, atol=1e-6 * max(1.0, np.abs(num).max()))
