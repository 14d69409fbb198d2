from __future__ import annotations

import itertools
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from milnorlab import MapGerm, Poly, load_germ  # noqa: E402
from milnorlab.cli import corpus_path  # noqa: E402

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

rationals = st.builds(
    Fraction, st.integers(-9, 9), st.integers(1, 4)
)


def monomials(n, max_deg, min_deg=0):
    return [m for m in itertools.product(range(max_deg + 1), repeat=n) if min_deg <= sum(m) <= max_deg]


def polys(n, max_deg=3, max_terms=5, min_deg=0):
    mons = monomials(n, max_deg, min_deg)
    return st.lists(st.tuples(st.sampled_from(mons), rationals), max_size=max_terms).map(lambda ts: Poly(n, ts))


def germs(m, p, max_deg=3):
    return st.lists(polys(m, max_deg, 4, min_deg=1), min_size=p, max_size=p).map(
        lambda cs: MapGerm(tuple(cs), tuple(f"x{i}" for i in range(m)))
    )


def rational_points(n):
    return st.lists(rationals, min_size=n, max_size=n)


@pytest.fixture(scope="session")
def corpus():
    return {name: load_germ(corpus_path(name)) for name in ("sabbah", "xy", "act", "square", "composed")}


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
