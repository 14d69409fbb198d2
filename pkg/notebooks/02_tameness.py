"""
Isolated singular values and the tameness scan
==============================================

A scan looks for points of the Milnor set where |G| is tiny compared with
the radius but the point stays away from the zero fibre.  Finding such
witnesses on three consecutive radii gives NotTame; finding none only
means nothing was seen at the probed radii.
"""
from __future__ import annotations

import numpy as np

from milnorlab.analyzers import AnalysisConfig, isolated_singular_value_check, tameness_scan
from milnorlab.cli import resolve_germ
from milnorlab.numerics import RngSpec

cfg = AnalysisConfig()
rng = RngSpec(42)

# %%
# The isolated singular value check samples Sing G in a small annulus and
# asks whether G vanishes there.
for name in ("xy", "sabbah", "act", "square"):
    res = isolated_singular_value_check(resolve_germ(name), cfg=cfg, rng=rng)
    print(f"{name:7s} isv holds: {res.holds}  samples: {res.n_samples}")

# %%
# (x, xy): the Milnor set runs into the plane {x = 0} without meeting it
# away from the origin, and witnesses show up at every radius.
v = tameness_scan(resolve_germ("xy"), r0=0.1, stages=7, cfg=cfg, rng=rng)
print(v.kind, "-", v.reason)
for w in v.witnesses:
    print(f"  r={w.radius:.4g}  |x|={w.norm:.4g}  |G|={w.value:.3g}  limit direction {np.round(w.direction(), 3)}")

# %%
# The same for (x^2 - y^2 z, y); the limits line up with the z-axis.
v = tameness_scan(resolve_germ("sabbah"), cfg=cfg, rng=rng)
print(v.kind)
for w in v.witnesses:
    print(f"  r={w.radius:.4g}  limit direction {np.round(w.direction(), 3)}")

# %%
# The germ (y^4 - z^2 x^2 - x^4, xy) has no witnesses: every stage's best
# obstruction score stays above the threshold 1e-3 r.
v = tameness_scan(resolve_germ("act"), cfg=cfg, rng=rng)
print(v.kind)
for st in v.stages:
    print(f"  r={st.radius:.4g}  tau_G={st.tau_g:.3g}  best score={st.best_score:.3g}")

# %%
# For an equidimensional germ with G^-1(0) = {0} there is nothing to scan.
print(tameness_scan(resolve_germ("square"), cfg=cfg).kind)
