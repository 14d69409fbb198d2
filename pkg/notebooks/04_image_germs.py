"""
Images of small balls
=====================

For (x, xy) the image of the ball of radius eps contains (a, b) exactly
when a != 0 and a^2 + (b/a)^2 <= eps^2.  So along the ray of slope s the
tiny values t(1, s)/|(1, s)| are reached only when |s| < eps: the image
germ depends on the radius.
"""
from __future__ import annotations

import numpy as np

from milnorlab.analyzers import image_germ_stability, image_membership
from milnorlab.cli import resolve_germ

xy = resolve_germ("xy")

# %%
# Single membership questions.
print(image_membership(xy, (1e-6, 1e-8), 0.05))
print(image_membership(xy, (1e-6, 1e-2), 0.05))

# %%
# The grid: slopes between the two radii 0.05 and 0.1 are unstable.
slopes = np.array([0.01, 0.03, 0.06, 0.075, 0.09, 0.2])
U = np.column_stack([np.ones_like(slopes), slopes])
rep = image_germ_stability(xy, U, magnitudes=(1e-5, 1e-6, 1e-7), radii=(0.1, 0.05))
for s, bad, m in zip(slopes, rep.unstable, rep.member[:, -1, :]):
    print(f"slope {s:5.3f}  in G(B_0.1): {bool(m[0])}  in G(B_0.05): {bool(m[1])}  unstable: {bool(bad)}")

# %%
# The act germ reaches every direction of a polar grid.
act = image_germ_stability(resolve_germ("act"), magnitudes=(1e-5, 1e-6))
print("act stable:", act.stable, " members at 1e-5:", int(act.member[:, 0, 0].sum()), "of", len(act.directions))
