"""
Fibres over small values
========================

LM hits from seeds spread uniformly in a ball are clustered by single
linkage; each cluster gets a local PCA dimension.
"""
from __future__ import annotations

from pathlib import Path

from milnorlab.analyzers import fiber_report, product_structure_check
from milnorlab.cli import resolve_germ
from milnorlab.numerics import RngSpec
from milnorlab.report import build_report, emit_svg, point_cloud

rng = RngSpec(7)

# %%
# Two curves, two points, four curves.
cases = [("act", (1e-4, 0.0)), ("square", (1e-4, 0.0)), ("composed", (1e-8, 0.0))]
reports = {}
for name, v in cases:
    rep = fiber_report(resolve_germ(name), v, eps=0.5, n_seeds=4096, rng=rng)
    reports[name] = rep
    print(f"{name:9s} v={v}  hits={rep.n_hits}  clusters={rep.n_clusters}  dims={rep.cluster_dims}  "
          f"h={rep.linkage_radius:.3g} ({rep.linkage_rule}) plateau={rep.plateau_counts}")

# %%
# The component count does not depend on which small value we look at.
G = resolve_germ("act")
for v in [(1e-4, 0.0), (0.0, 1e-4), (-1e-4, 0.0), (1e-4, 1e-4)]:
    print(v, fiber_report(G, v, 0.5, 4096, rng=rng).n_clusters)

# %%
# Dropping the last component should thicken every component by one
# dimension.
prod = product_structure_check(G, delta=1e-4, n_seeds=4096, rng=rng)
print(prod.outcome, "|", prod.detail)
print("full:", prod.full.cluster_dims, " truncated:", prod.truncated.cluster_dims)

# %%
# Scatter plot of the act fibre, one colour per component.
rep = reports["act"]
doc = build_report(G, "fiber", {}, {"fiber": rep.to_dict()}, {"fiber": point_cloud(rep.points, rep.labels)})
out = Path("act_fibre.svg")
out.write_text(emit_svg(doc, (0, 1, 2)))
print("wrote", out.resolve())
