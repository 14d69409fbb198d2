"""
Composing a tame germ with a fold
=================================

H = square o act.  The chain rule is checked exactly; three inclusions
between Sing, Milnor sets and zero fibres are checked on samples; then
both H and the inner germ are scanned for tameness.
"""
from __future__ import annotations

from milnorlab.analyzers import composition_analysis, milnor_zero_fiber_check
from milnorlab.cli import resolve_germ
from milnorlab.numerics import RngSpec

square, act = resolve_germ("square"), resolve_germ("act")

# %%
rep = composition_analysis(square, act, rng=RngSpec(42), n_seeds=2048, stages=5)
print("chain rule:", rep.chain_rule)
for c in rep.checks:
    print(f"{c.name:30s} samples={c.n_samples:5d}  max residual={c.max_value:.3g}  tolerance={c.tolerance:.3g}  "
          f"violations={len(c.violations)}")
print("H:", rep.tameness_composed.kind, "  F:", rep.tameness_inner.kind)

# %%
# On each germ, points of the Milnor set lying on the zero fibre are
# singular points.
for name in ("sabbah", "xy", "act", "square", "composed"):
    c = milnor_zero_fiber_check(resolve_germ(name), n_seeds=2048)
    print(f"{name:9s} samples={c.n_samples:5d}  violations={len(c.violations)}")
