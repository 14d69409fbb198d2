"""
Exact polynomials, germs and their determinantal ideals
=======================================================

Everything symbolic in milnorlab is exact: coefficients are Fractions and
terms are kept in graded-lexicographic order.
"""
from __future__ import annotations

from milnorlab import compose, jacobian, minors, parse_germ_file, parse_poly
from milnorlab.cli import resolve_germ
from milnorlab.determinantal import milnor_ideal, singular_ideal, zero_fiber_ideal

# %%
# Polynomials parse from plain text.  Unary minus binds looser than powers.
names = ["x", "y", "z"]
f = parse_poly("x^2 - y^2*z", names)
print("f        =", f.to_str(names))
print("-x^2     =", parse_poly("-x^2", names).to_str(names))
print("df/dz    =", f.diff(2).to_str(names))
print("f(1/2,1,2) =", f([0.5, 1, 2]))

# %%
# A germ file lists the variables and one polynomial per component.
G = parse_germ_file("""name: sabbah
vars: x y z
poly: x^2 - y^2*z
poly: y
""")
print(G)

# %%
# Jacobian and its maximal minors.  The singular ideal is generated by the
# p x p minors; the Milnor ideal by the (p+1) x (p+1) minors of the
# Jacobian with the position vector stacked on top.
J = jacobian(G)
for row in J.rows:
    print([p.to_str(names) for p in row])
print("2x2 minors:", [m.to_str(names) for m in minors(J, 2)])
print(singular_ideal(G).to_text(names))
print(milnor_ideal(G).to_text(names))
print(zero_fiber_ideal(G).to_text(names))

# %%
# When source and target dimensions agree, there are no (p+1)-minors and
# the Milnor set is everything.
square = resolve_germ("square")
print(milnor_ideal(square).to_text(square.names))

# %%
# Composition is exact substitution.  The shipped ``composed`` germ is
# square o act.
act = resolve_germ("act")
H = compose(square, act)
for g in H.components:
    print("H:", g.to_str(H.names))
print("matches corpus:", H.components == resolve_germ("composed").components)
