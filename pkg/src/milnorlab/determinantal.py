"""Singular locus, Milnor set and zero fibre of a germ as generator lists.

The Milnor set is the rank-drop locus of the Jacobian augmented by the
gradient of the distance function.  We use the gradient of rho^2/2, i.e. the
position vector itself, which is polynomial and differs from grad(rho) by the
positive factor rho off the origin, so both define the same locus there.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .poly import MapGerm, Poly, PolyMat, jacobian, minors

KINDS = ("singular", "milnor", "zero_fiber", "custom")


@dataclass(frozen=True)
class Ideal:
    """Finite list of generators together with where it came from.

    ``whole_space`` marks the case where the zero set is all of R^m although
    no generator is stored (the Milnor set when m = p).
    """

    nvars: int
    generators: tuple
    kind: str = "custom"
    whole_space: bool = False

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        if self.kind not in KINDS:
            raise ValueError(f"unknown ideal kind {self.kind!r}")
        if any(g.nvars != self.nvars for g in gens):
            raise ValueError("generators live in different ambient spaces")

    def __len__(self):
        return len(self.generators)

    def max_degree(self) -> int:
        return max((g.degree() for g in self.generators), default=0)

    def __add__(self, other: Ideal) -> Ideal:
        """Sum of ideals (union of generator lists, intersection of zero sets)."""
        if self.whole_space:
            return other
        if other.whole_space:
            return self
        return Ideal(self.nvars, self.generators + other.generators, "custom")

    def to_text(self, names: Sequence[str]) -> str:
        head = f"# {self.kind} ideal, {len(self.generators)} generator(s)"
        if self.whole_space:
            head += "; zero set is the whole space"
        body = "".join(f"poly: {g.to_str(names)}\n" for g in self.generators)
        return f"{head}\nvars: {' '.join(names)}\n{body}"


def singular_ideal(G: MapGerm) -> Ideal:
    """p x p minors of the Jacobian."""
    return Ideal(G.source_dim, minors(jacobian(G), G.target_dim), "singular")


def augmented_jacobian(G: MapGerm) -> PolyMat:
    """(p+1) x m matrix: position vector on top of the Jacobian rows."""
    m = G.source_dim
    top = Poly.variables(m)
    return PolyMat([top] + list(jacobian(G).rows))


def milnor_ideal(G: MapGerm) -> Ideal:
    p, m = G.target_dim, G.source_dim
    if p + 1 > m:
        return Ideal(m, (), "milnor", whole_space=True)
    return Ideal(m, minors(augmented_jacobian(G), p + 1), "milnor")


def zero_fiber_ideal(G: MapGerm) -> Ideal:
    return Ideal(G.source_dim, G.components, "zero_fiber")


@dataclass(frozen=True)
class ResidualSystem:
    """The sum of squares of the generators and its exact gradient."""

    ideal: Ideal
    residual: Poly
    gradient: tuple = field(default=())

    def value(self, point) -> float:
        return self.residual.eval_float(point)

    def grad(self, point) -> list[float]:
        return [g.eval_float(point) for g in self.gradient]

    def exact_value(self, point) -> Fraction:
        return self.residual.eval(point)


def residual_system(I: Ideal) -> ResidualSystem:
    r = Poly.zero(I.nvars)
    for g in I.generators:
        r = r + g * g
    return ResidualSystem(I, r, tuple(r.gradient()))


def scale_weight(g: Poly, scale) -> Fraction:
    """Sum of |c| * scale**deg over the terms: a bound for |g| on the cube of
    half-width ``scale`` and its typical size on the sphere of that radius."""
    s = Fraction(scale).limit_denominator(10**9)
    return sum((abs(c) * s ** sum(mono) for mono, c in g.terms), Fraction(0))


def normalized_generators(I: Ideal, scale: float) -> list[Poly]:
    """Generators rescaled to be O(1) on the sphere of radius ``scale``.

    Each nonzero generator is divided by :func:`scale_weight`; zero
    generators are dropped.
    """
    return [g.scale(1 / scale_weight(g, scale)) for g in I.generators if not g.is_zero()]


def sample_tolerance(tau: float, I: Ideal, C: float = 10.0) -> float:
    """tau' = C * tau**(1/d), d the maximum generator degree (heuristic)."""
    d = max(I.max_degree(), 1)
    return C * tau ** (1.0 / d)
