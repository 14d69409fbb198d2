"""Exact multivariate polynomials over the rationals, polynomial matrices and
map germs.

Coefficients are :class:`fractions.Fraction` so identities such as the chain
rule or the alternating property of minors can be checked as exact
equalities.  Terms are kept in graded-lexicographic order (highest first),
which makes the stored form canonical.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Rat = Fraction
Mono = tuple  # tuple[int, ...], one exponent per variable

MAX_TERMS = 10**6


class DimensionMismatch(ValueError):
    pass


class TermLimitExceeded(ArithmeticError):
    """Raised when a result would hold more than ``MAX_TERMS`` terms."""


def _grlex_key(mono):
    return (sum(mono), mono)


def _check_size(n):
    if n > MAX_TERMS:
        raise TermLimitExceeded(f"polynomial would have {n} terms (limit {MAX_TERMS})")


class Poly:
    """Polynomial in ``nvars`` variables with rational coefficients.

    Immutable.  ``terms`` is a tuple of ``(exponents, coefficient)`` pairs
    sorted by decreasing graded-lex order with no zero coefficients.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Mono, Rat] | Iterable = ()):
        if isinstance(terms, Mapping):
            items = terms.items()
        else:
            items = terms
        acc: dict = {}
        for mono, c in items:
            mono = tuple(int(e) for e in mono)
            if len(mono) != nvars:
                raise DimensionMismatch(f"monomial {mono} has length {len(mono)}, expected {nvars}")
            if any(e < 0 for e in mono):
                raise ValueError(f"negative exponent in {mono}")
            acc[mono] = acc.get(mono, 0) + Fraction(c)
        _check_size(len(acc))
        self.nvars = nvars
        self.terms = tuple(
            (m, c) for m, c in sorted(acc.items(), key=lambda t: _grlex_key(t[0]), reverse=True) if c != 0
        )
        self._hash = None

    # construction helpers
    @classmethod
    def _raw(cls, nvars, acc):
        # acc: dict mono -> Fraction, assumed validated
        _check_size(len(acc))
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = tuple(
            (m, c) for m, c in sorted(acc.items(), key=lambda t: _grlex_key(t[0]), reverse=True) if c != 0
        )
        p._hash = None
        return p

    @classmethod
    def zero(cls, nvars: int) -> Poly:
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c) -> Poly:
        return cls._raw(nvars, {(0,) * nvars: Fraction(c)})

    @classmethod
    def var(cls, nvars: int, i: int) -> Poly:
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} out of range for {nvars} variables")
        mono = tuple(1 if j == i else 0 for j in range(nvars))
        return cls._raw(nvars, {mono: Fraction(1)})

    @classmethod
    def variables(cls, nvars: int) -> list[Poly]:
        return [cls.var(nvars, i) for i in range(nvars)]

    # basic queries
    def as_dict(self) -> dict:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return sum(self.terms[0][0]) if self.terms else -1

    def order(self) -> int:
        """Lowest total degree among the terms (the order of vanishing at 0)."""
        return min(sum(m) for m, _ in self.terms) if self.terms else -1

    def constant_term(self) -> Rat:
        return self.as_dict().get((0,) * self.nvars, Fraction(0))

    def coefficient_l1(self) -> Rat:
        return sum((abs(c) for _, c in self.terms), Fraction(0))

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Poly.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, self.terms))
        return self._hash

    def __repr__(self):
        return f"Poly({self.nvars}, {self.to_str()!r})"

    def __str__(self):
        return self.to_str()

    # arithmetic
    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise DimensionMismatch(f"ambient dimensions differ: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self.terms)
        for m, c in other.terms:
            acc[m] = acc.get(m, 0) + c
        return Poly._raw(self.nvars, acc)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.nvars, {m: -c for m, c in self.terms})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc: dict = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                m = tuple(a + b for a, b in zip(m1, m2))
                acc[m] = acc.get(m, 0) + c1 * c2
            _check_size(len(acc))
        return Poly._raw(self.nvars, acc)

    __rmul__ = __mul__

    def scale(self, c) -> Poly:
        c = Fraction(c)
        if c == 0:
            return Poly.zero(self.nvars)
        return Poly._raw(self.nvars, {m: c * v for m, v in self.terms})

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a natural number")
        result = Poly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # calculus and evaluation
    def diff(self, i: int) -> Poly:
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range for {self.nvars} variables")
        acc = {}
        for m, c in self.terms:
            e = m[i]
            if e:
                acc[m[:i] + (e - 1,) + m[i + 1:]] = c * e
        return Poly._raw(self.nvars, acc)

    def gradient(self) -> list[Poly]:
        return [self.diff(i) for i in range(self.nvars)]

    def eval(self, point: Sequence) -> Rat:
        if len(point) != self.nvars:
            raise DimensionMismatch(f"point has {len(point)} coordinates, expected {self.nvars}")
        pt = [Fraction(v) for v in point]
        total = Fraction(0)
        for m, c in self.terms:
            t = c
            for v, e in zip(pt, m):
                if e:
                    t *= v**e
            total += t
        return total

    def eval_float(self, point: Sequence[float]) -> float:
        """Float evaluation by recursive Horner in the leading variable."""
        if len(point) != self.nvars:
            raise DimensionMismatch(f"point has {len(point)} coordinates, expected {self.nvars}")
        if not self.terms:
            return 0.0
        pt = [float(v) for v in point]
        return _horner([(m, float(c)) for m, c in self.terms], pt, 0)

    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (list, tuple)):
            point = point[0]
        return self.eval(point)

    def subs(self, values: Sequence[Poly]) -> Poly:
        """Substitute polynomial ``values[i]`` for variable ``i``."""
        if len(values) != self.nvars:
            raise DimensionMismatch(f"{len(values)} substitutions for {self.nvars} variables")
        if not values:
            return self
        n = values[0].nvars
        if any(v.nvars != n for v in values):
            raise DimensionMismatch("substituted polynomials live in different ambient spaces")
        cache: dict = {}

        def power(i, e):
            key = (i, e)
            if key not in cache:
                cache[key] = values[i] ** e
            return cache[key]

        result = Poly.zero(n)
        for m, c in self.terms:
            t = Poly.constant(n, c)
            for i, e in enumerate(m):
                if e:
                    t = t * power(i, e)
            result = result + t
        return result

    def to_str(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = [f"x{i}" for i in range(self.nvars)]
        if not self.terms:
            return "0"
        parts = []
        for k, (m, c) in enumerate(self.terms):
            sign = "-" if c < 0 else "+"
            a = abs(c)
            factors = []
            for name, e in zip(names, m):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            coef = str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"
            if not factors:
                body = coef
            elif a == 1:
                body = "*".join(factors)
            else:
                body = coef + "*" + "*".join(factors)
            if k == 0:
                parts.append(("-" if sign == "-" else "") + body)
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)


def _horner(terms, pt, i):
    # terms: list of (mono, float); evaluate as polynomial in pt[i] with
    # coefficients that are polynomials in the remaining variables
    if i == len(pt):
        return sum(c for _, c in terms)
    by_exp: dict = {}
    for m, c in terms:
        by_exp.setdefault(m[i], []).append((m, c))
    top = max(by_exp)
    acc = 0.0
    x = pt[i]
    for e in range(top, -1, -1):
        acc *= x
        if e in by_exp:
            acc += _horner(by_exp[e], pt, i + 1)
    return acc


class PolyMat:
    """Rectangular matrix of polynomials sharing an ambient dimension."""

    __slots__ = ("rows", "nvars")

    def __init__(self, rows: Sequence[Sequence[Poly]]):
        rows = tuple(tuple(r) for r in rows)
        if not rows or not rows[0]:
            raise ValueError("matrix must have at least one row and one column")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged matrix")
        nvars = rows[0][0].nvars
        if any(p.nvars != nvars for r in rows for p in r):
            raise DimensionMismatch("matrix entries live in different ambient spaces")
        self.rows = rows
        self.nvars = nvars

    @property
    def shape(self):
        return len(self.rows), len(self.rows[0])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, PolyMat) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return "PolyMat([" + ", ".join("[" + ", ".join(map(str, r)) + "]" for r in self.rows) + "])"

    def __matmul__(self, other: PolyMat) -> PolyMat:
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for i in range(n):
            row = []
            for j in range(m):
                acc = Poly.zero(self.nvars)
                for t in range(k):
                    acc = acc + self.rows[i][t] * other.rows[t][j]
                row.append(acc)
            out.append(row)
        return PolyMat(out)

    def subs(self, values: Sequence[Poly]) -> PolyMat:
        return PolyMat([[p.subs(values) for p in r] for r in self.rows])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> PolyMat:
        return PolyMat([[self.rows[i][j] for j in cols] for i in rows])

    def swap_rows(self, i: int, j: int) -> PolyMat:
        rows = list(self.rows)
        rows[i], rows[j] = rows[j], rows[i]
        return PolyMat(rows)

    def eval_float(self, point):
        return [[p.eval_float(point) for p in r] for r in self.rows]


def det(M: PolyMat) -> Poly:
    """Determinant by cofactor expansion along the first row."""
    n, m = M.shape
    if n != m:
        raise DimensionMismatch(f"determinant of non-square {n}x{m} matrix")
    return _det(M.rows, tuple(range(n)), tuple(range(n)), {})


def _det(rows, ridx, cidx, memo):
    key = (ridx, cidx)
    if key in memo:
        return memo[key]
    if len(ridx) == 1:
        out = rows[ridx[0]][cidx[0]]
    else:
        r0, rest = ridx[0], ridx[1:]
        out = None
        for k, c in enumerate(cidx):
            entry = rows[r0][c]
            if entry.is_zero():
                continue
            sub = _det(rows, rest, cidx[:k] + cidx[k + 1:], memo)
            term = entry * sub
            if k % 2:
                term = -term
            out = term if out is None else out + term
        if out is None:
            out = Poly.zero(rows[r0][cidx[0]].nvars)
    memo[key] = out
    return out


def minors(M: PolyMat, k: int) -> list[Poly]:
    """All k-by-k minors, row subsets outermost, both in lexicographic order."""
    if k < 1:
        raise ValueError("minor size must be at least 1")
    n, m = M.shape
    if k > min(n, m):
        return []
    memo: dict = {}
    out = []
    for ridx in itertools.combinations(range(n), k):
        for cidx in itertools.combinations(range(m), k):
            out.append(_det(M.rows, ridx, cidx, memo))
    return out


@dataclass(frozen=True)
class MapGerm:
    """Polynomial map germ (R^m, 0) -> (R^p, 0)."""

    components: tuple
    names: tuple
    name: str = ""

    def __post_init__(self):
        comps = tuple(self.components)
        names = tuple(self.names)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "names", names)
        if not comps:
            raise ValueError("a germ needs at least one component")
        m = len(names)
        if any(c.nvars != m for c in comps):
            raise DimensionMismatch("component ambient dimension differs from the number of variables")
        if len(set(names)) != m:
            raise ValueError(f"variable names must be distinct: {names}")
        if len(comps) > m:
            raise ValueError(f"target dimension {len(comps)} exceeds source dimension {m}")
        for i, c in enumerate(comps):
            if c.constant_term() != 0:
                raise ValueError(f"component {i} has nonzero constant term; a germ must map origin to origin")

    @property
    def source_dim(self) -> int:
        return len(self.names)

    @property
    def target_dim(self) -> int:
        return len(self.components)

    def __call__(self, point):
        return [c.eval(point) for c in self.components]

    def eval_float(self, point):
        return [c.eval_float(point) for c in self.components]

    def __str__(self):
        body = ", ".join(c.to_str(self.names) for c in self.components)
        return f"({body})"

    @classmethod
    def identity(cls, names: Sequence[str]) -> MapGerm:
        return cls(tuple(Poly.variables(len(names))), tuple(names), "identity")

    def truncate(self, p: int) -> MapGerm:
        """The germ made of the first ``p`` components."""
        return MapGerm(self.components[:p], self.names, f"{self.name}[:{p}]" if self.name else "")


def jacobian(G: MapGerm) -> PolyMat:
    return PolyMat([[g.diff(j) for j in range(G.source_dim)] for g in G.components])


def compose(G: MapGerm, F: MapGerm) -> MapGerm:
    """The germ ``G o F``."""
    if F.target_dim != G.source_dim:
        raise DimensionMismatch(
            f"cannot compose: F has target dimension {F.target_dim}, G has source dimension {G.source_dim}"
        )
    comps = tuple(g.subs(F.components) for g in G.components)
    name = f"{G.name}_o_{F.name}" if G.name and F.name else ""
    return MapGerm(comps, F.names, name)

