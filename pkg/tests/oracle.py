"""Independent reference implementations used as test oracles.

Polynomials here are plain dicts {exponent tuple: Fraction}; nothing is
shared with the package except the final comparison.
"""
from __future__ import annotations

import itertools
from fractions import Fraction


def d_clean(p):
    return {m: c for m, c in p.items() if c != 0}


def d_add(p, q):
    out = dict(p)
    for m, c in q.items():
        out[m] = out.get(m, 0) + c
    return d_clean(out)


def d_mul(p, q):
    out = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            out[m] = out.get(m, 0) + c1 * c2
    return d_clean(out)


def d_scale(p, c):
    return d_clean({m: c * v for m, v in p.items()})


def d_diff(p, i):
    out = {}
    for m, c in p.items():
        if m[i]:
            mm = list(m)
            mm[i] -= 1
            out[tuple(mm)] = out.get(tuple(mm), 0) + c * m[i]
    return d_clean(out)


def d_var(n, i):
    return {tuple(int(j == i) for j in range(n)): Fraction(1)}


def perm_sign(perm):
    sign, seen = 1, set()
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        sign *= (-1) ** (length - 1)
    return sign


def leibniz_det(M, n):
    """Determinant of a square matrix of dict polys in n variables (Leibniz sum)."""
    k = len(M)
    total = {}
    for perm in itertools.permutations(range(k)):
        term = {(0,) * n: Fraction(1)}
        for r in range(k):
            term = d_mul(term, M[r][perm[r]])
        total = d_add(total, d_scale(term, perm_sign(perm)))
    return total


def all_minors(M, k, n):
    rows, cols = len(M), len(M[0])
    out = []
    for R in itertools.combinations(range(rows), k):
        for C in itertools.combinations(range(cols), k):
            out.append(leibniz_det([[M[r][c] for c in C] for r in R], n))
    return out


def milnor_generators(comps, n):
    """(p+1)-minors of [x; J] built from scratch."""
    J = [[d_diff(g, j) for j in range(n)] for g in comps]
    top = [d_var(n, j) for j in range(n)]
    return all_minors([top] + J, len(comps) + 1, n)


def to_dict(poly):
    """Package Poly -> oracle dict."""
    return {m: Fraction(c) for m, c in poly.terms}
