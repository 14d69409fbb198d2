"""Polynomial expressions and germ files.

Expression grammar::

    expr     := term (('+' | '-') term)*
    term     := factor ('*' factor)*
    factor   := '-' factor | base ('^' natural)?
    base     := rational | identifier | '(' expr ')'
    rational := integer ('/' positive-integer)?

Implicit multiplication (``2x``) is rejected.  Unary minus binds looser than
``^`` so ``-x^2`` means ``-(x^2)``.

Germ file format, one directive per line::

    # comment
    name: sabbah
    vars: x y z
    poly: x^2 - y^2*z
    poly: y
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .poly import MapGerm, Poly


class ParseError(ValueError):
    """Base class; ``pos`` is a 0-based offset into the expression text."""

    def __init__(self, message: str, pos: int | None = None, line: int | None = None):
        self.message = message
        self.pos = pos
        self.line = line
        super().__init__(self._format())

    def _format(self):
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.pos is not None:
            where.append(f"offset {self.pos}")
        return f"{self.message} ({', '.join(where)})" if where else self.message

    def at_line(self, line: int, col_shift: int = 0) -> ParseError:
        err = type(self)(self.message, None if self.pos is None else self.pos + col_shift, line)
        return err


class PolySyntaxError(ParseError):
    pass


class UnknownVariable(ParseError):
    pass


class MalformedExponent(ParseError):
    pass


class DivisionByVariable(ParseError):
    pass


class NonzeroConstantTerm(ParseError):
    pass


class TargetExceedsSource(ParseError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


@dataclass(frozen=True)
class _Tok:
    kind: str  # 'int', 'id', 'op', 'end'
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    i = 0
    n = len(text)
    while i < n:
        m = _TOKEN.match(text, i)
        if m is None:  # only trailing whitespace left
            break
        if m.group(1) is not None:
            toks.append(_Tok("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            toks.append(_Tok("id", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch.isspace():
                i = m.end()
                continue
            if ch not in "+-*/^()":
                raise PolySyntaxError(f"unexpected character {ch!r}", m.start(3))
            toks.append(_Tok("op", ch, m.start(3)))
        i = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, names: Sequence[str]):
        self.toks = _tokenize(text)
        self.i = 0
        self.names = list(names)
        self.index = {v: k for k, v in enumerate(self.names)}
        self.n = len(self.names)

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def parse(self) -> Poly:
        if self.peek().kind == "end":
            raise PolySyntaxError("empty expression", self.peek().pos)
        p = self.expr()
        t = self.peek()
        if t.kind != "end":
            if t.kind in ("int", "id") or t.text == "(":
                raise PolySyntaxError(f"expected operator before {t.text!r} (implicit multiplication is not allowed)", t.pos)
            if t.text == "/":
                raise DivisionByVariable("only integer literals may be divided", t.pos)
            raise PolySyntaxError(f"unexpected {t.text!r}", t.pos)
        return p

    def expr(self) -> Poly:
        p = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.take().text
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Poly:
        p = self.factor()
        while True:
            t = self.peek()
            if t.kind == "op" and t.text == "*":
                self.take()
                p = p * self.factor()
            elif t.kind == "op" and t.text == "/":
                raise DivisionByVariable("only integer literals may be divided", t.pos)
            else:
                return p

    def factor(self) -> Poly:
        t = self.peek()
        if t.kind == "op" and t.text == "-":
            self.take()
            return -self.factor()
        b = self.base()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            e = self.peek()
            if e.kind != "int":
                pos = e.pos
                if e.kind == "end":
                    raise MalformedExponent("missing exponent after '^'", pos)
                raise MalformedExponent(f"exponent must be a natural literal, got {e.text!r}", pos)
            self.take()
            nxt = self.peek()
            if nxt.kind == "op" and nxt.text == "/":
                raise MalformedExponent("exponent must be a natural literal, not a fraction", e.pos)
            b = b ** int(e.text)
        return b

    def base(self) -> Poly:
        t = self.take()
        if t.kind == "int":
            value = Fraction(int(t.text))
            nxt = self.peek()
            if nxt.kind == "op" and nxt.text == "/":
                self.take()
                d = self.peek()
                if d.kind == "id" or (d.kind == "op" and d.text == "("):
                    raise DivisionByVariable("only integer literals may be divided", d.pos)
                if d.kind != "int":
                    raise PolySyntaxError("expected positive integer denominator", d.pos)
                self.take()
                if int(d.text) == 0:
                    raise PolySyntaxError("denominator must be positive", d.pos)
                value = value / int(d.text)
            return Poly.constant(self.n, value)
        if t.kind == "id":
            if t.text not in self.index:
                raise UnknownVariable(f"unknown variable {t.text!r}", t.pos)
            return Poly.var(self.n, self.index[t.text])
        if t.kind == "op" and t.text == "(":
            p = self.expr()
            close = self.take()
            if not (close.kind == "op" and close.text == ")"):
                raise PolySyntaxError("expected ')'", close.pos)
            nxt = self.peek()
            if nxt.kind == "op" and nxt.text == "/":
                raise DivisionByVariable("only integer literals may be divided", nxt.pos)
            return p
        if t.kind == "end":
            raise PolySyntaxError("unexpected end of expression", t.pos)
        raise PolySyntaxError(f"unexpected {t.text!r}", t.pos)


def parse_poly(text: str, names: Sequence[str]) -> Poly:
    """Parse ``text`` as a polynomial in the variables ``names``."""
    return _Parser(text, names).parse()


_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*\Z")


def parse_germ_file(text: str) -> MapGerm:
    names = None
    name = ""
    polys: list[tuple[int, int, str]] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, rest = stripped.partition(":")
        if not sep:
            raise PolySyntaxError(f"expected 'key: value', got {stripped!r}", 0, lineno)
        key = key.strip()
        if key == "vars":
            if names is not None:
                raise PolySyntaxError("duplicate 'vars:' line", 0, lineno)
            names = rest.split()
            for v in names:
                if not _IDENT.match(v):
                    raise PolySyntaxError(f"invalid variable name {v!r}", line.find(v), lineno)
            if len(set(names)) != len(names):
                raise PolySyntaxError("variable names must be distinct", 0, lineno)
            if not names:
                raise PolySyntaxError("'vars:' needs at least one variable", 0, lineno)
        elif key == "poly":
            offset = line.index(":") + 1
            polys.append((lineno, offset, line[offset:]))
        elif key == "name":
            name = rest.strip()
        else:
            raise PolySyntaxError(f"unknown directive {key!r}", line.find(key), lineno)
    if names is None:
        raise PolySyntaxError("missing 'vars:' line", 0, None)
    if not polys:
        raise PolySyntaxError("no 'poly:' lines", 0, None)
    comps = []
    for lineno, offset, expr in polys:
        try:
            p = parse_poly(expr, names)
        except ParseError as err:
            raise err.at_line(lineno, offset) from None
        if p.constant_term() != 0:
            raise NonzeroConstantTerm("germ must map origin to origin", offset, lineno)
        comps.append(p)
    if len(comps) > len(names):
        raise TargetExceedsSource(
            f"{len(comps)} components but only {len(names)} variables; need m >= p", 0, polys[len(names)][0]
        )
    return MapGerm(tuple(comps), tuple(names), name)


def format_germ(G: MapGerm, comments: Sequence[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    if G.name:
        lines.append(f"name: {G.name}")
    lines.append("vars: " + " ".join(G.names))
    lines.extend(f"poly: {c.to_str(G.names)}" for c in G.components)
    return "\n".join(lines) + "\n"


def format_polys(polys: Sequence[Poly], names: Sequence[str]) -> str:
    """Generators as ``poly:`` lines (for inspection; zero lines allowed)."""
    return "".join(f"poly: {p.to_str(names)}\n" for p in polys)


def load_germ(path) -> MapGerm:
    with open(path, encoding="utf-8") as fh:
        return parse_germ_file(fh.read())
