"""Exact scalars, sparse multivariate polynomials, dual numbers and polynomial matrices.

Polynomials model the smooth functions of a chart. Every identity checked
elsewhere in the package reduces to ``Poly.is_zero`` on an exact normal form,
so nothing here ever touches floating point.

Scalars are ``gmpy2.mpq`` rationals, or :class:`Gaussian` values ``a + b*i``
with rational parts. A Gaussian with zero imaginary part is always collapsed
to a plain ``mpq`` so that equality of polynomials stays structural.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Any, Union

from gmpy2 import mpq

from .errors import (
    ChartMismatch,
    FieldMismatchError,
    NonConstantDeterminant,
    PolySyntaxError,
    UnknownVariableError,
    ZeroDeterminant,
)

FIELDS = ("rational", "gaussian")

_MPQ = type(mpq(0))


class Gaussian:
    """A Gaussian rational ``re + im*i`` with ``im != 0``.

    Build values through :func:`gaussian`, which collapses real values to
    ``mpq``; the constructor itself does not normalize.
    """

    __slots__ = ("re", "im")

    def __init__(self, re_part: Any, im_part: Any):
        self.re = mpq(re_part)
        self.im = mpq(im_part)

    def _parts(self, other: Any) -> tuple[Any, Any] | None:
        if isinstance(other, Gaussian):
            return other.re, other.im
        if isinstance(other, (_MPQ, int, Fraction)):
            return mpq(other), mpq(0)
        return None

    def __add__(self, other: Any) -> Scalar:
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return gaussian(self.re + p[0], self.im + p[1])

    __radd__ = __add__

    def __sub__(self, other: Any) -> Scalar:
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return gaussian(self.re - p[0], self.im - p[1])

    def __rsub__(self, other: Any) -> Scalar:
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return gaussian(p[0] - self.re, p[1] - self.im)

    def __mul__(self, other: Any) -> Scalar:
        p = self._parts(other)
        if p is None:
            return NotImplemented
        a, b = p
        return gaussian(self.re * a - self.im * b, self.re * b + self.im * a)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> Scalar:
        p = self._parts(other)
        if p is None:
            return NotImplemented
        a, b = p
        n = a * a + b * b
        if n == 0:
            raise ZeroDivisionError("division by zero")
        return gaussian((self.re * a + self.im * b) / n, (self.im * a - self.re * b) / n)

    def __rtruediv__(self, other: Any) -> Scalar:
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return gaussian(*p) / self

    def __neg__(self) -> Gaussian:
        return Gaussian(-self.re, -self.im)

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, Gaussian):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (_MPQ, int, Fraction)):
            return False
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return True

    def conjugate(self) -> Gaussian:
        return Gaussian(self.re, -self.im)

    def __repr__(self) -> str:
        return f"Gaussian({self.re}, {self.im})"

    def __str__(self) -> str:
        return format_scalar(self)


Scalar = Union[_MPQ, Gaussian]

I = Gaussian(0, 1)


def gaussian(re_part: Any, im_part: Any = 0) -> Scalar:
    im_part = mpq(im_part)
    if im_part == 0:
        return mpq(re_part)
    return Gaussian(re_part, im_part)


def as_scalar(value: Any) -> Scalar:
    if isinstance(value, Gaussian):
        return value
    if isinstance(value, (_MPQ, int, Fraction)):
        return mpq(value)
    if isinstance(value, str):
        return mpq(Fraction(value))
    raise TypeError(f"not an exact scalar: {value!r}")


def is_scalar(value: Any) -> bool:
    return isinstance(value, (_MPQ, int, Fraction, Gaussian))


def format_scalar(c: Scalar) -> str:
    if isinstance(c, Gaussian):
        im = f"{c.im}*i"
        if c.re == 0:
            return im
        sign = "+" if c.im > 0 else "-"
        return f"{c.re} {sign} {abs(c.im)}*i"
    return str(c)


def _real_parts(c: Scalar) -> tuple[Any, Any]:
    if isinstance(c, Gaussian):
        return c.re, c.im
    return c, mpq(0)


Exponent = tuple[int, ...]


def _grlex_key(exps: Exponent) -> tuple[int, Exponent]:
    return (sum(exps), exps)


class Poly:
    """Sparse polynomial over an ordered tuple of variable names.

    ``terms`` maps exponent tuples to nonzero scalars. Instances are treated
    as immutable; every operation returns a new polynomial.
    """

    __slots__ = ("variables", "terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exponent, Any] | None = None):
        self.variables = tuple(variables)
        n = len(self.variables)
        clean: dict[Exponent, Scalar] = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps} for variables {self.variables}")
            c = as_scalar(coeff)
            if c != 0:
                clean[exps] = clean.get(exps, mpq(0)) + c
                if clean[exps] == 0:
                    del clean[exps]
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, variables: tuple[str, ...], terms: dict[Exponent, Scalar]) -> Poly:
        p = cls.__new__(cls)
        p.variables = variables
        p.terms = terms
        p._hash = None
        return p

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, variables: Sequence[str]) -> Poly:
        return cls._raw(tuple(variables), {})

    @classmethod
    def constant(cls, variables: Sequence[str], value: Any) -> Poly:
        variables = tuple(variables)
        c = as_scalar(value)
        if c == 0:
            return cls._raw(variables, {})
        return cls._raw(variables, {(0,) * len(variables): c})

    @classmethod
    def one(cls, variables: Sequence[str]) -> Poly:
        return cls.constant(variables, 1)

    @classmethod
    def variable(cls, variables: Sequence[str], name: str) -> Poly:
        variables = tuple(variables)
        if name not in variables:
            raise ChartMismatch(f"unknown variable {name!r}")
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls._raw(variables, {exps: mpq(1)})

    @classmethod
    def monomial(cls, variables: Sequence[str], exps: Exponent, coeff: Any = 1) -> Poly:
        return cls(variables, {tuple(exps): coeff})

    # -- queries ----------------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and (0,) * self.nvars in self.terms)

    def constant_value(self) -> Scalar:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get((0,) * self.nvars, mpq(0))

    def constant_term(self) -> Scalar:
        return self.terms.get((0,) * self.nvars, mpq(0))

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def depends_on(self, name: str) -> bool:
        k = self.variables.index(name)
        return any(e[k] for e in self.terms)

    def is_real(self) -> bool:
        return not any(isinstance(c, Gaussian) for c in self.terms.values())

    def coefficient(self, exps: Exponent) -> Scalar:
        return self.terms.get(tuple(exps), mpq(0))

    def sorted_terms(self) -> list[tuple[Exponent, Scalar]]:
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other: Any) -> Poly | None:
        if isinstance(other, Poly):
            if other.variables != self.variables:
                raise ChartMismatch(f"variables {other.variables} differ from {self.variables}")
            return other
        if is_scalar(other):
            return Poly.constant(self.variables, other)
        return None

    def __add__(self, other: Any) -> Poly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o.terms:
            return self
        if not self.terms:
            return o
        terms = dict(self.terms)
        for e, c in o.terms.items():
            s = terms.get(e)
            if s is None:
                terms[e] = c
            else:
                s = s + c
                if s == 0:
                    del terms[e]
                else:
                    terms[e] = s
        return Poly._raw(self.variables, terms)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly._raw(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: Any) -> Poly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: Any) -> Poly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def scale(self, c: Any) -> Poly:
        c = as_scalar(c)
        if c == 0:
            return Poly._raw(self.variables, {})
        return Poly._raw(self.variables, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other: Any) -> Poly:
        if is_scalar(other):
            return self.scale(other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self.terms or not o.terms:
            return Poly._raw(self.variables, {})
        terms: dict[Exponent, Scalar] = {}
        get = terms.get
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = get(e)
                terms[e] = c1 * c2 if v is None else v + c1 * c2
        return Poly._raw(self.variables, {e: c for e, c in terms.items() if c != 0})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Poly:
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Poly.one(self.variables)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, Poly):
            return self.variables == other.variables and self.terms == other.terms
        if is_scalar(other):
            return self.is_constant() and self.constant_value() == as_scalar(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self.terms.items())))
        return self._hash

    # -- calculus and substitution -----------------------------------------

    def partial(self, name: str) -> Poly:
        if name not in self.variables:
            raise UnknownVariableError(f"unknown variable {name!r}", 0)
        k = self.variables.index(name)
        terms: dict[Exponent, Scalar] = {}
        for e, c in self.terms.items():
            if e[k]:
                ne = e[:k] + (e[k] - 1,) + e[k + 1:]
                terms[ne] = c * e[k]
        return Poly._raw(self.variables, terms)

    def substitute(self, args: Sequence[Any], one: Any = None) -> Any:
        """Evaluate at ring elements ``args`` (one per variable).

        ``args`` may be Polys over a common target, DualPolys, or scalars.
        """
        if len(args) != self.nvars:
            raise ChartMismatch(f"expected {self.nvars} arguments, got {len(args)}")
        if all(isinstance(a, Poly) for a in args) and args:
            return self._substitute_polys(args)
        if one is None:
            one = _one_like(args) if args else mpq(1)
        powers: list[dict[int, Any]] = [{0: one} for _ in args]

        def power(k: int, e: int) -> Any:
            cache = powers[k]
            if e not in cache:
                cache[e] = power(k, e - 1) * args[k]
            return cache[e]

        total = one * 0
        for exps, c in self.terms.items():
            m = one
            for k, e in enumerate(exps):
                if e:
                    m = m * power(k, e)
            total = total + m * c
        return total

    def _substitute_polys(self, args: Sequence[Poly]) -> Poly:
        target = args[0].variables
        for a in args:
            if a.variables != target:
                raise ChartMismatch("substitution arguments live on different charts")
        one = Poly.one(target)
        powers: list[dict[int, Poly]] = [{0: one, 1: a} for a in args]

        def power(k: int, e: int) -> Poly:
            cache = powers[k]
            if e not in cache:
                cache[e] = power(k, e - 1) * args[k]
            return cache[e]

        acc: dict[Exponent, Scalar] = {}
        for exps, c in self.terms.items():
            m = one
            for k, e in enumerate(exps):
                if e:
                    m = m * power(k, e)
            for e2, c2 in m.terms.items():
                v = acc.get(e2)
                acc[e2] = c * c2 if v is None else v + c * c2
        if not self.nvars:
            return Poly.constant(target, self.constant_term())
        return Poly._raw(target, {e: c for e, c in acc.items() if c != 0})

    def evaluate(self, point: Sequence[Any]) -> Scalar:
        if len(point) != self.nvars:
            raise ChartMismatch(f"expected a point with {self.nvars} coordinates")
        pt = [as_scalar(p) for p in point]
        total: Scalar = mpq(0)
        for exps, c in self.terms.items():
            m: Scalar = c
            for x, e in zip(pt, exps):
                if e:
                    m = m * x**e if not isinstance(x, Gaussian) else m * _gpow(x, e)
            total = total + m
        return total

    def embed(self, variables: Sequence[str]) -> Poly:
        """Regard this polynomial as a function on a larger chart."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        try:
            index = [variables.index(v) for v in self.variables]
        except ValueError:
            raise ChartMismatch(f"{self.variables} is not contained in {variables}") from None
        n = len(variables)
        terms = {}
        for exps, c in self.terms.items():
            ne = [0] * n
            for k, e in zip(index, exps):
                ne[k] = e
            terms[tuple(ne)] = c
        return Poly._raw(variables, terms)

    def restrict(self, variables: Sequence[str]) -> Poly:
        """Inverse of :meth:`embed`; fails if a dropped variable occurs."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        keep = []
        for v in variables:
            if v not in self.variables:
                raise ChartMismatch(f"unknown variable {v!r}")
            keep.append(self.variables.index(v))
        dropped = [k for k in range(self.nvars) if k not in keep]
        terms = {}
        for exps, c in self.terms.items():
            if any(exps[k] for k in dropped):
                raise ChartMismatch(f"{self} depends on variables outside {variables}")
            terms[tuple(exps[k] for k in keep)] = c
        return Poly._raw(variables, terms)

    def map_coefficients(self, fn: Any) -> Poly:
        return Poly(self.variables, {e: fn(c) for e, c in self.terms.items()})

    def affine_parts(self) -> tuple[list[Scalar], Scalar] | None:
        """Linear coefficients and constant term when the degree is at most one."""
        if self.total_degree() > 1:
            return None
        n = self.nvars
        lin = []
        for k in range(n):
            e = tuple(1 if j == k else 0 for j in range(n))
            lin.append(self.terms.get(e, mpq(0)))
        return lin, self.constant_term()

    # -- printing -----------------------------------------------------------

    def _monomial_text(self, exps: Exponent) -> str:
        parts = []
        for v, e in zip(self.variables, exps):
            if e == 1:
                parts.append(v)
            elif e > 1:
                parts.append(f"{v}^{e}")
        return "*".join(parts)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces: list[tuple[bool, str]] = []
        for exps, c in self.sorted_terms():
            mono = self._monomial_text(exps)
            re_part, im_part = _real_parts(c)
            for value, imaginary in ((re_part, False), (im_part, True)):
                if value == 0:
                    continue
                body = str(abs(value))
                if imaginary:
                    body += "*i"
                if mono:
                    body += "*" + mono
                pieces.append((value < 0, body))
        out = ("-" if pieces[0][0] else "") + pieces[0][1]
        for neg, body in pieces[1:]:
            out += (" - " if neg else " + ") + body
        return out

    def __repr__(self) -> str:
        return f"Poly({str(self)!r}, {self.variables})"


def _gpow(x: Gaussian, e: int) -> Scalar:
    r: Scalar = mpq(1)
    for _ in range(e):
        r = r * x
    return r


def _one_like(args: Sequence[Any]) -> Any:
    for a in args:
        if isinstance(a, DualPoly):
            return DualPoly.lift(Poly.one(a.a0.variables))
        if isinstance(a, Poly):
            return Poly.one(a.variables)
    return mpq(1)


def monomials(variables: Sequence[str], max_degree: int) -> list[Poly]:
    """All monic monomials of total degree at most ``max_degree``, graded."""
    variables = tuple(variables)
    n = len(variables)
    out = []
    for d in range(max_degree + 1):
        for combo in combinations_with_replacement(range(n), d):
            exps = [0] * n
            for k in combo:
                exps[k] += 1
            out.append(Poly._raw(variables, {tuple(exps): mpq(1)}))
        if n == 0:
            break
    return out


def partial(f: Poly, var: str) -> Poly:
    return f.partial(var)


# -- parsing ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise PolySyntaxError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    return tokens


def parse_poly(text: str, chart: Any, field: str | None = None) -> Poly:
    """Parse the textual polynomial grammar over a chart (or variable list).

    Terms are joined by ``+``/``-``; a term is a ``*``-product of rational
    numbers ``p`` or ``p/q``, the imaginary unit ``i`` (gaussian field only)
    and variable powers ``x^e``.
    """
    if hasattr(chart, "names"):
        variables = tuple(chart.names)
        field = field or chart.field
    else:
        variables = tuple(chart)
    field = field or "rational"
    if field not in FIELDS:
        raise ValueError(f"unknown field {field!r}")
    if not isinstance(text, str):
        raise PolySyntaxError(f"expected a polynomial string, got {type(text).__name__}", 0)
    tokens = _tokenize(text)
    if not tokens:
        raise PolySyntaxError("empty polynomial", 0)
    n = len(variables)
    acc: dict[Exponent, Scalar] = {}
    pos = 0

    def peek() -> tuple[str, str, int] | None:
        return tokens[pos] if pos < len(tokens) else None

    def expect_int() -> int:
        nonlocal pos
        tok = peek()
        if tok is None or tok[0] != "num":
            where = tok[2] if tok else len(text)
            raise PolySyntaxError("expected an integer", where)
        pos += 1
        return int(tok[1])

    sign = 1
    first = True
    while True:
        tok = peek()
        if tok is None:
            raise PolySyntaxError("expected a term", len(text))
        if tok[0] == "op" and tok[1] in "+-":
            sign = -1 if tok[1] == "-" else 1
            pos += 1
        elif not first:
            raise PolySyntaxError("expected '+' or '-'", tok[2])
        first = False
        coeff: Scalar = mpq(sign)
        exps = [0] * n
        while True:
            tok = peek()
            if tok is None:
                raise PolySyntaxError("expected a factor", len(text))
            kind, value, where = tok
            if kind == "num":
                pos += 1
                num = mpq(int(value))
                nxt = peek()
                if nxt and nxt[0] == "op" and nxt[1] == "/":
                    pos += 1
                    den = expect_int()
                    if den == 0:
                        raise PolySyntaxError("zero denominator", nxt[2])
                    num = num / den
                coeff = coeff * num
            elif kind == "name" and value == "i":
                pos += 1
                if field != "gaussian":
                    raise FieldMismatchError(f"imaginary unit at position {where} in the rational field")
                coeff = coeff * I
            elif kind == "name":
                pos += 1
                if value not in variables:
                    raise UnknownVariableError(f"unknown variable {value!r}", where)
                k = variables.index(value)
                nxt = peek()
                power = 1
                if nxt and nxt[0] == "op" and nxt[1] == "^":
                    pos += 1
                    power = expect_int()
                exps[k] += power
            else:
                raise PolySyntaxError(f"unexpected {value!r}", where)
            nxt = peek()
            if nxt and nxt[0] == "op" and nxt[1] == "*":
                pos += 1
                continue
            break
        key = tuple(exps)
        acc[key] = acc.get(key, mpq(0)) + coeff
        nxt = peek()
        if nxt is None:
            break
        if not (nxt[0] == "op" and nxt[1] in "+-"):
            raise PolySyntaxError(f"unexpected {nxt[1]!r}", nxt[2])
    return Poly(variables, acc)


# -- dual numbers -------------------------------------------------------------


@dataclass(frozen=True)
class DualPoly:
    """``a0 + eps*a1`` with ``eps**2 == 0``."""

    a0: Poly
    a1: Poly

    @classmethod
    def lift(cls, p: Poly) -> DualPoly:
        return cls(p, Poly.zero(p.variables))

    @classmethod
    def epsilon(cls, variables: Sequence[str]) -> DualPoly:
        return cls(Poly.zero(variables), Poly.one(variables))

    def _coerce(self, other: Any) -> DualPoly | None:
        if isinstance(other, DualPoly):
            return other
        if isinstance(other, Poly) or is_scalar(other):
            return DualPoly(self.a0 * 0 + other, Poly.zero(self.a0.variables))
        return None

    def __add__(self, other: Any) -> DualPoly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return DualPoly(self.a0 + o.a0, self.a1 + o.a1)

    __radd__ = __add__

    def __neg__(self) -> DualPoly:
        return DualPoly(-self.a0, -self.a1)

    def __sub__(self, other: Any) -> DualPoly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return DualPoly(self.a0 - o.a0, self.a1 - o.a1)

    def __rsub__(self, other: Any) -> DualPoly:
        return (-self) + other

    def __mul__(self, other: Any) -> DualPoly:
        if is_scalar(other):
            return DualPoly(self.a0 * other, self.a1 * other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return DualPoly(self.a0 * o.a0, self.a0 * o.a1 + self.a1 * o.a0)

    __rmul__ = __mul__


# -- matrices -------------------------------------------------------------------


@dataclass(frozen=True)
class MatrixPoly:
    """Dense matrix with polynomial entries over a common variable tuple."""

    variables: tuple[str, ...]
    entries: tuple[tuple[Poly, ...], ...]

    def __post_init__(self) -> None:
        if not self.entries or not self.entries[0]:
            raise ValueError("matrix must have positive dimensions")
        width = len(self.entries[0])
        for row in self.entries:
            if len(row) != width:
                raise ValueError("ragged matrix")
            for p in row:
                if p.variables != self.variables:
                    raise ChartMismatch("matrix entry over the wrong variables")

    @classmethod
    def build(cls, variables: Sequence[str], rows: Iterable[Iterable[Any]]) -> MatrixPoly:
        variables = tuple(variables)
        entries = tuple(
            tuple(e if isinstance(e, Poly) else Poly.constant(variables, e) for e in row) for row in rows
        )
        return cls(variables, entries)

    @classmethod
    def identity(cls, n: int, variables: Sequence[str]) -> MatrixPoly:
        return cls.build(variables, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int, variables: Sequence[str]) -> MatrixPoly:
        return cls.build(variables, [[0] * cols for _ in range(rows)])

    @classmethod
    def unit(cls, n: int, a: int, b: int, variables: Sequence[str]) -> MatrixPoly:
        return cls.build(variables, [[1 if (i, j) == (a, b) else 0 for j in range(n)] for i in range(n)])

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, index: tuple[int, int]) -> Poly:
        i, j = index
        return self.entries[i][j]

    def column(self, j: int) -> tuple[Poly, ...]:
        return tuple(row[j] for row in self.entries)

    def map(self, fn: Any) -> MatrixPoly:
        rows = tuple(tuple(fn(e) for e in row) for row in self.entries)
        return MatrixPoly(rows[0][0].variables, rows)

    def _check_shape(self, other: MatrixPoly) -> None:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: MatrixPoly) -> MatrixPoly:
        self._check_shape(other)
        return MatrixPoly(
            self.variables,
            tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries)),
        )

    def __sub__(self, other: MatrixPoly) -> MatrixPoly:
        self._check_shape(other)
        return MatrixPoly(
            self.variables,
            tuple(tuple(a - b for a, b in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries)),
        )

    def __neg__(self) -> MatrixPoly:
        return self.map(lambda e: -e)

    def __mul__(self, other: Any) -> MatrixPoly:
        if isinstance(other, MatrixPoly):
            return self @ other
        if isinstance(other, Poly) or is_scalar(other):
            return self.map(lambda e: e * other)
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other: MatrixPoly) -> MatrixPoly:
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        zero = Poly.zero(self.variables)
        rows = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                s = zero
                for k in range(self.cols):
                    a = self.entries[i][k]
                    if a:
                        b = other.entries[k][j]
                        if b:
                            s = s + a * b
                row.append(s)
            rows.append(tuple(row))
        return MatrixPoly(self.variables, tuple(rows))

    def apply(self, vector: Sequence[Poly]) -> tuple[Poly, ...]:
        if len(vector) != self.cols:
            raise ValueError("vector length does not match matrix")
        zero = Poly.zero(self.variables)
        out = []
        for row in self.entries:
            s = zero
            for a, v in zip(row, vector):
                if a and v:
                    s = s + a * v
            out.append(s)
        return tuple(out)

    def transpose(self) -> MatrixPoly:
        return MatrixPoly(self.variables, tuple(zip(*self.entries)))

    def commutator(self, other: MatrixPoly) -> MatrixPoly:
        return self @ other - other @ self

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)

    def is_identity(self) -> bool:
        return self.rows == self.cols and all(
            e == (1 if i == j else 0) for i, row in enumerate(self.entries) for j, e in enumerate(row)
        )

    def is_constant(self) -> bool:
        return all(e.is_constant() for row in self.entries for e in row)

    def nonzero_entry(self) -> tuple[int, int, Poly] | None:
        for i, row in enumerate(self.entries):
            for j, e in enumerate(row):
                if e:
                    return i, j, e
        return None

    def substitute(self, args: Sequence[Poly]) -> MatrixPoly:
        return self.map(lambda e: e.substitute(args))

    def embed(self, variables: Sequence[str]) -> MatrixPoly:
        return self.map(lambda e: e.embed(variables))

    def _minor(self, i: int, j: int) -> MatrixPoly:
        rows = tuple(
            tuple(e for c, e in enumerate(row) if c != j) for r, row in enumerate(self.entries) if r != i
        )
        return MatrixPoly(self.variables, rows)

    def det(self) -> Poly:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 1:
            return self.entries[0][0]
        if n == 2:
            (a, b), (c, d) = self.entries
            return a * d - b * c
        total = Poly.zero(self.variables)
        for j, e in enumerate(self.entries[0]):
            if e:
                term = e * self._minor(0, j).det()
                total = total + term if j % 2 == 0 else total - term
        return total

    def adjugate(self) -> MatrixPoly:
        n = self.rows
        if n == 1:
            return MatrixPoly.identity(1, self.variables)
        cof = [
            [self._minor(i, j).det() * (1 if (i + j) % 2 == 0 else -1) for j in range(n)] for i in range(n)
        ]
        return MatrixPoly.build(self.variables, cof).transpose()

    def trace(self) -> Poly:
        s = Poly.zero(self.variables)
        for i in range(min(self.rows, self.cols)):
            s = s + self.entries[i][i]
        return s

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(str(e) for e in row) + "]" for row in self.entries) + "]"

    def to_lists(self) -> list[list[str]]:
        return [[str(e) for e in row] for row in self.entries]


def matrix_inverse_if_unimodular(m: MatrixPoly) -> MatrixPoly:
    """Exact inverse of a matrix whose determinant is a nonzero constant."""
    if m.rows != m.cols:
        raise ValueError("only square matrices can be inverted")
    d = m.det()
    if d.is_zero():
        raise ZeroDeterminant("determinant is zero")
    if not d.is_constant():
        raise NonConstantDeterminant(f"determinant {d} is not constant")
    inv = 1 / d.constant_value()
    return m.adjugate() * inv


def rational_matrix(rows: Iterable[Iterable[Any]]) -> tuple[tuple[Any, ...], ...]:
    return tuple(tuple(mpq(as_scalar(x)) for x in row) for row in rows)


def iter_exponents(n: int, max_degree: int) -> Iterator[Exponent]:
    for d in range(max_degree + 1):
        for combo in combinations_with_replacement(range(n), d):
            exps = [0] * n
            for k in combo:
                exps[k] += 1
            yield tuple(exps)
        if n == 0:
            break
