"""Charts, polynomial vector fields, fibered charts and affine maps."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

from gmpy2 import mpq

from .errors import ChartMismatch
from .ring import FIELDS, MatrixPoly, Poly, as_scalar, matrix_inverse_if_unimodular, monomials, parse_poly


@dataclass(frozen=True)
class Chart:
    """A full coordinate chart R^n with named coordinates."""

    names: tuple[str, ...]
    field: str = "rational"

    def __post_init__(self) -> None:
        object.__setattr__(self, "names", tuple(self.names))
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate coordinate names in {self.names}")
        if any(not n for n in self.names):
            raise ValueError("coordinate names must be nonempty")
        if "i" in self.names:
            raise ValueError("'i' is reserved for the imaginary unit")
        if self.field not in FIELDS:
            raise ValueError(f"unknown field {self.field!r}")

    @classmethod
    def standard(cls, n: int, prefix: str = "x", field: str = "rational") -> Chart:
        return cls(tuple(f"{prefix}{k}" for k in range(1, n + 1)), field)

    @classmethod
    def point(cls, field: str = "rational") -> Chart:
        return cls((), field)

    @property
    def dim(self) -> int:
        return len(self.names)

    def poly(self, text: str) -> Poly:
        return parse_poly(text, self)

    def zero(self) -> Poly:
        return Poly.zero(self.names)

    def one(self) -> Poly:
        return Poly.one(self.names)

    def const(self, c: Any) -> Poly:
        return Poly.constant(self.names, c)

    def coord(self, k: int) -> Poly:
        return Poly.variable(self.names, self.names[k])

    def coords(self) -> tuple[Poly, ...]:
        return tuple(self.coord(k) for k in range(self.dim))

    def monomials(self, max_degree: int) -> list[Poly]:
        return monomials(self.names, max_degree)

    def with_field(self, field: str) -> Chart:
        return Chart(self.names, field)

    def owns(self, f: Poly) -> bool:
        return f.variables == self.names


@dataclass(frozen=True)
class VectorField:
    """``sum_i components[i] * d/d(names[i])`` on a chart."""

    chart: Chart
    components: tuple[Poly, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.components) != self.chart.dim:
            raise ChartMismatch(
                f"vector field has {len(self.components)} components on a {self.chart.dim}-dimensional chart"
            )
        for c in self.components:
            if c.variables != self.chart.names:
                raise ChartMismatch("vector field component over the wrong chart")

    @classmethod
    def zero(cls, chart: Chart) -> VectorField:
        return cls(chart, tuple(chart.zero() for _ in range(chart.dim)))

    @classmethod
    def coordinate(cls, chart: Chart, k: int) -> VectorField:
        return cls(chart, tuple(chart.one() if j == k else chart.zero() for j in range(chart.dim)))

    @classmethod
    def parse(cls, chart: Chart, texts: Sequence[str]) -> VectorField:
        return cls(chart, tuple(chart.poly(t) for t in texts))

    def __call__(self, f: Poly) -> Poly:
        return apply_vf(self, f)

    def __add__(self, other: VectorField) -> VectorField:
        _same_chart(self.chart, other.chart)
        return VectorField(self.chart, tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: VectorField) -> VectorField:
        _same_chart(self.chart, other.chart)
        return VectorField(self.chart, tuple(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> VectorField:
        return VectorField(self.chart, tuple(-a for a in self.components))

    def scale(self, f: Any) -> VectorField:
        """Multiply by a function (or scalar) pointwise."""
        return VectorField(self.chart, tuple(a * f for a in self.components))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def embed(self, chart: Chart, names: Sequence[str] | None = None) -> VectorField:
        """Extend to a larger chart, with zero components along new directions."""
        names = tuple(names or self.chart.names)
        comps = []
        for v in chart.names:
            if v in names:
                comps.append(self.components[names.index(v)].embed(chart.names))
            else:
                comps.append(chart.zero())
        return VectorField(chart, tuple(comps))

    def __str__(self) -> str:
        parts = [f"({c})*d/d{n}" for c, n in zip(self.components, self.chart.names) if c]
        return " + ".join(parts) if parts else "0"

    def to_strings(self) -> list[str]:
        return [str(c) for c in self.components]


def _same_chart(a: Chart, b: Chart) -> None:
    if a.names != b.names:
        raise ChartMismatch(f"charts {a.names} and {b.names} differ")


def apply_vf(X: VectorField, f: Poly) -> Poly:
    if f.variables != X.chart.names:
        raise ChartMismatch(f"function over {f.variables} but field over {X.chart.names}")
    total = X.chart.zero()
    for name, c in zip(X.chart.names, X.components):
        if c:
            d = f.partial(name)
            if d:
                total = total + c * d
    return total


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    _same_chart(X.chart, Y.chart)
    comps = tuple(apply_vf(X, yj) - apply_vf(Y, xj) for xj, yj in zip(X.components, Y.components))
    return VectorField(X.chart, comps)


@dataclass(frozen=True)
class FiberedChart:
    """The product F = M x N, projected onto M by forgetting fiber coordinates."""

    base: Chart
    fiber: Chart

    def __post_init__(self) -> None:
        if set(self.base.names) & set(self.fiber.names):
            raise ValueError("base and fiber coordinate names must be disjoint")
        if self.base.field != self.fiber.field:
            raise ValueError("base and fiber must share a scalar field")

    @property
    def total(self) -> Chart:
        return Chart(self.base.names + self.fiber.names, self.base.field)

    def pullback(self, f: Poly) -> Poly:
        """``f o phi`` for a function ``f`` on the base."""
        if f.variables != self.base.names:
            raise ChartMismatch("pullback expects a base function")
        return f.embed(self.total.names)

    def is_basic(self, f: Poly) -> bool:
        return not any(f.depends_on(v) for v in self.fiber.names)

    def push(self, f: Poly) -> Poly:
        return f.restrict(self.base.names)


def is_projectable(X: VectorField, X_base: VectorField, fibered: FiberedChart) -> bool:
    """True iff ``X`` on F projects onto ``X_base`` on M."""
    _same_chart(X.chart, fibered.total)
    _same_chart(X_base.chart, fibered.base)
    for k, name in enumerate(fibered.base.names):
        c = X.components[k]
        if not fibered.is_basic(c):
            return False
        if c != fibered.pullback(X_base.components[k]):
            return False
    return True


@dataclass(frozen=True)
class AffineMap:
    """``x -> A x + b`` with rational ``A`` and ``b``."""

    A: tuple[tuple[Any, ...], ...]
    b: tuple[Any, ...]

    def __post_init__(self) -> None:
        A = tuple(tuple(mpq(as_scalar(x)) for x in row) for row in self.A)
        b = tuple(mpq(as_scalar(x)) for x in self.b)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        n = len(b)
        if len(A) != n or any(len(row) != n for row in A):
            raise ValueError("affine map needs a square matrix matching the translation")

    @classmethod
    def identity(cls, n: int) -> AffineMap:
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)), (0,) * n)

    @classmethod
    def translation(cls, b: Sequence[Any]) -> AffineMap:
        n = len(b)
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)), tuple(b))

    @classmethod
    def linear(cls, A: Sequence[Sequence[Any]]) -> AffineMap:
        return cls(tuple(tuple(r) for r in A), (0,) * len(A))

    @property
    def dim(self) -> int:
        return len(self.b)

    def __call__(self, point: Sequence[Any]) -> tuple[Any, ...]:
        pt = [as_scalar(p) for p in point]
        return tuple(sum((a * x for a, x in zip(row, pt)), mpq(0)) + bi for row, bi in zip(self.A, self.b))

    def compose(self, inner: AffineMap) -> AffineMap:
        """``self o inner``."""
        n = self.dim
        if inner.dim != n:
            raise ValueError("dimension mismatch in composition")
        A = tuple(
            tuple(sum((self.A[i][k] * inner.A[k][j] for k in range(n)), mpq(0)) for j in range(n))
            for i in range(n)
        )
        b = self(inner.b)
        return AffineMap(A, b)

    def inverse(self) -> AffineMap:
        n = self.dim
        if n == 0:
            return self
        m = MatrixPoly.build((), [[x for x in row] for row in self.A])
        inv = matrix_inverse_if_unimodular(m)
        Ainv = tuple(tuple(inv[i, j].constant_value() for j in range(n)) for i in range(n))
        b = tuple(-sum((Ainv[i][k] * self.b[k] for k in range(n)), mpq(0)) for i in range(n))
        return AffineMap(Ainv, b)

    def is_identity(self) -> bool:
        return self == AffineMap.identity(self.dim)

    def as_polys(self, chart: Chart) -> tuple[Poly, ...]:
        """Coordinate functions of the map, as polynomials on ``chart``."""
        if chart.dim != self.dim:
            raise ChartMismatch("affine map dimension differs from the chart")
        xs = chart.coords()
        out = []
        for row, bi in zip(self.A, self.b):
            p = chart.const(bi)
            for a, x in zip(row, xs):
                if a:
                    p = p + x * a
            out.append(p)
        return tuple(out)

    @classmethod
    def from_polys(cls, polys: Sequence[Poly]) -> AffineMap | None:
        """Recover ``(A, b)`` from affine coordinate functions, or None."""
        A, b = [], []
        for p in polys:
            parts = p.affine_parts()
            if parts is None or not all(p.is_real() for p in polys):
                return None
            A.append(tuple(parts[0]))
            b.append(parts[1])
        return cls(tuple(A), tuple(b))


def compose_affine(f: Poly, phi: AffineMap, chart: Chart | None = None) -> Poly:
    """Exact pullback ``f o phi``."""
    if phi.dim != f.nvars:
        raise ChartMismatch("affine map dimension differs from the polynomial's chart")
    chart = chart or Chart(f.variables)
    if f.nvars == 0:
        return f
    return f.substitute(phi.as_polys(chart))
