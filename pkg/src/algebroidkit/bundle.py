"""Trivial vector bundles E = M x V and their derivative endomorphisms.

A derivative endomorphism is stored as ``(X, u)`` and acts by
``D(psi) = X(psi) + u psi`` componentwise. The anchor is ``X``. Storing the
pair makes the defining rule ``D(f psi) = f D(psi) + X(f) psi`` hold by
construction, so every statement about these operators becomes an identity
between polynomials.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

from .errors import BundleMismatch, ChartMismatch
from .geometry import Chart, VectorField, apply_vf, lie_bracket
from .ring import MatrixPoly, Poly


@dataclass(frozen=True)
class TrivialBundle:
    base: Chart
    rank: int

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ValueError("bundle rank must be at least 1")

    @property
    def field(self) -> str:
        return self.base.field

    @property
    def names(self) -> tuple[str, ...]:
        return self.base.names

    def fiber_names(self, prefix: str = "v") -> tuple[str, ...]:
        names = tuple(f"{prefix}{k}" for k in range(1, self.rank + 1))
        if set(names) & set(self.base.names):
            raise ValueError(f"fiber coordinate prefix {prefix!r} collides with base coordinates")
        return names

    def total_chart(self) -> Chart:
        """The total space as a chart with coordinates (x, v)."""
        return Chart(self.base.names + self.fiber_names(), self.field)

    def frame(self) -> list[Section]:
        return [Section.unit(self, b) for b in range(self.rank)]

    def identity(self) -> MatrixPoly:
        return MatrixPoly.identity(self.rank, self.names)

    def zero_matrix(self) -> MatrixPoly:
        return MatrixPoly.zeros(self.rank, self.rank, self.names)

    def matrix(self, rows: Sequence[Sequence[Any]]) -> MatrixPoly:
        """Build a k x k matrix from polynomial strings or scalars."""
        return MatrixPoly.build(self.names, [[self._entry(e) for e in row] for row in rows])

    def section(self, comps: Sequence[Any]) -> Section:
        """Build a section from polynomial strings, polynomials or scalars."""
        return Section(self, tuple(self._entry(c) for c in comps))

    def _entry(self, c: Any) -> Poly:
        if isinstance(c, str):
            return self.base.poly(c)
        return c if isinstance(c, Poly) else self.base.const(c)


def _same_bundle(a: TrivialBundle, b: TrivialBundle) -> None:
    if a != b:
        raise BundleMismatch(f"bundles differ: {a} vs {b}")


@dataclass(frozen=True)
class Section:
    bundle: TrivialBundle
    components: tuple[Poly, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.components) != self.bundle.rank:
            raise BundleMismatch("section component count differs from the rank")
        for c in self.components:
            if c.variables != self.bundle.names:
                raise ChartMismatch("section component over the wrong chart")

    @classmethod
    def zero(cls, bundle: TrivialBundle) -> Section:
        return cls(bundle, tuple(bundle.base.zero() for _ in range(bundle.rank)))

    @classmethod
    def unit(cls, bundle: TrivialBundle, b: int) -> Section:
        return cls(bundle, tuple(bundle.base.one() if j == b else bundle.base.zero() for j in range(bundle.rank)))

    def __add__(self, other: Section) -> Section:
        _same_bundle(self.bundle, other.bundle)
        return Section(self.bundle, tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: Section) -> Section:
        _same_bundle(self.bundle, other.bundle)
        return Section(self.bundle, tuple(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> Section:
        return Section(self.bundle, tuple(-a for a in self.components))

    def scale(self, f: Any) -> Section:
        return Section(self.bundle, tuple(a * f for a in self.components))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.components) + ")"


@dataclass(frozen=True)
class EndField:
    """A section of End(E): a k x k matrix of functions."""

    bundle: TrivialBundle
    matrix: MatrixPoly

    def __post_init__(self) -> None:
        if self.matrix.shape != (self.bundle.rank, self.bundle.rank):
            raise BundleMismatch("endomorphism matrix must be rank x rank")
        if self.matrix.variables != self.bundle.names:
            raise ChartMismatch("endomorphism entries over the wrong chart")

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def is_scalar_multiple_of_identity(self) -> Poly | None:
        """The scalar ``s`` with matrix ``s * Id``, or None."""
        m = self.matrix
        s = m[0, 0]
        if m == self.bundle.identity() * s:
            return s
        return None

    def __str__(self) -> str:
        return str(self.matrix)


@dataclass(frozen=True)
class DerivativeOp:
    """``D = X + u``: anchor ``X`` on the base and zeroth-order part ``u``."""

    bundle: TrivialBundle
    anchor: VectorField
    matrix: MatrixPoly

    def __post_init__(self) -> None:
        if self.anchor.chart.names != self.bundle.names:
            raise ChartMismatch("anchor lives on a different chart than the bundle")
        if self.matrix.shape != (self.bundle.rank, self.bundle.rank):
            raise BundleMismatch("zeroth-order part must be rank x rank")
        if self.matrix.variables != self.bundle.names:
            raise ChartMismatch("zeroth-order part over the wrong chart")

    @classmethod
    def zero(cls, bundle: TrivialBundle) -> DerivativeOp:
        return cls(bundle, VectorField.zero(bundle.base), bundle.zero_matrix())

    @classmethod
    def of_vector_field(cls, bundle: TrivialBundle, X: VectorField) -> DerivativeOp:
        return cls(bundle, X, bundle.zero_matrix())

    @classmethod
    def of_endomorphism(cls, bundle: TrivialBundle, u: MatrixPoly) -> DerivativeOp:
        return cls(bundle, VectorField.zero(bundle.base), u)

    @property
    def order(self) -> int:
        return 0 if self.anchor.is_zero() else 1

    def __call__(self, psi: Section) -> Section:
        return apply(self, psi)

    def __add__(self, other: DerivativeOp) -> DerivativeOp:
        _same_bundle(self.bundle, other.bundle)
        return DerivativeOp(self.bundle, self.anchor + other.anchor, self.matrix + other.matrix)

    def __sub__(self, other: DerivativeOp) -> DerivativeOp:
        _same_bundle(self.bundle, other.bundle)
        return DerivativeOp(self.bundle, self.anchor - other.anchor, self.matrix - other.matrix)

    def __neg__(self) -> DerivativeOp:
        return DerivativeOp(self.bundle, -self.anchor, -self.matrix)

    def scale(self, f: Any) -> DerivativeOp:
        """The C(M)-module action ``f * D``."""
        return DerivativeOp(self.bundle, self.anchor.scale(f), self.matrix * f)

    def is_zero(self) -> bool:
        return self.anchor.is_zero() and self.matrix.is_zero()

    def endomorphism(self) -> EndField:
        return EndField(self.bundle, self.matrix)

    def __str__(self) -> str:
        return f"DerivativeOp(anchor={self.anchor}, matrix={self.matrix})"


def apply(D: DerivativeOp, psi: Section) -> Section:
    _same_bundle(D.bundle, psi.bundle)
    moved = D.matrix.apply(psi.components)
    return Section(D.bundle, tuple(apply_vf(D.anchor, c) + m for c, m in zip(psi.components, moved)))


def symbol_check(D: DerivativeOp, f: Poly) -> EndField:
    """The operator ``[D, f] = D o f - f o D`` as an endomorphism field.

    Computed column by column from the action on frame sections rather than
    from the closed form, so that scalarity of the symbol is a real check.
    """
    cols = []
    for e in D.bundle.frame():
        cols.append((apply(D, e.scale(f)) - apply(D, e).scale(f)).components)
    m = MatrixPoly(D.bundle.names, tuple(zip(*cols)))
    return EndField(D.bundle, m)


def end_derivative(X: VectorField, u: MatrixPoly) -> MatrixPoly:
    """Entrywise Lie derivative ``X(u)``."""
    return u.map(lambda e: apply_vf(X, e))


def commutator(D1: DerivativeOp, D2: DerivativeOp) -> DerivativeOp:
    """``[D1, D2] = ([X1, X2], X1(u2) - X2(u1) + [u1, u2])``."""
    _same_bundle(D1.bundle, D2.bundle)
    anchor = lie_bracket(D1.anchor, D2.anchor)
    u = end_derivative(D1.anchor, D2.matrix) - end_derivative(D2.anchor, D1.matrix)
    u = u + D1.matrix.commutator(D2.matrix)
    return DerivativeOp(D1.bundle, anchor, u)


def composition_difference(D1: DerivativeOp, D2: DerivativeOp, psi: Section) -> Section:
    """``D1(D2 psi) - D2(D1 psi)``, computed by composing the operators."""
    return apply(D1, apply(D2, psi)) - apply(D2, apply(D1, psi))


@dataclass(frozen=True)
class Connection:
    """``nabla_X = X + sum_i X^i gammas[i]``."""

    bundle: TrivialBundle
    gammas: tuple[MatrixPoly, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "gammas", tuple(self.gammas))
        if len(self.gammas) != self.bundle.base.dim:
            raise ChartMismatch("one connection matrix per base coordinate is required")
        for g in self.gammas:
            if g.shape != (self.bundle.rank, self.bundle.rank) or g.variables != self.bundle.names:
                raise BundleMismatch("connection matrix has the wrong shape or chart")

    @classmethod
    def trivial(cls, bundle: TrivialBundle) -> Connection:
        return cls(bundle, tuple(bundle.zero_matrix() for _ in range(bundle.base.dim)))

    def form(self, X: VectorField) -> MatrixPoly:
        """The connection 1-form evaluated on ``X``."""
        total = self.bundle.zero_matrix()
        for c, g in zip(X.components, self.gammas):
            if c:
                total = total + g * c
        return total

    def on_end(self, X: VectorField, u: MatrixPoly) -> MatrixPoly:
        """Induced covariant derivative on End(E): ``X(u) + [form(X), u]``."""
        return end_derivative(X, u) + self.form(X).commutator(u)


def covariant(nabla: Connection, X: VectorField) -> DerivativeOp:
    if X.chart.names != nabla.bundle.names:
        raise ChartMismatch("vector field and connection live on different charts")
    return DerivativeOp(nabla.bundle, X, nabla.form(X))


def curvature(nabla: Connection, X1: VectorField, X2: VectorField) -> EndField:
    """``R(X1, X2) = nabla_[X1,X2] - [nabla_X1, nabla_X2]``."""
    diff = covariant(nabla, lie_bracket(X1, X2)) - commutator(covariant(nabla, X1), covariant(nabla, X2))
    if not diff.anchor.is_zero():
        raise AssertionError("curvature has a nonzero anchor; commutator anchor rule violated")
    return EndField(nabla.bundle, diff.matrix)


def decompose(D: DerivativeOp, nabla: Connection) -> tuple[VectorField, EndField]:
    """Split ``D = nabla_X + u'`` with ``X`` the anchor of ``D``."""
    _same_bundle(D.bundle, nabla.bundle)
    return D.anchor, EndField(D.bundle, D.matrix - nabla.form(D.anchor))


def reconstruct(nabla: Connection, X: VectorField, u: EndField) -> DerivativeOp:
    return covariant(nabla, X) + DerivativeOp.of_endomorphism(nabla.bundle, u.matrix)


def twisted_bracket(
    nabla: Connection, X1: VectorField, u1: MatrixPoly, X2: VectorField, u2: MatrixPoly
) -> tuple[VectorField, MatrixPoly]:
    """Bracket of ``nabla_X1 + u1`` and ``nabla_X2 + u2`` in the split picture.

    Returns ``([X1, X2], nabla_X1 u2 - nabla_X2 u1 + [u1, u2] - R(X1, X2))``.
    """
    R = curvature(nabla, X1, X2).matrix
    u = nabla.on_end(X1, u2) - nabla.on_end(X2, u1) + u1.commutator(u2) - R
    return lie_bracket(X1, X2), u


@dataclass(frozen=True)
class LinearVectorField:
    """``X(x, v) = (X_M(x), B(x) v)`` on the total space of E."""

    bundle: TrivialBundle
    base_field: VectorField
    matrix: MatrixPoly

    def __post_init__(self) -> None:
        if self.base_field.chart.names != self.bundle.names:
            raise ChartMismatch("base field lives on the wrong chart")
        if self.matrix.shape != (self.bundle.rank, self.bundle.rank) or self.matrix.variables != self.bundle.names:
            raise BundleMismatch("fiber matrix has the wrong shape or chart")

    def total_field(self) -> VectorField:
        total = self.bundle.total_chart()
        vs = [Poly.variable(total.names, v) for v in self.bundle.fiber_names()]
        base = [c.embed(total.names) for c in self.base_field.components]
        B = self.matrix.embed(total.names)
        fiber = B.apply(vs)
        return VectorField(total, tuple(base) + tuple(fiber))

    @classmethod
    def from_total_field(cls, bundle: TrivialBundle, X: VectorField) -> LinearVectorField:
        """Read back a linear field; raises if ``X`` is not linear."""
        total = bundle.total_chart()
        if X.chart.names != total.names:
            raise ChartMismatch("field does not live on the total space")
        n = bundle.base.dim
        fnames = bundle.fiber_names()
        base = []
        for c in X.components[:n]:
            if any(c.depends_on(v) for v in fnames):
                raise ValueError("base components of a linear field cannot depend on fiber coordinates")
            base.append(c.restrict(bundle.names))
        rows = []
        for c in X.components[n:]:
            row = []
            rest = c
            for v in fnames:
                coeff = c.partial(v)
                if any(coeff.depends_on(w) for w in fnames):
                    raise ValueError("fiber components of a linear field must be linear in v")
                row.append(coeff.restrict(bundle.names))
                rest = rest - coeff * Poly.variable(total.names, v)
            if not rest.is_zero():
                raise ValueError("fiber components of a linear field must vanish on the zero section")
            rows.append(tuple(row))
        return cls(bundle, VectorField(bundle.base, tuple(base)), MatrixPoly(bundle.names, tuple(rows)))


def lie_derivation(X: LinearVectorField) -> DerivativeOp:
    """``D_X(psi) = T psi (X_M) - X(psi)``, which is ``(X_M, -B)``."""
    return DerivativeOp(X.bundle, X.base_field, -X.matrix)


def linear_field(D: DerivativeOp) -> LinearVectorField:
    """Inverse of :func:`lie_derivation`: the linear field ``(D_M, -u)``."""
    return LinearVectorField(D.bundle, D.anchor, -D.matrix)


def lie_derivative_of_section(X: VectorField, bundle: TrivialBundle, psi: Section) -> Section:
    """Evaluate ``T psi(X_M) - X(psi(m))`` directly from a projectable field on the total space.

    Independent of :func:`lie_derivation`: the fiber components of ``X`` are
    evaluated along the image of ``psi`` by substitution ``v = psi(x)``.
    """
    n = bundle.base.dim
    base_field = VectorField(bundle.base, tuple(c.restrict(bundle.names) for c in X.components[:n]))
    along = [bundle.base.coord(k) for k in range(n)] + list(psi.components)
    out = []
    for a, c in enumerate(psi.components):
        fiber_value = X.components[n + a].substitute(along) if along else X.components[n + a]
        out.append(apply_vf(base_field, c) - fiber_value)
    return Section(bundle, tuple(out))
