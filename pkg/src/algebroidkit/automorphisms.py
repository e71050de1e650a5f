"""Bundle automorphisms, semi-linear isomorphisms and their infinitesimal versions.

Base maps are affine and fiber matrices have constant nonzero determinant,
so every inverse stays polynomial.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any

from gmpy2 import mpq

from .actions import LieAlgebraAction
from .algebroid import lie_algebra
from .bundle import DerivativeOp, LinearVectorField, Section, TrivialBundle
from .errors import (
    BundleMismatch,
    ChartMismatch,
    NonAffineBaseMap,
    NonConstantDeterminant,
    NonInvertibleFiberData,
    ZeroDeterminant,
)
from .geometry import AffineMap, Chart, VectorField, compose_affine
from .report import Report, ReportBuilder
from .ring import DualPoly, MatrixPoly, Poly, as_scalar, matrix_inverse_if_unimodular


@dataclass(frozen=True)
class BundleAutomorphism:
    """``nu(x, v) = (A x + b, g(x) v)``."""

    bundle: TrivialBundle
    base: AffineMap
    fiber: MatrixPoly

    def __post_init__(self) -> None:
        E = self.bundle
        if self.base.dim != E.base.dim:
            raise ChartMismatch("base map dimension differs from the base chart")
        if self.fiber.shape != (E.rank, E.rank) or self.fiber.variables != E.names:
            raise BundleMismatch("fiber matrix has the wrong shape or chart")
        self.base.inverse()
        matrix_inverse_if_unimodular(self.fiber)

    @classmethod
    def identity(cls, E: TrivialBundle) -> BundleAutomorphism:
        return cls(E, AffineMap.identity(E.base.dim), E.identity())

    def base_polys(self) -> tuple[Poly, ...]:
        return self.base.as_polys(self.bundle.base)

    def compose(self, inner: BundleAutomorphism) -> BundleAutomorphism:
        """``self o inner``: fiber ``g_self(A_inner x + b_inner) g_inner(x)``."""
        if inner.bundle != self.bundle:
            raise BundleMismatch("cannot compose automorphisms of different bundles")
        g = _pull_matrix(self.fiber, inner.base, self.bundle.base) @ inner.fiber
        return BundleAutomorphism(self.bundle, self.base.compose(inner.base), g)

    def inverse(self) -> BundleAutomorphism:
        inv = self.base.inverse()
        g = matrix_inverse_if_unimodular(_pull_matrix(self.fiber, inv, self.bundle.base))
        return BundleAutomorphism(self.bundle, inv, g)

    def is_identity(self) -> bool:
        return self.base.is_identity() and self.fiber.is_identity()

    def identity_residuals(self) -> list[Poly]:
        chart = self.bundle.base
        base = [p - x for p, x in zip(self.base_polys(), chart.coords())]
        fib = self.fiber - self.bundle.identity()
        return base + [e for row in fib.entries for e in row]


def _pull_matrix(m: MatrixPoly, phi: AffineMap, chart: Chart) -> MatrixPoly:
    if phi.dim == 0:
        return m
    return m.map(lambda e: compose_affine(e, phi, chart))


def act_on_section(nu: BundleAutomorphism, psi: Section) -> Section:
    """``(nu . psi)(x) = g(y) psi(y)`` with ``y = nu_M^{-1}(x)``."""
    if psi.bundle != nu.bundle:
        raise BundleMismatch("section belongs to another bundle")
    chart = nu.bundle.base
    inv = nu.base.inverse()
    pulled = [compose_affine(c, inv, chart) if chart.dim else c for c in psi.components]
    g = _pull_matrix(nu.fiber, inv, chart)
    return Section(nu.bundle, g.apply(pulled))


@dataclass(frozen=True)
class SemiLinearIso:
    """A map on sections with its companion map on functions.

    The two callables are the whole data. ``source`` records the automorphism
    the map came from, when there is one.
    """

    bundle: TrivialBundle
    on_sections: Callable[[Section], Section]
    on_functions: Callable[[Poly], Poly]
    source: BundleAutomorphism | None = field(default=None, compare=False)

    def __call__(self, psi: Section) -> Section:
        return self.on_sections(psi)

    @classmethod
    def from_automorphism(cls, nu: BundleAutomorphism) -> SemiLinearIso:
        inv = nu.base.inverse()
        chart = nu.bundle.base

        def on_functions(f: Poly) -> Poly:
            return compose_affine(f, inv, chart) if chart.dim else f

        return cls(nu.bundle, lambda psi: act_on_section(nu, psi), on_functions, nu)

    @classmethod
    def from_data(cls, E: TrivialBundle, frame_images: MatrixPoly, pullback: AffineMap) -> SemiLinearIso:
        """``psi -> G (psi o phi)`` and ``f -> f o phi``; column b of G is the image of e_b."""
        chart = E.base

        def on_functions(f: Poly) -> Poly:
            return compose_affine(f, pullback, chart) if chart.dim else f

        def on_sections(psi: Section) -> Section:
            return Section(E, frame_images.apply([on_functions(c) for c in psi.components]))

        return cls(E, on_sections, on_functions)

    def compose(self, inner: SemiLinearIso) -> SemiLinearIso:
        if inner.bundle != self.bundle:
            raise BundleMismatch("cannot compose maps on different bundles")
        src = self.source.compose(inner.source) if self.source and inner.source else None
        return SemiLinearIso(
            self.bundle,
            lambda psi: self.on_sections(inner.on_sections(psi)),
            lambda f: self.on_functions(inner.on_functions(f)),
            src,
        )


def probe_pairs(E: TrivialBundle, degree_bound: int) -> list[tuple[Poly, int]]:
    return [(m, b) for m in E.base.monomials(degree_bound) for b in range(E.rank)]


def ring_morphism_residuals(fn: Callable[[Poly], Poly], chart: Chart, degree_bound: int) -> list[tuple[str, Poly]]:
    """Residuals of ``fn(1) = 1`` and ``fn(x_i m) = fn(x_i) fn(m)`` on monomials.

    Together with linearity these generate every product relation.
    """
    out = [("unit", fn(chart.one()) - chart.one())]
    images = [fn(x) for x in chart.coords()]
    for m in chart.monomials(max(degree_bound - 1, 0)):
        fm = fn(m)
        for name, x, fx in zip(chart.names, chart.coords(), images):
            out.append((f"{name}*{m}", fn(x * m) - fx * fm))
    return out


def check_semilinear(mu: SemiLinearIso, degree_bound: int = 6) -> Report:
    """``mu(f psi) = mu^M(f) mu(psi)`` on monomials times frame sections, plus ring morphism of mu^M."""
    E = mu.bundle
    rb = ReportBuilder("semi-linear isomorphism")
    frame = E.frame()
    images = [mu(e) for e in frame]
    first_bad = None
    for f, b in probe_pairs(E, degree_bound):
        lhs = mu(frame[b].scale(f))
        rhs = images[b].scale(mu.on_functions(f))
        diff = lhs - rhs
        if not diff.is_zero():
            first_bad = (f, b, diff)
            break
    if first_bad is None:
        rb.zeros("mu(f psi) = mu^M(f) mu(psi)", [])
    else:
        f, b, diff = first_bad
        rb.zeros("mu(f psi) = mu^M(f) mu(psi)", diff.components, lambda k: f"component {k + 1}", f=str(f), psi=f"e{b + 1}")
    bad = [(label, r) for label, r in ring_morphism_residuals(mu.on_functions, E.base, degree_bound) if r]
    if bad:
        label, r = bad[0]
        rb.zero("mu^M is a ring morphism", r, product=label)
    else:
        rb.zeros("mu^M is a ring morphism", [])
    return rb.report()


def automorphism_from_semilinear(mu: SemiLinearIso) -> BundleAutomorphism:
    """Recover ``nu`` from ``mu``: ``nu_M^{-1}`` from ``mu^M`` on coordinates, ``g`` from frame images."""
    E = mu.bundle
    chart = E.base
    inv_polys = [mu.on_functions(x) for x in chart.coords()]
    inv = AffineMap.from_polys(inv_polys) if chart.dim else AffineMap.identity(0)
    if inv is None:
        raise NonAffineBaseMap("mu^M is not the pullback by an affine map")
    try:
        base = inv.inverse()
    except (ZeroDeterminant, NonConstantDeterminant) as exc:
        raise NonAffineBaseMap("the affine map under mu^M is not invertible") from exc
    cols = [mu(e).components for e in E.frame()]
    G = MatrixPoly(E.names, tuple(zip(*cols)))
    g = _pull_matrix(G, base, chart)
    try:
        matrix_inverse_if_unimodular(g)
    except (ZeroDeterminant, NonConstantDeterminant) as exc:
        raise NonInvertibleFiberData(str(exc)) from exc
    return BundleAutomorphism(E, base, g)


def same_action(mu1: SemiLinearIso, mu2: SemiLinearIso, degree_bound: int = 6) -> Report:
    """Compare two maps on monomial multiples of frame sections and on monomials."""
    E = mu1.bundle
    rb = ReportBuilder("same semi-linear map")
    frame = E.frame()
    for f, b in probe_pairs(E, degree_bound):
        d = mu1(frame[b].scale(f)) - mu2(frame[b].scale(f))
        if not d.is_zero():
            rb.zeros("sections", d.components, f=str(f), psi=f"e{b + 1}")
            break
    for f in E.base.monomials(degree_bound):
        d = mu1.on_functions(f) - mu2.on_functions(f)
        if d:
            rb.zero("functions", d, f=str(f))
            break
    return rb.report()


# -- first-order families ----------------------------------------------------------


@dataclass(frozen=True)
class DualAutomorphismFamily:
    """``nu_eps(x, v) = ((I + eps A1) x + eps b1, (I + eps B(x)) v)`` modulo eps^2."""

    bundle: TrivialBundle
    A1: tuple[tuple[Any, ...], ...]
    b1: tuple[Any, ...]
    B: MatrixPoly

    def __post_init__(self) -> None:
        n = self.bundle.base.dim
        A1 = tuple(tuple(mpq(as_scalar(x)) for x in row) for row in self.A1)
        b1 = tuple(mpq(as_scalar(x)) for x in self.b1)
        if len(A1) != n or any(len(r) != n for r in A1) or len(b1) != n:
            raise ValueError("family base data has the wrong size")
        if self.B.shape != (self.bundle.rank, self.bundle.rank) or self.B.variables != self.bundle.names:
            raise BundleMismatch("family fiber matrix has the wrong shape or chart")
        object.__setattr__(self, "A1", A1)
        object.__setattr__(self, "b1", b1)

    def base_field(self) -> VectorField:
        """``X_M = A1 x + b1``, the velocity of the base maps at eps = 0."""
        chart = self.bundle.base
        return VectorField(chart, AffineMap(self.A1, self.b1).as_polys(chart))

    def generator(self) -> LinearVectorField:
        """The eps-derivative of ``nu_eps`` on the total space, read off with dual numbers."""
        E = self.bundle
        total = E.total_chart()
        xs = [DualPoly.lift(Poly.variable(total.names, v)) for v in total.names]
        images = self._total_images(xs)
        comps = tuple(im.a1 for im in images)
        field_total = VectorField(total, comps)
        return LinearVectorField.from_total_field(E, field_total)

    def _total_images(self, xs: Sequence[DualPoly]) -> list[DualPoly]:
        E = self.bundle
        n = E.base.dim
        names = xs[0].a0.variables
        eps = DualPoly.epsilon(names)
        out = []
        for i in range(n):
            acc = xs[i] + eps * Poly.constant(names, self.b1[i])
            for j in range(n):
                if self.A1[i][j]:
                    acc = acc + eps * xs[j] * Poly.constant(names, self.A1[i][j])
            out.append(acc)
        B = self.B.embed(names)
        for a in range(E.rank):
            acc = xs[n + a]
            for b in range(E.rank):
                if B[a, b]:
                    acc = acc + eps * B[a, b] * xs[n + b]
            out.append(acc)
        return out


def family_action(fam: DualAutomorphismFamily, psi: Section) -> tuple[DualPoly, ...]:
    """``nu_eps . psi`` to first order: ``g(y, eps) psi(y)`` with ``y = x - eps (A1 x + b1)``."""
    E = fam.bundle
    chart = E.base
    names = chart.names
    eps = DualPoly.epsilon(names)
    xs = [DualPoly.lift(x) for x in chart.coords()]
    X = fam.base_field()
    # inverse of the base map mod eps^2
    y = [x - eps * c for x, c in zip(xs, X.components)]
    one = DualPoly.lift(chart.one())
    pulled = [c.substitute(y, one=one) if chart.dim else DualPoly.lift(c) for c in psi.components]
    B_at_y = [[(e.substitute(y, one=one) if chart.dim else DualPoly.lift(e)) for e in row] for row in fam.B.entries]
    out = []
    for a in range(E.rank):
        acc = pulled[a]
        for b in range(E.rank):
            acc = acc + eps * B_at_y[a][b] * pulled[b]
        out.append(acc)
    return tuple(out)


def differentiate_family(fam: DualAutomorphismFamily) -> DerivativeOp:
    """The eps-coefficient of ``psi -> nu_eps . psi`` as a derivative endomorphism.

    Read off by probing: frame sections give the matrix part, and
    ``x_i e_1`` gives the anchor after removing the matrix contribution.
    """
    E = fam.bundle
    chart = E.base
    cols = []
    for e in E.frame():
        cols.append(tuple(d.a1 for d in family_action(fam, e)))
    u = MatrixPoly(E.names, tuple(zip(*cols)))
    anchor = []
    e1 = E.frame()[0]
    for x in chart.coords():
        d = family_action(fam, e1.scale(x))[0].a1
        anchor.append(d - x * u[0, 0])
    return DerivativeOp(E, VectorField(chart, tuple(anchor)), u)


# -- the algebra of an affine action -----------------------------------------------


def affine_bracket(g1: AffineMap, g2: AffineMap) -> AffineMap:
    """Bracket of affine algebra elements: ``([A1, A2], A1 b2 - A2 b1)``."""
    n = g1.dim
    A = tuple(
        tuple(sum((g1.A[i][k] * g2.A[k][j] - g2.A[i][k] * g1.A[k][j] for k in range(n)), mpq(0)) for j in range(n))
        for i in range(n)
    )
    b = tuple(
        sum((g1.A[i][k] * g2.b[k] - g2.A[i][k] * g1.b[k] for k in range(n)), mpq(0)) for i in range(n)
    )
    return AffineMap(A, b)


def _flatten(g: AffineMap) -> list[Any]:
    return [x for row in g.A for x in row] + list(g.b)


def infinitesimal_action_from_generators(chart: Chart, generators: Sequence[AffineMap]) -> LieAlgebraAction:
    """Lie algebra action from a basis of affine generators ``x -> A x + b``.

    The generator xi is the eps-derivative of ``x -> x + eps (A x + b)``.
    Its fundamental field is ``-(A x + b)``: a left action by pullback moves
    functions against the flow, and with this sign xi -> field is bracket
    preserving. Structure constants come from solving the span equations.
    """
    import sympy

    d = len(generators)
    basis = sympy.Matrix([[sympy.Rational(str(x)) for x in _flatten(g)] for g in generators]).T
    if basis.rank() != d:
        raise ValueError("affine generators are linearly dependent")
    structure: dict[tuple[int, int, int], Any] = {}
    for a in range(d):
        for b in range(a + 1, d):
            br = affine_bracket(generators[a], generators[b])
            target = sympy.Matrix([sympy.Rational(str(x)) for x in _flatten(br)])
            try:
                sol, params = basis.gauss_jordan_solve(target)
            except ValueError:
                raise ValueError(f"bracket of generators {a + 1} and {b + 1} leaves their span") from None
            if params.shape[0]:
                raise ValueError("unexpected free parameters in the structure solve")
            for g in range(d):
                c = sol[g]
                if c != 0:
                    structure[(a, b, g)] = mpq(int(c.p), int(c.q))
    fields = [-VectorField(chart, g.as_polys(chart)) for g in generators]
    return LieAlgebraAction(lie_algebra(d, structure, chart.field), chart, fields)
