"""Pseudo-linear operators, twisted derivations and the square-zero algebra C(M) + Gamma(E).

Operators here are finite sums of atoms ``coeff * (d f / d x_v) o phi`` with
``phi`` affine and at most one derivative. Identities are verified by
evaluation on monomials and monomial multiples of frame sections. For this
class that is a complete test: a nonzero operator already acts nonzero on
some monomial of degree two or less, and the default bound is 6.

Over polynomial modules nothing is torsion, so the usual torsion caveat
for twisted derivations never bites and is not checked.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any, Union

from .automorphisms import BundleAutomorphism
from .bundle import DerivativeOp, Section, TrivialBundle
from .errors import BundleMismatch, ChartMismatch, NonConstantDeterminant, ZeroDeterminant
from .geometry import AffineMap, Chart, VectorField, compose_affine
from .report import Check, Report, ReportBuilder, Witness
from .ring import MatrixPoly, Poly, matrix_inverse_if_unimodular

Coeff = Union[Poly, MatrixPoly]


# -- the algebra A(E) ------------------------------------------------------------


@dataclass(frozen=True)
class AlgebraElement:
    """``(f, psi)`` with product ``(f, psi)(g, phi) = (fg, f phi + g psi)``."""

    f: Poly
    psi: Section

    def __post_init__(self) -> None:
        if self.f.variables != self.psi.bundle.names:
            raise ChartMismatch("function and section live on different charts")

    @property
    def bundle(self) -> TrivialBundle:
        return self.psi.bundle

    @classmethod
    def function(cls, E: TrivialBundle, f: Poly) -> AlgebraElement:
        return cls(f, Section.zero(E))

    @classmethod
    def section(cls, psi: Section) -> AlgebraElement:
        return cls(psi.bundle.base.zero(), psi)

    def __add__(self, other: AlgebraElement) -> AlgebraElement:
        return AlgebraElement(self.f + other.f, self.psi + other.psi)

    def __sub__(self, other: AlgebraElement) -> AlgebraElement:
        return AlgebraElement(self.f - other.f, self.psi - other.psi)

    def residuals(self) -> list[Poly]:
        return [self.f, *self.psi.components]

    def is_zero(self) -> bool:
        return self.f.is_zero() and self.psi.is_zero()

    def __str__(self) -> str:
        return f"({self.f}, {self.psi})"


def algebra_product(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    if a.bundle != b.bundle:
        raise BundleMismatch("elements of different algebras")
    return AlgebraElement(a.f * b.f, b.psi.scale(a.f) + a.psi.scale(b.f))


# -- operators -----------------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    coeff: Coeff
    deriv: str | None = None
    pullback: AffineMap | None = None


def _norm_pullback(phi: AffineMap | None) -> AffineMap | None:
    if phi is None or phi.is_identity():
        return None
    return phi


@dataclass(frozen=True)
class AffDiffOperator:
    """Sum of atoms. ``rank=None`` acts on functions, otherwise on sections of that rank."""

    chart: Chart
    atoms: tuple[Atom, ...]
    rank: int | None = None

    def __post_init__(self) -> None:
        merged: dict[tuple[str | None, AffineMap | None], Coeff] = {}
        for atom in self.atoms:
            c = atom.coeff
            if self.rank is None:
                if not isinstance(c, Poly):
                    raise TypeError("function operators need polynomial coefficients")
            elif not isinstance(c, MatrixPoly) or c.shape != (self.rank, self.rank):
                raise TypeError("section operators need rank x rank matrix coefficients")
            if c.variables != self.chart.names:
                raise ChartMismatch("operator coefficient over the wrong chart")
            if atom.deriv is not None and atom.deriv not in self.chart.names:
                raise ChartMismatch(f"unknown derivative variable {atom.deriv!r}")
            if atom.pullback is not None and atom.pullback.dim != self.chart.dim:
                raise ChartMismatch("pullback map of the wrong dimension")
            key = (atom.deriv, _norm_pullback(atom.pullback))
            merged[key] = merged[key] + c if key in merged else c
        atoms = tuple(
            Atom(c, d, p) for (d, p), c in merged.items() if not (c.is_zero() if isinstance(c, MatrixPoly) else c.is_zero())
        )
        object.__setattr__(self, "atoms", atoms)

    # constructors

    @classmethod
    def zero(cls, chart: Chart, rank: int | None = None) -> AffDiffOperator:
        return cls(chart, (), rank)

    @classmethod
    def identity(cls, chart: Chart, rank: int | None = None) -> AffDiffOperator:
        c = chart.one() if rank is None else MatrixPoly.identity(rank, chart.names)
        return cls(chart, (Atom(c),), rank)

    @classmethod
    def multiplication(cls, chart: Chart, c: Coeff, rank: int | None = None) -> AffDiffOperator:
        return cls(chart, (Atom(c),), rank)

    @classmethod
    def pullback(cls, chart: Chart, phi: AffineMap, coeff: Coeff | None = None, rank: int | None = None) -> AffDiffOperator:
        """``f -> coeff * (f o phi)``."""
        if coeff is None:
            coeff = chart.one() if rank is None else MatrixPoly.identity(rank, chart.names)
        return cls(chart, (Atom(coeff, None, phi),), rank)

    @classmethod
    def vector_field(cls, X: VectorField) -> AffDiffOperator:
        return cls(X.chart, tuple(Atom(c, v) for c, v in zip(X.components, X.chart.names) if c))

    @classmethod
    def from_derivative(cls, D: DerivativeOp) -> AffDiffOperator:
        E = D.bundle
        Id = E.identity()
        atoms = [Atom(Id * c, v) for c, v in zip(D.anchor.components, E.names) if c]
        atoms.append(Atom(D.matrix))
        return cls(E.base, tuple(atoms), E.rank)

    @classmethod
    def from_automorphism(cls, nu: BundleAutomorphism) -> tuple[AffDiffOperator, AffDiffOperator]:
        """``(mu, mu^M)``: ``psi -> (g psi) o nu_M^{-1}`` and ``f -> f o nu_M^{-1}``."""
        E = nu.bundle
        inv = nu.base.inverse()
        g = nu.fiber.map(lambda e: compose_affine(e, inv, E.base)) if E.base.dim else nu.fiber
        mu = cls(E.base, (Atom(g, None, inv),), E.rank)
        return mu, cls.pullback(E.base, inv)

    # algebra

    def _same(self, other: AffDiffOperator) -> None:
        if self.chart.names != other.chart.names or self.rank != other.rank:
            raise ChartMismatch("operators act on different spaces")

    def __add__(self, other: AffDiffOperator) -> AffDiffOperator:
        self._same(other)
        return AffDiffOperator(self.chart, self.atoms + other.atoms, self.rank)

    def __neg__(self) -> AffDiffOperator:
        return AffDiffOperator(self.chart, tuple(Atom(-a.coeff, a.deriv, a.pullback) for a in self.atoms), self.rank)

    def __sub__(self, other: AffDiffOperator) -> AffDiffOperator:
        return self + (-other)

    def scale(self, c: Any) -> AffDiffOperator:
        return AffDiffOperator(self.chart, tuple(Atom(a.coeff * c, a.deriv, a.pullback) for a in self.atoms), self.rank)

    @property
    def order(self) -> int:
        return 1 if any(a.deriv is not None for a in self.atoms) else 0

    # action

    def _pull(self, p: Poly, phi: AffineMap | None) -> Poly:
        if phi is None or not self.chart.dim:
            return p
        return compose_affine(p, phi, self.chart)

    def apply_function(self, f: Poly) -> Poly:
        if self.rank is not None:
            raise TypeError("section operator applied to a function")
        total = self.chart.zero()
        for a in self.atoms:
            g = f.partial(a.deriv) if a.deriv else f
            if g:
                total = total + a.coeff * self._pull(g, a.pullback)
        return total

    def apply_section(self, psi: Section) -> Section:
        if self.rank is None:
            raise TypeError("function operator applied to a section")
        if psi.bundle.rank != self.rank or psi.bundle.names != self.chart.names:
            raise BundleMismatch("section of the wrong bundle")
        out = Section.zero(psi.bundle)
        for a in self.atoms:
            comps = [c.partial(a.deriv) if a.deriv else c for c in psi.components]
            comps = [self._pull(c, a.pullback) for c in comps]
            out = out + Section(psi.bundle, a.coeff.apply(comps))
        return out

    def __call__(self, x: Any) -> Any:
        return self.apply_section(x) if isinstance(x, Section) else self.apply_function(x)

    def compose(self, inner: AffDiffOperator) -> AffDiffOperator:
        """``self o inner``; raises when the result would be of second order."""
        self._same(inner)
        out: list[Atom] = []
        for o in self.atoms:
            for i in inner.atoms:
                phi_o = o.pullback or AffineMap.identity(self.chart.dim)
                phi_i = i.pullback or AffineMap.identity(self.chart.dim)
                pulled = _map_coeff(i.coeff, lambda e: self._pull(e, o.pullback))
                new_phi = phi_i.compose(phi_o)
                if o.deriv is None:
                    out.append(Atom(_mul(o.coeff, pulled), i.deriv, new_phi))
                    continue
                # d_v [c' (d_w f o phi')] = (d_v c') (d_w f o phi') + c' sum_j A'_{jv} (d_j d_w f) o phi'
                dc = _map_coeff(i.coeff, lambda e: self._pull(e.partial(o.deriv), o.pullback))
                out.append(Atom(_mul(o.coeff, dc), i.deriv, new_phi))
                v = self.chart.names.index(o.deriv)
                for j, name in enumerate(self.chart.names):
                    a_jv = phi_i.A[j][v]
                    if not a_jv:
                        continue
                    if i.deriv is not None:
                        raise ValueError("composition has second-order terms")
                    out.append(Atom(_mul(o.coeff, pulled) * a_jv, name, new_phi))
        return AffDiffOperator(self.chart, tuple(out), self.rank)

    def commutator(self, other: AffDiffOperator) -> AffDiffOperator:
        return self.compose(other) - other.compose(self)

    def is_invertible(self) -> bool:
        """Sufficient test: a single order-0 atom with unit coefficient."""
        if len(self.atoms) != 1 or self.atoms[0].deriv is not None:
            return False
        c = self.atoms[0].coeff
        if isinstance(c, Poly):
            return c.is_constant() and not c.is_zero()
        try:
            matrix_inverse_if_unimodular(c)
        except (ZeroDeterminant, NonConstantDeterminant):
            return False
        return True


def _map_coeff(c: Coeff, fn) -> Coeff:
    return c.map(fn) if isinstance(c, MatrixPoly) else fn(c)


def _mul(a: Coeff, b: Coeff) -> Coeff:
    if isinstance(a, MatrixPoly) and isinstance(b, MatrixPoly):
        return a @ b
    return a * b


@dataclass(frozen=True)
class AlgebraOperator:
    """``U(f, psi) = (on_functions(f), on_sections(psi))``; ``None`` parts are zero."""

    bundle: TrivialBundle
    on_functions: AffDiffOperator | None = None
    on_sections: AffDiffOperator | None = None

    def __call__(self, a: AlgebraElement) -> AlgebraElement:
        f = self.on_functions(a.f) if self.on_functions else self.bundle.base.zero()
        psi = self.on_sections(a.psi) if self.on_sections else Section.zero(self.bundle)
        return AlgebraElement(f, psi)

    @classmethod
    def identity(cls, E: TrivialBundle) -> AlgebraOperator:
        return cls(E, AffDiffOperator.identity(E.base), AffDiffOperator.identity(E.base, E.rank))


# -- test elements ------------------------------------------------------------------


def _function_probes(chart: Chart, degree_bound: int) -> list[Poly]:
    return chart.monomials(degree_bound)


def algebra_probes(E: TrivialBundle, degree_bound: int) -> list[tuple[int, AlgebraElement, str]]:
    """``(degree, element, label)`` for monomials and monomial multiples of frame sections."""
    out = []
    for m in E.base.monomials(degree_bound):
        d = m.total_degree()
        out.append((d, AlgebraElement.function(E, m), f"({m}, 0)"))
        for b, e in enumerate(E.frame()):
            out.append((d, AlgebraElement.section(e.scale(m)), f"(0, {m}*e{b + 1})"))
    return out


# -- checks ---------------------------------------------------------------------------


def is_twisted_derivation(
    U: AffDiffOperator | AlgebraOperator,
    alpha: AffDiffOperator | AlgebraOperator,
    degree_bound: int = 6,
    left_functions_only: bool = False,
) -> Report:
    """``U(ab) = U(a) b + alpha(a) U(b)`` on probe pairs with total degree within the bound.

    Works on C(M) when given function operators and on A(E) when given
    algebra operators. ``left_functions_only`` restricts ``a`` to C(M).
    """
    rb = ReportBuilder("twisted derivation", stop_at_first=True)
    if isinstance(U, AffDiffOperator):
        probes = [(m.total_degree(), m, str(m)) for m in _function_probes(U.chart, degree_bound)]
        mult = lambda a, b: a * b  # noqa: E731
        res = lambda r: [r]  # noqa: E731
    else:
        probes = algebra_probes(U.bundle, degree_bound)
        mult = algebra_product
        res = lambda r: r.residuals()  # noqa: E731
    for da, a, la in probes:
        if left_functions_only and isinstance(a, AlgebraElement) and not a.psi.is_zero():
            continue
        Ua, alpha_a = U(a), alpha(a)
        for db, b, lb in probes:
            if da + db > degree_bound:
                continue
            r = U(mult(a, b)) - mult(Ua, b) - mult(alpha_a, U(b))
            residuals = res(r)
            if any(residuals):
                rb.zeros("U(ab) = U(a)b + alpha(a)U(b)", residuals, lambda k: "function part" if k == 0 else f"section component {k}", a=la, b=lb)
                return rb.report()
    rb.zeros("U(ab) = U(a)b + alpha(a)U(b)", [])
    return rb.report()


def is_derivation(U: AffDiffOperator | AlgebraOperator, degree_bound: int = 6) -> Report:
    if isinstance(U, AffDiffOperator):
        ident: Any = AffDiffOperator.identity(U.chart)
    else:
        ident = AlgebraOperator.identity(U.bundle)
    return is_twisted_derivation(U, ident, degree_bound)


def is_algebra_morphism(U: AffDiffOperator | AlgebraOperator, degree_bound: int = 6) -> Report:
    """``U(1) = 1`` and ``U(ab) = U(a) U(b)`` on probe pairs."""
    rb = ReportBuilder("algebra morphism", stop_at_first=True)
    if isinstance(U, AffDiffOperator):
        one: Any = U.chart.one()
        probes = [(m.total_degree(), m, str(m)) for m in _function_probes(U.chart, degree_bound)]
        mult = lambda a, b: a * b  # noqa: E731
        res = lambda r: [r]  # noqa: E731
    else:
        one = AlgebraElement.function(U.bundle, U.bundle.base.one())
        probes = algebra_probes(U.bundle, degree_bound)
        mult = algebra_product
        res = lambda r: r.residuals()  # noqa: E731
    rb.zeros("unit preserved", res(U(one) - one))
    if rb.done:
        return rb.report()
    images = {k: U(a) for k, (_, a, _) in enumerate(probes)}
    for i, (da, a, la) in enumerate(probes):
        for j, (db, b, lb) in enumerate(probes):
            if da + db > degree_bound:
                continue
            residuals = res(U(mult(a, b)) - mult(images[i], images[j]))
            if any(residuals):
                rb.zeros("U(ab) = U(a)U(b)", residuals, lambda k: "function part" if k == 0 else f"section component {k}", a=la, b=lb)
                return rb.report()
    rb.zeros("U(ab) = U(a)U(b)", [])
    return rb.report()


def acts_as_identity(op: AffDiffOperator, degree_bound: int = 6) -> bool:
    return all(op(m) == m for m in op.chart.monomials(degree_bound))


def acts_as_zero(op: AffDiffOperator, degree_bound: int = 6) -> bool:
    return all(op(m).is_zero() for m in op.chart.monomials(degree_bound))


def is_pseudo_linear(u: AffDiffOperator, upper: AffDiffOperator, lower: AffDiffOperator, degree_bound: int = 6) -> Report:
    """``u(f psi) = upper(f) u(psi) + lower(f) psi`` on monomials times frame sections.

    On success the report data classifies ``u``: derivative when ``upper``
    is the identity, semi-linear when ``lower`` vanishes and ``u`` is invertible.
    """
    if u.rank is None:
        raise TypeError("pseudo-linearity concerns operators on sections")
    E = TrivialBundle(u.chart, u.rank)
    rb = ReportBuilder("pseudo-linear endomorphism")
    frame = E.frame()
    images = [u(e) for e in frame]
    for f in u.chart.monomials(degree_bound):
        uf, lf = upper(f), lower(f)
        for b, e in enumerate(frame):
            r = u(e.scale(f)) - images[b].scale(uf) - e.scale(lf)
            if not r.is_zero():
                rb.zeros("u(f psi) = u^M(f) u(psi) + u_M(f) psi", r.components, lambda k: f"component {k + 1}", f=str(f), psi=f"e{b + 1}")
                return rb.report()
    rb.zeros("u(f psi) = u^M(f) u(psi) + u_M(f) psi", [])
    kinds = []
    if acts_as_identity(upper, degree_bound):
        kinds.append("derivative")
    if acts_as_zero(lower, degree_bound) and u.is_invertible():
        kinds.append("semi-linear")
    return rb.report(classification=kinds or ["pseudo-linear"])


def _side(name: str, reports: Sequence[Report]) -> Report:
    checks = tuple(c for r in reports for c in r.checks)
    return Report(name, checks)


@dataclass(frozen=True)
class Characterization:
    report: Report
    left: Report
    right: Report

    @property
    def agrees(self) -> bool:
        return self.left.ok == self.right.ok


MODES = ("twisted", "derivation", "automorphism")


def check_characterization(
    mode: str,
    upper: AffDiffOperator | None,
    lower: AffDiffOperator | None,
    u: AffDiffOperator,
    degree_bound: int = 6,
) -> Characterization:
    """Evaluate both sides of an algebra characterization of ``u`` and compare.

    twisted:      lower + u is a twisted derivation of A(E) along upper (left factor from C(M))
                  iff lower is a twisted derivation along upper and u is pseudo-linear.
    derivation:   lower + u is a derivation of A(E)
                  iff lower is a derivation and u is a derivative endomorphism with anchor lower.
    automorphism: upper + u is an algebra automorphism of A(E)
                  iff upper is a ring automorphism and u is semi-linear along upper.
    """
    if u.rank is None:
        raise TypeError("u must act on sections")
    E = TrivialBundle(u.chart, u.rank)
    chart = u.chart
    if mode == "twisted":
        if upper is None or lower is None:
            raise ValueError("twisted mode needs both function operators")
        alpha = AlgebraOperator(E, upper, None)
        left = [is_twisted_derivation(AlgebraOperator(E, lower, u), alpha, degree_bound, left_functions_only=True)]
        right = [is_twisted_derivation(lower, upper, degree_bound), is_pseudo_linear(u, upper, lower, degree_bound)]
    elif mode == "derivation":
        if lower is None:
            raise ValueError("derivation mode needs the function operator")
        ident = AffDiffOperator.identity(chart)
        left = [is_derivation(AlgebraOperator(E, lower, u), degree_bound)]
        right = [is_derivation(lower, degree_bound), is_pseudo_linear(u, ident, lower, degree_bound)]
    elif mode == "automorphism":
        if upper is None:
            raise ValueError("automorphism mode needs the function operator")
        if not (upper.is_invertible() and u.is_invertible()):
            raise ValueError("automorphism mode assumes both maps are invertible")
        left = [is_algebra_morphism(AlgebraOperator(E, upper, u), degree_bound)]
        right = [is_algebra_morphism(upper, degree_bound), is_pseudo_linear(u, upper, AffDiffOperator.zero(chart), degree_bound)]
    else:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    L = _side(f"{mode}: algebra side", left)
    R = _side(f"{mode}: component side", right)
    name = "both sides agree"
    if L.ok == R.ok:
        check = Check(name, True)
    else:
        failing = (L if not L.ok else R).first_failure()
        assert failing is not None and failing.witness is not None
        w = failing.witness
        check = Check(name, False, Witness(w.residual, w.inputs, f"only one side fails: {failing.name}"))
    report = Report(
        f"algebra characterization ({mode})",
        (check,),
        data={"algebra_side": L.status, "component_side": R.status, "verdict": "holds" if L.ok else "fails"},
    )
    return Characterization(report, L, R)


# -- the non-closure example ----------------------------------------------------------


@dataclass(frozen=True)
class NonClosureWitness:
    mu: AffDiffOperator
    mu_functions: AffDiffOperator
    D: AffDiffOperator
    commutator: AffDiffOperator
    candidate_upper: AffDiffOperator
    candidate_lower: AffDiffOperator


def nonclosure_witness() -> NonClosureWitness:
    """Semi-linear ``mu`` and derivative ``D`` on a rank-2 bundle over the line with ``[mu, D]`` not pseudo-linear.

    ``mu`` pulls back by ``x -> x/2`` and swaps the frame; ``D = d/dx``.
    Then ``[mu, D] e1 = 0`` while ``[mu, D](x e1) = e2/2``, which is not a
    multiple of ``e1``, so no pair of function maps can make it pseudo-linear.
    """
    chart = Chart(("x",))
    E = TrivialBundle(chart, 2)
    nu = BundleAutomorphism(E, AffineMap.linear(((2,),)), E.matrix([[0, 1], [1, 0]]))
    mu, mu_f = AffDiffOperator.from_automorphism(nu)
    D = AffDiffOperator.from_derivative(DerivativeOp.of_vector_field(E, VectorField.coordinate(chart, 0)))
    u = mu.commutator(D)
    return NonClosureWitness(mu, mu_f, D, u, mu_f, AffDiffOperator.zero(chart))


def pseudo_linearity_obstruction(u: AffDiffOperator, degree_bound: int = 6) -> Report:
    """Look for a frame section killed by ``u`` whose multiple is sent off its own line.

    If ``u(e_b) = 0`` then pseudo-linearity forces ``u(f e_b) = u_M(f) e_b``; any
    other component of ``u(f e_b)`` rules out every choice of ``(u^M, u_M)``.
    """
    E = TrivialBundle(u.chart, u.rank)
    rb = ReportBuilder("pseudo-linearity obstruction")
    for b, e in enumerate(E.frame()):
        if not u(e).is_zero():
            continue
        for f in u.chart.monomials(degree_bound):
            img = u(e.scale(f))
            off = [c for k, c in enumerate(img.components) if k != b]
            if any(off):
                rb.zeros(
                    "u(f e_b) stays on the line of e_b",
                    off,
                    lambda k, b=b: f"component {k + 1 if k < b else k + 2}",
                    f=str(f),
                    psi=f"e{b + 1}",
                )
                return rb.report()
    rb.zeros("u(f e_b) stays on the line of e_b", [])
    return rb.report()
