"""Derivative representations, algebroid representations and prequantization."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

from .actions import (
    AlgebroidAction,
    LieAlgebraAction,
    action_algebroid_algebra,
    action_algebroid_fibered,
    check_algebra_action,
    check_algebroid_action,
)
from .algebroid import AConnection, check_aconnection_flat
from .bundle import Connection, DerivativeOp, TrivialBundle, commutator, curvature
from .errors import (
    ChartMismatch,
    CheckFailed,
    CurvatureMismatch,
    DegenerateForm,
    MomentMapMismatch,
    NotActionAlgebroid,
    NotFlat,
    PoissonBracketMismatch,
    ProvenanceMismatch,
)
from .geometry import Chart, VectorField, apply_vf
from .report import Report, ReportBuilder
from .ring import I, MatrixPoly, Poly, as_scalar, matrix_inverse_if_unimodular


def _op_residuals(D: DerivativeOp) -> list[Poly]:
    return list(D.anchor.components) + [e for row in D.matrix.entries for e in row]


def _op_detail(D: DerivativeOp):
    n = D.bundle.base.dim
    k = D.bundle.rank
    names = D.bundle.names

    def detail(m: int) -> str:
        if m < n:
            return f"anchor d/d{names[m]} component"
        m -= n
        return f"matrix entry ({m // k + 1},{m % k + 1})"

    return detail


def _frame_combination(ops: Sequence[DerivativeOp], coeffs: Sequence[Any], bundle: TrivialBundle) -> DerivativeOp:
    total = DerivativeOp.zero(bundle)
    for c, D in zip(coeffs, ops):
        if c:
            total = total + D.scale(c)
    return total


@dataclass(frozen=True)
class DerivativeRep:
    """Basis element ``e_a`` of g acts on sections of E by ``ops[a]``."""

    action: LieAlgebraAction
    bundle: TrivialBundle
    ops: tuple[DerivativeOp, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "ops", tuple(self.ops))
        if len(self.ops) != self.action.dim:
            raise ValueError("one operator per basis element is required")
        if self.bundle.names != self.action.chart.names:
            raise ChartMismatch("bundle base differs from the acted-on chart")


def check_drep(rho: DerivativeRep) -> Report:
    rb = ReportBuilder("derivative representation")
    act = rho.action
    for a, (D, X) in enumerate(zip(rho.ops, act.fundamental)):
        rb.zeros(
            f"anchor of rho(e{a + 1})",
            [x - y for x, y in zip(D.anchor.components, X.components)],
            lambda k: f"d/d{act.chart.names[k]} component",
            alpha=a + 1,
        )
    d = act.dim
    for a in range(d):
        for b in range(a + 1, d):
            rhs = _frame_combination(rho.ops, [act.constant(a, b, g) for g in range(d)], rho.bundle)
            diff = commutator(rho.ops[a], rho.ops[b]) - rhs
            rb.zeros(
                f"bracket morphism on (e{a + 1}, e{b + 1})",
                _op_residuals(diff),
                _op_detail(diff),
                alpha=a + 1,
                beta=b + 1,
            )
    return rb.report()


@dataclass(frozen=True)
class AlgebroidRep:
    """A flat A-connection; flatness is verified on construction."""

    connection: AConnection

    def __post_init__(self) -> None:
        rep = check_aconnection_flat(self.connection)
        if not rep.ok:
            raise NotFlat(rep)

    @property
    def algebroid(self):
        return self.connection.algebroid

    @property
    def ops(self) -> tuple[DerivativeOp, ...]:
        return self.connection.ops


def drep_to_rep(rho: DerivativeRep) -> AlgebroidRep:
    """Derivative representation of g on E -> representation of g x M on E."""
    rep = check_drep(rho)
    if not rep.ok:
        raise CheckFailed(rep)
    A = action_algebroid_algebra(rho.action)
    return AlgebroidRep(AConnection(A, rho.bundle, rho.ops))


def rep_to_drep(sigma: AlgebroidRep) -> DerivativeRep:
    act = sigma.algebroid.origin
    if not isinstance(act, LieAlgebraAction):
        raise NotActionAlgebroid("representation is not over an action algebroid of a Lie algebra action")
    return DerivativeRep(act, sigma.connection.bundle, sigma.ops)


@dataclass(frozen=True)
class AlgebroidDerivativeRep:
    """Derivative representation of an algebroid A over M on a bundle E over F."""

    action: AlgebroidAction
    bundle: TrivialBundle
    ops: tuple[DerivativeOp, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "ops", tuple(self.ops))
        if len(self.ops) != self.action.algebroid.rank:
            raise ValueError("one operator per frame section is required")
        if self.bundle.names != self.action.total.names:
            raise ChartMismatch("bundle must live over the total chart of the fibration")

    def evaluate(self, X: Sequence[Poly]) -> DerivativeOp:
        """``rho(X) = sum (X^a o phi) rho(e_a)`` for a section X of A over M."""
        F = self.action.fibered
        return _frame_combination(self.ops, [F.pullback(x) for x in X], self.bundle)


def check_algebroid_drep(rho: AlgebroidDerivativeRep) -> Report:
    act = rho.action
    rb = ReportBuilder("algebroid derivative representation")
    base = check_algebroid_action(act)
    for c in base.checks:
        rb.add(c)
    total = act.total
    for a, (D, L) in enumerate(zip(rho.ops, act.lifted)):
        rb.zeros(
            f"anchor of rho(e{a + 1}) equals (e{a + 1})_F",
            [x - y for x, y in zip(D.anchor.components, L.components)],
            lambda k: f"d/d{total.names[k]} component",
            alpha=a + 1,
        )
    A = act.algebroid
    for a in range(A.rank):
        for b in range(a + 1, A.rank):
            diff = commutator(rho.ops[a], rho.ops[b]) - rho.evaluate(A.structure[a][b])
            rb.zeros(
                f"bracket morphism on (e{a + 1}, e{b + 1})",
                _op_residuals(diff),
                _op_detail(diff),
                alpha=a + 1,
                beta=b + 1,
            )
    return rb.report()


def drepoid_to_rep(rho: AlgebroidDerivativeRep) -> AlgebroidRep:
    """Representation of the pullback algebroid: ``sigma(h e_a) = h rho(e_a)``."""
    rep = check_algebroid_drep(rho)
    if not rep.ok:
        raise CheckFailed(rep)
    A = action_algebroid_fibered(rho.action)
    return AlgebroidRep(AConnection(A, rho.bundle, rho.ops))


def rep_to_drepoid(sigma: AlgebroidRep) -> AlgebroidDerivativeRep:
    """Inverse of :func:`drepoid_to_rep`: ``rho(X) = sigma(X o phi)``."""
    act = sigma.algebroid.origin
    if not isinstance(act, AlgebroidAction):
        raise ProvenanceMismatch("representation is not over a pullback action algebroid")
    return AlgebroidDerivativeRep(act, sigma.connection.bundle, sigma.ops)


# -- Hamiltonian mechanics and prequantization ----------------------------------


@dataclass(frozen=True)
class SymplecticForm:
    """Constant 2-form ``omega = sum_{i<j} w[i][j] dx_i ^ dx_j``."""

    chart: Chart
    matrix: tuple[tuple[Any, ...], ...]

    def __post_init__(self) -> None:
        m = tuple(tuple(as_scalar(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        n = self.chart.dim
        if len(m) != n or any(len(r) != n for r in m):
            raise ValueError("form matrix must be square of chart dimension")
        for i in range(n):
            for j in range(n):
                if m[i][j] != -m[j][i]:
                    raise ValueError("form matrix must be antisymmetric")
        if n == 0 or n % 2:
            raise DegenerateForm("a symplectic form needs an even positive dimension")
        det = MatrixPoly.build((), m).det()
        if det.is_zero():
            raise DegenerateForm("form matrix is singular")

    @classmethod
    def standard(cls, chart: Chart) -> SymplecticForm:
        """``sum dx_k ^ dx_{k+n}``; for two coordinates this is ``dx ^ dy``."""
        n = chart.dim // 2
        m = [[0] * chart.dim for _ in range(chart.dim)]
        for k in range(n):
            m[k][k + n] = 1
            m[k + n][k] = -1
        return cls(chart, tuple(tuple(r) for r in m))

    def inverse_transpose(self) -> MatrixPoly:
        return matrix_inverse_if_unimodular(MatrixPoly.build((), self.matrix).transpose())


def hamiltonian_vf(omega: SymplecticForm, f: Poly) -> VectorField:
    """The field X_f with ``i_{X_f} omega = df``."""
    chart = omega.chart
    if f.variables != chart.names:
        raise ChartMismatch("function over the wrong chart")
    inv = omega.inverse_transpose()
    grad = [f.partial(v) for v in chart.names]
    comps = []
    for i in range(chart.dim):
        c = chart.zero()
        for j in range(chart.dim):
            w = inv[i, j].constant_value()
            if w and grad[j]:
                c = c + grad[j] * w
        comps.append(c)
    return VectorField(chart, tuple(comps))


def poisson(omega: SymplecticForm, f: Poly, g: Poly) -> Poly:
    """``{f, g} = X_f(g)``."""
    return apply_vf(hamiltonian_vf(omega, f), g)


def contract(alpha: Sequence[Poly], X: VectorField) -> Poly:
    total = X.chart.zero()
    for a, x in zip(alpha, X.components):
        if a and x:
            total = total + a * x
    return total


@dataclass(frozen=True)
class Prequantization:
    """Rank-one connection ``nabla_X = X + alpha(X)`` whose curvature is ``-i omega``."""

    omega: SymplecticForm
    alpha: tuple[Poly, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", tuple(self.alpha))
        if self.omega.chart.field != "gaussian":
            raise ValueError("prequantization needs the gaussian scalar field")
        if len(self.alpha) != self.omega.chart.dim:
            raise ValueError("connection form needs one component per coordinate")
        rep = prequantization_curvature_report(self.omega, self.alpha)
        if not rep.ok:
            raise CurvatureMismatch(rep)

    @property
    def bundle(self) -> TrivialBundle:
        return TrivialBundle(self.omega.chart, 1)

    @property
    def connection(self) -> Connection:
        E = self.bundle
        return Connection(E, tuple(MatrixPoly(E.names, ((a,),)) for a in self.alpha))

    def __call__(self, f: Poly) -> DerivativeOp:
        """``delta(f) = nabla_{X_f} + i f``, i.e. ``(X_f, alpha(X_f) + i f)``."""
        Xf = hamiltonian_vf(self.omega, f)
        E = self.bundle
        u = contract(self.alpha, Xf) + f * I
        return DerivativeOp(E, Xf, MatrixPoly(E.names, ((u,),)))


def prequantization_curvature_report(omega: SymplecticForm, alpha: Sequence[Poly]) -> Report:
    """Checks ``d alpha = i omega`` and, independently, ``R = -i omega`` through the bundle curvature."""
    rb = ReportBuilder("prequantization curvature")
    chart = omega.chart
    E = TrivialBundle(chart, 1)
    nabla = Connection(E, tuple(MatrixPoly(E.names, ((a,),)) for a in alpha))
    for i in range(chart.dim):
        for j in range(i + 1, chart.dim):
            xi, xj = chart.names[i], chart.names[j]
            w = omega.matrix[i][j]
            d_alpha = alpha[j].partial(xi) - alpha[i].partial(xj)
            rb.zero(f"d alpha = i omega on ({xi}, {xj})", d_alpha - chart.const(I * w), i=xi, j=xj)
            R = curvature(nabla, VectorField.coordinate(chart, i), VectorField.coordinate(chart, j))
            rb.zero(f"curvature = -i omega on ({xi}, {xj})", R.matrix[0, 0] + chart.const(I * w), i=xi, j=xj)
    return rb.report()


def prequantize(omega: SymplecticForm, alpha: Sequence[Poly], f: Poly) -> DerivativeOp:
    return Prequantization(omega, tuple(alpha))(f)


def hamiltonian_action_rep(
    act: LieAlgebraAction, J: Sequence[Poly], omega: SymplecticForm, alpha: Sequence[Poly]
) -> DerivativeRep:
    """``rho = delta o J`` for a bracket-preserving moment map J."""
    if act.chart.names != omega.chart.names:
        raise ChartMismatch("action and form live on different charts")
    if len(J) != act.dim:
        raise ValueError("moment map needs one function per basis element")
    delta = Prequantization(omega, tuple(alpha))
    act_rep = check_algebra_action(act)
    if not act_rep.ok:
        raise CheckFailed(act_rep)
    mm = ReportBuilder("moment map")
    for a, (j, X) in enumerate(zip(J, act.fundamental)):
        XJ = hamiltonian_vf(omega, j)
        mm.zeros(
            f"X_J(e{a + 1}) equals (e{a + 1})_M",
            [p - q for p, q in zip(XJ.components, X.components)],
            lambda k: f"d/d{omega.chart.names[k]} component",
            alpha=a + 1,
        )
    rep = mm.report()
    if not rep.ok:
        raise MomentMapMismatch(rep)
    pb = ReportBuilder("moment map poisson brackets")
    d = act.dim
    for a in range(d):
        for b in range(a + 1, d):
            rhs = omega.chart.zero()
            for g in range(d):
                c = act.constant(a, b, g)
                if c:
                    rhs = rhs + J[g] * c
            pb.zero(f"{{J(e{a + 1}), J(e{b + 1})}} = J([e{a + 1}, e{b + 1}])", poisson(omega, J[a], J[b]) - rhs, alpha=a + 1, beta=b + 1)
    rep = pb.report()
    if not rep.ok:
        raise PoissonBracketMismatch(rep)
    rho = DerivativeRep(act, delta.bundle, tuple(delta(j) for j in J))
    final = check_drep(rho)
    if not final.ok:
        raise CheckFailed(final)
    return rho
