"""Infinitesimal actions and the action algebroids they produce.

Two flavours: a Lie algebra acting on a chart M by fundamental vector
fields, and an algebroid over M acting on a fibered chart F -> M by lifted
fields. Actions are specified on the frame only; the extension to all
sections is C(M)-linear by definition, so it is never checked.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from .algebroid import LieAlgebroid, bracket_sections, check_axioms
from .errors import ChartMismatch, CheckFailed
from .geometry import Chart, FiberedChart, VectorField, apply_vf, lie_bracket
from .report import Report, ReportBuilder
from .ring import MatrixPoly, Poly


@dataclass(frozen=True)
class LieAlgebraAction:
    algebra: LieAlgebroid
    chart: Chart
    fundamental: tuple[VectorField, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "fundamental", tuple(self.fundamental))
        if self.algebra.base.dim != 0:
            raise ValueError("the acting algebra must live over the one-point chart")
        if len(self.fundamental) != self.algebra.rank:
            raise ValueError("one fundamental field per basis element is required")
        for X in self.fundamental:
            if X.chart.names != self.chart.names:
                raise ChartMismatch("fundamental field over the wrong chart")

    @property
    def dim(self) -> int:
        return self.algebra.rank

    def constant(self, a: int, b: int, g: int):
        return self.algebra.c(a, b, g).constant_value()


def check_algebra_action(act: LieAlgebraAction) -> Report:
    """``[X_a, X_b] = sum_g c^g_ab X_g`` on basis pairs."""
    rb = ReportBuilder("lie algebra action")
    d = act.dim
    for a in range(d):
        for b in range(a + 1, d):
            rhs = VectorField.zero(act.chart)
            for g in range(d):
                c = act.constant(a, b, g)
                if c:
                    rhs = rhs + act.fundamental[g].scale(c)
            diff = lie_bracket(act.fundamental[a], act.fundamental[b]) - rhs
            rb.zeros(
                f"bracket preservation on (e{a + 1}, e{b + 1})",
                diff.components,
                lambda k: f"d/d{act.chart.names[k]} component",
                alpha=a + 1,
                beta=b + 1,
            )
    return rb.report()


def action_algebroid_algebra(act: LieAlgebraAction) -> LieAlgebroid:
    """``g x M`` with anchor the fundamental fields and constant structure functions."""
    rep = check_algebra_action(act)
    if not rep.ok:
        raise CheckFailed(rep)
    entries = {k: v.constant_value() for k, v in act.algebra.nonzero_structure().items()}
    return LieAlgebroid.build(act.chart, act.fundamental, entries, origin=act)


def direct_action_bracket(act: LieAlgebraAction, V: Sequence[Poly], W: Sequence[Poly]) -> tuple[Poly, ...]:
    """Bracket of g-valued maps evaluated straight from the action.

    ``[V, W] = V_M(W) - W_M(V) + [V, W]_pointwise``. The pointwise algebra
    bracket goes through adjoint matrices, not the structure tensor loop,
    so this serves as an independent check of :func:`bracket_sections`.
    """
    d = act.dim
    names = act.chart.names
    VM = VectorField.zero(act.chart)
    WM = VectorField.zero(act.chart)
    for a in range(d):
        VM = VM + act.fundamental[a].scale(V[a])
        WM = WM + act.fundamental[a].scale(W[a])
    ad_V = MatrixPoly.zeros(d, d, names)
    for a in range(d):
        if not V[a]:
            continue
        ad = MatrixPoly.build(names, [[act.constant(a, b, g) for b in range(d)] for g in range(d)])
        ad_V = ad_V + ad * V[a]
    pointwise = ad_V.apply(tuple(W))
    return tuple(apply_vf(VM, w) - apply_vf(WM, v) + p for v, w, p in zip(V, W, pointwise))


@dataclass(frozen=True)
class AlgebroidAction:
    algebroid: LieAlgebroid
    fibered: FiberedChart
    lifted: tuple[VectorField, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "lifted", tuple(self.lifted))
        if self.fibered.base.names != self.algebroid.base.names:
            raise ChartMismatch("fibration base differs from the algebroid base")
        if len(self.lifted) != self.algebroid.rank:
            raise ValueError("one lifted field per frame section is required")
        total = self.fibered.total
        for X in self.lifted:
            if X.chart.names != total.names:
                raise ChartMismatch("lifted field must live on the total chart")

    @property
    def total(self) -> Chart:
        return self.fibered.total

    def lift_section(self, X: Sequence[Poly]) -> VectorField:
        """``X_F = sum (X^a o phi) (e_a)_F`` for a section X of A."""
        out = VectorField.zero(self.total)
        for x, L in zip(X, self.lifted):
            if x:
                out = out + L.scale(self.fibered.pullback(x))
        return out


def check_algebroid_action(act: AlgebroidAction) -> Report:
    rb = ReportBuilder("lie algebroid action")
    A, F = act.algebroid, act.fibered
    total = F.total
    for a, L in enumerate(act.lifted):
        # residual vanishes iff the base part is basic and equals a(e_a)
        residuals = [L.components[k] - F.pullback(A.anchor[a].components[k]) for k in range(F.base.dim)]
        rb.zeros(f"projectable (e{a + 1})_F", residuals, lambda k: f"d/d{F.base.names[k]} component", alpha=a + 1)
    for a in range(A.rank):
        for b in range(a + 1, A.rank):
            rhs = VectorField.zero(total)
            for g in range(A.rank):
                c = A.c(a, b, g)
                if c:
                    rhs = rhs + act.lifted[g].scale(F.pullback(c))
            diff = lie_bracket(act.lifted[a], act.lifted[b]) - rhs
            rb.zeros(
                f"bracket preservation on (e{a + 1}, e{b + 1})",
                diff.components,
                lambda k: f"d/d{total.names[k]} component",
                alpha=a + 1,
                beta=b + 1,
            )
    return rb.report()


def action_algebroid_fibered(act: AlgebroidAction) -> LieAlgebroid:
    """The pullback algebroid over F: anchor ``(e_a)_F``, structure ``c o phi``."""
    rep = check_algebroid_action(act)
    if not rep.ok:
        raise CheckFailed(rep)
    if not act.algebroid.certified:
        raise CheckFailed(check_axioms(act.algebroid))
    entries = {k: act.fibered.pullback(v) for k, v in act.algebroid.nonzero_structure().items()}
    return LieAlgebroid.build(act.total, act.lifted, entries, origin=act)


def direct_pullback_bracket(
    act: AlgebroidAction, h: Poly, X: Sequence[Poly], k: Poly, Y: Sequence[Poly]
) -> tuple[Poly, ...]:
    """``[h(x)X, k(x)Y] = hk[X,Y] + h X_F(k) Y - k Y_F(h) X`` evaluated directly.

    ``h, k`` are functions on F and ``X, Y`` sections of A over M. The bracket
    ``[X, Y]`` is taken in A over M and then pulled back.
    """
    F = act.fibered
    XY = bracket_sections(act.algebroid, X, Y)
    XF, YF = act.lift_section(X), act.lift_section(Y)
    hk = h * k
    hXk = h * apply_vf(XF, k)
    kYh = k * apply_vf(YF, h)
    return tuple(
        hk * F.pullback(z) + hXk * F.pullback(y) - kYh * F.pullback(x) for x, y, z in zip(X, Y, XY)
    )


def pullback_section(act: AlgebroidAction, h: Poly, X: Sequence[Poly]) -> tuple[Poly, ...]:
    """Components of ``h (X o phi)`` in the frame of the action algebroid."""
    return tuple(h * act.fibered.pullback(x) for x in X)
