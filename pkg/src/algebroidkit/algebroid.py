"""Lie algebroids given by frame data, their morphisms, and D(E) as an algebroid.

An algebroid of rank r over a chart is stored by the anchor images of the
frame sections e_1..e_r and structure functions with
``[e_a, e_b] = sum_g c[a][b][g] e_g``. Brackets of arbitrary sections are
obtained from the frame by the Leibniz rule.

Checking the axioms on frame elements is enough. The anchor defect
``a[V, W] - [aV, aW]`` is C(M)-bilinear, and once it vanishes the Jacobiator
is C(M)-trilinear, so both are determined by their frame values.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

from .bundle import Connection, DerivativeOp, EndField, TrivialBundle, commutator, curvature
from .errors import AnchorMismatch, ChartMismatch, NotFlat
from .geometry import Chart, VectorField, apply_vf, lie_bracket
from .report import Report, ReportBuilder
from .ring import MatrixPoly, Poly

Structure = tuple[tuple[tuple[Poly, ...], ...], ...]


def _structure_from_map(chart: Chart, rank: int, entries: Mapping[tuple[int, int, int], Any]) -> Structure:
    zero = chart.zero()
    c = [[[zero] * rank for _ in range(rank)] for _ in range(rank)]
    seen: dict[tuple[int, int, int], Poly] = {}
    for (a, b, g), value in entries.items():
        p = chart.poly(value) if isinstance(value, str) else (value if isinstance(value, Poly) else chart.const(value))
        if p.variables != chart.names:
            p = p.embed(chart.names)
        if not all(0 <= k < rank for k in (a, b, g)):
            raise ValueError(f"structure index {(a + 1, b + 1, g + 1)} out of range for rank {rank}")
        if a == b:
            if p:
                raise ValueError(f"structure function c^{g + 1}_{{{a + 1}{a + 1}}} must vanish")
            continue
        other = seen.get((b, a, g))
        if other is not None and other != -p:
            raise ValueError(f"structure functions for {(a + 1, b + 1, g + 1)} are not antisymmetric")
        seen[(a, b, g)] = p
        c[a][b][g] = p
        c[b][a][g] = -p
    return tuple(tuple(tuple(row) for row in plane) for plane in c)


@dataclass(frozen=True)
class LieAlgebroid:
    base: Chart
    rank: int
    anchor: tuple[VectorField, ...]
    structure: Structure
    # what built this algebroid; ignored by equality
    origin: Any = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "anchor", tuple(self.anchor))
        if len(self.anchor) != self.rank:
            raise ValueError("one anchor field per frame section is required")
        for X in self.anchor:
            if X.chart.names != self.base.names:
                raise ChartMismatch("anchor field over the wrong chart")
        s = self.structure
        if len(s) != self.rank or any(len(p) != self.rank or any(len(r) != self.rank for r in p) for p in s):
            raise ValueError("structure functions must form an r x r x r array")
        for a in range(self.rank):
            for b in range(self.rank):
                for g in range(self.rank):
                    if s[a][b][g] != -s[b][a][g]:
                        raise ValueError("structure functions must be antisymmetric in the lower indices")

    @classmethod
    def build(
        cls,
        base: Chart,
        anchor: Sequence[VectorField],
        structure: Mapping[tuple[int, int, int], Any] | None = None,
        origin: Any = None,
    ) -> LieAlgebroid:
        """Build from 0-based ``(a, b, g) -> c`` entries; the mirrored entries are filled in."""
        rank = len(anchor)
        return cls(base, rank, tuple(anchor), _structure_from_map(base, rank, structure or {}), origin)

    def c(self, a: int, b: int, g: int) -> Poly:
        return self.structure[a][b][g]

    def frame(self, a: int) -> tuple[Poly, ...]:
        return tuple(self.base.one() if j == a else self.base.zero() for j in range(self.rank))

    def anchor_of(self, V: Sequence[Poly]) -> VectorField:
        total = VectorField.zero(self.base)
        for v, X in zip(V, self.anchor):
            if v:
                total = total + X.scale(v)
        return total

    def is_transitive_frame(self) -> bool:
        """True when every coordinate field is the anchor of a frame element."""
        wanted = {VectorField.coordinate(self.base, k) for k in range(self.base.dim)}
        return wanted <= set(self.anchor)

    @cached_property
    def certified(self) -> bool:
        return check_axioms(self).ok

    def nonzero_structure(self) -> dict[tuple[int, int, int], Poly]:
        out = {}
        for a in range(self.rank):
            for b in range(a + 1, self.rank):
                for g in range(self.rank):
                    if self.structure[a][b][g]:
                        out[(a, b, g)] = self.structure[a][b][g]
        return out


def _check_tuple(A: LieAlgebroid, V: Sequence[Poly]) -> tuple[Poly, ...]:
    if len(V) != A.rank:
        raise ValueError(f"section has {len(V)} components, algebroid rank is {A.rank}")
    for v in V:
        if v.variables != A.base.names:
            raise ChartMismatch("section component over the wrong chart")
    return tuple(V)


def bracket_sections(A: LieAlgebroid, V: Sequence[Poly], W: Sequence[Poly]) -> tuple[Poly, ...]:
    """``[V,W]^g = sum V^a W^b c^g_ab + a(V)(W^g) - a(W)(V^g)``."""
    V = _check_tuple(A, V)
    W = _check_tuple(A, W)
    aV, aW = A.anchor_of(V), A.anchor_of(W)
    out = [apply_vf(aV, w) - apply_vf(aW, v) for v, w in zip(V, W)]
    for a, va in enumerate(V):
        if not va:
            continue
        for b, wb in enumerate(W):
            if not wb or a == b:
                continue
            vw = va * wb
            for g, c in enumerate(A.structure[a][b]):
                if c:
                    out[g] = out[g] + vw * c
    return tuple(out)


def check_axioms(A: LieAlgebroid) -> Report:
    """Antisymmetry, anchor morphism and Jacobi on the frame; stops at the first failure."""
    rb = ReportBuilder("lie algebroid axioms", stop_at_first=True)
    r = A.rank
    triples = [(a, b, g) for a in range(r) for b in range(r) for g in range(r)]
    rb.zeros(
        "antisymmetry",
        [A.c(a, b, g) + A.c(b, a, g) for a, b, g in triples],
        lambda m: "c[%d,%d,%d]" % tuple(x + 1 for x in triples[m]),
    )
    if rb.done:
        return rb.report()
    for a in range(r):
        for b in range(a + 1, r):
            lhs = A.anchor_of(A.structure[a][b])
            rhs = lie_bracket(A.anchor[a], A.anchor[b])
            rb.zeros(
                f"anchor morphism on (e{a + 1}, e{b + 1})",
                (lhs - rhs).components,
                lambda k: f"d/d{A.base.names[k]} component",
                alpha=a + 1,
                beta=b + 1,
            )
            if rb.done:
                return rb.report()
    for a in range(r):
        for b in range(a + 1, r):
            for g in range(b + 1, r):
                ea, eb, eg = A.frame(a), A.frame(b), A.frame(g)
                t1 = bracket_sections(A, bracket_sections(A, ea, eb), eg)
                t2 = bracket_sections(A, bracket_sections(A, eb, eg), ea)
                t3 = bracket_sections(A, bracket_sections(A, eg, ea), eb)
                rb.zeros(
                    f"jacobi on (e{a + 1}, e{b + 1}, e{g + 1})",
                    [x + y + z for x, y, z in zip(t1, t2, t3)],
                    lambda k: f"e{k + 1} component",
                    alpha=a + 1,
                    beta=b + 1,
                    gamma=g + 1,
                )
                if rb.done:
                    return rb.report()
    return rb.report()


@dataclass(frozen=True)
class AlgebroidMorphism:
    """Base-preserving morphism; column ``a`` of ``matrix`` is phi(e_a) in the target frame."""

    source: LieAlgebroid
    target: LieAlgebroid
    matrix: MatrixPoly

    def __post_init__(self) -> None:
        if self.source.base.names != self.target.base.names:
            raise ChartMismatch("morphisms must preserve the base")
        if self.matrix.shape != (self.target.rank, self.source.rank):
            raise ValueError("morphism matrix must be target rank x source rank")

    def image(self, V: Sequence[Poly]) -> tuple[Poly, ...]:
        return self.matrix.apply(tuple(V))


def check_morphism(phi: AlgebroidMorphism) -> Report:
    rb = ReportBuilder("lie algebroid morphism")
    src, tgt = phi.source, phi.target
    for a in range(src.rank):
        diff = tgt.anchor_of(phi.matrix.column(a)) - src.anchor[a]
        rb.zeros(f"anchor compatibility on e{a + 1}", diff.components, lambda k: f"d/d{src.base.names[k]} component", alpha=a + 1)
    for a in range(src.rank):
        for b in range(a + 1, src.rank):
            lhs = phi.image(src.structure[a][b])
            rhs = bracket_sections(tgt, phi.matrix.column(a), phi.matrix.column(b))
            rb.zeros(
                f"bracket compatibility on (e{a + 1}, e{b + 1})",
                [x - y for x, y in zip(lhs, rhs)],
                lambda k: f"target e{k + 1} component",
                alpha=a + 1,
                beta=b + 1,
            )
    return rb.report()


def identity_morphism(A: LieAlgebroid) -> AlgebroidMorphism:
    return AlgebroidMorphism(A, A, MatrixPoly.identity(A.rank, A.base.names))


def tangent_algebroid(chart: Chart) -> LieAlgebroid:
    return LieAlgebroid.build(chart, [VectorField.coordinate(chart, k) for k in range(chart.dim)], origin="tangent")


def lie_algebra(dim: int, structure: Mapping[tuple[int, int, int], Any], field: str = "rational") -> LieAlgebroid:
    """A Lie algebra as an algebroid over the one-point chart."""
    pt = Chart.point(field)
    return LieAlgebroid.build(pt, [VectorField.zero(pt)] * dim, structure)


def so3_structure() -> dict[tuple[int, int, int], int]:
    """Constants matching the rotation fields x2 d3 - x3 d2 (and cyclic): [e1, e2] = -e3."""
    out = {}
    for a, b, g in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        out[(a, b, g)] = -1
    return out


def so3_algebra(field: str = "rational") -> LieAlgebroid:
    return lie_algebra(3, so3_structure(), field)


# -- D(E) as a Lie algebroid -------------------------------------------------
#
# frame: (d_i, 0) for i < n, then (0, E_ab) at index n + a*k + b


def doe_index(E: TrivialBundle, a: int, b: int) -> int:
    return E.base.dim + a * E.rank + b


def doe_algebroid(E: TrivialBundle) -> LieAlgebroid:
    n, k = E.base.dim, E.rank
    chart = E.base
    anchor = [VectorField.coordinate(chart, i) for i in range(n)] + [VectorField.zero(chart)] * (k * k)
    entries: dict[tuple[int, int, int], Any] = {}
    for a in range(k):
        for b in range(k):
            for c in range(k):
                for d in range(k):
                    s, t = doe_index(E, a, b), doe_index(E, c, d)
                    if s >= t:
                        continue
                    # [E_ab, E_cd] = delta_bc E_ad - delta_da E_cb
                    acc: dict[int, int] = {}
                    if b == c:
                        acc[doe_index(E, a, d)] = acc.get(doe_index(E, a, d), 0) + 1
                    if d == a:
                        acc[doe_index(E, c, b)] = acc.get(doe_index(E, c, b), 0) - 1
                    for g, v in acc.items():
                        if v:
                            entries[(s, t, g)] = v
    return LieAlgebroid.build(chart, anchor, entries, origin=("doe", E))


def doe_section(D: DerivativeOp) -> tuple[Poly, ...]:
    """Coordinates of ``D`` in the frame of :func:`doe_algebroid`."""
    comps = list(D.anchor.components)
    for row in D.matrix.entries:
        comps.extend(row)
    return tuple(comps)


def doe_operator(E: TrivialBundle, V: Sequence[Poly]) -> DerivativeOp:
    n, k = E.base.dim, E.rank
    if len(V) != n + k * k:
        raise ValueError("section length does not match the rank of D(E)")
    X = VectorField(E.base, tuple(V[:n]))
    rows = [tuple(V[n + a * k: n + (a + 1) * k]) for a in range(k)]
    return DerivativeOp(E, X, MatrixPoly(E.names, tuple(rows)))


def curvature_report(nabla: Connection) -> Report:
    rb = ReportBuilder("connection flatness")
    chart = nabla.bundle.base
    for i in range(chart.dim):
        for j in range(i + 1, chart.dim):
            R = curvature(nabla, VectorField.coordinate(chart, i), VectorField.coordinate(chart, j))
            rb.zeros(
                f"curvature on (d/d{chart.names[i]}, d/d{chart.names[j]})",
                [e for row in R.matrix.entries for e in row],
                lambda m, k=nabla.bundle.rank: f"entry ({m // k + 1},{m % k + 1})",
                i=chart.names[i],
                j=chart.names[j],
            )
    return rb.report()


def trivial_algebroid(E: TrivialBundle, nabla: Connection) -> LieAlgebroid:
    """TM + End(E) with the bracket twisted by a flat connection."""
    rep = curvature_report(nabla)
    if not rep.ok:
        raise NotFlat(rep)
    n, k = E.base.dim, E.rank
    chart = E.base
    anchor = [VectorField.coordinate(chart, i) for i in range(n)] + [VectorField.zero(chart)] * (k * k)
    base = doe_algebroid(E)
    entries: dict[tuple[int, int, int], Any] = dict(base.nonzero_structure())
    for i in range(n):
        g_i = nabla.gammas[i]
        for a in range(k):
            for b in range(k):
                m = g_i.commutator(MatrixPoly.unit(k, a, b, E.names))
                for c in range(k):
                    for d in range(k):
                        if m[c, d]:
                            entries[(i, doe_index(E, a, b), doe_index(E, c, d))] = m[c, d]
    return LieAlgebroid.build(chart, anchor, entries, origin=("trivial", E, nabla))


def connection_morphism(nabla: Connection) -> AlgebroidMorphism:
    """``d_i -> nabla_{d_i}`` from the tangent algebroid into D(E); a morphism iff flat."""
    E = nabla.bundle
    chart = E.base
    n = chart.dim
    cols = []
    for i in range(n):
        cols.append(doe_section(DerivativeOp(E, VectorField.coordinate(chart, i), nabla.gammas[i])))
    m = MatrixPoly(chart.names, tuple(zip(*cols))) if cols else None
    if m is None:
        raise ValueError("connection morphism needs a base of positive dimension")
    return AlgebroidMorphism(tangent_algebroid(chart), doe_algebroid(E), m)


def trivial_to_doe(E: TrivialBundle, nabla: Connection) -> AlgebroidMorphism:
    """The isomorphism from :func:`trivial_algebroid` to :func:`doe_algebroid`."""
    src = trivial_algebroid(E, nabla)
    tgt = doe_algebroid(E)
    n, k = E.base.dim, E.rank
    cols = []
    for i in range(n):
        cols.append(doe_section(DerivativeOp(E, VectorField.coordinate(E.base, i), nabla.gammas[i])))
    for a in range(k):
        for b in range(k):
            cols.append(doe_section(DerivativeOp.of_endomorphism(E, MatrixPoly.unit(k, a, b, E.names))))
    return AlgebroidMorphism(src, tgt, MatrixPoly(E.names, tuple(zip(*cols))))


# -- A-connections -------------------------------------------------------------


@dataclass(frozen=True)
class AConnection:
    """Frame assignment ``e_a -> D_a`` with anchor of ``D_a`` equal to ``a(e_a)``."""

    algebroid: LieAlgebroid
    bundle: TrivialBundle
    ops: tuple[DerivativeOp, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "ops", tuple(self.ops))
        A = self.algebroid
        if self.bundle.names != A.base.names:
            raise ChartMismatch("bundle and algebroid have different bases")
        if len(self.ops) != A.rank:
            raise ValueError("one operator per frame section is required")
        for a, (D, X) in enumerate(zip(self.ops, A.anchor)):
            if D.bundle != self.bundle:
                raise ValueError("operator acts on a different bundle")
            if D.anchor.components != X.components:
                raise AnchorMismatch(f"anchor of the operator for e{a + 1} differs from a(e{a + 1})")

    def evaluate(self, V: Sequence[Poly]) -> DerivativeOp:
        """``D_V = sum V^a D_a``."""
        total = DerivativeOp.zero(self.bundle)
        for v, D in zip(_check_tuple(self.algebroid, V), self.ops):
            if v:
                total = total + D.scale(v)
        return total


def aconnection_curvature(C: AConnection, a: int, b: int) -> EndField:
    A = C.algebroid
    diff = C.evaluate(A.structure[a][b]) - commutator(C.ops[a], C.ops[b])
    if not diff.anchor.is_zero():
        raise ValueError("algebroid anchor is not bracket preserving on this pair; certify the algebroid first")
    return EndField(C.bundle, diff.matrix)


def check_aconnection_flat(C: AConnection) -> Report:
    rb = ReportBuilder("A-connection flatness")
    k = C.bundle.rank
    for a in range(C.algebroid.rank):
        for b in range(a + 1, C.algebroid.rank):
            R = aconnection_curvature(C, a, b)
            rb.zeros(
                f"curvature on (e{a + 1}, e{b + 1})",
                [e for row in R.matrix.entries for e in row],
                lambda m: f"entry ({m // k + 1},{m % k + 1})",
                alpha=a + 1,
                beta=b + 1,
            )
    return rb.report()
