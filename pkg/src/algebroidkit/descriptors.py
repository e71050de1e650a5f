"""JSON documents for every object the command line handles.

A document is a JSON object with a ``"kind"`` field. Optional document
keys ``"field"`` ("rational" or "gaussian") and ``"degree_bound"`` set the
scalar field and the probe degree; nested objects inherit the field.
Base coordinates default to ``x1..xn`` and fiber coordinates to ``y1..ym``;
any chart may override its names with ``"coordinates"``.

Structure constants use 1-based keys ``"(a,b,g)"`` for ``c^g_ab``.
Loading errors raise :class:`DescriptorError` naming the offending field.
"""

from __future__ import annotations

import json
import re
from collections.abc import Sequence
from typing import Any

from .actions import AlgebroidAction, LieAlgebraAction
from .algebroid import AConnection, LieAlgebroid
from .automorphisms import BundleAutomorphism, DualAutomorphismFamily
from .bundle import Connection, DerivativeOp, LinearVectorField, TrivialBundle
from .errors import AlgebroidKitError
from .geometry import AffineMap, Chart, FiberedChart, VectorField
from .groupoids import FiberMap, FPGroup, GroupoidActionModel, GroupoidRepModel, SemiLinearRepresentation
from .pseudolinear import AffDiffOperator, Atom
from .representations import AlgebroidDerivativeRep, AlgebroidRep, DerivativeRep, SymplecticForm
from .ring import FIELDS, MatrixPoly, Poly, as_scalar, format_scalar

DEFAULT_DEGREE_BOUND = 6
DEFAULT_FIELD = "rational"


class DescriptorError(AlgebroidKitError, ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class _Ctx:
    """Where we are in the document, for error messages, plus the scalar field."""

    def __init__(self, field: str, path: str = "$"):
        self.field = field
        self.path = path

    def at(self, key: Any) -> _Ctx:
        sub = f"{self.path}[{key}]" if isinstance(key, int) else f"{self.path}.{key}"
        return _Ctx(self.field, sub)

    def fail(self, message: str) -> DescriptorError:
        return DescriptorError(self.path, message)


def _get(obj: Any, key: str, ctx: _Ctx, default: Any = ...) -> Any:
    if not isinstance(obj, dict):
        raise ctx.fail("expected an object")
    if key not in obj:
        if default is ...:
            raise ctx.at(key).fail("missing field")
        return default
    return obj[key]


def _list(obj: Any, ctx: _Ctx, length: int | None = None) -> list[Any]:
    if not isinstance(obj, list):
        raise ctx.fail("expected a list")
    if length is not None and len(obj) != length:
        raise ctx.fail(f"expected {length} entries, got {len(obj)}")
    return obj


def _int(obj: Any, ctx: _Ctx, minimum: int = 0) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int) or obj < minimum:
        raise ctx.fail(f"expected an integer >= {minimum}")
    return obj


def _scalar(obj: Any, ctx: _Ctx) -> Any:
    try:
        if isinstance(obj, str):
            return Chart.point(ctx.field).poly(obj).constant_value()
        if isinstance(obj, bool) or not isinstance(obj, int):
            raise TypeError("not a number")
        return as_scalar(obj)
    except (TypeError, ValueError) as exc:
        raise ctx.fail(f"expected a number: {exc}") from None


def _poly(obj: Any, chart: Chart, ctx: _Ctx) -> Poly:
    if isinstance(obj, int) and not isinstance(obj, bool):
        obj = str(obj)
    if not isinstance(obj, str):
        raise ctx.fail("expected a polynomial string")
    try:
        return chart.poly(obj)
    except (AlgebroidKitError, ValueError) as exc:
        raise ctx.fail(str(exc)) from None


def _polys(obj: Any, chart: Chart, ctx: _Ctx, length: int | None = None) -> tuple[Poly, ...]:
    return tuple(_poly(p, chart, ctx.at(k)) for k, p in enumerate(_list(obj, ctx, length)))


def _matrix(obj: Any, chart: Chart, ctx: _Ctx, rows: int, cols: int) -> MatrixPoly:
    data = [_polys(r, chart, ctx.at(k), cols) for k, r in enumerate(_list(obj, ctx, rows))]
    return MatrixPoly.build(chart.names, data)


def _rational_matrix(obj: Any, ctx: _Ctx, n: int) -> tuple[tuple[Any, ...], ...]:
    return tuple(
        tuple(_scalar(x, ctx.at(i).at(j)) for j, x in enumerate(_list(r, ctx.at(i), n)))
        for i, r in enumerate(_list(obj, ctx, n))
    )


def _chart(doc: dict, ctx: _Ctx, dim_key: str = "base_dim", prefix: str = "x", names_key: str = "coordinates") -> Chart:
    names = _get(doc, names_key, ctx, None)
    if names is not None:
        names = _list(names, ctx.at(names_key))
        if not all(isinstance(n, str) and re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", n) for n in names):
            raise ctx.at(names_key).fail("coordinate names must be identifiers")
        if dim_key in doc and doc[dim_key] != len(names):
            raise ctx.at(dim_key).fail("does not match the number of coordinates")
        try:
            return Chart(tuple(names), ctx.field)
        except ValueError as exc:
            raise ctx.at(names_key).fail(str(exc)) from None
    n = _int(_get(doc, dim_key, ctx), ctx.at(dim_key))
    return Chart.standard(n, prefix, ctx.field)


# -- document level --------------------------------------------------------------


def parse_document(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DescriptorError("$", f"not a JSON document ({exc.msg} at line {exc.lineno} column {exc.colno})") from None
    if not isinstance(doc, dict):
        raise DescriptorError("$", "top level must be an object")
    if not isinstance(doc.get("kind"), str):
        raise DescriptorError("$.kind", "missing or not a string")
    return doc


def document_field(doc: dict) -> str:
    field = doc.get("field", DEFAULT_FIELD)
    if field not in FIELDS:
        raise DescriptorError("$.field", f"expected one of {FIELDS}")
    return field


def document_degree_bound(doc: dict) -> int:
    return _int(doc.get("degree_bound", DEFAULT_DEGREE_BOUND), _Ctx(DEFAULT_FIELD, "$.degree_bound"), 1)


def root(doc: dict) -> _Ctx:
    return _Ctx(document_field(doc))


def expect_kind(doc: dict, ctx: _Ctx, *kinds: str) -> str:
    kind = _get(doc, "kind", ctx)
    if kind not in kinds:
        raise ctx.at("kind").fail(f"expected {' or '.join(repr(k) for k in kinds)}, got {kind!r}")
    return kind


# -- loaders ----------------------------------------------------------------------


_KEY = re.compile(r"^\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)$")


def load_structure(obj: Any, chart: Chart, rank: int, ctx: _Ctx) -> dict[tuple[int, int, int], Poly]:
    if not isinstance(obj, dict):
        raise ctx.fail("expected an object keyed by '(a,b,g)'")
    out: dict[tuple[int, int, int], Poly] = {}
    for key, value in obj.items():
        m = _KEY.match(key)
        sub = ctx.at(key)
        if not m:
            raise sub.fail("key must look like '(a,b,g)'")
        a, b, g = (int(t) - 1 for t in m.groups())
        if not all(0 <= t < rank for t in (a, b, g)):
            raise sub.fail(f"indices must lie in 1..{rank}")
        if a == b:
            raise sub.fail("structure functions vanish for equal lower indices")
        p = _poly(value, chart, sub)
        if (b, a, g) in out and out[(b, a, g)] != -p:
            raise sub.fail("conflicts with the mirrored entry")
        out[(a, b, g)] = p
    return out


def load_algebroid(doc: dict, ctx: _Ctx) -> LieAlgebroid:
    chart = _chart(doc, ctx)
    rank = _int(_get(doc, "rank", ctx), ctx.at("rank"), 1)
    anchor_ctx = ctx.at("anchor")
    rows = _list(_get(doc, "anchor", ctx), anchor_ctx, rank)
    anchor = [VectorField(chart, _polys(r, chart, anchor_ctx.at(k), chart.dim)) for k, r in enumerate(rows)]
    structure = load_structure(_get(doc, "structure", ctx, {}), chart, rank, ctx.at("structure"))
    try:
        return LieAlgebroid.build(chart, anchor, structure)
    except ValueError as exc:
        raise ctx.fail(str(exc)) from None


def load_action(doc: dict, ctx: _Ctx) -> LieAlgebraAction | AlgebroidAction:
    """A Lie algebra action when the algebroid sits over a point, otherwise an algebroid action."""
    A = load_algebroid(_get(doc, "algebroid", ctx), ctx.at("algebroid"))
    if A.base.dim == 0:
        chart = _chart(doc, ctx, "fiber_dim", "x")
        fctx = ctx.at("lifted")
        rows = _list(_get(doc, "lifted", ctx), fctx, A.rank)
        fields = [VectorField(chart, _polys(r, chart, fctx.at(k), chart.dim)) for k, r in enumerate(rows)]
        return LieAlgebraAction(A, chart, tuple(fields))
    fiber = _chart(doc, ctx, "fiber_dim", "y", "fiber_coordinates")
    try:
        F = FiberedChart(A.base, fiber)
    except ValueError as exc:
        raise ctx.fail(str(exc)) from None
    total = F.total
    fctx = ctx.at("lifted")
    rows = _list(_get(doc, "lifted", ctx), fctx, A.rank)
    fields = [VectorField(total, _polys(r, total, fctx.at(k), total.dim)) for k, r in enumerate(rows)]
    return AlgebroidAction(A, F, tuple(fields))


def load_bundle(doc: dict, ctx: _Ctx) -> TrivialBundle:
    return TrivialBundle(_chart(doc, ctx), _int(_get(doc, "rank", ctx), ctx.at("rank"), 1))


def load_derivative_op(obj: Any, E: TrivialBundle, ctx: _Ctx) -> DerivativeOp:
    chart = E.base
    X = VectorField(chart, _polys(_get(obj, "anchor", ctx), chart, ctx.at("anchor"), chart.dim))
    u = _matrix(_get(obj, "matrix", ctx), chart, ctx.at("matrix"), E.rank, E.rank)
    return DerivativeOp(E, X, u)


def _ops(doc: dict, E: TrivialBundle, ctx: _Ctx, count: int) -> tuple[DerivativeOp, ...]:
    octx = ctx.at("ops")
    return tuple(load_derivative_op(o, E, octx.at(k)) for k, o in enumerate(_list(_get(doc, "ops", ctx), octx, count)))


def load_drep(doc: dict, ctx: _Ctx) -> DerivativeRep | AlgebroidDerivativeRep:
    act = load_action(_get(doc, "action", ctx), ctx.at("action"))
    rank = _int(_get(doc, "rank", ctx), ctx.at("rank"), 1)
    if isinstance(act, LieAlgebraAction):
        E = TrivialBundle(act.chart, rank)
        return DerivativeRep(act, E, _ops(doc, E, ctx, act.dim))
    E = TrivialBundle(act.total, rank)
    return AlgebroidDerivativeRep(act, E, _ops(doc, E, ctx, act.algebroid.rank))


def load_aconnection(doc: dict, ctx: _Ctx) -> AConnection:
    """``{"algebroid": ...}`` or ``{"action": ...}`` (the action algebroid), plus rank and ops."""
    from .actions import action_algebroid_algebra, action_algebroid_fibered

    if "action" in doc:
        act = load_action(doc["action"], ctx.at("action"))
        A = action_algebroid_algebra(act) if isinstance(act, LieAlgebraAction) else action_algebroid_fibered(act)
    else:
        A = load_algebroid(_get(doc, "algebroid", ctx), ctx.at("algebroid"))
    E = TrivialBundle(A.base, _int(_get(doc, "rank", ctx), ctx.at("rank"), 1))
    return AConnection(A, E, _ops(doc, E, ctx, A.rank))


def load_rep(doc: dict, ctx: _Ctx) -> AlgebroidRep:
    return AlgebroidRep(load_aconnection(doc, ctx))


def load_affine(obj: Any, n: int, ctx: _Ctx) -> AffineMap:
    A = _rational_matrix(_get(obj, "A", ctx), ctx.at("A"), n)
    b = tuple(_scalar(x, ctx.at("b").at(k)) for k, x in enumerate(_list(_get(obj, "b", ctx, [0] * n), ctx.at("b"), n)))
    try:
        return AffineMap(A, b)
    except ValueError as exc:
        raise ctx.fail(str(exc)) from None


def load_automorphism(obj: Any, E: TrivialBundle, ctx: _Ctx) -> BundleAutomorphism:
    base = load_affine(obj, E.base.dim, ctx)
    g = _matrix(_get(obj, "g", ctx), E.base, ctx.at("g"), E.rank, E.rank)
    return BundleAutomorphism(E, base, g)


def load_group(obj: Any, ctx: _Ctx) -> FPGroup:
    gens = _list(_get(obj, "generators", ctx), ctx.at("generators"))
    rels = _list(_get(obj, "relators", ctx, []), ctx.at("relators"))
    if not all(isinstance(g, str) for g in gens):
        raise ctx.at("generators").fail("generators must be strings")
    if not all(isinstance(r, str) for r in rels):
        raise ctx.at("relators").fail("relators must be strings")
    try:
        return FPGroup.parse(gens, rels)
    except ValueError as exc:
        raise ctx.fail(str(exc)) from None


def load_semilinear_rep(doc: dict, ctx: _Ctx) -> tuple[SemiLinearRepresentation, tuple[AffineMap, ...]]:
    G = load_group(_get(doc, "group", ctx), ctx.at("group"))
    E = load_bundle(_get(doc, "bundle", ctx), ctx.at("bundle"))
    n = len(G.generators)
    actx, sctx = ctx.at("action"), ctx.at("assignment")
    action = tuple(load_affine(a, E.base.dim, actx.at(k)) for k, a in enumerate(_list(_get(doc, "action", ctx), actx, n)))
    assignment = tuple(
        load_automorphism(a, E, sctx.at(k)) for k, a in enumerate(_list(_get(doc, "assignment", ctx), sctx, n))
    )
    return SemiLinearRepresentation(G, E, assignment), action


def load_groupoid_action(doc: dict, ctx: _Ctx) -> tuple[GroupoidActionModel, GroupoidRepModel | None]:
    G = load_group(_get(doc, "group", ctx), ctx.at("group"))
    base = _chart(doc, ctx)
    fiber = _chart(doc, ctx, "fiber_dim", "y", "fiber_coordinates")
    F = FiberedChart(base, fiber)
    n, m = len(G.generators), fiber.dim
    actx, lctx = ctx.at("action"), ctx.at("lift")
    action = tuple(load_affine(a, base.dim, actx.at(k)) for k, a in enumerate(_list(_get(doc, "action", ctx), actx, n)))
    lifts = []
    for k, (phi, obj) in enumerate(zip(action, _list(_get(doc, "lift", ctx, [{}] * n), lctx, n))):
        sub = lctx.at(k)
        if m == 0:
            lifts.append(FiberMap(F, phi, None, ()))
            continue
        T = _matrix(_get(obj, "T", sub), base, sub.at("T"), m, m)
        t = _polys(_get(obj, "t", sub), base, sub.at("t"), m)
        lifts.append(FiberMap(F, phi, T, t))
    S = GroupoidActionModel(G, action, F, tuple(lifts))
    rep_obj = _get(doc, "rep", ctx, None)
    if rep_obj is None:
        return S, None
    rctx = ctx.at("rep")
    rank = _int(_get(rep_obj, "rank", rctx), rctx.at("rank"), 1)
    asctx = rctx.at("assignment")
    mats = tuple(
        _matrix(mat, F.total, asctx.at(k), rank, rank)
        for k, mat in enumerate(_list(_get(rep_obj, "assignment", rctx), asctx, n))
    )
    return S, GroupoidRepModel(S, rank, mats)


def load_operator(obj: Any, chart: Chart, rank: int | None, ctx: _Ctx) -> AffDiffOperator:
    atoms = []
    for k, a in enumerate(_list(obj, ctx)):
        sub = ctx.at(k)
        c = _get(a, "coeff", sub)
        coeff: Any = _poly(c, chart, sub.at("coeff")) if rank is None else _matrix(c, chart, sub.at("coeff"), rank, rank)
        deriv = _get(a, "deriv", sub, None)
        if deriv is not None and deriv not in chart.names:
            raise sub.at("deriv").fail(f"unknown coordinate {deriv!r}")
        pb = _get(a, "pullback", sub, None)
        phi = None if pb is None else load_affine(pb, chart.dim, sub.at("pullback"))
        atoms.append(Atom(coeff, deriv, phi))
    return AffDiffOperator(chart, tuple(atoms), rank)


def load_dual_family(doc: dict, ctx: _Ctx) -> DualAutomorphismFamily:
    E = load_bundle(_get(doc, "bundle", ctx), ctx.at("bundle"))
    n = E.base.dim
    A1 = _rational_matrix(_get(doc, "A1", ctx), ctx.at("A1"), n)
    b1 = tuple(_scalar(x, ctx.at("b1").at(k)) for k, x in enumerate(_list(_get(doc, "b1", ctx), ctx.at("b1"), n)))
    B = _matrix(_get(doc, "B", ctx), E.base, ctx.at("B"), E.rank, E.rank)
    return DualAutomorphismFamily(E, A1, b1, B)


def load_linear_vector_field(doc: dict, ctx: _Ctx) -> LinearVectorField:
    E = load_bundle(_get(doc, "bundle", ctx), ctx.at("bundle"))
    X = VectorField(E.base, _polys(_get(doc, "base_field", ctx), E.base, ctx.at("base_field"), E.base.dim))
    B = _matrix(_get(doc, "matrix", ctx), E.base, ctx.at("matrix"), E.rank, E.rank)
    return LinearVectorField(E, X, B)


def load_standalone_op(doc: dict, ctx: _Ctx) -> DerivativeOp:
    E = load_bundle(_get(doc, "bundle", ctx), ctx.at("bundle"))
    return load_derivative_op(doc, E, ctx)


def load_connection(doc: dict, ctx: _Ctx) -> Connection:
    E = load_bundle(_get(doc, "bundle", ctx), ctx.at("bundle"))
    gctx = ctx.at("gammas")
    gammas = tuple(
        _matrix(g, E.base, gctx.at(k), E.rank, E.rank)
        for k, g in enumerate(_list(_get(doc, "gammas", ctx), gctx, E.base.dim))
    )
    return Connection(E, gammas)


def load_symplectic(doc: dict, ctx: _Ctx) -> SymplecticForm:
    chart = _chart(doc, ctx)
    try:
        return SymplecticForm(chart, _rational_matrix(_get(doc, "omega", ctx), ctx.at("omega"), chart.dim))
    except ValueError as exc:
        raise ctx.at("omega").fail(str(exc)) from None


# -- serializers ------------------------------------------------------------------


def _names(chart: Chart, prefix: str = "x") -> dict[str, Any]:
    if chart.names == Chart.standard(chart.dim, prefix).names:
        return {}
    return {"coordinates": list(chart.names)}


def _strs(ps: Sequence[Poly]) -> list[str]:
    return [str(p) for p in ps]


def dump_algebroid(A: LieAlgebroid) -> dict[str, Any]:
    structure = {f"({a + 1},{b + 1},{g + 1})": str(p) for (a, b, g), p in sorted(A.nonzero_structure().items()) if a < b}
    return {
        "kind": "algebroid",
        "field": A.base.field,
        "base_dim": A.base.dim,
        **_names(A.base),
        "rank": A.rank,
        "anchor": [X.to_strings() for X in A.anchor],
        "structure": structure,
    }


def dump_action(act: LieAlgebraAction | AlgebroidAction) -> dict[str, Any]:
    if isinstance(act, LieAlgebraAction):
        return {
            "kind": "action",
            "algebroid": dump_algebroid(act.algebra),
            "fiber_dim": act.chart.dim,
            **_names(act.chart),
            "lifted": [X.to_strings() for X in act.fundamental],
        }
    fiber = act.fibered.fiber
    extra = {} if fiber.names == Chart.standard(fiber.dim, "y").names else {"fiber_coordinates": list(fiber.names)}
    return {
        "kind": "action",
        "algebroid": dump_algebroid(act.algebroid),
        "fiber_dim": fiber.dim,
        **extra,
        "lifted": [X.to_strings() for X in act.lifted],
    }


def dump_derivative_op(D: DerivativeOp, standalone: bool = False) -> dict[str, Any]:
    out: dict[str, Any] = {"anchor": D.anchor.to_strings(), "matrix": D.matrix.to_lists()}
    if standalone:
        E = D.bundle
        out = {"kind": "derivative_op", "field": E.field, "bundle": dump_bundle(E), **out}
    return out


def dump_bundle(E: TrivialBundle) -> dict[str, Any]:
    return {"base_dim": E.base.dim, **_names(E.base), "rank": E.rank}


def dump_drep(rho: DerivativeRep | AlgebroidDerivativeRep) -> dict[str, Any]:
    return {
        "kind": "drep",
        "field": rho.bundle.field,
        "action": dump_action(rho.action),
        "rank": rho.bundle.rank,
        "ops": [dump_derivative_op(D) for D in rho.ops],
    }


def dump_rep(sigma: AlgebroidRep) -> dict[str, Any]:
    A = sigma.algebroid
    out: dict[str, Any] = {"kind": "rep", "field": A.base.field}
    if isinstance(A.origin, (LieAlgebraAction, AlgebroidAction)):
        out["action"] = dump_action(A.origin)
    else:
        out["algebroid"] = dump_algebroid(A)
    out["rank"] = sigma.connection.bundle.rank
    out["ops"] = [dump_derivative_op(D) for D in sigma.ops]
    return out


def dump_linear_vector_field(X: LinearVectorField) -> dict[str, Any]:
    return {
        "kind": "linear_vector_field",
        "field": X.bundle.field,
        "bundle": dump_bundle(X.bundle),
        "base_field": X.base_field.to_strings(),
        "matrix": X.matrix.to_lists(),
    }


def dump_affine(phi: AffineMap) -> dict[str, Any]:
    return {"A": [[format_scalar(x) for x in r] for r in phi.A], "b": [format_scalar(x) for x in phi.b]}


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
