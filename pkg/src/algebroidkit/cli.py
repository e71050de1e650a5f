"""Command line front end.

``check`` commands print a text report and exit 0 (pass) or 1 (fail, with a
witness). ``build``, ``transform`` and ``prequantize`` print the resulting
document as JSON. Malformed input exits 2 with a diagnostic naming the field.
``--out PATH`` writes the JSON report (for ``check``) or the resulting
document (otherwise) to a file as well.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

from . import __version__
from . import descriptors as d
from .actions import (
    LieAlgebraAction,
    action_algebroid_algebra,
    action_algebroid_fibered,
    check_algebra_action,
    check_algebroid_action,
)
from .algebroid import check_aconnection_flat, check_axioms, doe_algebroid, trivial_algebroid
from .automorphisms import SemiLinearIso, check_semilinear, differentiate_family
from .bundle import lie_derivation, linear_field
from .errors import AlgebroidKitError, CheckFailed
from .groupoids import check_bisections, check_groupoid_action, check_groupoid_rep, check_semilinear_rep
from .pseudolinear import check_characterization, is_pseudo_linear
from .report import Report
from .representations import (
    AlgebroidDerivativeRep,
    Prequantization,
    check_algebroid_drep,
    check_drep,
    drep_to_rep,
    drepoid_to_rep,
    rep_to_drep,
    rep_to_drepoid,
)

EXIT_PASS, EXIT_FAIL, EXIT_MALFORMED = 0, 1, 2


class Malformed(Exception):
    pass


# -- check ---------------------------------------------------------------------------


def _check_algebroid(doc: dict, ctx: Any, bound: int) -> Report:
    kind = d.expect_kind(doc, ctx, "algebroid", "action")
    if kind == "algebroid":
        return check_axioms(d.load_algebroid(doc, ctx))
    act = d.load_action(doc, ctx)
    first = check_algebra_action(act) if isinstance(act, LieAlgebraAction) else check_algebroid_action(act)
    if not first.ok:
        return first
    A = action_algebroid_algebra(act) if isinstance(act, LieAlgebraAction) else action_algebroid_fibered(act)
    return first.merged(check_axioms(A), "action algebroid")


def _check_action(doc: dict, ctx: Any, bound: int) -> Report:
    d.expect_kind(doc, ctx, "action")
    act = d.load_action(doc, ctx)
    return check_algebra_action(act) if isinstance(act, LieAlgebraAction) else check_algebroid_action(act)


def _check_drep(doc: dict, ctx: Any, bound: int) -> Report:
    d.expect_kind(doc, ctx, "drep")
    rho = d.load_drep(doc, ctx)
    return check_algebroid_drep(rho) if isinstance(rho, AlgebroidDerivativeRep) else check_drep(rho)


def _check_rep(doc: dict, ctx: Any, bound: int) -> Report:
    d.expect_kind(doc, ctx, "rep")
    return check_aconnection_flat(d.load_aconnection(doc, ctx))


def _check_semilinear(doc: dict, ctx: Any, bound: int) -> Report:
    kind = d.expect_kind(doc, ctx, "automorphism", "semilinear_rep")
    if kind == "automorphism":
        E = d.load_bundle(d._get(doc, "bundle", ctx), ctx.at("bundle"))
        nu = d.load_automorphism(doc, E, ctx)
        return check_semilinear(SemiLinearIso.from_automorphism(nu), bound)
    R, action = d.load_semilinear_rep(doc, ctx)
    return check_semilinear_rep(R, action)


def _check_groupoid_action(doc: dict, ctx: Any, bound: int) -> Report:
    d.expect_kind(doc, ctx, "groupoid_action")
    S, rho = d.load_groupoid_action(doc, ctx)
    rep = check_groupoid_action(S)
    if rho is None or not rep.ok:
        return rep
    rep = rep.merged(check_groupoid_rep(rho), "groupoid action and representation")
    if not rep.ok:
        return rep
    max_length = d._int(doc.get("max_length", 3), ctx.at("max_length"), 0)
    # bisection probes are costly; unless a bound was asked for, stay at degree 3
    probe_degree = bound if "degree_bound" in doc else min(bound, 3)
    return rep.merged(check_bisections(rho, max_length, probe_degree))


def _check_pseudolinear(doc: dict, ctx: Any, bound: int) -> Report:
    d.expect_kind(doc, ctx, "pseudolinear")
    chart = d._chart(doc, ctx)
    rank = d._int(d._get(doc, "rank", ctx), ctx.at("rank"), 1)
    u = d.load_operator(d._get(doc, "u", ctx), chart, rank, ctx.at("u"))
    upper_obj, lower_obj = d._get(doc, "upper", ctx, None), d._get(doc, "lower", ctx, None)
    upper = None if upper_obj is None else d.load_operator(upper_obj, chart, None, ctx.at("upper"))
    lower = None if lower_obj is None else d.load_operator(lower_obj, chart, None, ctx.at("lower"))
    mode = d._get(doc, "mode", ctx, None)
    if mode is not None:
        try:
            result = check_characterization(mode, upper, lower, u, bound)
        except ValueError as exc:
            raise d.DescriptorError(f"{ctx.path}.mode", str(exc)) from None
        return result.report
    if upper is None or lower is None:
        raise d.DescriptorError(ctx.path, "both 'upper' and 'lower' are needed without a 'mode'")
    return is_pseudo_linear(u, upper, lower, bound)


CHECKS: dict[str, Callable[[dict, Any, int], Report]] = {
    "algebroid": _check_algebroid,
    "action": _check_action,
    "drep": _check_drep,
    "rep": _check_rep,
    "semilinear": _check_semilinear,
    "groupoid-action": _check_groupoid_action,
    "pseudolinear": _check_pseudolinear,
}


# -- build / transform -----------------------------------------------------------------


def _build_action_algebroid(doc: dict, ctx: Any, bound: int) -> dict:
    d.expect_kind(doc, ctx, "action")
    act = d.load_action(doc, ctx)
    A = action_algebroid_algebra(act) if isinstance(act, LieAlgebraAction) else action_algebroid_fibered(act)
    return d.dump_algebroid(A)


def _build_doe(doc: dict, ctx: Any, bound: int) -> dict:
    d.expect_kind(doc, ctx, "bundle")
    return d.dump_algebroid(doe_algebroid(d.load_bundle(doc, ctx)))


def _build_trivial(doc: dict, ctx: Any, bound: int) -> dict:
    d.expect_kind(doc, ctx, "connection")
    nabla = d.load_connection(doc, ctx)
    return d.dump_algebroid(trivial_algebroid(nabla.bundle, nabla))


BUILDS = {"action-algebroid": _build_action_algebroid, "doe": _build_doe, "trivial": _build_trivial}


def _t_drep_to_rep(doc: dict, ctx: Any, bound: int) -> dict:
    d.expect_kind(doc, ctx, "drep")
    rho = d.load_drep(doc, ctx)
    if isinstance(rho, AlgebroidDerivativeRep):
        raise d.DescriptorError(f"{ctx.path}.action", "an algebroid action needs 'drepoid-to-rep'")
    return d.dump_rep(drep_to_rep(rho))


def _t_rep_to_drep(doc: dict, ctx: Any, bound: int) -> dict:
    d.expect_kind(doc, ctx, "rep")
    return d.dump_drep(rep_to_drep(d.load_rep(doc, ctx)))


def _t_drepoid_to_rep(doc: dict, ctx: Any, bound: int) -> dict:
    d.expect_kind(doc, ctx, "drep")
    rho = d.load_drep(doc, ctx)
    if not isinstance(rho, AlgebroidDerivativeRep):
        raise d.DescriptorError(f"{ctx.path}.action", "a Lie algebra action needs 'drep-to-rep'")
    return d.dump_rep(drepoid_to_rep(rho))


def _t_rep_to_drepoid(doc: dict, ctx: Any, bound: int) -> dict:
    d.expect_kind(doc, ctx, "rep")
    return d.dump_drep(rep_to_drepoid(d.load_rep(doc, ctx)))


def _t_differentiate(doc: dict, ctx: Any, bound: int) -> dict:
    d.expect_kind(doc, ctx, "dual_family")
    return d.dump_derivative_op(differentiate_family(d.load_dual_family(doc, ctx)), standalone=True)


def _t_lieder(doc: dict, ctx: Any, bound: int) -> dict:
    d.expect_kind(doc, ctx, "linear_vector_field")
    return d.dump_derivative_op(lie_derivation(d.load_linear_vector_field(doc, ctx)), standalone=True)


def _t_linear_field(doc: dict, ctx: Any, bound: int) -> dict:
    d.expect_kind(doc, ctx, "derivative_op")
    return d.dump_linear_vector_field(linear_field(d.load_standalone_op(doc, ctx)))


TRANSFORMS = {
    "drep-to-rep": _t_drep_to_rep,
    "rep-to-drep": _t_rep_to_drep,
    "drepoid-to-rep": _t_drepoid_to_rep,
    "rep-to-drepoid": _t_rep_to_drepoid,
    "differentiate": _t_differentiate,
    "lieder": _t_lieder,
    "linear-field": _t_linear_field,
}


def _prequantize(doc: dict, ctx: Any, bound: int) -> dict:
    d.expect_kind(doc, ctx, "prequantization")
    if ctx.field != "gaussian":
        raise d.DescriptorError("$.field", "prequantization needs \"field\": \"gaussian\"")
    omega = d.load_symplectic(doc, ctx)
    chart = omega.chart
    alpha = d._polys(d._get(doc, "alpha", ctx), chart, ctx.at("alpha"), chart.dim)
    delta = Prequantization(omega, alpha)
    fs = d._get(doc, "functions", ctx)
    fctx = ctx.at("functions")
    ops = [d.dump_derivative_op(delta(d._poly(f, chart, fctx.at(k))), standalone=True) for k, f in enumerate(d._list(fs, fctx))]
    return {"kind": "prequantized", "field": chart.field, "functions": list(fs), "operators": ops}


# -- driver ----------------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="algebroidkit", description="Exact checks for Lie algebroids and their representations.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("document", help="path to a JSON document ('-' for standard input)")
        sp.add_argument("--out", metavar="PATH", help="also write JSON output to PATH")
        sp.add_argument("--degree-bound", type=int, metavar="N", help="probe degree (overrides the document)")

    for name, table, help_text in (
        ("check", CHECKS, "verify a structure and print a report"),
        ("build", BUILDS, "construct an algebroid"),
        ("transform", TRANSFORMS, "convert between equivalent descriptions"),
    ):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("target", choices=sorted(table))
        common(sp)
    common(sub.add_parser("prequantize", help="prequantization operators of the given functions"))
    return p


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise Malformed(f"cannot read {path}: {exc}") from None


def _write(path: str | None, payload: dict) -> None:
    if path:
        Path(path).write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def _emit_report(report: Report, out: str | None) -> int:
    sys.stdout.write(report.render() + "\n")
    _write(out, report.to_dict())
    return EXIT_PASS if report.ok else EXIT_FAIL


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        doc = d.parse_document(_read(args.document))
        ctx = d.root(doc)
        if args.command == "prequantize" and "field" not in doc:
            ctx.field = "gaussian"
        if args.degree_bound is not None:
            if args.degree_bound < 1:
                raise d.DescriptorError("--degree-bound", "must be at least 1")
            bound = doc["degree_bound"] = args.degree_bound
        else:
            bound = d.document_degree_bound(doc)
        if args.command == "check":
            return _emit_report(CHECKS[args.target](doc, ctx, bound), args.out)
        handler = _prequantize if args.command == "prequantize" else {**BUILDS, **TRANSFORMS}[args.target]
        result = handler(doc, ctx, bound)
    except CheckFailed as exc:
        return _emit_report(exc.report, args.out)
    except (Malformed, AlgebroidKitError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_MALFORMED
    sys.stdout.write(d.dumps(result))
    _write(args.out, result)
    return EXIT_PASS


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
