"""Acceptance suite: ten criteria, one PASS/FAIL line each.

Run directly (``python tests/test_acceptance.py``) or through pytest; either
way every criterion prints its own line. Criterion 10 re-evaluates the
witnesses collected by criteria 3, 6, 8 and 9 with sympy.
"""

from __future__ import annotations

import random
import re
import sys
import time
from pathlib import Path

import pytest
import sympy

sys.path.insert(0, str(Path(__file__).parent))

import helpers as H  # noqa: E402
from algebroidkit.actions import (  # noqa: E402
    AlgebroidAction,
    LieAlgebraAction,
    action_algebroid_algebra,
    action_algebroid_fibered,
    check_algebra_action,
    direct_action_bracket,
    direct_pullback_bracket,
    pullback_section,
)
from algebroidkit.algebroid import (  # noqa: E402
    aconnection_curvature,
    bracket_sections,
    check_aconnection_flat,
    check_axioms,
    doe_algebroid,
    doe_section,
    so3_algebra,
    tangent_algebroid,
)
from algebroidkit.automorphisms import (  # noqa: E402
    BundleAutomorphism,
    SemiLinearIso,
    automorphism_from_semilinear,
    check_semilinear,
    differentiate_family,
    same_action,
)
from algebroidkit.bundle import (  # noqa: E402
    DerivativeOp,
    TrivialBundle,
    apply,
    commutator,
    composition_difference,
    lie_derivation,
    linear_field,
)
from algebroidkit.geometry import AffineMap, Chart, FiberedChart, VectorField, apply_vf, lie_bracket  # noqa: E402
from algebroidkit.groupoids import (  # noqa: E402
    FiberMap,
    FPGroup,
    GroupoidActionModel,
    GroupoidRepModel,
    SemiLinearRepresentation,
    check_bisections,
    check_groupoid_action,
    check_groupoid_rep,
    check_semilinear_rep,
)
from algebroidkit.pseudolinear import (  # noqa: E402
    AffDiffOperator,
    check_characterization,
    is_pseudo_linear,
    nonclosure_witness,
    pseudo_linearity_obstruction,
)
from algebroidkit.representations import (  # noqa: E402
    AlgebroidDerivativeRep,
    DerivativeRep,
    Prequantization,
    SymplecticForm,
    prequantization_curvature_report,
    check_algebroid_drep,
    check_drep,
    drep_to_rep,
    drepoid_to_rep,
    poisson,
    rep_to_drep,
    rep_to_drepoid,
)
from algebroidkit.ring import MatrixPoly  # noqa: E402

# fail reports collected for criterion 10: (criterion, report, re-evaluator)
FAILURES: list[tuple[int, object, object]] = []


def announce(n: int, ok: bool, detail: str) -> None:
    sys.__stdout__.write(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})\n")
    sys.__stdout__.flush()


# -- shared constructions ------------------------------------------------------------


def so3_action(chart: Chart | None = None, negate: int | None = None) -> LieAlgebraAction:
    chart = chart or Chart.standard(3)
    x1, x2, x3 = chart.coords()
    z = chart.zero()
    fields = [
        VectorField(chart, (z, -x3, x2)),
        VectorField(chart, (x3, z, -x1)),
        VectorField(chart, (-x2, x1, z)),
    ]
    if negate is not None:
        fields[negate] = fields[negate].scale(-1)
    return LieAlgebraAction(so3_algebra(chart.field), chart, tuple(fields))


def bisection_example(lift_t: str = "x1", rho_s: str = "2*y1 + x1") -> GroupoidRepModel:
    G = FPGroup.parse(["s"], ["s s"])
    base, fiber = Chart.standard(2), Chart.standard(1, "y")
    F = FiberedChart(base, fiber)
    refl = AffineMap.linear(((-1, 0), (0, -1)))
    lift = FiberMap(F, refl, MatrixPoly.identity(1, base.names), (base.poly(lift_t),))
    S = GroupoidActionModel(G, (refl,), F, (lift,))
    total = F.total
    rho = MatrixPoly.build(total.names, [[total.poly(e) for e in r] for r in (["-1", rho_s], ["0", "1"])])
    return GroupoidRepModel(S, 2, (rho,))


def z2_rep(g_a, g_b) -> tuple[SemiLinearRepresentation, tuple[AffineMap, AffineMap]]:
    G = FPGroup.parse(["a", "b"], ["a b a^-1 b^-1"])
    E = TrivialBundle(Chart.standard(2), 2)
    ta, tb = AffineMap.translation((1, 0)), AffineMap.translation((0, 1))
    nus = (BundleAutomorphism(E, ta, E.matrix(g_a)), BundleAutomorphism(E, tb, E.matrix(g_b)))
    return SemiLinearRepresentation(G, E, nus), (ta, tb)


# -- criterion 1 ---------------------------------------------------------------------------


def criterion_1() -> tuple[bool, str]:
    rng = random.Random(1)
    t0 = time.time()
    for _ in range(200):
        E = H.rand_bundle(rng)
        D1, D2, D3 = (H.rand_dop(rng, E) for _ in range(3))
        C = commutator(D1, D2)
        # anchor identity
        assert C.anchor == lie_bracket(D1.anchor, D2.anchor)
        # Leibniz for the commutator and for a single operator
        f = H.rand_poly(rng, E.base)
        psi = H.rand_section(rng, E)
        for D in (D1, C):
            assert apply(D, psi.scale(f)) == apply(D, psi).scale(f) + psi.scale(apply_vf(D.anchor, f))
        # Leibniz rule of the bracket: [D1, f D2] = f [D1, D2] + D1_M(f) D2
        assert commutator(D1, D2.scale(f)) == C.scale(f) + D2.scale(apply_vf(D1.anchor, f))
        # Jacobi
        J = commutator(D1, commutator(D2, D3)) + commutator(D2, commutator(D3, D1)) + commutator(D3, commutator(D1, D2))
        assert J.is_zero()
    # commutator against the composition difference on 20 random sections per pair
    for _ in range(20):
        E = H.rand_bundle(rng)
        D1, D2 = H.rand_dop(rng, E), H.rand_dop(rng, E)
        C = commutator(D1, D2)
        for _ in range(20):
            psi = H.rand_section(rng, E)
            assert apply(C, psi) == composition_difference(D1, D2, psi)
    elapsed = time.time() - t0
    return elapsed < 30, f"200 triples, {elapsed:.1f}s"


# -- criterion 2 ---------------------------------------------------------------------------


def criterion_2() -> tuple[bool, str]:
    rng = random.Random(2)
    for k in range(100):
        E = TrivialBundle(Chart.standard(1 + k % 2), 1 + k % 3)
        A = doe_algebroid(E)
        D1, D2 = H.rand_dop(rng, E, 2), H.rand_dop(rng, E, 2)
        if bracket_sections(A, doe_section(D1), doe_section(D2)) != doe_section(commutator(D1, D2)):
            return False, f"mismatch on pair {k}"
    return True, "100 pairs equal"


# -- criterion 3 ---------------------------------------------------------------------------


def criterion_3() -> tuple[bool, str]:
    rng = random.Random(3)
    act = so3_action()
    E = TrivialBundle(act.chart, 1)
    rho = DerivativeRep(act, E, tuple(DerivativeOp.of_vector_field(E, X) for X in act.fundamental))
    assert check_drep(rho).ok
    sigma = drep_to_rep(rho)
    back = rep_to_drep(sigma)
    assert back == rho
    assert drep_to_rep(back) == sigma
    C = sigma.connection
    assert check_aconnection_flat(C).ok
    assert all(aconnection_curvature(C, a, b).is_zero() for a in range(3) for b in range(3))
    A = action_algebroid_algebra(act)
    assert check_axioms(A).ok
    for _ in range(50):
        V = [H.rand_nonconstant(rng, act.chart, 2) for _ in range(3)]
        W = [H.rand_nonconstant(rng, act.chart, 2) for _ in range(3)]
        assert direct_action_bracket(act, V, W) == bracket_sections(A, V, W)
    # failing instances for criterion 10
    broken = so3_action(negate=2)
    rep = check_algebra_action(broken)
    assert not rep.ok
    FAILURES.append((3, rep, lambda r, act=broken: reeval_action(act, r)))
    bad_drep = DerivativeRep(act, E, (rho.ops[0] + DerivativeOp.of_endomorphism(E, E.matrix([["x1"]])),) + rho.ops[1:])
    rep = check_drep(bad_drep)
    assert not rep.ok
    FAILURES.append((3, rep, lambda r, rho=bad_drep: reeval_drep(rho, r)))
    return True, "round trip, flat, 50 brackets"


# -- criterion 4 ---------------------------------------------------------------------------


def horizontal_drepoid() -> AlgebroidDerivativeRep:
    M, N = Chart.standard(2), Chart.standard(2, "y")
    F = FiberedChart(M, N)
    total = F.total
    A = tangent_algebroid(M)
    lifted = tuple(VectorField.coordinate(total, k) for k in range(2))
    act = AlgebroidAction(A, F, lifted)
    E = TrivialBundle(total, 2)
    # flat gauge d log g for g = [[1, x1 y1 + x2^2 y2], [0, 1]]
    u1 = E.matrix([["0", "y1"], ["0", "0"]])
    u2 = E.matrix([["0", "2*x2*y2"], ["0", "0"]])
    ops = (DerivativeOp(E, lifted[0], u1), DerivativeOp(E, lifted[1], u2))
    return AlgebroidDerivativeRep(act, E, ops)


def criterion_4() -> tuple[bool, str]:
    rng = random.Random(4)
    rho = horizontal_drepoid()
    assert check_algebroid_drep(rho).ok
    sigma = drepoid_to_rep(rho)
    assert rep_to_drepoid(sigma) == rho
    assert drepoid_to_rep(rep_to_drepoid(sigma)) == sigma
    act = rho.action
    B = action_algebroid_fibered(act)
    M, total = act.fibered.base, act.total
    for _ in range(50):
        h, k = H.rand_poly(rng, total, 2), H.rand_poly(rng, total, 2)
        X = [H.rand_poly(rng, M, 2) for _ in range(2)]
        Y = [H.rand_poly(rng, M, 2) for _ in range(2)]
        lhs = bracket_sections(B, pullback_section(act, h, X), pullback_section(act, k, Y))
        assert lhs == direct_pullback_bracket(act, h, X, k, Y)
    return True, "round trip, 50 pullback brackets"


# -- criterion 5 ---------------------------------------------------------------------------


def criterion_5() -> tuple[bool, str]:
    rng = random.Random(5)
    t0 = time.time()
    chart = Chart(("x", "y"), "gaussian")
    x, y = chart.coords()
    omega = SymplecticForm.standard(chart)
    alpha = (chart.zero(), chart.poly("i*x"))
    assert prequantization_curvature_report(omega, alpha).ok
    delta = Prequantization(omega, alpha)
    E = delta.bundle
    assert delta(x) == DerivativeOp.of_vector_field(E, VectorField(chart, (chart.zero(), -chart.one())))
    lhs = commutator(delta(x), delta(y))
    assert lhs == delta(poisson(omega, x, y))
    assert lhs == DerivativeOp.of_endomorphism(E, E.identity() * chart.poly("-i"))
    for _ in range(100):
        f, g = H.rand_poly(rng, chart), H.rand_poly(rng, chart)
        assert commutator(delta(f), delta(g)) == delta(poisson(omega, f, g))
    elapsed = time.time() - t0
    return elapsed < 10, f"100 random pairs, {elapsed:.1f}s"


# -- criterion 6 ---------------------------------------------------------------------------


def criterion_6() -> tuple[bool, str]:
    rng = random.Random(6)
    for _ in range(50):
        E = H.rand_bundle(rng)
        nu = H.rand_automorphism(rng, E)
        mu = SemiLinearIso.from_automorphism(nu)
        assert check_semilinear(mu, 3).ok
        assert automorphism_from_semilinear(mu) == nu
        assert same_action(SemiLinearIso.from_automorphism(automorphism_from_semilinear(mu)), mu, 3).ok
        nu2 = H.rand_automorphism(rng, E)
        product_map = SemiLinearIso.from_automorphism(nu.compose(nu2))
        assert same_action(product_map, mu.compose(SemiLinearIso.from_automorphism(nu2)), 3).ok
    R, action = z2_rep([[1, 1], [0, 1]], [[1, 2], [0, 1]])
    assert check_semilinear_rep(R, action).ok
    R, action = z2_rep([[1, 1], [0, 1]], [[1, 0], [1, 1]])
    rep = check_semilinear_rep(R, action)
    assert not rep.ok and rep.first_failure().witness is not None
    FAILURES.append((6, rep, lambda r, R=R: reeval_relator(R, r)))
    return True, "50 automorphisms, Z^2 pass and fail"


# -- criterion 7 ---------------------------------------------------------------------------


def criterion_7() -> tuple[bool, str]:
    rng = random.Random(7)
    for _ in range(100):
        E = H.rand_bundle(rng)
        fam = H.rand_family(rng, E)
        D = differentiate_family(fam)
        f, psi = H.rand_poly(rng, E.base, 2), H.rand_section(rng, E, 2)
        assert apply(D, psi.scale(f)) == apply(D, psi).scale(f) + psi.scale(apply_vf(D.anchor, f))
        assert D == -lie_derivation(fam.generator())
    for _ in range(100):
        E = H.rand_bundle(rng)
        D1, D2 = H.rand_dop(rng, E, 2), H.rand_dop(rng, E, 2)
        X1, X2 = linear_field(D1), linear_field(D2)
        assert lie_derivation(X1) == D1 and linear_field(lie_derivation(X1)) == X1
        assert lie_bracket(X1.total_field(), X2.total_field()) == linear_field(commutator(D1, D2)).total_field()
    return True, "100 families, 100 pairs"


# -- criterion 8 ---------------------------------------------------------------------------


def criterion_8() -> tuple[bool, str]:
    rho = bisection_example()
    assert check_groupoid_action(rho.action).ok
    assert check_groupoid_rep(rho).ok
    rep = check_bisections(rho, max_length=3)
    if not rep.ok:
        return False, rep.first_failure().describe()
    bad = bisection_example(lift_t="1")
    fail = check_groupoid_action(bad.action)
    assert not fail.ok
    FAILURES.append((8, fail, lambda r, S=bad.action: reeval_lift_relator(S, r)))
    bad_rho = bisection_example(rho_s="2*y1 + x1 + x2")
    fail = check_groupoid_rep(bad_rho)
    assert not fail.ok
    FAILURES.append((8, fail, lambda r, rho=bad_rho: reeval_rep_relator(rho, r)))
    return True, f"{len(rep.checks)} bisection checks"


# -- criterion 9 ---------------------------------------------------------------------------


def criterion_9() -> tuple[bool, str]:
    rng = random.Random(9)
    agree = 0
    for k in range(10):
        E = H.rand_bundle(rng, 2, 2)
        D = H.rand_dop(rng, E, 2)
        res = check_characterization(
            "derivation", None, AffDiffOperator.vector_field(D.anchor), AffDiffOperator.from_derivative(D)
        )
        assert res.agrees and res.left.ok and res.right.ok
        agree += 1
    for k in range(10):
        E = H.rand_bundle(rng, 2, 2)
        mu, mu_f = AffDiffOperator.from_automorphism(H.rand_automorphism(rng, E))
        res = check_characterization("automorphism", mu_f, None, mu)
        assert res.agrees and res.left.ok and res.right.ok
        agree += 1
    for k in range(10):
        E = H.rand_bundle(rng, 2, 2)
        D = H.rand_dop(rng, E, 2)
        Y = D.anchor + H.rand_vf(rng, E.base, 2)
        while Y == D.anchor:
            Y = D.anchor + H.rand_vf(rng, E.base, 2)
        u = AffDiffOperator.from_derivative(D)
        res = check_characterization("derivation", None, AffDiffOperator.vector_field(Y), u)
        assert res.agrees and not res.left.ok and not res.right.ok
        wl, wr = res.left.first_failure().witness, res.right.first_failure().witness
        assert wl.residual == wr.residual
        FAILURES.append((9, res.right, lambda r, D=D, Y=Y: reeval_pseudolinear(D, Y, r)))
        agree += 1
    w = nonclosure_witness()
    rep = is_pseudo_linear(w.commutator, w.candidate_upper, w.candidate_lower)
    assert not rep.ok
    FAILURES.append((9, rep, lambda r: reeval_nonclosure(r)))
    obstruction = pseudo_linearity_obstruction(w.commutator)
    assert not obstruction.ok
    FAILURES.append((9, obstruction, lambda r: reeval_nonclosure(r)))
    return True, f"{agree} of 30 instances agree, non-closure witness fails"


# -- criterion 10: independent re-evaluation ----------------------------------------


def _index(detail: str) -> int:
    return int(re.search(r"(\d+)", detail).group(1)) - 1


def reeval_action(act: LieAlgebraAction, rep) -> sympy.Expr:
    w = rep.first_failure().witness
    a, b = w.inputs["alpha"] - 1, w.inputs["beta"] - 1
    k = act.chart.names.index(re.search(r"d/d(\w+) component", w.detail).group(1))
    lhs = H.sym_bracket(act.fundamental[a], act.fundamental[b])[k]
    rhs = sum(act.constant(a, b, g) * H.to_sym(act.fundamental[g].components[k]) for g in range(act.dim))
    return sympy.expand(lhs - sympy.nsimplify(rhs))


def reeval_drep(rho: DerivativeRep, rep) -> sympy.Expr:
    """Apply both sides to a generic section and read off the failing entry."""
    w = rep.first_failure().witness
    a, b = w.inputs["alpha"] - 1, w.inputs["beta"] - 1
    chart = rho.bundle.base
    syms = H.symbols(chart)
    k = rho.bundle.rank
    psi = [sympy.Function(f"p{j}")(*syms) for j in range(k)]
    Da, Db = rho.ops[a], rho.ops[b]
    lhs = [p - q for p, q in zip(H.sym_dop_apply(Da, H.sym_dop_apply(Db, psi)), H.sym_dop_apply(Db, H.sym_dop_apply(Da, psi)))]
    rhs = [0] * k
    for g in range(rho.action.dim):
        c = rho.action.constant(a, b, g)
        if c:
            rhs = [r + sympy.nsimplify(c) * t for r, t in zip(rhs, H.sym_dop_apply(rho.ops[g], psi))]
    diff = [sympy.expand(p - q) for p, q in zip(lhs, rhs)]
    m = re.search(r"matrix entry \((\d+),(\d+)\)", w.detail)
    if m:
        i, j = int(m.group(1)) - 1, int(m.group(2)) - 1
        return sympy.expand(diff[i].coeff(psi[j]).subs({p: 0 for p in psi}))
    var = re.search(r"d/d(\w+)", w.detail).group(1)
    return sympy.expand(diff[0].coeff(sympy.Derivative(psi[0], sympy.Symbol(var))))


def _sym_word(evals, word):
    """Compose per-letter sympy maps, rightmost letter acting first."""
    out = None
    for letter in reversed(word):
        f = evals[letter]
        out = f if out is None else _compose(f, out)
    return out


def _compose(outer, inner):
    """Maps are (base substitution list, fiber matrix); outer o inner."""
    base_o, g_o, syms = outer
    base_i, g_i, _ = inner
    sub = dict(zip(syms, base_i))
    return [sympy.expand(e.subs(sub, simultaneous=True)) for e in base_o], sympy.expand(g_o.subs(sub, simultaneous=True) * g_i), syms


def reeval_relator(R: SemiLinearRepresentation, rep) -> sympy.Expr:
    w = rep.first_failure().witness
    chart = R.bundle.base
    syms = H.symbols(chart)
    evals = {}
    for g, nu in enumerate(R.assignment):
        base = [H.to_sym(p) for p in nu.base_polys()]
        fwd = (base, H.sym_matrix(nu.fiber), syms)
        inv_base = sympy.solve([sympy.Symbol(f"_t{k}") - e for k, e in enumerate(base)], syms, dict=True)[0]
        ts = [sympy.Symbol(f"_t{k}") for k in range(len(syms))]
        back = [inv_base[s].subs(dict(zip(ts, syms))) for s in syms]
        ginv = H.sym_matrix(nu.fiber).subs(dict(zip(syms, back)), simultaneous=True).inv()
        evals[(g, 1)] = fwd
        evals[(g, -1)] = (back, sympy.expand(ginv), syms)
    word = R.group.word(w.inputs["word"])
    base, gmat, _ = _sym_word(evals, word)
    m = re.search(r"fiber entry \((\d+),(\d+)\)", w.detail)
    if m:
        i, j = int(m.group(1)) - 1, int(m.group(2)) - 1
        return sympy.expand(gmat[i, j] - (1 if i == j else 0))
    k = chart.names.index(re.search(r"base coordinate (\w+)", w.detail).group(1))
    return sympy.expand(base[k] - syms[k])


def _lift_map(S: GroupoidActionModel, g: int):
    total = S.fibered.total
    syms = H.symbols(total)
    return [H.to_sym(p.embed(total.names) if p.variables != total.names else p) for p in S.lift[g].total_polys()], syms


def reeval_lift_relator(S: GroupoidActionModel, rep) -> sympy.Expr:
    w = rep.first_failure().witness
    word = S.group.word(w.inputs["word"])
    total = S.fibered.total
    syms = H.symbols(total)
    current = list(syms)
    for g, e in reversed(word):
        assert e == 1
        polys, _ = _lift_map(S, g)
        current = [sympy.expand(p.subs(dict(zip(syms, current)), simultaneous=True)) for p in polys]
    k = total.names.index(re.search(r"coordinate (\w+)", w.detail).group(1))
    return sympy.expand(current[k] - syms[k])


def reeval_rep_relator(rho: GroupoidRepModel, rep) -> sympy.Expr:
    """``rho_s(S_s p) rho_s(p)`` for the order-two generator, entry by entry."""
    w = rep.first_failure().witness
    total = rho.action.fibered.total
    syms = H.symbols(total)
    polys, _ = _lift_map(rho.action, 0)
    m = H.sym_matrix(rho.assignment[0])
    prod_ = sympy.expand(m.subs(dict(zip(syms, polys)), simultaneous=True) * m)
    i, j = (int(t) - 1 for t in re.search(r"entry \((\d+),(\d+)\)", w.detail).groups())
    return sympy.expand(prod_[i, j] - (1 if i == j else 0))


def reeval_pseudolinear(D: DerivativeOp, Y: VectorField, rep) -> sympy.Expr:
    """``u(f e_b) - f u(e_b) - Y(f) e_b`` in sympy, at the witness inputs."""
    w = rep.first_failure().witness
    E = D.bundle
    f = H.to_sym(E.base.poly(w.inputs["f"]))
    b = _index(w.inputs["psi"])
    k = _index(w.detail)
    e = [1 if j == b else 0 for j in range(E.rank)]
    lhs = H.sym_dop_apply(D, [f * c for c in e])
    ue = H.sym_dop_apply(D, e)
    return sympy.expand(lhs[k] - f * ue[k] - H.sym_vf_apply(Y, f) * e[k])


def reeval_nonclosure(rep) -> sympy.Expr:
    """``[mu, d/dx]`` with ``mu psi (x) = swap(psi(x/2))`` applied by hand."""
    w = rep.first_failure().witness
    x = sympy.Symbol("x")
    f = H.to_sym(Chart(("x",)).poly(w.inputs["f"]))
    b = _index(w.inputs["psi"])
    k = _index(w.detail)
    psi = [f if j == b else sympy.Integer(0) for j in range(2)]

    def mu(v):
        return [v[1].subs(x, x / 2), v[0].subs(x, x / 2)]

    def d(v):
        return [sympy.diff(c, x) for c in v]

    out = [sympy.expand(p - q) for p, q in zip(mu(d(psi)), d(mu(psi)))]
    # candidate upper is mu^M, candidate lower is zero; u(e_b) vanishes, so only u(f e_b) remains
    ue = [sympy.expand(p - q) for p, q in zip(mu(d([1 if j == b else 0 for j in range(2)])), d(mu([sympy.Integer(1) if j == b else sympy.Integer(0) for j in range(2)])))]
    assert all(c == 0 for c in ue)
    return out[k]


def criterion_10() -> tuple[bool, str]:
    # the failing instances are collected by these criteria; run any that have not run yet
    ran = {crit for crit, _, _ in FAILURES}
    for crit, fn in ((3, criterion_3), (6, criterion_6), (8, criterion_8), (9, criterion_9)):
        if crit not in ran:
            fn()
    seen = set()
    for crit, rep, reeval in FAILURES:
        seen.add(crit)
        assert not rep.ok
        for c in rep.failures():
            assert c.witness is not None and not c.witness.residual.is_zero()
        w = rep.first_failure().witness
        value = reeval(rep)
        expected = H.to_sym(w.residual)
        if value == 0 or sympy.expand(value - expected) != 0:
            return False, f"criterion {crit}: re-evaluated {value}, reported {expected}"
    return seen == {3, 6, 8, 9}, f"{len(FAILURES)} fail reports re-evaluated"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("n", range(1, 11))
def test_criterion(n: int) -> None:
    try:
        ok, detail = CRITERIA[n - 1]()
    except AssertionError as exc:
        ok, detail = False, f"assertion failed: {exc}"
    announce(n, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    results = []
    for n, fn in enumerate(CRITERIA, 1):
        try:
            ok, detail = fn()
        except AssertionError as exc:
            ok, detail = False, f"assertion failed: {exc}"
        announce(n, ok, detail)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
