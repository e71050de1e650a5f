"""Random generators and a sympy oracle shared by the test modules."""

from __future__ import annotations

import random
from itertools import product

import sympy
from gmpy2 import mpq

from algebroidkit.automorphisms import BundleAutomorphism, DualAutomorphismFamily
from algebroidkit.bundle import DerivativeOp, Section, TrivialBundle
from algebroidkit.geometry import AffineMap, Chart, VectorField
from algebroidkit.ring import MatrixPoly, Poly


def rand_coeff(rng: random.Random, allow_zero: bool = False) -> mpq:
    while True:
        c = mpq(rng.randint(-5, 5), rng.randint(1, 3))
        if c or allow_zero:
            return c


def rand_poly(rng: random.Random, chart: Chart, degree: int = 3, terms: int = 3) -> Poly:
    p = chart.zero()
    if chart.dim == 0:
        return chart.const(rand_coeff(rng, allow_zero=True))
    for _ in range(rng.randint(0, terms)):
        exps = [0] * chart.dim
        for _ in range(rng.randint(0, degree)):
            exps[rng.randrange(chart.dim)] += 1
        p = p + Poly.monomial(chart.names, tuple(exps), rand_coeff(rng))
    return p


def rand_nonconstant(rng: random.Random, chart: Chart, degree: int = 3) -> Poly:
    while True:
        p = rand_poly(rng, chart, degree)
        if not p.is_constant():
            return p


def rand_vf(rng: random.Random, chart: Chart, degree: int = 3) -> VectorField:
    return VectorField(chart, tuple(rand_poly(rng, chart, degree) for _ in chart.names))


def rand_matrix(rng: random.Random, chart: Chart, k: int, degree: int = 3) -> MatrixPoly:
    return MatrixPoly.build(chart.names, [[rand_poly(rng, chart, degree, 2) for _ in range(k)] for _ in range(k)])


def rand_dop(rng: random.Random, E: TrivialBundle, degree: int = 3) -> DerivativeOp:
    return DerivativeOp(E, rand_vf(rng, E.base, degree), rand_matrix(rng, E.base, E.rank, degree))


def rand_section(rng: random.Random, E: TrivialBundle, degree: int = 3) -> Section:
    return Section(E, tuple(rand_poly(rng, E.base, degree) for _ in range(E.rank)))


def rand_bundle(rng: random.Random, max_dim: int = 3, max_rank: int = 3, field: str = "rational") -> TrivialBundle:
    return TrivialBundle(Chart.standard(rng.randint(1, max_dim), field=field), rng.randint(1, max_rank))


def rand_invertible_rational(rng: random.Random, n: int) -> tuple[tuple[mpq, ...], ...]:
    while True:
        A = [[mpq(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)]
        if sympy.Matrix(A).det() != 0:
            return tuple(tuple(r) for r in A)


def rand_affine(rng: random.Random, n: int) -> AffineMap:
    return AffineMap(rand_invertible_rational(rng, n), tuple(rand_coeff(rng, True) for _ in range(n)))


def rand_unimodular(rng: random.Random, chart: Chart, k: int, degree: int = 2) -> MatrixPoly:
    """``diag(c) L U`` with unitriangular polynomial factors: constant nonzero determinant."""
    names = chart.names
    L = [[chart.one() if i == j else (rand_poly(rng, chart, degree, 2) if i > j else chart.zero()) for j in range(k)] for i in range(k)]
    U = [[chart.one() if i == j else (rand_poly(rng, chart, degree, 2) if i < j else chart.zero()) for j in range(k)] for i in range(k)]
    D = [[chart.const(rand_coeff(rng)) if i == j else chart.zero() for j in range(k)] for i in range(k)]
    return MatrixPoly.build(names, D) @ MatrixPoly.build(names, L) @ MatrixPoly.build(names, U)


def rand_automorphism(rng: random.Random, E: TrivialBundle, degree: int = 2) -> BundleAutomorphism:
    return BundleAutomorphism(E, rand_affine(rng, E.base.dim), rand_unimodular(rng, E.base, E.rank, degree))


def rand_family(rng: random.Random, E: TrivialBundle, degree: int = 2) -> DualAutomorphismFamily:
    n = E.base.dim
    A1 = [[rand_coeff(rng, True) for _ in range(n)] for _ in range(n)]
    b1 = [rand_coeff(rng, True) for _ in range(n)]
    return DualAutomorphismFamily(E, A1, b1, rand_matrix(rng, E.base, E.rank, degree))


# -- sympy oracle ---------------------------------------------------------------------


def symbols(chart: Chart) -> list[sympy.Symbol]:
    return [sympy.Symbol(n) for n in chart.names]


def to_sym(p: Poly) -> sympy.Expr:
    local = {n: sympy.Symbol(n) for n in p.variables}
    local["i"] = sympy.I
    return sympy.expand(sympy.sympify(str(p).replace("^", "**"), locals=local))


def from_sym(expr: sympy.Expr, chart: Chart) -> Poly:
    """Exact conversion through the coefficient dictionary, not through text."""
    syms = symbols(chart)
    out = chart.zero()
    poly = sympy.Poly(sympy.expand(expr), *syms) if syms else None
    if poly is None:
        return chart.const(_sym_scalar(sympy.nsimplify(expr)))
    for exps, c in poly.terms():
        out = out + Poly.monomial(chart.names, tuple(exps), _sym_scalar(c))
    return out


def _sym_scalar(c: sympy.Expr):
    from algebroidkit.ring import gaussian

    re_part, im_part = sympy.Rational(sympy.re(c)), sympy.Rational(sympy.im(c))
    to_q = lambda r: mpq(int(r.p), int(r.q))  # noqa: E731
    return gaussian(to_q(re_part), to_q(im_part)) if im_part else to_q(re_part)


def sym_vf_apply(X: VectorField, f: sympy.Expr) -> sympy.Expr:
    return sympy.expand(sum(to_sym(c) * sympy.diff(f, s) for c, s in zip(X.components, symbols(X.chart))))


def sym_bracket(X: VectorField, Y: VectorField) -> list[sympy.Expr]:
    syms = symbols(X.chart)
    xs = [to_sym(c) for c in X.components]
    ys = [to_sym(c) for c in Y.components]
    return [
        sympy.expand(sum(xs[j] * sympy.diff(ys[i], syms[j]) - ys[j] * sympy.diff(xs[i], syms[j]) for j in range(len(syms))))
        for i in range(len(syms))
    ]


def sym_dop_apply(D: DerivativeOp, psi: list[sympy.Expr]) -> list[sympy.Expr]:
    k = D.bundle.rank
    return [
        sympy.expand(sym_vf_apply(D.anchor, psi[a]) + sum(to_sym(D.matrix[a, b]) * psi[b] for b in range(k)))
        for a in range(k)
    ]


def sym_matrix(m: MatrixPoly) -> sympy.Matrix:
    return sympy.Matrix([[to_sym(m[i, j]) for j in range(m.cols)] for i in range(m.rows)])


def all_pairs(n: int):
    return [(a, b) for a, b in product(range(n), repeat=2) if a < b]
