"""Finitely presented groups acting affinely, action groupoids and their representations.

A word is a tuple of ``(generator index, +1 | -1)`` letters, kept freely
reduced. The word ``l1 l2 ... ln`` stands for the group product, so it acts
as ``f(l1) o f(l2) o ... o f(ln)``: the last letter acts first.
"""

from __future__ import annotations

import re
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from itertools import product
from typing import Any, TypeVar

from gmpy2 import mpq

from .automorphisms import BundleAutomorphism, SemiLinearIso, check_semilinear, same_action
from .bundle import Section, TrivialBundle
from .errors import ChartMismatch, NotComposable, RelatorFailure
from .geometry import AffineMap, Chart, FiberedChart
from .report import Report, ReportBuilder
from .ring import MatrixPoly, Poly, as_scalar, matrix_inverse_if_unimodular

Letter = tuple[int, int]
Word = tuple[Letter, ...]
T = TypeVar("T")


def reduce_word(word: Sequence[Letter]) -> Word:
    out: list[Letter] = []
    for g, e in word:
        if out and out[-1] == (g, -e):
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


def invert_word(word: Word) -> Word:
    return tuple((g, -e) for g, e in reversed(word))


def multiply_words(w1: Word, w2: Word) -> Word:
    return reduce_word(w1 + w2)


_LETTER = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?$")


@dataclass(frozen=True)
class FPGroup:
    generators: tuple[str, ...]
    relators: tuple[Word, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "generators", tuple(self.generators))
        if len(set(self.generators)) != len(self.generators):
            raise ValueError("generator names must be distinct")
        object.__setattr__(self, "relators", tuple(reduce_word(r) for r in self.relators))

    @classmethod
    def parse(cls, generators: Sequence[str], relators: Sequence[str] = ()) -> FPGroup:
        group = cls(tuple(generators))
        return cls(group.generators, tuple(group.word(r) for r in relators))

    def word(self, text: str) -> Word:
        """Parse ``"a b a^-1 b^2"``; the empty string is the identity."""
        letters: list[Letter] = []
        for token in text.split():
            m = _LETTER.match(token)
            if not m or m.group(1) not in self.generators:
                raise ValueError(f"bad letter {token!r} in word {text!r}")
            g = self.generators.index(m.group(1))
            power = int(m.group(2)) if m.group(2) else 1
            letters.extend([(g, 1 if power > 0 else -1)] * abs(power))
        return reduce_word(letters)

    def format(self, word: Word) -> str:
        if not word:
            return "e"
        return " ".join(self.generators[g] + ("" if e == 1 else "^-1") for g, e in word)

    def words(self, max_length: int) -> list[Word]:
        """All reduced words up to the given length, shortest first."""
        letters = [(g, e) for g in range(len(self.generators)) for e in (1, -1)]
        out: list[Word] = [()]
        layer: list[Word] = [()]
        for _ in range(max_length):
            nxt = []
            for w in layer:
                for l in letters:
                    if w and w[-1] == (l[0], -l[1]):
                        continue
                    nxt.append(w + (l,))
            out.extend(nxt)
            layer = nxt
        return out


def evaluate_word(
    word: Word,
    value: Callable[[int], T],
    inverse_value: Callable[[int], T],
    compose: Callable[[T, T], T],
    identity: T,
) -> T:
    """``value(l1) o ... o value(ln)`` with ``compose(outer, inner)``."""
    acc = identity
    for g, e in reversed(word):
        acc = compose(value(g) if e == 1 else inverse_value(g), acc)
    return acc


def _affine_word(group: FPGroup, action: Sequence[AffineMap], word: Word) -> AffineMap:
    n = action[0].dim if action else 0
    return evaluate_word(word, lambda g: action[g], lambda g: action[g].inverse(), lambda a, b: a.compose(b), AffineMap.identity(n))


# -- semi-linear representations -------------------------------------------------


@dataclass(frozen=True)
class SemiLinearRepresentation:
    group: FPGroup
    bundle: TrivialBundle
    assignment: tuple[BundleAutomorphism, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "assignment", tuple(self.assignment))
        if len(self.assignment) != len(self.group.generators):
            raise ValueError("one automorphism per generator is required")
        for nu in self.assignment:
            if nu.bundle != self.bundle:
                raise ValueError("automorphism of a different bundle")

    def evaluate(self, word: Word) -> BundleAutomorphism:
        return evaluate_word(
            word,
            lambda g: self.assignment[g],
            lambda g: self.assignment[g].inverse(),
            lambda a, b: a.compose(b),
            BundleAutomorphism.identity(self.bundle),
        )

    def semilinear(self, word: Word) -> SemiLinearIso:
        return SemiLinearIso.from_automorphism(self.evaluate(word))


def check_semilinear_rep(
    R: SemiLinearRepresentation, action: Sequence[AffineMap], strict: bool = False
) -> Report:
    """Base maps match the action and every relator maps to the identity.

    On success the report data carries the action-groupoid representation:
    the fiber matrix ``g(m)`` attached to each arrow ``(g, m)``.
    """
    G = R.group
    rb = ReportBuilder("semi-linear representation")
    if len(action) != len(G.generators):
        raise ValueError("one affine map per generator is required")
    chart = R.bundle.base
    for g, (nu, phi) in enumerate(zip(R.assignment, action)):
        diff = [p - q for p, q in zip(nu.base_polys(), phi.as_polys(chart))]
        rb.zeros(f"base map of {G.generators[g]}", diff, lambda k: f"coordinate {chart.names[k]}", generator=G.generators[g])
    for r in G.relators:
        nu = R.evaluate(r)
        rb.zeros(
            f"relator {G.format(r)}",
            nu.identity_residuals(),
            _identity_detail(chart, R.bundle.rank),
            word=G.format(r),
        )
    rep = rb.report(groupoid_representation={G.generators[g]: nu.fiber.to_lists() for g, nu in enumerate(R.assignment)})
    if strict and not rep.ok:
        raise RelatorFailure(rep)
    return rep


def _identity_detail(chart: Chart, k: int) -> Callable[[int], str]:
    n = chart.dim

    def detail(m: int) -> str:
        if m < n:
            return f"base coordinate {chart.names[m]}"
        m -= n
        return f"fiber entry ({m // k + 1},{m % k + 1})"

    return detail


# -- action groupoid -----------------------------------------------------------------


@dataclass(frozen=True)
class Arrow:
    word: Word
    point: tuple[Any, ...]


@dataclass(frozen=True)
class ActionGroupoid:
    """``G x M`` with source ``(g, m) -> m`` and target ``(g, m) -> g.m``."""

    group: FPGroup
    action: tuple[AffineMap, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "action", tuple(self.action))

    def arrow(self, word: Word, point: Sequence[Any]) -> Arrow:
        return Arrow(reduce_word(word), tuple(mpq(as_scalar(p)) for p in point))

    def base_map(self, word: Word) -> AffineMap:
        return _affine_word(self.group, self.action, word)

    def source(self, a: Arrow) -> tuple[Any, ...]:
        return a.point

    def target(self, a: Arrow) -> tuple[Any, ...]:
        return self.base_map(a.word)(a.point)

    def unit(self, point: Sequence[Any]) -> Arrow:
        return self.arrow((), point)

    def compose(self, h: Arrow, g: Arrow) -> Arrow:
        """``h . g``, defined when ``source(h) = target(g)``."""
        if self.source(h) != self.target(g):
            raise NotComposable(f"source {self.source(h)} differs from target {self.target(g)}")
        return Arrow(multiply_words(h.word, g.word), g.point)

    def inverse(self, g: Arrow) -> Arrow:
        return Arrow(invert_word(g.word), self.target(g))


def groupoid_rep_value(R: SemiLinearRepresentation, a: Arrow) -> tuple[tuple[Any, ...], ...]:
    """The linear map ``E_m -> E_{g.m}`` attached to the arrow ``(g, m)``."""
    g = R.evaluate(a.word).fiber
    return tuple(tuple(e.evaluate(a.point) for e in row) for row in g.entries)


# -- actions on fibered charts ----------------------------------------------------


@dataclass(frozen=True)
class FiberMap:
    """``S(x, y) = (A x + b, T(x) y + t(x))`` on a fibered chart."""

    fibered: FiberedChart
    base: AffineMap
    T: MatrixPoly | None
    t: tuple[Poly, ...]

    def __post_init__(self) -> None:
        F = self.fibered
        m = F.fiber.dim
        object.__setattr__(self, "t", tuple(self.t))
        if self.base.dim != F.base.dim:
            raise ChartMismatch("base map dimension differs from the base chart")
        if m == 0:
            if self.T is not None or self.t:
                raise ValueError("a zero-dimensional fiber carries no fiber data")
            return
        if self.T is None or self.T.shape != (m, m) or self.T.variables != F.base.names:
            raise ValueError("fiber matrix must be m x m over the base chart")
        if len(self.t) != m or any(p.variables != F.base.names for p in self.t):
            raise ValueError("fiber translation must have m components over the base chart")
        matrix_inverse_if_unimodular(self.T)

    @classmethod
    def identity(cls, F: FiberedChart) -> FiberMap:
        m = F.fiber.dim
        T = MatrixPoly.identity(m, F.base.names) if m else None
        return cls(F, AffineMap.identity(F.base.dim), T, tuple(F.base.zero() for _ in range(m)))

    def _pull(self, p: Poly, phi: AffineMap) -> Poly:
        if phi.dim == 0:
            return p
        return p.substitute(phi.as_polys(self.fibered.base))

    def compose(self, inner: FiberMap) -> FiberMap:
        """``self o inner``: ``T = T2(phi1 x) T1(x)``, ``t = T2(phi1 x) t1 + t2(phi1 x)``."""
        if self.fibered.fiber.dim == 0:
            return FiberMap(self.fibered, self.base.compose(inner.base), None, ())
        T2 = self.T.map(lambda e: self._pull(e, inner.base))
        t2 = [self._pull(e, inner.base) for e in self.t]
        T = T2 @ inner.T
        t = tuple(a + b for a, b in zip(T2.apply(inner.t), t2))
        return FiberMap(self.fibered, self.base.compose(inner.base), T, t)

    def inverse(self) -> FiberMap:
        """``T' = T(phi^-1 x)^-1`` and ``t' = -T' t(phi^-1 x)``."""
        inv = self.base.inverse()
        if self.fibered.fiber.dim == 0:
            return FiberMap(self.fibered, inv, None, ())
        Tinv = matrix_inverse_if_unimodular(self.T.map(lambda e: self._pull(e, inv)))
        t = tuple(-p for p in Tinv.apply([self._pull(e, inv) for e in self.t]))
        return FiberMap(self.fibered, inv, Tinv, t)

    def total_polys(self) -> tuple[Poly, ...]:
        """Coordinate functions of S on the total chart."""
        F = self.fibered
        total = F.total
        xs = self.base.as_polys(F.base) if F.base.dim else ()
        out = [p.embed(total.names) for p in xs]
        ys = [Poly.variable(total.names, y) for y in F.fiber.names]
        if ys:
            T = self.T.embed(total.names)
            for a, ty in enumerate(T.apply(ys)):
                out.append(ty + self.t[a].embed(total.names))
        return tuple(out)

    def identity_residuals(self) -> list[Poly]:
        total = self.fibered.total
        return [p - Poly.variable(total.names, v) for p, v in zip(self.total_polys(), total.names)]

    def is_identity(self) -> bool:
        return not any(self.identity_residuals())


def pull_total(f: Poly, S: FiberMap) -> Poly:
    """``f o S`` for a function on the total chart."""
    if not f.variables:
        return f
    return f.substitute(S.total_polys())


@dataclass(frozen=True)
class GroupoidActionModel:
    group: FPGroup
    action: tuple[AffineMap, ...]
    fibered: FiberedChart
    lift: tuple[FiberMap, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "action", tuple(self.action))
        object.__setattr__(self, "lift", tuple(self.lift))
        n = len(self.group.generators)
        if len(self.action) != n or len(self.lift) != n:
            raise ValueError("one base map and one lift per generator are required")
        for S in self.lift:
            if S.fibered != self.fibered:
                raise ValueError("lift over a different fibration")

    def evaluate(self, word: Word) -> FiberMap:
        return evaluate_word(
            word,
            lambda g: self.lift[g],
            lambda g: self.lift[g].inverse(),
            lambda a, b: a.compose(b),
            FiberMap.identity(self.fibered),
        )


def check_groupoid_action(S: GroupoidActionModel, strict: bool = False) -> Report:
    """Lifts cover the base action, relators act trivially, and composition agrees with substitution."""
    G = S.group
    F = S.fibered
    rb = ReportBuilder("groupoid action")
    base_chart = F.base
    for g, (L, phi) in enumerate(zip(S.lift, S.action)):
        diff = [p - q for p, q in zip(L.base.as_polys(base_chart), phi.as_polys(base_chart))] if base_chart.dim else []
        rb.zeros(f"lift of {G.generators[g]} covers the base map", diff, generator=G.generators[g])
    letters = [((g, e),) for g in range(len(G.generators)) for e in (1, -1)]
    for w1, w2 in product(letters, repeat=2):
        closed = S.evaluate(w1).compose(S.evaluate(w2)).total_polys()
        inner = S.evaluate(w2).total_polys()
        direct = [p.substitute(inner) for p in S.evaluate(w1).total_polys()]
        word = G.format(w1 + w2)
        rb.zeros(f"S({word}) = S o S", [a - b for a, b in zip(closed, direct)], word=word)
    for r in G.relators:
        rb.zeros(
            f"relator {G.format(r)} acts trivially",
            S.evaluate(r).identity_residuals(),
            lambda k: f"coordinate {F.total.names[k]}",
            word=G.format(r),
        )
    data = {}
    if F.fiber.dim == 0 and all(L.is_identity() or L.fibered.fiber.dim == 0 for L in S.lift):
        data["note"] = "fiber is a point: the action is the base action itself"
    rep = rb.report(**data)
    if strict and not rep.ok:
        raise RelatorFailure(rep)
    return rep


@dataclass(frozen=True)
class GroupoidRepModel:
    """Representation of ``G x F`` on ``E = F x R^k``: generator g -> ``rho_g(p)``."""

    action: GroupoidActionModel
    rank: int
    assignment: tuple[MatrixPoly, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "assignment", tuple(self.assignment))
        total = self.action.fibered.total
        if len(self.assignment) != len(self.action.group.generators):
            raise ValueError("one fiber matrix field per generator is required")
        for m in self.assignment:
            if m.shape != (self.rank, self.rank) or m.variables != total.names:
                raise ValueError("fiber matrix fields must be rank x rank over the total chart")
            matrix_inverse_if_unimodular(m)

    @property
    def bundle(self) -> TrivialBundle:
        return TrivialBundle(self.action.fibered.total, self.rank)

    def _pull(self, m: MatrixPoly, S: FiberMap) -> MatrixPoly:
        return m.map(lambda e: pull_total(e, S))

    def evaluate(self, word: Word) -> tuple[FiberMap, MatrixPoly]:
        """``(S_w, rho_w)`` with ``rho_{w1 w2}(p) = rho_{w1}(S_{w2} p) rho_{w2}(p)``."""
        act = self.action

        def value(g: int) -> tuple[FiberMap, MatrixPoly]:
            return act.lift[g], self.assignment[g]

        def inverse_value(g: int) -> tuple[FiberMap, MatrixPoly]:
            S_inv = act.lift[g].inverse()
            return S_inv, matrix_inverse_if_unimodular(self._pull(self.assignment[g], S_inv))

        def compose(outer, inner):
            S1, r1 = outer
            S2, r2 = inner
            return S1.compose(S2), self._pull(r1, S2) @ r2

        identity = (FiberMap.identity(act.fibered), self.bundle.identity())
        return evaluate_word(word, value, inverse_value, compose, identity)


def check_groupoid_rep(rho: GroupoidRepModel) -> Report:
    G = rho.action.group
    rb = ReportBuilder("groupoid representation")
    for c in check_groupoid_action(rho.action).checks:
        rb.add(c)
    k = rho.rank
    for r in G.relators:
        _, m = rho.evaluate(r)
        rb.zeros(
            f"relator {G.format(r)} maps to the identity",
            [e for row in (m - rho.bundle.identity()).entries for e in row],
            lambda j: f"entry ({j // k + 1},{j % k + 1})",
            word=G.format(r),
        )
    return rb.report()


def bisection_semilinear(rho: GroupoidRepModel, word: Word) -> SemiLinearIso:
    """Map on sections of E given by the constant bisection at ``word``.

    ``(w . psi)(p) = rho_w(q) psi(q)`` and ``w . f = f(q)`` with ``q = S_{w^-1}(p)``.
    """
    E = rho.bundle
    S_inv, _ = rho.evaluate(invert_word(word))
    _, r = rho.evaluate(word)
    r_at = r.map(lambda e: pull_total(e, S_inv))

    def on_functions(f: Poly) -> Poly:
        return pull_total(f, S_inv)

    def on_sections(psi: Section) -> Section:
        return Section(E, r_at.apply([on_functions(c) for c in psi.components]))

    return SemiLinearIso(E, on_sections, on_functions)


def check_bisections(rho: GroupoidRepModel, max_length: int = 3, degree_bound: int = 3) -> Report:
    """Semi-linearity of every word map, multiplicativity over pairs of words, and trivial relators."""
    G = rho.action.group
    rb = ReportBuilder("bisection representation")
    words = G.words(max_length)
    maps = {w: bisection_semilinear(rho, w) for w in words}
    for w in words:
        sub = check_semilinear(maps[w], degree_bound)
        for c in sub.checks:
            rb.add(type(c)(f"{c.name} for {G.format(w)}", c.passed, c.witness))
    for w1, w2 in product(words, repeat=2):
        w12 = multiply_words(w1, w2)
        m12 = maps.get(w12) or bisection_semilinear(rho, w12)
        sub = same_action(m12, maps[w1].compose(maps[w2]), degree_bound)
        name = f"({G.format(w1)})({G.format(w2)}) multiplicative"
        if sub.ok:
            rb.zeros(name, [])
        else:
            c = sub.first_failure()
            rb.add(type(c)(name, False, c.witness))
    E = rho.bundle
    identity = SemiLinearIso(E, lambda psi: psi, lambda f: f)
    for r in G.relators:
        sub = same_action(bisection_semilinear(rho, r), identity, degree_bound)
        name = f"relator {G.format(r)} acts as the identity"
        if sub.ok:
            rb.zeros(name, [])
        else:
            c = sub.first_failure()
            rb.add(type(c)(name, False, c.witness))
    return rb.report()
