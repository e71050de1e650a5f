import pytest

from algebroidkit.automorphisms import BundleAutomorphism
from algebroidkit.bundle import TrivialBundle
from algebroidkit.errors import NotComposable, RelatorFailure
from algebroidkit.geometry import AffineMap, Chart, FiberedChart
from algebroidkit.groupoids import (
    ActionGroupoid,
    FiberMap,
    FPGroup,
    GroupoidActionModel,
    GroupoidRepModel,
    SemiLinearRepresentation,
    check_bisections,
    check_groupoid_action,
    check_groupoid_rep,
    check_semilinear_rep,
    groupoid_rep_value,
    invert_word,
    multiply_words,
    reduce_word,
)
from algebroidkit.ring import MatrixPoly

Z2 = FPGroup.parse(["a", "b"], ["a b a^-1 b^-1"])
TA, TB = AffineMap.translation((1, 0)), AffineMap.translation((0, 1))


def test_word_parsing_and_reduction():
    assert Z2.word("a b a^-1 b^2") == ((0, 1), (1, 1), (0, -1), (1, 1), (1, 1))
    assert Z2.word("a a^-1") == ()
    assert reduce_word([(0, 1), (1, 1), (1, -1), (0, -1)]) == ()
    w = Z2.word("a b^-1")
    assert invert_word(w) == Z2.word("b a^-1")
    assert multiply_words(w, invert_word(w)) == ()
    assert Z2.format(()) == "e"
    assert Z2.format(w) == "a b^-1"
    with pytest.raises(ValueError):
        Z2.word("c")


def test_word_enumeration():
    # 1 + 4 + 4*3 reduced words of length at most 2
    assert len(Z2.words(2)) == 17
    assert len(set(Z2.words(3))) == len(Z2.words(3))


def test_action_groupoid_structure():
    G = ActionGroupoid(Z2, (TA, TB))
    g = G.arrow(Z2.word("a"), (0, 0))
    h = G.arrow(Z2.word("b"), (1, 0))
    assert G.target(g) == (1, 0)
    hg = G.compose(h, g)
    assert G.source(hg) == (0, 0) and G.target(hg) == (1, 1)
    assert G.compose(G.inverse(g), g) == G.unit((0, 0))
    assert G.compose(g, G.unit((0, 0))) == g
    with pytest.raises(NotComposable):
        G.compose(g, g)
    k = G.arrow(Z2.word("a^-1"), (1, 1))
    assert G.compose(k, G.compose(h, g)) == G.compose(G.compose(k, h), g)


def z2_rep(g_a, g_b):
    E = TrivialBundle(Chart.standard(2), 2)
    nus = (BundleAutomorphism(E, TA, E.matrix(g_a)), BundleAutomorphism(E, TB, E.matrix(g_b)))
    return SemiLinearRepresentation(Z2, E, nus)


def test_commuting_gauges():
    R = z2_rep([["1", "1"], ["0", "1"]], [["1", "2"], ["0", "1"]])
    rep = check_semilinear_rep(R, (TA, TB))
    assert rep.ok
    assert rep.data["groupoid_representation"]["a"] == [["1", "1"], ["0", "1"]]
    arrow = ActionGroupoid(Z2, (TA, TB)).arrow(Z2.word("a b"), (0, 0))
    assert groupoid_rep_value(R, arrow) == ((1, 3), (0, 1))


def test_noncommuting_gauges():
    R = z2_rep([["1", "1"], ["0", "1"]], [["1", "0"], ["1", "1"]])
    rep = check_semilinear_rep(R, (TA, TB))
    assert not rep.ok
    assert rep.first_failure().name == "relator a b a^-1 b^-1"
    with pytest.raises(RelatorFailure):
        check_semilinear_rep(R, (TA, TB), strict=True)


def test_wrong_base_map():
    R = z2_rep([["1", "0"], ["0", "1"]], [["1", "0"], ["0", "1"]])
    rep = check_semilinear_rep(R, (TB, TA))
    assert rep.first_failure().name == "base map of a"


def test_reflection_with_identity_gauge():
    C2 = FPGroup.parse(["s"], ["s s"])
    E = TrivialBundle(Chart.standard(1), 1)
    refl = AffineMap.linear(((-1,),))
    R = SemiLinearRepresentation(C2, E, (BundleAutomorphism(E, refl, E.identity()),))
    assert check_semilinear_rep(R, (refl,)).ok


def shifted_line(t_text):
    G = FPGroup.parse(["t"])
    F = FiberedChart(Chart.standard(1), Chart.standard(1, "y"))
    step = AffineMap.translation((1,))
    lift = FiberMap(F, step, MatrixPoly.identity(1, F.base.names), (F.base.poly(t_text),))
    return GroupoidActionModel(G, (step,), F, (lift,))


def test_integers_acting_with_shear():
    assert check_groupoid_action(shifted_line("x1")).ok


def test_fiber_map_inverse():
    S = shifted_line("x1").lift[0]
    assert S.compose(S.inverse()).is_identity()
    assert S.inverse().compose(S).is_identity()


def reflection_model(lift_t="x1", rho_s="2*y1 + x1"):
    G = FPGroup.parse(["s"], ["s s"])
    base = Chart.standard(2)
    F = FiberedChart(base, Chart.standard(1, "y"))
    refl = AffineMap.linear(((-1, 0), (0, -1)))
    lift = FiberMap(F, refl, MatrixPoly.identity(1, base.names), (base.poly(lift_t),))
    S = GroupoidActionModel(G, (refl,), F, (lift,))
    total = F.total
    rho = MatrixPoly.build(total.names, [[total.poly(e) for e in r] for r in (["-1", rho_s], ["0", "1"])])
    return GroupoidRepModel(S, 2, (rho,))


def test_reflection_lift_must_square_to_identity():
    assert check_groupoid_action(reflection_model().action).ok
    rep = check_groupoid_action(reflection_model(lift_t="1").action)
    assert not rep.ok
    assert rep.first_failure().name == "relator s s acts trivially"
    with pytest.raises(RelatorFailure):
        check_groupoid_action(reflection_model(lift_t="1").action, strict=True)


def test_groupoid_rep_and_bisections():
    rho = reflection_model()
    assert check_groupoid_rep(rho).ok
    assert check_bisections(rho, max_length=2, degree_bound=2).ok


def test_bad_groupoid_rep():
    rho = reflection_model(rho_s="2*y1 + x1 + x2")
    rep = check_groupoid_rep(rho)
    assert not rep.ok
    assert rep.first_failure().name == "relator s s maps to the identity"
    assert not check_bisections(rho, max_length=2, degree_bound=2).ok
