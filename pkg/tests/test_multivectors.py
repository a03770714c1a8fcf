import random
from fractions import Fraction

import pytest

from splitlie2.builtin import builtin_example, killing_form, lsa3, sl2_structure_constants, string_sl2
from splitlie2.gradedpoly import Chart, Poly, th_dn, xi_dn
from splitlie2.multivectors import (
    MCElement,
    NonlinearError,
    SAlgebra,
    generator_agreement_report,
    mc_report,
    mc_residual,
    random_multivector,
    section1,
    section2,
    solve_linear_mc,
    verify_hp_axioms,
)
from splitlie2.structures import Lie2Structure


def test_unary_bracket_vanishes_without_unary_map():
    s = lsa3()["structure"]
    alg = SAlgebra(s)
    for k in range(3):
        assert alg.b1(th_dn(s.chart, k + 1)).is_zero


def test_binary_bracket_reproduces_brackets_on_frames():
    s = string_sl2()["structure"]
    alg = SAlgebra(s)
    c = sl2_structure_constants()
    for i in range(3):
        for j in range(3):
            got = alg.b2(xi_dn(s.chart, i + 1), xi_dn(s.chart, j + 1))
            want = section1(s.chart, [Poly.const(s.chart, c[i][j][k]) for k in range(3)])
            assert got == want


def test_binary_bracket_zero_when_binary_component_missing():
    ch = Chart(0, 2, 1)
    s = Lie2Structure.build(ch, mu2=[[1, 0]])  # only the unary component
    alg = SAlgebra(s)
    assert alg.mu121.is_zero
    P = xi_dn(ch, 1) * th_dn(ch, 1)
    assert alg.b2(P, P).is_zero


@pytest.mark.parametrize("name", ["lsa3", "string_sl2", "crossed_sl2", "semidirect_poly"])
def test_generator_agreement(name):
    s = builtin_example(name)["structure"]
    assert generator_agreement_report(s).passed


@pytest.mark.parametrize("name", ["abelian(2,1)", "lsa3", "string_sl2", "crossed_sl2",
                                  "semidirect_poly"])
def test_homotopy_poisson_identities(name):
    s = builtin_example(name)["structure"]
    rep = verify_hp_axioms(s, count=100, seed=3)
    assert rep.passed, [r.check_id for r in rep.failures[:5]]


def test_string_ternary_bracket_nonzero():
    s = string_sl2()["structure"]
    alg = SAlgebra(s)
    val = alg.b3(xi_dn(s.chart, 1), xi_dn(s.chart, 2), xi_dn(s.chart, 3))
    b = killing_form(sl2_structure_constants())
    c = sl2_structure_constants()
    expect = sum(b[0][m] * c[1][2][m] for m in range(3))
    assert val == expect * th_dn(s.chart, 1)


def test_mc_residual_examples():
    ex = lsa3()
    r = mc_residual(ex["structure"], ex["mc"])
    assert all(v.is_zero for v in r)
    zero = MCElement.build(ex["structure"].chart)
    assert all(v.is_zero for v in mc_residual(ex["structure"], zero))
    exs = string_sl2()
    for m in exs["mc_family"]:
        assert all(v.is_zero for v in mc_residual(exs["structure"], m))
    assert mc_report(ex["structure"], ex["mc"]).passed


def test_mc_residual_components_have_distinct_shapes():
    # residuals live in distinct slot bidegrees, so the decomposition of the
    # full residual is forced; a broken element shows up componentwise
    ex = lsa3()
    s = ex["structure"]
    bad = MCElement.build(s.chart, h=[[1, 1, 0], [0, 1, 0], [0, 0, 2]],
                          k={(1, 2, 3): 1})
    r1, r2, r3 = mc_residual(s, bad)
    assert not all(v.is_zero for v in (r1, r2, r3))


def test_solver_volume_slot_is_free_for_lsa3():
    ex = lsa3()
    s = ex["structure"]
    h = [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
    sol = solve_linear_mc(s, h, {(1, 2, 3): None})
    assert not sol.is_empty
    assert sol.dimension == 1
    assert sol.labels == ["K[1,2,3]"]
    m = sol.instantiate(s.chart, h, {(1, 2, 3): None}, free={0: Fraction(7)})
    assert all(v.is_zero for v in mc_residual(s, m))
    assert m.k[(1, 2, 3)] == Poly.const(s.chart, 7)


def test_solver_trivial_constraint_without_unary_map():
    # with zero unary and binary parts every cubic element is flat
    ch = Chart(0, 1, 3)
    s = Lie2Structure.zero(ch)
    h = [[0, 0, 0]]
    sol = solve_linear_mc(s, h, {(1, 2, 3): None})
    assert sol.dimension == 1


def test_solver_whole_pairing_unknown_is_nonlinear():
    s = lsa3()["structure"]
    h = [[None] * 3 for _ in range(3)]
    with pytest.raises(NonlinearError):
        solve_linear_mc(s, h, {(1, 2, 3): 1})


def test_solver_affine_family_on_string():
    # every element of the degree -1 slot is flat: three free parameters
    s = string_sl2()["structure"]
    sol = solve_linear_mc(s, [[None], [None], [None]], None)
    assert sol.dimension == 3


def test_random_multivector_shapes():
    rng = random.Random(0)
    ch = Chart(2, 2, 2)
    for _ in range(30):
        p = random_multivector(ch, rng)
        assert not p.is_zero
        assert isinstance(p.degree(), int)
        from splitlie2.multivectors import is_multivector

        assert is_multivector(p)
