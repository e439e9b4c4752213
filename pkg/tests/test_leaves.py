"""Point-evaluation homomorphism and the leaf-side checks: bracket
intertwining under both sign conventions, kernel membership, collision
vanishing, and the closed-form Poisson determinant."""

from fractions import Fraction
from random import Random

import pytest

from elliptic_poisson.casimirs import casimirs
from elliptic_poisson.leaves import (
    CONVENTION_PRINTED,
    LeafConfig,
    diagonal_vanish_check,
    draw_leaf_sample,
    kernel_check,
    leaf_bracket_xp,
    nondegeneracy_check,
    prop3_check,
    xp_eval,
)
from elliptic_poisson.poly import EPoly, IndexSet
from elliptic_poisson.weierstrass import (
    SamplePlan,
    e_func_and_deriv,
    lattice_init,
    numeric_params,
)

L = lattice_init(1, 1j)
SKEW = lattice_init(1, 0.3 + 1.1j)


def config(p, n, lattice=L):
    return LeafConfig(p=p, n_value=Fraction(n), lattice=lattice)


def test_xp_of_unit_sums_weights():
    cfg = config(3, 7)
    s = draw_leaf_sample(cfg, Random(1))
    got = xp_eval(cfg, EPoly.gen(0), {}, s)
    assert abs(got - sum(s.psi)) < 1e-12 * (1 + abs(got))


def test_xp_rank1_collapse_at_p1():
    cfg = config(1, 4)
    s = draw_leaf_sample(cfg, Random(2))
    c0 = casimirs(4).elements[0]
    value = xp_eval(cfg, c0, numeric_params(L, 4), s)
    assert abs(value) < 1e-10


def test_xp_multiplicative():
    cfg = config(2, 5)
    s = draw_leaf_sample(cfg, Random(3))
    params = numeric_params(L, 5)
    P = EPoly.gen(2) * EPoly.gen(3) - 2 * EPoly.gen(0)
    Q = EPoly.gen(4) + EPoly.gen(2)
    lhs = xp_eval(cfg, P * Q, params, s)
    rhs = xp_eval(cfg, P, params, s) * xp_eval(cfg, Q, params, s)
    assert abs(lhs - rhs) < 1e-9 * (1 + abs(lhs))


def test_leaf_bracket_same_index_vanishes():
    cfg = config(3, 6)
    s = draw_leaf_sample(cfg, Random(4))
    value, scale = leaf_bracket_xp(cfg, 4, 4, s, with_scale=True)
    assert abs(value) < 1e-10 * scale


def test_leaf_bracket_p1_closed_form():
    cfg = config(1, 5)
    s = draw_leaf_sample(cfg, Random(5))
    u, psi = s.u[0], s.psi[0]
    for f_idx, g_idx in ((0, 2), (2, 3), (3, 4)):
        f, df = e_func_and_deriv(L, f_idx, u)
        g, dg = e_func_and_deriv(L, g_idx, u)
        expect = (5 - 2) / 2 * (df * g - f * dg) * psi * psi
        got = leaf_bracket_xp(cfg, f_idx, g_idx, s)
        assert abs(got - expect) < 1e-9 * (1 + abs(expect))


def test_leaf_bracket_matches_two_point_kernel():
    # the image bracket equals half the double sum of two-point values
    from elliptic_poisson.weierstrass import func_bracket
    cfg = config(2, 5)
    s = draw_leaf_sample(cfg, Random(6))
    lhs = leaf_bracket_xp(cfg, 0, 2, s)
    total = 0j
    for a in range(2):
        for b in range(2):
            total += func_bracket(L, 5, 0, 2, s.u[a], s.u[b]) * s.psi[a] * s.psi[b]
    assert abs(lhs - total / 2) < 1e-6 * (1 + abs(lhs))


@pytest.mark.parametrize("p,n", [(1, 4), (2, 5), (2, 6), (3, 7)])
def test_prop3_acceptance_cases(p, n):
    cfg = config(p, n)
    rep = prop3_check(cfg, IndexSet.fn(n).members(),
                      SamplePlan(seed=11, count=10, tolerance=1e-6))
    assert rep.passed, rep.failures[:2]
    assert rep.max_residual < 1e-6


def test_prop3_printed_convention_fails():
    cfg = config(2, 5)
    rep = prop3_check(cfg, IndexSet.fn(5).members(),
                      SamplePlan(seed=11, count=10, tolerance=1e-2),
                      convention=CONVENTION_PRINTED)
    assert not rep.passed
    assert rep.max_residual > 1e-2


def test_prop3_n2_trivial():
    cfg = config(1, 2)
    rep = prop3_check(cfg, IndexSet.fn(2).members(),
                      SamplePlan(seed=11, count=5, tolerance=1e-6))
    assert rep.passed


@pytest.mark.parametrize("n,p", [(4, 1), (6, 2), (3, 1), (5, 2), (7, 3)])
def test_kernel_membership(n, p):
    cfg = config(p, n)
    rep = kernel_check(cfg, casimirs(n), SamplePlan(seed=5, count=5, tolerance=1e-8))
    assert rep.passed, rep.failures[:2]


def test_kernel_needs_small_p():
    cfg = config(2, 4)
    with pytest.raises(ValueError):
        kernel_check(cfg, casimirs(4), SamplePlan(seed=5, count=2, tolerance=1e-8))


@pytest.mark.parametrize("n,p", [(4, 1), (6, 2), (3, 1), (5, 2)])
def test_diagonal_vanishing(n, p):
    cfg = config(p, n)
    for elem in casimirs(n).elements:
        rep = diagonal_vanish_check(cfg, elem,
                                    SamplePlan(seed=6, count=3, tolerance=1e-8))
        assert rep.passed, rep.failures[:2]


def test_diagonal_patterns_even_case_single_collision():
    cfg = config(2, 6)
    rep = diagonal_vanish_check(cfg, casimirs(6).elements[0],
                                SamplePlan(seed=6, count=2, tolerance=1e-8))
    assert rep.parameters["patterns"] == [[2, 1]]


def test_diagonal_negative_control():
    cfg = config(1, 4)
    rep = diagonal_vanish_check(cfg, EPoly.gen(2) * EPoly.gen(2),
                                SamplePlan(seed=6, count=2, tolerance=1e-8))
    assert not rep.passed


def test_nondegeneracy_p1():
    cfg = config(1, 4)
    s = draw_leaf_sample(cfg, Random(17))
    rep = nondegeneracy_check(cfg, s)
    assert rep.passed
    assert rep.parameters["degenerate"] is False
    # closed form for p = 1: |(n-2)/2| |psi| = |psi| (sign not pinned)
    assert rep.parameters["closed_form"] in ("1", "-1")


def test_nondegeneracy_open_case():
    cfg = config(2, 6, SKEW)
    s = draw_leaf_sample(cfg, Random(18))
    rep = nondegeneracy_check(cfg, s)
    assert rep.passed
    assert rep.parameters["degenerate"] is False


def test_nondegeneracy_boundary_degenerate():
    cfg = config(2, 4)
    s = draw_leaf_sample(cfg, Random(19))
    rep = nondegeneracy_check(cfg, s)
    assert rep.passed
    assert rep.parameters["degenerate"] is True
    assert rep.parameters["closed_form"] == "0"


def test_leaf_sample_admissibility():
    cfg = config(3, 7)
    s = draw_leaf_sample(cfg, Random(20))
    assert len(s.u) == len(s.psi) == 3
    assert all(abs(psi) > 0.4 for psi in s.psi)
    from elliptic_poisson.weierstrass import lattice_distance
    for i in range(3):
        assert lattice_distance(L, s.u[i]) >= 0.05 * L.r_min
        for j in range(i + 1, 3):
            assert lattice_distance(L, s.u[i] - s.u[j]) >= 0.05 * L.r_min
