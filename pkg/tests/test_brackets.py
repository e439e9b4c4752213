"""Generator brackets: tail-difference oracle, frozen expansions, the
antisymmetry / grading / closure invariants, and the Jacobi sweeps."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from elliptic_poisson.poly import EPoly, IndexSet, ParamPoly
from elliptic_poisson.brackets import (
    BracketSpec,
    SDiffSpec,
    bracket_basis,
    bracket_poly,
    generator_bracket,
    jacobiator,
    s_diff,
    verify_closure,
    verify_jacobi_window,
)

N = ParamPoly.symbol("n")
HALF = Fraction(1, 2)


def truncated_tail_sum(k, a, b, r_max=200):
    """Oracle: S_k(e_a, e_b) summed for r = 0..r_max, no closed form."""
    total = EPoly.zero()
    for r in range(r_max + 1):
        total = total + EPoly.monomial((a + k * r, b - k * r))
    return total


def sdiff_oracle(k, first, second, bound=64):
    """Expand both tail sums to a fixed cutoff, cancel, and drop the
    truncation garbage beyond the index bound."""
    raw = truncated_tail_sum(k, *first) - truncated_tail_sum(k, *second)
    kept = {m: c for m, c in raw.terms() if all(abs(i) <= bound for i in m)}
    return EPoly(kept)


def test_sdiff_examples():
    assert s_diff(SDiffSpec(1, (3, 3), (4, 2))) == EPoly.monomial((3, 3))
    assert s_diff(SDiffSpec(2, (0, 2), (4, -2))) == 2 * EPoly.monomial((0, 2))
    assert s_diff(SDiffSpec(2, (5, 1), (5, 1))) == EPoly.zero()


def test_sdiff_spec_invariants():
    with pytest.raises(ValueError):
        SDiffSpec(1, (0, 2), (1, 2))  # totals differ
    with pytest.raises(ValueError):
        SDiffSpec(2, (0, 2), (1, 1))  # residues differ


@settings(max_examples=80, deadline=None)
@given(
    st.integers(min_value=1, max_value=4),
    st.integers(min_value=-12, max_value=12),
    st.integers(min_value=-12, max_value=12),
    st.integers(min_value=-6, max_value=6),
)
def test_sdiff_matches_oracle(k, a, b, shift):
    c, d = a + k * shift, b - k * shift
    spec = SDiffSpec(k, (a, b), (c, d))
    assert s_diff(spec) == sdiff_oracle(k, (a, b), (c, d))


# -- frozen generator bracket expansions -------------------------------------

def test_bracket_even_even_vanishes():
    assert bracket_basis(2, 4, 6) == EPoly.zero()
    assert bracket_basis(3, 4, 6) == EPoly.zero()
    assert bracket_basis(2, 0, 2) == EPoly.zero()


def test_bracket_frozen_values():
    assert bracket_basis(1, 2, 3) == (
        EPoly.monomial((3, 3), 2 - N * HALF) + EPoly.monomial((2, 4), N - 3)
    )
    assert bracket_basis(2, 2, 3) == EPoly.monomial((0, 2), Fraction(1, 4))
    assert bracket_basis(3, 2, 3) == EPoly.monomial((0, 0), N * Fraction(1, 8))
    assert bracket_basis(1, 0, 2) == EPoly.monomial((0, 3), N - 2)


def test_bracket_diagonal_vanishes():
    for i in (1, 2, 3):
        for alpha in (-2, 0, 3, 7):
            assert bracket_basis(i, alpha, alpha) == EPoly.zero()


WINDOW = list(range(-4, 11))


def test_antisymmetry_window():
    for i in (1, 2, 3):
        for a in WINDOW:
            for b in WINDOW:
                assert bracket_basis(i, a, b) == -bracket_basis(i, b, a)


def test_weight_grading_window():
    offsets = {1: 1, 2: -3, 3: -5}
    for i in (1, 2, 3):
        for a in WINDOW:
            for b in WINDOW:
                w = bracket_basis(i, a, b).weight_profile()
                assert w in ("zero", a + b + offsets[i])


def test_quadraticity_window():
    for i in (1, 2, 3):
        for a in WINDOW:
            for b in WINDOW:
                br = bracket_basis(i, a, b)
                assert br.homogeneous_degree() in (None, 2)
                if br:
                    assert br.homogeneous_degree() == 2


def test_e1_cancellation():
    for n in range(2, 11):
        members = IndexSet.fn(n).members()
        for i in (1, 2, 3):
            for a in members:
                for b in members:
                    assert 1 not in bracket_basis(i, a, b).support()


# -- Leibniz extension --------------------------------------------------------

def test_bracket_poly_elliptic_example():
    got = bracket_poly(EPoly.gen(0), EPoly.gen(2), BracketSpec.elliptic())
    assert got == EPoly.monomial((0, 3), N - 2)


def test_bracket_poly_even_even_component():
    got = bracket_poly(EPoly.gen(2) * EPoly.gen(2), EPoly.gen(0), BracketSpec.basis(2))
    assert got == EPoly.zero()


def test_bracket_poly_antisymmetry_and_leibniz():
    spec = BracketSpec.elliptic()
    P = EPoly.gen(2) * EPoly.gen(3) + EPoly.gen(0)
    Q = EPoly.gen(4) - 2 * EPoly.gen(2)
    R = EPoly.gen(3)
    assert bracket_poly(P, P, spec) == EPoly.zero()
    assert bracket_poly(P, Q, spec) == -bracket_poly(Q, P, spec)
    lhs = bracket_poly(P, Q * R, spec)
    rhs = bracket_poly(P, Q, spec) * R + Q * bracket_poly(P, R, spec)
    assert lhs == rhs


def test_bracket_poly_bilinear():
    spec = BracketSpec.basis(1)
    P, Q, R = EPoly.gen(2), EPoly.gen(3), EPoly.gen(4)
    lhs = bracket_poly(P + Q, R, spec)
    assert lhs == bracket_poly(P, R, spec) + bracket_poly(Q, R, spec)


def test_custom_bracket_combination():
    lam = (Fraction(2), Fraction(-1, 3), Fraction(5))
    spec = BracketSpec.custom(*lam)
    got = generator_bracket(2, 3, spec)
    expect = (lam[0] * bracket_basis(1, 2, 3)
              + lam[1] * bracket_basis(2, 2, 3)
              + lam[2] * bracket_basis(3, 2, 3))
    assert got == expect


# -- Jacobi -------------------------------------------------------------------

def test_jacobiator_examples():
    spec = BracketSpec.custom()
    assert jacobiator(EPoly.gen(0), EPoly.gen(2), EPoly.gen(3), spec) == EPoly.zero()
    assert jacobiator(EPoly.gen(2), EPoly.gen(2), EPoly.gen(3), spec) == EPoly.zero()
    assert jacobiator(EPoly.gen(2), EPoly.gen(3), EPoly.gen(4),
                      BracketSpec.elliptic()) == EPoly.zero()


def test_jacobi_core_window_formal():
    rep = verify_jacobi_window([0] + list(range(2, 8)), BracketSpec.custom())
    assert rep.passed
    assert rep.max_residual == "exact-zero"


def test_jacobi_tiny_window_trivial():
    rep = verify_jacobi_window([0, 2], BracketSpec.elliptic())
    assert rep.passed
    assert rep.parameters["triples"] == 0


def test_jacobi_negative_window_report_only():
    # exploratory sweep outside the function-basis range; record the outcome
    rep = verify_jacobi_window(range(-4, 4), BracketSpec.custom())
    assert rep.status in ("pass", "fail")
    assert isinstance(rep.failures, list)


# -- closure ------------------------------------------------------------------

def test_closure_small_n():
    for n in (2, 3, 4, 5):
        for spec in (BracketSpec.elliptic(), BracketSpec.basis(1),
                     BracketSpec.basis(2), BracketSpec.basis(3)):
            assert verify_closure(n, spec).passed


def test_closure_n2_commutative():
    members = IndexSet.fn(2).members()
    for i in (1, 2, 3):
        for a in members:
            for b in members:
                br = bracket_basis(i, a, b).substitute_params({"n": 2})
                assert br == EPoly.zero()


def test_closure_boundary_coefficient():
    # the top-index coefficient kills the out-of-range monomial
    br = generator_bracket(2, 4, BracketSpec.basis(1), n_value=4)
    assert br.support() <= set(IndexSet.fn(4).members())
    formal = bracket_basis(1, 2, 4)
    assert (5 in formal.support())  # present formally, killed at n = 4


def test_closure_support_example():
    br = generator_bracket(0, 5, BracketSpec.elliptic(), n_value=5)
    assert br.support() <= {0, 2, 3, 4, 5}
