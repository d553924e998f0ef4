"""Closed-form tensor rules.  Each expected multiset is written out by hand."""

import pytest
from hypothesis import given, strategies as st

from hopfore.envelope import oracle_tensor
from hopfore.exactfield import CycNum, root_of_unity
from hopfore.hopfdata import UnsupportedCase
from hopfore.tensorrules import (alpha_grid, is_degenerate, shift_first_label, tampered,
                                 tensor_decomp, tensor_labels)
from hopfore.weightmods import Decomposition, NilLabel, nonnil

from conftest import load

P1 = load("case1")
P2 = load("case2_s3")
P4 = load("s2_sbar4")
P6 = load("s3_sbar6")
P3 = load("s3_sbar3")


def D(*pairs):
    return Decomposition(list(pairs))


def V(t, lam):
    return NilLabel(t, lam)


def test_classical_rule_when_q_has_infinite_order():
    e, chi = P1.eps, P1.chi
    got, tr = tensor_labels(V(3, e), V(2, e), P1)
    assert tr.rule_id == "nil-nil:classical"
    assert got == D((V(4, e), 1), (V(2, chi), 1))


def test_period_shift_at_s2():
    e, chi = P4.eps, P4.chi
    got, _ = tensor_labels(V(3, e), V(2, e), P4)
    assert got == D((V(4, e), 1), (V(2, chi), 1))


def test_unit():
    lam = P6.character([2], [1])
    for t in (1, 4, 7):
        got, _ = tensor_labels(V(1, P6.eps), V(t, lam), P6)
        assert got == D((V(t, lam), 1))


def test_square_of_v4_at_s3():
    e, chi = P2.eps, P2.chi
    got, tr = tensor_labels(V(4, e), V(4, e), P2)
    assert tr.rule_id == "nil-nil:low-residue-sum:l<=l_prime"
    want = D((V(7, e), 1), (V(5, chi), 1), (V(3, chi ** 2), 1), (V(1, chi ** 3), 1))
    assert got == want
    assert oracle_tensor(D((V(4, e), 1)), D((V(4, e), 1)), P2, exact=True) == want


def test_v2_squared_scaled():
    e, chi = P2.eps, P2.chi
    A = D((V(2, e), 2))
    assert tensor_decomp(A, D((V(2, e), 1)), P2) == D((V(3, e), 2), (V(1, chi), 2))


@pytest.mark.parametrize("t", [1, 2, 3, 4])
def test_v_2s_against_nonnil(t):
    beta = root_of_unity(12, 1) + 2
    W = nonnil(t, P6.eps, beta, P6)
    got, tr = tensor_labels(V(2 * P6.s, P6.eps), W, P6)
    want = D((nonnil(t + 1, P6.eps, beta, P6), P6.s))
    if t > 1:
        want = want + D((nonnil(t - 1, P6.eps, beta, P6), P6.s))
    assert got == want


def test_v4_against_w2_at_s3():
    lam, sigma = P6.character([2], [1]), P6.character([3], [4])
    eta = CycNum.from_rational(12, 5)
    got, _ = tensor_labels(V(4, lam), nonnil(2, sigma, eta, P6), P6)
    mk = lambda t: nonnil(t, sigma * lam, eta, P6)
    assert got == D((mk(2), 2), (mk(1), 1), (mk(3), 1))


def test_right_side_twists_the_root():
    lam = P6.character([2], [1])
    eta = CycNum.from_rational(12, 5)
    got, tr = tensor_labels(nonnil(1, P6.eps, eta, P6), V(1, lam), P6)
    assert got == D((nonnil(1, lam, P6.at_a(lam) ** P6.s * eta, P6), 1))
    assert tr.rule_id == "nil-nonnil:right"


def test_nonnil_needs_case3():
    with pytest.raises(UnsupportedCase):
        alpha_grid(None, None, P2)


def test_alpha_grid_small_instance():
    one = CycNum.one(12)
    A = nonnil(1, P6.eps, one, P6)
    B = nonnil(1, P6.eps, one, P6)
    assert [a for a, _ in alpha_grid(A, B, P6)] == [4, 0]
    assert is_degenerate(A, B, P6)


def test_generic_nonnil_pair_s_prime_one():
    alpha, beta = CycNum.from_rational(3, 2), CycNum.from_rational(3, 5)
    A, B = nonnil(1, P3.eps, alpha, P3), nonnil(1, P3.eps, beta, P3)
    got, tr = tensor_labels(A, B, P3)
    assert tr.rule_id == "nonnil-nonnil:generic"
    assert got == D((nonnil(1, P3.eps, alpha + beta, P3), P3.s))


def test_degenerate_block():
    alpha = CycNum.from_rational(3, 2)
    A, B = nonnil(1, P3.eps, alpha, P3), nonnil(1, P3.eps, -alpha, P3)
    got, tr = tensor_labels(A, B, P3)
    assert tr.rule_id == "nonnil-nonnil:degenerate"
    assert got == D(*[(V(P3.s, P3.chi_pow(j)), 1) for j in range(P3.sbar)])


def test_two_by_one_generic_at_s3_sbar6():
    theta, eta = CycNum.from_rational(12, 2), CycNum.from_rational(12, 3)
    got, _ = tensor_labels(nonnil(2, P6.eps, theta, P6), nonnil(1, P6.eps, eta, P6), P6)
    assert got.dim(P6) == 72
    assert got == D((nonnil(2, P6.eps, theta + eta, P6), 3), (nonnil(2, P6.eps, theta - eta, P6), 3))


def test_empty_and_unit_decompositions():
    B = D((V(3, P6.chi), 2), (nonnil(1, P6.eps, CycNum.one(12), P6), 1))
    assert tensor_decomp(D(), B, P6) == D()
    assert tensor_decomp(D((V(1, P6.eps), 1)), B, P6) == B


@given(st.integers(1, 12), st.integers(1, 12))
def test_dimension_conserved_and_symmetric(n, t):
    a, _ = tensor_labels(V(n, P6.eps), V(t, P6.chi), P6)
    b, _ = tensor_labels(V(t, P6.chi), V(n, P6.eps), P6)
    assert a == b and a.dim(P6) == n * t


def test_tamper_hook_changes_results_only_inside():
    args = (V(3, P6.eps), V(2, P6.eps), P6)
    clean, _ = tensor_labels(*args)
    with tampered(shift_first_label):
        dirty, _ = tensor_labels(*args)
    assert dirty != clean
    assert tensor_labels(*args)[0] == clean
