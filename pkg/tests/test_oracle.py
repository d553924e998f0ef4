"""The matrix oracle on modules whose answer is known by construction."""

import random

import pytest
from hypothesis import given, strategies as st

from hopfore.exactfield import CycNum, root_of_unity
from hopfore.oracle import (IncompleteEigenPool, analyze, coset_slice_consistency, decompose,
                            eigen_candidates, fitting_split, jordan_blocks)
from hopfore.weightmods import (Decomposition, NilLabel, build, direct_sum_rep, nonnil,
                                tensor_rep)

from conftest import load

P6 = load("s3_sbar6")
P12 = load("s3_sbar12")
P1 = load("case1")


@pytest.mark.parametrize("exact", [False, True])
@pytest.mark.parametrize("t", [1, 2, 5, 9])
def test_nil_round_trip(t, exact):
    lab = NilLabel(t, P6.character([2], [3]))
    assert decompose(build(lab, P6), P6, exact=exact) == Decomposition.single(lab)


@pytest.mark.parametrize("t,k", [(1, 1), (2, 5), (3, 2)])
def test_nonnil_round_trip_exact(t, k):
    eta = root_of_unity(12, k) - 2
    lab = nonnil(t, P12.character([3], [7]), eta, P12)
    pool = [(lab.beta, lab.eta)]
    assert decompose(build(lab, P12), P12, pool, exact=True) == Decomposition.single(lab)


def test_audit_cross_checks_three_routes():
    lab = nonnil(2, P6.eps, CycNum.from_rational(12, 2), P6)
    rep = tensor_rep(build(NilLabel(4, P6.chi), P6), build(lab, P6), P6)
    pool = eigen_candidates([NilLabel(4, P6.chi)], [lab], P6)
    report = analyze(rep, P6, pool, audit=True)
    assert report.decomposition.dim(P6) == rep.dim
    assert sum(report.inv_dims.values()) == fitting_split(rep, P6).inv_dim


def test_missing_eigenvalue_is_reported():
    lab = nonnil(1, P6.eps, CycNum.from_rational(12, 2), P6)
    with pytest.raises(IncompleteEigenPool):
        decompose(build(lab, P6), P6, [])


def test_case1_direct_sum():
    labs = [NilLabel(3, P1.eps), NilLabel(1, P1.chi), NilLabel(3, P1.eps)]
    rep = direct_sum_rep(*[build(l, P1) for l in labs])
    assert decompose(rep, P1) == Decomposition({labs[0]: 2, labs[1]: 1})


def test_jordan_blocks_of_a_small_matrix():
    one, zero, two = CycNum.one(1), CycNum.zero(1), CycNum.from_rational(1, 2)
    m = [[two, one, zero], [zero, two, zero], [zero, zero, two]]
    assert sorted(jordan_blocks(m, two)) == [1, 2]


@given(st.lists(st.tuples(st.integers(1, 4), st.integers(0, 5)), min_size=1, max_size=4),
       st.booleans())
def test_additivity_of_nilpotent_sums(parts, exact):
    labs = [NilLabel(t, P6.character([1], [k])) for t, k in parts]
    rep = direct_sum_rep(*[build(l, P6) for l in labs])
    assert decompose(rep, P6, exact=exact) == Decomposition([(l, 1) for l in labs])


def test_slices_of_one_coset_agree():
    lab = nonnil(1, P6.eps, CycNum.from_rational(12, 3), P6)
    other = nonnil(1, P6.chi, CycNum.from_rational(12, 1), P6)
    rep = tensor_rep(build(lab, P6), build(other, P6), P6)
    rows = coset_slice_consistency(rep, P6, eigen_candidates([lab], [other], P6),
                                   random.Random(1), samples=3)
    assert rows and all(r["equal"] for r in rows)


def test_modular_and_exact_agree_on_a_degenerate_product():
    theta = CycNum.from_rational(12, 2)
    A = nonnil(1, P6.eps, theta, P6)
    B = nonnil(1, P6.eps, -theta, P6)
    rep = tensor_rep(build(A, P6), build(B, P6), P6)
    pool = eigen_candidates([A], [B], P6)
    assert decompose(rep, P6, pool) == decompose(rep, P6, pool, exact=True)
