import pytest
from hypothesis import given, strategies as st

from hopfore.exactfield import CycNum, root_of_unity
from hopfore.hopfdata import InvalidParams, UnsupportedCase
from hopfore.weightmods import (Decomposition, NilLabel, build, direct_sum_rep,
                                label_to_json, nonnil, rep_check, tensor_rep)

from conftest import load

P6 = load("s3_sbar6")
P2 = load("case2_s3")


def chars(p):
    free = st.lists(st.sampled_from([1, 2, -1, 3]), min_size=p.group.free_rank,
                    max_size=p.group.free_rank)
    tor = st.tuples(*[st.integers(0, n - 1) for n in p.group.torsion])
    return st.builds(lambda f, t: p.character(f, t), free, tor)


@given(st.integers(1, 8), chars(P6))
def test_nil_realization_is_a_module(t, lam):
    rep = build(NilLabel(t, lam), P6)
    assert rep.dim == t
    assert rep_check(rep, P6)


@given(st.integers(1, 3), chars(P6), st.integers(1, 5))
def test_nonnil_realization_is_a_module(t, sigma, k):
    lab = nonnil(t, sigma, root_of_unity(12, k) + 1, P6)
    rep = build(lab, P6)
    assert rep.dim == t * P6.sbar
    assert rep_check(rep, P6)


@given(st.integers(1, 4), chars(P6), st.integers(1, 3), chars(P6))
def test_tensor_of_modules_is_a_module(n, lam, t, sigma):
    rep = tensor_rep(build(NilLabel(n, lam), P6), build(NilLabel(t, sigma), P6), P6)
    assert rep.dim == n * t
    assert rep_check(rep, P6)


def test_nonnil_label_canonical_form():
    eta = CycNum.from_rational(12, 3)
    a = nonnil(1, P6.chi, eta, P6)
    b = nonnil(1, P6.eps, -eta, P6)           # s' = 2, so -eta has the same square
    assert a == b and a.beta == 9
    assert a.sigma == P6.coset_rep(P6.eps)


def test_beta_zero_rejected():
    with pytest.raises(InvalidParams):
        nonnil(1, P6.eps, CycNum.zero(12), P6)
    with pytest.raises(InvalidParams):
        NilLabel(0, P6.eps)


def test_nonnil_needs_finite_chi():
    with pytest.raises(UnsupportedCase):
        nonnil(1, P2.eps, CycNum.one(3), P2)


def test_decomposition_is_a_multiset():
    a, b = NilLabel(2, P6.eps), NilLabel(1, P6.chi)
    d = Decomposition([(a, 1), (b, 2), (a, 1)])
    assert d[a] == 2 and d[b] == 2
    assert d.dim(P6) == 6
    assert d + Decomposition.single(b) == Decomposition({a: 2, b: 3})
    assert [lab for lab, _ in d.items()] == [b, a]     # shorter first
    with pytest.raises(InvalidParams):
        Decomposition({a: -1})


def test_direct_sum_dimension():
    reps = [build(NilLabel(t, P6.eps), P6) for t in (1, 2, 3)]
    assert direct_sum_rep(*reps).dim == 6


def test_label_json():
    lab = nonnil(2, P6.eps, CycNum.from_rational(12, 2), P6)
    js = label_to_json(lab)
    assert js["type"] == "nonnil" and js["t"] == 2
    assert CycNum.from_json(js["beta"]) == 4
    assert label_to_json(NilLabel(3, P6.eps)) == {"type": "nil", "t": 3, "char": "eps", "beta": None}
