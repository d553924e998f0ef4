from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hopfore.exactfield import (CycNum, DivisionByZero, InvalidArgument, embed, embedded_root,
                                galois, lies_in, mult_order, q_binom, restrict, root_of_unity,
                                smallest_subfield)

FIELDS = [1, 3, 4, 8, 12, 24]


@st.composite
def cyc(draw, N=None, nonzero=False):
    N = N or draw(st.sampled_from(FIELDS))
    terms = draw(st.lists(st.tuples(st.integers(-4, 4), st.integers(0, N - 1)), max_size=4))
    x = CycNum.from_rational(N, Fraction(draw(st.integers(-6, 6)), draw(st.integers(1, 3))))
    for c, k in terms:
        x = x + root_of_unity(N, k) * c
    if nonzero and x.is_zero():
        x = x + 1
    return x


def same_field(n=2, nonzero=False):
    return st.sampled_from(FIELDS).flatmap(
        lambda N: st.tuples(*[cyc(N, nonzero) for _ in range(n)]))


@given(same_field(3))
def test_ring_axioms(t):
    a, b, c = t
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == CycNum.zero(a.N)


@given(cyc(nonzero=True))
def test_inverse(a):
    assert a * a.inverse() == CycNum.one(a.N)
    assert a / a == 1


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        CycNum.zero(12).inverse()


@pytest.mark.parametrize("N", FIELDS)
def test_root_orders(N):
    z = root_of_unity(N, 1)
    assert z ** N == 1
    L = N if N % 2 == 0 else 2 * N
    assert mult_order(z) == (N if N > 1 else 1)
    assert mult_order(-CycNum.one(N)) == 2
    assert mult_order(embedded_root(L, 1, N)) == L


def test_infinite_order():
    assert mult_order(CycNum.from_rational(1, 2)) == float("inf")
    assert mult_order(root_of_unity(12, 1) + 1) == float("inf")


def test_root_outside_field():
    with pytest.raises(InvalidArgument):
        embedded_root(8, 1, 12)


def test_mixed_fields_rejected():
    with pytest.raises(InvalidArgument):
        root_of_unity(3, 1) + root_of_unity(4, 1)


@given(cyc())
def test_json_round_trip(a):
    assert CycNum.from_json(a.to_json()) == a


@given(same_field(2))
def test_galois_is_a_homomorphism(t):
    a, b = t
    u = 5 if a.N % 5 else 7
    assert galois(a * b, u) == galois(a, u) * galois(b, u)
    assert galois(a + b, u) == galois(a, u) + galois(b, u)


def test_subfield_restriction_round_trip():
    x = root_of_unity(12, 4) * 3 + 2        # lives in Q(zeta_3)
    assert lies_in(x, 3)
    assert not lies_in(root_of_unity(12, 1), 3)
    assert smallest_subfield([x], 12) == 3
    assert embed(restrict(x, 3), 12) == x


def test_q_binomial_at_root_of_unity():
    q = root_of_unity(3, 1)
    assert q_binom(3, 1, q) == 0
    assert q_binom(4, 2, CycNum.one(3)) == 6
    assert q_binom(2, 1, q) == 1 + q
