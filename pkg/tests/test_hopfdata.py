import random

import pytest

from hopfore.exactfield import CycNum, root_of_unity
from hopfore.hopfdata import Case, Character, GroupSpec, HopfParams, InvalidParams

from conftest import load


@pytest.mark.parametrize("name,case,s,sbar", [
    ("case1", Case.I, float("inf"), float("inf")),
    ("case2_s3", Case.II, 3, float("inf")),
    ("s2_sbar4", Case.III, 2, 4),
    ("s3_sbar6", Case.III, 3, 6),
    ("s3_sbar12", Case.III, 3, 12),
    ("s3_sbar3", Case.III, 3, 3),
    ("z24", Case.III, 12, 12),
])
def test_classification(name, case, s, sbar):
    p = load(name)
    assert (p.case, p.s, p.sbar) == (case, s, sbar)
    if case is Case.III:
        assert sbar % s == 0 and p.sprime == sbar // s
        assert mult_order_ok(p.xi, p.sprime)
        assert p.chi_pow(p.sbar) == p.eps
    if s != float("inf"):
        assert p.q ** s == 1


def mult_order_ok(x, n):
    return x ** n == 1 and all(x ** d != 1 for d in range(1, n))


def test_chi_of_a_must_not_be_one():
    G = GroupSpec(0, (6,))
    with pytest.raises(InvalidParams):
        HopfParams(G, (1,), Character(G, 6, (), (0,)), 6)


def test_torsion_needs_enough_roots():
    G = GroupSpec(0, (8,))
    with pytest.raises(InvalidParams):
        HopfParams(G, (1,), Character(G, 4, (), (1,)), 4)


def test_character_arity():
    G = GroupSpec(1, (4,))
    with pytest.raises(InvalidParams):
        Character(G, 4, (), (1,))
    with pytest.raises(InvalidParams):
        Character(G, 4, (CycNum.zero(4),), (1,))


def test_character_group_laws():
    p = load("s3_sbar6")
    lam = p.character([root_of_unity(12, 1) + 2], [5])
    assert lam * lam.inverse() == p.eps
    assert (lam ** 3) == lam * lam * lam
    assert p.at_a(lam * p.chi) == p.at_a(lam) * p.at_a(p.chi)


def test_coset_rep_partitions_samples():
    p = load("s3_sbar12")
    rng = random.Random(3)
    sample = [p.character([root_of_unity(12, rng.randrange(12)) * rng.choice([1, 2])],
                          [rng.randrange(12)]) for _ in range(40)]
    for lam in sample:
        rep = p.coset_rep(lam)
        assert p.coset_rep(rep) == rep
        assert p.coset_rep(lam * p.chi_pow(5)) == rep
    for lam in sample:
        for mu in sample:
            related = any(lam == mu * p.chi_pow(j) for j in range(p.sbar))
            assert p.same_coset(lam, mu) == related


def test_coset_rep_is_identity_without_torsion_chi():
    p = load("case2_s3")
    lam = p.character([2, 3], [])
    assert p.coset_rep(lam) == lam
