import pytest

from hopfore.exactfield import CycNum, root_of_unity
from hopfore.greenring import GenPoly, RingElem, cls
from hopfore.hopfdata import UnsupportedCase
from hopfore.parsing import ParseError, parse_character, parse_cyc, parse_module_expr, parse_ring_expr
from hopfore.weightmods import Decomposition, NilLabel, nonnil

from conftest import load

P6 = load("s3_sbar6")
P2 = load("case2_s3")


@pytest.mark.parametrize("text,value", [
    ("z", root_of_unity(12, 1)),
    ("z^12", CycNum.one(12)),
    ("(1 + z)^2 - 2*z", 1 + root_of_unity(12, 2)),
    ("3/4", CycNum.from_rational(12, "3/4")),
    ("1/z", root_of_unity(12, 11)),
    ("-z^-1", -root_of_unity(12, 11)),
])
def test_scalars(text, value):
    assert parse_cyc(text, 12) == value


def test_division_by_zero_is_a_parse_error():
    with pytest.raises(ParseError):
        parse_cyc("1/(z - z)", 12)


def test_characters():
    assert parse_character("eps", P6) == P6.eps
    assert parse_character("chr(free=[z^4], tor=[1])", P6) == P6.chi
    assert parse_character("chr(tor=[1])", P6) == P6.character([1], [1])
    with pytest.raises(ParseError):
        parse_character("chr(free=[1, 2])", P6)


def test_module_expression():
    d = parse_module_expr("2*V3(chr(tor=[1])) + W1(eps; eta=z)", P6)
    assert d == Decomposition({NilLabel(3, P6.character([1], [1])): 2,
                               nonnil(1, P6.eps, root_of_unity(12, 1), P6): 1})
    assert parse_module_expr("V1(eps)", P6) == Decomposition.single(NilLabel(1, P6.eps))


def test_zero_root_refused():
    with pytest.raises(ParseError) as info:
        parse_module_expr("W2(eps; eta=0)", P6)
    assert "beta = 0" in str(info.value)


def test_nonnil_outside_case3_refused():
    with pytest.raises((ParseError, UnsupportedCase)):
        parse_module_expr("W1(eps; eta=1)", P2)


@pytest.mark.parametrize("bad", ["V(eps)", "V0(eps)", "V2(eps", "V2(eps) +", "2*", "V2(eps) V1(eps)",
                                 "-V1(eps)", "V2(chr(tor=[1, 2]))"])
def test_syntax_errors_carry_a_position(bad):
    with pytest.raises(ParseError) as info:
        parse_module_expr(bad, P6)
    assert info.value.pos is not None and "^" in str(info.value)


def test_ring_expressions():
    assert isinstance(parse_ring_expr("y*z - 2", P6), GenPoly)
    prod = parse_ring_expr("V2(eps)*V2(eps)", P2)
    assert isinstance(prod, RingElem)
    assert prod == cls(NilLabel(3, P2.eps)) + cls(NilLabel(1, P2.chi))
    with pytest.raises(ParseError):
        parse_ring_expr("x[4]", P6)          # s' = 2 needs an explicit root
