"""The Green ring of weight modules: products of classes, generator polynomials,
and machine checks of the standard identities and bases.

Ring elements live in the basis of indecomposable classes (signed label sums).
Generator polynomials are a second view: integer combinations of monomials
lam * y^t * z^m * x_{beta_1} ... x_{beta_k}, multiplied in the skew group ring
where moving a character past an x twists it: x_beta lam = lam x_{lam(a)^sbar beta}.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from flint import fmpz_mat

from .exactfield import CycNum, INFINITE, root_of_unity
from .hopfdata import Case, Character, HopfParams, InvalidParams, UnsupportedCase, format_character
from .tensorrules import tensor_labels
from .weightmods import Label, LabelSum, NilLabel, NonNilLabel


class RingElem(LabelSum):
    """Signed integer combination of indecomposable classes."""

    __slots__ = ()
    signed = True


def cls(lab: Label) -> RingElem:
    return RingElem.single(lab)


def char_elem(lam: Character) -> RingElem:
    """The class of V_1(lam), identified with lam."""
    return cls(NilLabel(1, lam))


def ring_mul(u: LabelSum, v: LabelSum, p: HopfParams) -> RingElem:
    """[U][V] = [U (x) V], extended bilinearly."""
    cache = p._cache.setdefault("label_products", {})
    out: Dict[Label, int] = {}
    for a, ma in u.items():
        for b, mb in v.items():
            key = (a, b)
            prod = cache.get(key)
            if prod is None:
                prod = cache[key] = tensor_labels(a, b, p)[0].raw()
            for lab, m in prod.items():
                out[lab] = out.get(lab, 0) + ma * mb * m
    return RingElem(out)


def ring_pow(u: LabelSum, k: int, p: HopfParams) -> RingElem:
    out = char_elem(p.eps)
    for _ in range(k):
        out = ring_mul(out, u, p)
    return out


# generator polynomials

@dataclass(frozen=True)
class XGen:
    """x_beta = [V_1(eps, beta)] with a chosen root eta (eta^{s'} = beta)."""

    beta: CycNum
    eta: CycNum = field(compare=False, hash=False)

    @classmethod
    def from_root(cls, alpha: CycNum, p: HopfParams) -> "XGen":
        """x_{[alpha]} = x_{alpha^{s'}}."""
        p.require_case3("x generators")
        if alpha.is_zero():
            raise InvalidParams("x generators need a nonzero index")
        return cls(alpha ** p.sprime, alpha)

    def twist(self, lam: Character, p: HopfParams) -> "XGen":
        la = p.at_a(lam)
        return XGen(self.beta * la ** p.sbar, self.eta * la ** p.s)

    def key(self):
        return self.beta.key()

    def __str__(self):
        return f"x[{self.beta}]"


@dataclass(frozen=True)
class Monomial:
    lam: Character
    t: int = 0
    m: int = 0
    xs: Tuple[XGen, ...] = ()

    def __post_init__(self):
        if self.t < 0 or self.m < 0:
            raise InvalidParams("generator exponents must be nonnegative")
        object.__setattr__(self, "xs", tuple(sorted(self.xs, key=XGen.key)))

    def sort_key(self):
        return (self.lam.key(), self.t, self.m, tuple(x.key() for x in self.xs))

    def __str__(self):
        parts = []
        if not self.lam.is_trivial() or not (self.t or self.m or self.xs):
            parts.append(format_character(self.lam))
        for name, e in (("y", self.t), ("z", self.m)):
            if e:
                parts.append(name if e == 1 else f"{name}^{e}")
        parts.extend(str(x) for x in self.xs)
        return " * ".join(parts)


class GenPoly:
    """Integer combination of monomials in the skew group ring over Z[y, z, x_beta]."""

    __slots__ = ("p", "_d")

    def __init__(self, p: HopfParams, terms: Union[Dict[Monomial, int], Iterable, None] = None):
        self.p = p
        d: Dict[Monomial, int] = {}
        if terms is not None:
            it = terms.items() if isinstance(terms, dict) else terms
            for mono, c in it:
                if c:
                    _check_alphabet(mono, p)
                    d[mono] = d.get(mono, 0) + c
                    if not d[mono]:
                        del d[mono]
        self._d = d

    # constructors
    @classmethod
    def const(cls, k: int, p: HopfParams) -> "GenPoly":
        return cls(p, {Monomial(p.eps): k})

    @classmethod
    def char(cls, lam: Character, p: HopfParams) -> "GenPoly":
        return cls(p, {Monomial(lam): 1})

    @classmethod
    def y(cls, p: HopfParams) -> "GenPoly":
        return cls(p, {Monomial(p.eps, 1): 1})

    @classmethod
    def z(cls, p: HopfParams) -> "GenPoly":
        return cls(p, {Monomial(p.eps, 0, 1): 1})

    @classmethod
    def x(cls, gen: XGen, p: HopfParams) -> "GenPoly":
        return cls(p, {Monomial(p.eps, 0, 0, (gen,)): 1})

    def items(self):
        return sorted(self._d.items(), key=lambda kv: kv[0].sort_key())

    def __eq__(self, other):
        return isinstance(other, GenPoly) and self._d == other._d

    def __hash__(self):
        return hash(frozenset(self._d.items()))

    def __bool__(self):
        return bool(self._d)

    def _lift(self, other) -> "GenPoly":
        if isinstance(other, GenPoly):
            return other
        if isinstance(other, int):
            return GenPoly.const(other, self.p)
        if isinstance(other, Character):
            return GenPoly.char(other, self.p)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        d = dict(self._d)
        for mono, c in other._d.items():
            d[mono] = d.get(mono, 0) + c
        return GenPoly(self.p, d)

    __radd__ = __add__

    def __neg__(self):
        return GenPoly(self.p, {k: -c for k, c in self._d.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return GenPoly(self.p, {k: c * other for k, c in self._d.items()})
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out: Dict[Monomial, int] = {}
        for a, ca in self._d.items():
            for b, cb in other._d.items():
                mono = _mono_mul(a, b, self.p)
                out[mono] = out.get(mono, 0) + ca * cb
        return GenPoly(self.p, out)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self * other
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other * self

    def __pow__(self, k: int):
        out = GenPoly.const(1, self.p)
        for _ in range(k):
            out = out * self
        return out

    def __str__(self):
        if not self._d:
            return "0"
        out = ""
        for mono, c in self.items():
            body = str(mono)
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            term = body if mag == 1 else f"{mag} * {body}"
            out += (f" {sign} " if out else ("-" if c < 0 else "")) + term
        return out

    def __repr__(self):
        return f"GenPoly({self})"

    def to_json(self) -> str:
        return str(self)


def _check_alphabet(mono: Monomial, p: HopfParams):
    if p.case is Case.I and (mono.m or mono.xs):
        raise InvalidParams("only characters and y are generators when |q| is infinite")
    if p.case is Case.II and mono.xs:
        raise InvalidParams("x generators exist only when |chi| is finite")


def _mono_mul(a: Monomial, b: Monomial, p: HopfParams) -> Monomial:
    """(lam r)(sigma t) = (lam sigma)(r^sigma t)."""
    xs = tuple(x.twist(b.lam, p) for x in a.xs) + b.xs
    return Monomial(a.lam * b.lam, a.t + b.t, a.m + b.m, xs)


def gen_class(name: str, p: HopfParams, gen: Optional[XGen] = None) -> RingElem:
    """Classes of the generators y = [V_2(eps)], z = [V_{s+1}(eps)], x_beta = [V_1(eps, beta)]."""
    if name == "y":
        return cls(NilLabel(2, p.eps))
    if name == "z":
        if p.s == INFINITE:
            raise UnsupportedCase("z needs |q| finite")
        return cls(NilLabel(p.s + 1, p.eps))
    if name == "x":
        p.require_case3("x generators")
        return cls(NonNilLabel(1, p.coset_rep(p.eps), gen.beta, gen.eta))
    raise ValueError(name)


def _power(name: str, k: int, p: HopfParams) -> RingElem:
    cache = p._cache.setdefault("gen_powers", {})
    key = (name, k)
    if key not in cache:
        cache[key] = (char_elem(p.eps) if k == 0
                      else ring_mul(_power(name, k - 1, p), gen_class(name, p), p))
    return cache[key]


def expand_monomial(mono: Monomial, p: HopfParams) -> RingElem:
    cache = p._cache.setdefault("yz_products", {})
    key = (mono.t, mono.m)
    if key not in cache:
        cache[key] = ring_mul(_power("y", mono.t, p), _power("z", mono.m, p), p)
    out = ring_mul(char_elem(mono.lam), cache[key], p)
    for gen in mono.xs:
        out = ring_mul(out, gen_class("x", p, gen), p)
    return out


def expand(gp: Union[GenPoly, LabelSum], p: HopfParams) -> RingElem:
    """Substitute generator classes and multiply out, left to right."""
    if isinstance(gp, LabelSum):
        return RingElem(gp.raw())
    out: Dict[Label, int] = {}
    for mono, c in gp.items():
        for lab, m in expand_monomial(mono, p).items():
            out[lab] = out.get(lab, 0) + c * m
    return RingElem(out)


# expressing indecomposable classes through generators

def _chi(k: int, p: HopfParams) -> GenPoly:
    return GenPoly.char(p.chi_pow(k), p)


def small_nil_poly(m: int, p: HopfParams) -> GenPoly:
    """sum_i (-1)^i C(m-1-i, i) chi^i y^{m-1-2i}, the class of V_m(eps) while m <= |q|."""
    out = GenPoly(p)
    for i in range((m - 1) // 2 + 1):
        c = (-1) ** i * math.comb(m - 1 - i, i)
        out = out + GenPoly(p, {Monomial(p.chi_pow(i), m - 1 - 2 * i): c})
    return out


def past_period_poly(k: int, p: HopfParams) -> GenPoly:
    """The class of V_{s+k}(eps), 1 <= k <= s, through y, z and the class of V_s(eps)."""
    s = p.s
    first = small_nil_poly(k, p) * GenPoly.z(p)
    second = GenPoly(p)
    for i in range((k - 2) // 2 + 1) if k >= 2 else ():
        c = (-1) ** i * math.comb(k - 2 - i, i)
        second = second + GenPoly(p, {Monomial(p.chi_pow(i + 1), k - 2 - 2 * i): c})
    return first - second * small_nil_poly(s, p)


def _shifted_z(p: HopfParams) -> GenPoly:
    """z - (chi + chi^2 + ... + chi^{s-1})."""
    out = GenPoly.z(p)
    for j in range(1, p.s):
        out = out - _chi(j, p)
    return out


def period_multiple_poly(k: int, p: HopfParams) -> GenPoly:
    """The class of V_{ks}(eps) for k >= 3 through the classes of V_{2s} and V_s."""
    s = p.s
    w = _shifted_z(p)
    two, one = past_period_poly(s, p), small_nil_poly(s, p)
    out = GenPoly(p)
    for i in range((k - 2) // 2 + 1):
        out = out + _chi(s * i, p) * (w ** (k - 2 - 2 * i)) * two * ((-1) ** i * math.comb(k - 2 - i, i))
    for i in range((k - 3) // 2 + 1) if k >= 3 else ():
        out = out - _chi(s * (i + 1), p) * (w ** (k - 3 - 2 * i)) * one * ((-1) ** i * math.comb(k - 3 - i, i))
    return out


def _express_eps(m: int, p: HopfParams) -> Tuple[GenPoly, str]:
    cache = p._cache.setdefault("express_eps", {})
    if m in cache:
        return cache[m]
    s = p.s
    if s == INFINITE or m <= s:
        res = (small_nil_poly(m, p), "closed form in y")
    elif m <= 2 * s:
        res = (past_period_poly(m - s, p), "closed form past one period")
    elif m % s == 0:
        res = (period_multiple_poly(m // s, p), "closed form at a period multiple")
    else:
        # V_{s+1} (x) V_{m-s} peels off V_m plus known smaller classes
        r, l = divmod(m - s, s)
        rest = GenPoly.z(p) * _express_eps(m - s, p)[0]
        for i in range(1, l):
            rest = rest - _chi(i, p) * _express_eps((r + 1) * s, p)[0]
        rest = rest - _chi(l, p) * _express_eps(m - 2 * l, p)[0]
        for i in range(l + 1, s):
            rest = rest - _chi(i, p) * _express_eps(r * s, p)[0]
        rest = rest - _chi(s, p) * _express_eps(m - 2 * s, p)[0]
        res = (rest, "recursion through z")
    cache[m] = res
    return res


def express_nil(m: int, lam: Character, p: HopfParams, verify: bool = True) -> GenPoly:
    """A generator polynomial whose expansion is [V_m(lam)]."""
    if m < 1:
        raise InvalidParams("module length must be at least 1")
    poly = GenPoly.char(lam, p) * _express_eps(m, p)[0]
    if verify and expand(poly, p) != cls(NilLabel(m, lam)):
        raise RuntimeError(f"generator expression for V{m} does not expand back")
    return poly


def express_nonnil(t: int, sigma: Character, gen: XGen, p: HopfParams, verify: bool = True) -> GenPoly:
    """A generator polynomial whose expansion is [V_t(sigma, beta)]."""
    p.require_case3("express_nonnil")
    if t < 1:
        raise InvalidParams("module length must be at least 1")
    step = GenPoly.z(p) - (p.s - 1)
    prev, cur = None, GenPoly.char(sigma, p) * GenPoly.x(gen, p)
    for _ in range(t - 1):
        nxt = step * cur - (prev if prev is not None else GenPoly(p))
        prev, cur = cur, nxt
    if verify:
        want = cls(NonNilLabel(t, p.coset_rep(sigma), gen.beta, gen.eta))
        if expand(cur, p) != want:
            raise RuntimeError(f"generator expression for W{t} does not expand back")
    return cur


def express(lab: Label, p: HopfParams, verify: bool = True) -> GenPoly:
    if isinstance(lab, NilLabel):
        return express_nil(lab.t, lab.lam, p, verify)
    return express_nonnil(lab.t, lab.sigma, XGen(lab.beta, lab.eta), p, verify)


# relation checks

Side = Union[GenPoly, LabelSum]


def check_relation(lhs: Side, rhs: Side, p: HopfParams) -> Tuple[bool, RingElem]:
    """Expand both sides; returns (equal, lhs - rhs)."""
    a, b = expand(lhs, p), expand(rhs, p)
    diff = a + b.scale(-1)
    return (not diff, diff)


def _record(rid: str, lhs: Side, rhs: Side, p: HopfParams, **extra) -> dict:
    ok, diff = check_relation(lhs, rhs, p)
    rec = {"relation_id": rid, "status": "pass" if ok else "fail",
           "lhs": str(lhs), "rhs": str(rhs), "diff": str(diff)}
    rec.update(extra)
    return rec


def y_power_expected(m: int, p: HopfParams) -> RingElem:
    """sum_i ((m-2i+1)/(m-i+1)) C(m, i) [V_{m+1-2i}(chi^i)]; coefficients must be integers."""
    out = {}
    for i in range(m // 2 + 1):
        c = Fraction(m - 2 * i + 1, m - i + 1) * math.comb(m, i)
        if c.denominator != 1:
            raise ArithmeticError(f"non-integral coefficient {c} in the power of y")
        out[NilLabel(m + 1 - 2 * i, p.chi_pow(i))] = int(c)
    return RingElem(out)


def y_period_rhs(p: HopfParams) -> GenPoly:
    """Right side of the identity reducing y^s."""
    s = p.s
    out = (GenPoly.const(1, p) + _chi(1, p)) * small_nil_poly(s, p)
    for i in range(1, (s - 1) // 2 + 1):
        for j in range((s - 2 * i - 1) // 2 + 1):
            c = Fraction(s - 2 * i, s - i) * math.comb(s - 1, i) * math.comb(s - 2 * i - 1 - j, j)
            if c.denominator != 1:
                raise ArithmeticError("non-integral coefficient in the y^s identity")
            out = out + GenPoly(p, {Monomial(p.chi_pow(i + j), s - 2 * i - 2 * j): (-1) ** j * int(c)})
    return out


def z_power_structure(m: int, p: HopfParams) -> dict:
    """z^m = [V_{ms+1}(eps)] + E with E an actual module built from V_t, t <= ms."""
    e = expand(GenPoly.z(p) ** m, p)
    top = NilLabel(m * p.s + 1, p.eps)
    rest = [(lab, c) for lab, c in e.items() if lab != top]
    ok = (e[top] == 1 and all(isinstance(lab, NilLabel) and lab.t <= m * p.s and c > 0
                              for lab, c in rest))
    return {"relation_id": "z-power-leading-term", "status": "pass" if ok else "fail",
            "lhs": f"z^{m}", "rhs": f"{top} + E (E nilpotent, lengths <= {m * p.s})",
            "diff": str(RingElem(dict(rest))), "m": m}


def _sum_over_orbit_of_vs(p: HopfParams) -> GenPoly:
    out = GenPoly(p)
    small = small_nil_poly(p.s, p)
    for i in range(p.sbar):
        out = out + _chi(i, p) * small
    return out


def x_relations(lam: Character, theta: CycNum, eta: CycNum, p: HopfParams) -> List[dict]:
    """The identities for x generators at one sample (lam, [theta], [eta])."""
    p.require_case3("x relations")
    s, sp, xi = p.s, p.sprime, p.xi
    X = lambda a: GenPoly.x(XGen.from_root(a, p), p)
    xa, xb = X(theta), X(eta)
    chi, lamp, y, z = _chi(1, p), GenPoly.char(lam, p), GenPoly.y(p), GenPoly.z(p)
    recs = [
        _record("x-absorbs-chi:left", chi * xa, xa, p),
        _record("x-absorbs-chi:right", xa * chi, xa, p),
        _record("x-skew-commutes-with-characters", xa * lamp,
                lamp * X(theta * p.at_a(lam) ** s), p),
        _record("y-acts-on-x-by-two:left", y * xa, xa * 2, p),
        _record("y-acts-on-x-by-two:right", xa * y, xa * 2, p),
        _record("z-commutes-with-x", z * xa, xa * z, p),
    ]
    opp = X(-theta)
    rhs = _sum_over_orbit_of_vs(p)
    for i in range(1, sp):
        rhs = rhs + X((1 - xi ** i) * theta) * s
    recs.append(_record("x-times-opposite-x", xa * opp, rhs, p, branch="opposite"))
    recs.append(_record("x-times-opposite-x:reversed", opp * xa, rhs, p, branch="opposite"))
    if (eta ** sp) != ((-theta) ** sp):
        rhs = GenPoly(p)
        for i in range(sp):
            rhs = rhs + X(theta + eta * xi ** i) * s
        recs.append(_record("x-times-x", xa * xb, rhs, p, branch="generic"))
        recs.append(_record("x-times-x:reversed", xb * xa, rhs, p, branch="generic"))
    return recs


def random_character(p: HopfParams, rng: random.Random) -> Character:
    free = [root_of_unity(p.N, rng.randrange(p.N)) * rng.choice([1, 2, 3, -1, -2])
            for _ in range(p.group.free_rank)]
    tor = [rng.randrange(n) for n in p.group.torsion]
    return p.character(free, tor)


def random_scalar(p: HopfParams, rng: random.Random) -> CycNum:
    while True:
        v = (CycNum.from_rational(p.N, rng.randint(-3, 3))
             + root_of_unity(p.N, rng.randrange(p.N)) * rng.randint(-2, 2))
        if not v.is_zero():
            return v


def relation_suite(p: HopfParams, samples: int = 10, seed: int = 0, max_m: int = 8) -> List[dict]:
    """Check every identity available for the configured case."""
    rng = random.Random(seed)
    recs: List[dict] = []
    q_order = p.s
    ylim = max_m if q_order == INFINITE else min(max_m, q_order - 1)
    if p.case is Case.III:
        ylim = min(max_m, p.s - 1)
    y = GenPoly.y(p)
    for m in range(ylim + 1):
        recs.append(_record("y-power-decomposition", y ** m, y_power_expected(m, p), p, m=m))
    if p.case is Case.I:
        for m in range(1, max_m + 1):
            recs.append(_record("nil-class-in-y", small_nil_poly(m, p), cls(NilLabel(m, p.eps)), p, m=m))
    else:
        s = p.s
        for m in range(1, min(s, 4) + 1):
            recs.append(_record("nil-class-below-period", small_nil_poly(m, p),
                                cls(NilLabel(m, p.eps)), p, m=m))
        for m in range(2, min(s, 4) + 1):
            recs.append(_record("nil-class-past-period", past_period_poly(m, p),
                                cls(NilLabel(s + m, p.eps)), p, m=m))
        for m in range(3, 5):
            recs.append(_record("nil-class-at-period-multiple", period_multiple_poly(m, p),
                                cls(NilLabel(m * s, p.eps)), p, m=m))
        recs.append(_record("y-power-at-period", y ** s, y_period_rhs(p), p))
        for m in range(0, 5):
            recs.append(z_power_structure(m, p))
    if p.case is Case.III:
        opposite_seen = generic_seen = 0
        for k in range(samples):
            lam = random_character(p, rng)
            theta = random_scalar(p, rng)
            eta = -theta * p.xi ** rng.randrange(p.sprime) if k % 3 == 0 else random_scalar(p, rng)
            for rec in x_relations(lam, theta, eta, p):
                rec["sample"] = k
                recs.append(rec)
                if rec.get("branch") == "generic":
                    generic_seen += 1
            opposite_seen += 1
        recs.append({"relation_id": "both-product-branches-sampled",
                     "status": "pass" if generic_seen and opposite_seen else "fail",
                     "lhs": f"generic={generic_seen}", "rhs": f"opposite={opposite_seen}", "diff": ""})
        recs.append(skew_witness(p, rng))
    else:
        recs.append(commutativity(p, rng, pairs=samples))
    return recs


def _random_elem(p: HopfParams, rng: random.Random, max_dim: int = 6) -> RingElem:
    out = {}
    for _ in range(rng.randint(1, 3)):
        lam = random_character(p, rng)
        out[NilLabel(rng.randint(1, max_dim), lam)] = rng.choice([1, 2, -1])
    return RingElem(out)


def commutativity(p: HopfParams, rng: random.Random, pairs: int = 100) -> dict:
    bad = []
    for _ in range(pairs):
        u, v = _random_elem(p, rng), _random_elem(p, rng)
        if ring_mul(u, v, p) != ring_mul(v, u, p):
            bad.append(f"{u} | {v}")
    return {"relation_id": "commutative", "status": "pass" if not bad else "fail",
            "lhs": f"{pairs} random pairs", "rhs": "uv = vu", "diff": "; ".join(bad[:3])}


def skew_witness(p: HopfParams, rng: random.Random, tries: int = 50) -> dict:
    """Find lam with lam(a)^sbar != 1 and show lam x_beta != x_beta lam."""
    for _ in range(tries):
        lam = random_character(p, rng)
        if not (p.at_a(lam) ** p.sbar).is_one():
            break
    else:
        return {"relation_id": "noncommutative-witness", "status": "skip",
                "lhs": "", "rhs": "", "diff": "no sampled character has lam(a)^sbar != 1"}
    gen = XGen.from_root(random_scalar(p, rng), p)
    left = GenPoly.char(lam, p) * GenPoly.x(gen, p)
    right = GenPoly.x(gen, p) * GenPoly.char(lam, p)
    ok, diff = check_relation(left, right, p)
    return {"relation_id": "noncommutative-witness", "status": "pass" if not ok else "fail",
            "lhs": str(expand(left, p)), "rhs": str(expand(right, p)), "diff": str(diff)}


# change of basis between generator monomials and indecomposable classes

@dataclass
class BasisReport:
    ok: bool
    trunc: int
    labels: int
    monomials: int
    blocks: List[dict]
    problems: List[str]

    def to_json(self) -> dict:
        return {"ok": self.ok, "trunc": self.trunc, "labels": self.labels,
                "monomials": self.monomials, "blocks": self.blocks, "problems": self.problems}


def basis_monomials(p: HopfParams, trunc: int, chars: Sequence[Character],
                    betas: Sequence[XGen] = ()) -> List[Tuple[GenPoly, Label]]:
    """Generator monomials of the expected basis, paired with their leading class."""
    out = []
    for lam in chars:
        if p.case is Case.I:
            for t in range(trunc):
                out.append((GenPoly(p, {Monomial(lam, t): 1}), NilLabel(t + 1, lam)))
        else:
            s = p.s
            for m in range(trunc // s + 1):
                for t in range(s):
                    d = m * s + t + 1
                    if d <= trunc:
                        out.append((GenPoly(p, {Monomial(lam, t, m): 1}), NilLabel(d, lam)))
    if p.case is Case.III:
        sigmas = sorted({p.coset_rep(c) for c in chars}, key=Character.key)
        for sigma in sigmas:
            for gen in betas:
                for m in range(trunc // p.sbar):
                    lead = NonNilLabel(m + 1, sigma, gen.beta, gen.eta)
                    out.append((GenPoly(p, {Monomial(sigma, 0, m, (gen,)): 1}), lead))
    return out


def basis_change_check(p: HopfParams, trunc: int, chars: Optional[Sequence[Character]] = None,
                       betas: Optional[Sequence[XGen]] = None) -> BasisReport:
    """Verify that generator monomials and indecomposable classes of dimension
    <= trunc are related by a matrix invertible over Z.

    The matrix is checked to be triangular for the dimension filtration (every
    other class in an expansion is strictly smaller than the leading one), and
    each square block of equal leading dimension is checked to have integer
    determinant +-1.  Together these give unimodularity of the truncation.
    """
    if chars is None:
        chars = default_characters(p)
    if betas is None:
        betas = default_betas(p) if p.case is Case.III else []
    pairs = basis_monomials(p, trunc, chars, betas)
    problems = []
    leads = {}
    for poly, lead in pairs:
        if lead in leads:
            problems.append(f"two monomials share leading class {lead}")
        leads[lead] = poly
    blocks_rows: Dict[int, set] = {}
    expansions = []
    for poly, lead in pairs:
        e = expand(poly, p)
        d = lead.dim(p)
        for lab, c in e.items():
            if lab != lead and lab.dim(p) >= d:
                problems.append(f"{poly}: class {lab} is not below the leading class {lead}")
        expansions.append((poly, lead, e))
        blocks_rows.setdefault(d, set()).add(lead)
    blocks = []
    for d in sorted(blocks_rows):
        rows = sorted(blocks_rows[d], key=lambda lab: lab.sort_key())
        cols = [(poly, e) for poly, lead, e in expansions if lead.dim(p) == d]
        M = fmpz_mat(len(rows), len(cols), [e[r] for r in rows for _, e in cols])
        det = int(M.det()) if len(rows) == len(cols) else None
        if det not in (1, -1):
            problems.append(f"block of dimension {d} has determinant {det}")
        blocks.append({"dim": d, "size": len(rows), "det": det})
    return BasisReport(not problems, trunc, len(leads), len(pairs), blocks, problems)


def default_characters(p: HopfParams) -> List[Character]:
    """eps, chi, and one character outside <chi> when the group allows it."""
    out = [p.eps, p.chi]
    if p.group.free_rank:
        other = p.character([CycNum.from_rational(p.N, 3)] + [CycNum.one(p.N)] * (p.group.free_rank - 1),
                            [0] * len(p.group.torsion))
        out.append(other)
    elif p.group.torsion:
        for k in range(p.group.torsion[0]):
            cand = p.character([], [k] + [0] * (len(p.group.torsion) - 1))
            if p.coset_rep(cand) != p.coset_rep(p.eps):
                out.append(cand)
                break
    return out


def default_betas(p: HopfParams) -> List[XGen]:
    return [XGen.from_root(CycNum.one(p.N), p), XGen.from_root(CycNum.from_rational(p.N, 2), p)]
