"""The datum (G, a, chi): a finitely generated abelian group, a central element,
its character group, and the derived parameters q, s, sbar, s', xi."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .exactfield import (INFINITE, CycNum, ambient_order, as_cyc,
                         embedded_root, mult_order)


class InvalidParams(ValueError):
    pass


class UnsupportedCase(ValueError):
    pass


class Case(enum.Enum):
    I = "I"
    II = "II"
    III = "III"


@dataclass(frozen=True)
class GroupSpec:
    """Z^free_rank x Z/n_1 x ... x Z/n_k."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise InvalidParams("free_rank must be nonnegative")
        object.__setattr__(self, "torsion", tuple(int(n) for n in self.torsion))
        if any(n < 2 for n in self.torsion):
            raise InvalidParams("torsion orders must be at least 2")

    @property
    def ngens(self) -> int:
        return self.free_rank + len(self.torsion)

    def element(self, coords: Sequence[int]) -> tuple[int, ...]:
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.ngens:
            raise InvalidParams(
                f"group element needs {self.ngens} coordinates, got {len(coords)}")
        r = self.free_rank
        return coords[:r] + tuple(c % n for c, n in zip(coords[r:], self.torsion))

    def generator(self, i: int) -> tuple[int, ...]:
        return tuple(int(j == i) for j in range(self.ngens))


@dataclass(frozen=True)
class Character:
    """A character of G given by generator images.

    Free generators map to nonzero field elements; the i-th torsion generator
    maps to zeta_{n_i}^{tor[i]}.
    """

    group: GroupSpec
    N: int
    free: tuple[CycNum, ...]
    tor: tuple[int, ...]

    def __post_init__(self):
        g = self.group
        if len(self.free) != g.free_rank or len(self.tor) != len(g.torsion):
            raise InvalidParams(
                f"character arity mismatch: expected free={g.free_rank}, tor={len(g.torsion)}")
        free = tuple(as_cyc(self.N, v) for v in self.free)
        if any(v.is_zero() for v in free):
            raise InvalidParams("free character images must be nonzero")
        object.__setattr__(self, "free", free)
        object.__setattr__(self, "tor", tuple(int(e) % n for e, n in zip(self.tor, g.torsion)))

    @classmethod
    def trivial(cls, group: GroupSpec, N: int) -> "Character":
        return cls(group, N, (CycNum.one(N),) * group.free_rank, (0,) * len(group.torsion))

    def __mul__(self, other: "Character") -> "Character":
        if not isinstance(other, Character):
            return NotImplemented
        return Character(self.group, self.N,
                         tuple(a * b for a, b in zip(self.free, other.free)),
                         tuple(a + b for a, b in zip(self.tor, other.tor)))

    def inverse(self) -> "Character":
        return Character(self.group, self.N, tuple(a.inverse() for a in self.free),
                         tuple(-e for e in self.tor))

    def __pow__(self, k: int) -> "Character":
        return Character(self.group, self.N, tuple(a ** k for a in self.free),
                         tuple(e * k for e in self.tor))

    def __call__(self, g: Sequence[int]) -> CycNum:
        return char_eval(self, tuple(g))

    def is_trivial(self) -> bool:
        return all(v.is_one() for v in self.free) and not any(self.tor)

    def order(self) -> Union[int, float]:
        return char_order(self)

    def key(self) -> tuple:
        return (tuple(v.key() for v in self.free), self.tor)

    def __lt__(self, other: "Character") -> bool:
        return self.key() < other.key()

    def __repr__(self):
        return f"Character({format_character(self)})"


def char_eval(lam: Character, g: Sequence[int]) -> CycNum:
    r = lam.group.free_rank
    if len(g) != lam.group.ngens:
        raise InvalidParams("group element has wrong arity")
    out = CycNum.one(lam.N)
    for v, c in zip(lam.free, g[:r]):
        if c:
            out = out * v ** c
    for e, n, c in zip(lam.tor, lam.group.torsion, g[r:]):
        if e * c % n:
            out = out * embedded_root(n, e * c, lam.N)
    return out


def char_order(lam: Character) -> Union[int, float]:
    order = 1
    for v in lam.free:
        o = mult_order(v)
        if o == INFINITE:
            return INFINITE
        order = math.lcm(order, o)
    for e, n in zip(lam.tor, lam.group.torsion):
        order = math.lcm(order, n // math.gcd(n, e))
    return order


def format_character(lam: Character) -> str:
    if lam.is_trivial():
        return "eps"
    parts = []
    if lam.group.free_rank:
        parts.append("free=[" + ", ".join(str(v) for v in lam.free) + "]")
    if lam.group.torsion:
        parts.append("tor=[" + ", ".join(str(e) for e in lam.tor) + "]")
    return "chr(" + ", ".join(parts) + ")"


@dataclass(frozen=True)
class HopfParams:
    group: GroupSpec
    a: tuple[int, ...]
    chi: Character
    N: int
    q: CycNum = field(init=False, compare=False, repr=False)
    s: Union[int, float] = field(init=False, compare=False)
    sbar: Union[int, float] = field(init=False, compare=False)
    sprime: Optional[int] = field(init=False, compare=False)
    xi: Optional[CycNum] = field(init=False, compare=False, repr=False)
    case: Case = field(init=False, compare=False)
    _cache: dict = field(init=False, compare=False, repr=False, hash=False, default_factory=dict)

    def __post_init__(self):
        if self.N < 1:
            raise InvalidParams("N must be positive")
        L = ambient_order(self.N)
        for n in self.group.torsion:
            if L % n:
                raise InvalidParams(
                    f"torsion order {n} needs zeta_{n}, which is not in Q(zeta_{self.N})")
        if self.chi.group != self.group or self.chi.N != self.N:
            raise InvalidParams("chi belongs to a different group or field")
        object.__setattr__(self, "a", self.group.element(self.a))
        chi_a = char_eval(self.chi, self.a)
        if chi_a.is_one():
            raise InvalidParams("chi(a) must differ from 1")
        q = chi_a.inverse()
        s = mult_order(q)
        sbar = char_order(self.chi)
        sprime = xi = None
        if sbar == INFINITE:
            case = Case.I if s == INFINITE else Case.II
        else:
            case = Case.III
            if sbar % s:
                raise InvalidParams("internal: s does not divide sbar")
            sprime = sbar // s
            if L % sprime:
                raise InvalidParams(
                    f"s' = {sprime} does not divide lcm(2, N) = {L}; xi is not available")
            xi = embedded_root(sprime, 1, self.N)
        for name, val in (("q", q), ("s", s), ("sbar", sbar), ("sprime", sprime),
                          ("xi", xi), ("case", case)):
            object.__setattr__(self, name, val)

    # characters

    @property
    def eps(self) -> Character:
        return Character.trivial(self.group, self.N)

    def character(self, free: Iterable = (), tor: Iterable[int] = ()) -> Character:
        return Character(self.group, self.N, tuple(free), tuple(tor))

    def chi_pow(self, k: int) -> Character:
        c = self._cache.setdefault("chi_pow", {})
        if self.sbar != INFINITE:
            k %= self.sbar
        if k not in c:
            c[k] = self.chi ** k
        return c[k]

    def at_a(self, lam: Character) -> CycNum:
        """lam(a), memoized."""
        c = self._cache.setdefault("at_a", {})
        v = c.get(lam)
        if v is None:
            v = c[lam] = char_eval(lam, self.a)
        return v

    def coset_rep(self, lam: Character) -> Character:
        """Lexicographically least member of lam<chi>; identity when sbar is infinite."""
        if self.sbar == INFINITE:
            return lam
        c = self._cache.setdefault("coset", {})
        rep = c.get(lam)
        if rep is None:
            orbit = [lam * self.chi_pow(j) for j in range(self.sbar)]
            rep = min(orbit, key=Character.key)
            for mu in orbit:
                c[mu] = rep
        return rep

    def same_coset(self, lam: Character, mu: Character) -> bool:
        return self.coset_rep(lam) == self.coset_rep(mu)

    def require_case3(self, what: str):
        if self.case is not Case.III:
            raise UnsupportedCase(f"{what} needs |chi| finite (non-nilpotent modules exist only then)")

    def describe(self) -> dict:
        fmt = lambda v: "inf" if v == INFINITE else v
        return {"case": self.case.value, "N": self.N,
                "group": {"free_rank": self.group.free_rank, "torsion": list(self.group.torsion)},
                "a": list(self.a), "chi": format_character(self.chi), "q": str(self.q),
                "s": fmt(self.s), "sbar": fmt(self.sbar), "sprime": self.sprime,
                "xi": None if self.xi is None else str(self.xi)}


def classify_case(p: HopfParams) -> Case:
    return p.case
