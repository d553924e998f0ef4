"""Exact arithmetic in the cyclotomic field Q(zeta_N).

Elements are stored in the power basis 1, z, ..., z^(d-1) with d = phi(N),
reduced modulo the N-th cyclotomic polynomial, so equality is coefficient
equality.  Rational coefficients are ``fractions.Fraction``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Sequence, Union

INFINITE = math.inf


class DivisionByZero(ZeroDivisionError):
    pass


class InvalidArgument(ValueError):
    pass


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # integer polynomials, low degree first; den monic
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1]
        out[k] = c
        if c:
            for i, dc in enumerate(den):
                num[k + i] -= c * dc
    assert not any(num), "non-exact polynomial division"
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise InvalidArgument(f"cyclotomic order must be positive, got {n}")
    p = [-1] + [0] * (n - 1) + [1]
    for m in range(1, n):
        if n % m == 0:
            p = _poly_divexact(p, list(cyclotomic_poly(m)))
    return tuple(p)


class _FieldData:
    """Per-N tables: degree and the power basis images of z^k, k < 2d - 1."""

    def __init__(self, n: int):
        self.n = n
        phi = cyclotomic_poly(n)
        self.degree = d = len(phi) - 1
        # z^k for 0 <= k < max(2d - 1, n) in the power basis
        powers = []
        cur = [0] * d
        cur[0] = 1
        for _ in range(max(2 * d - 1, n, 1)):
            powers.append(tuple(cur))
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                for i in range(d):
                    cur[i] -= top * phi[i]
        self.powers = powers


@lru_cache(maxsize=None)
def field_data(n: int) -> _FieldData:
    return _FieldData(n)


Scalar = Union["CycNum", int, Fraction]


class CycNum:
    """An element of Q(zeta_N) in canonical power-basis form."""

    __slots__ = ("N", "coeffs", "_hash")

    def __init__(self, N: int, coeffs: Iterable[Rational]):
        fd = field_data(N)
        c = tuple(Fraction(x) for x in coeffs)
        if len(c) > fd.degree:
            c = _reduce(fd, c)
        elif len(c) < fd.degree:
            c = c + (Fraction(0),) * (fd.degree - len(c))
        self.N = N
        self.coeffs = c
        self._hash = None

    @classmethod
    def _raw(cls, N: int, coeffs: tuple[Fraction, ...]) -> "CycNum":
        obj = cls.__new__(cls)
        obj.N = N
        obj.coeffs = coeffs
        obj._hash = None
        return obj

    @classmethod
    def from_rational(cls, N: int, r: Rational) -> "CycNum":
        d = field_data(N).degree
        return cls._raw(N, (Fraction(r),) + (Fraction(0),) * (d - 1))

    @classmethod
    def zero(cls, N: int) -> "CycNum":
        return cls.from_rational(N, 0)

    @classmethod
    def one(cls, N: int) -> "CycNum":
        return cls.from_rational(N, 1)

    def _coerce(self, other) -> "CycNum":
        if isinstance(other, CycNum):
            if other.N != self.N:
                raise InvalidArgument(
                    f"cannot combine elements of Q(zeta_{self.N}) and Q(zeta_{other.N})")
            return other
        if isinstance(other, (int, Fraction)):
            return CycNum.from_rational(self.N, other)
        return NotImplemented

    # arithmetic

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycNum._raw(self.N, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycNum._raw(self.N, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycNum._raw(self.N, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycNum._raw(self.N, tuple(a * other for a in self.coeffs))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        fd = field_data(self.N)
        d = fd.degree
        if d == 1:
            return CycNum._raw(self.N, (self.coeffs[0] * o.coeffs[0],))
        prod = [0] * (2 * d - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        prod[i + j] += a * b
        return CycNum._raw(self.N, _reduce(fd, prod))

    __rmul__ = __mul__

    def inverse(self) -> "CycNum":
        if self.is_zero():
            raise DivisionByZero("inverse of zero in a cyclotomic field")
        d = field_data(self.N).degree
        # solve M x = e_0 where M is the multiplication-by-self matrix
        cols = [self * CycNum.root(self.N, i) for i in range(d)]
        aug = [[cols[j].coeffs[i] for j in range(d)] + [Fraction(int(i == 0))]
               for i in range(d)]
        for c in range(d):
            piv = next(r for r in range(c, d) if aug[r][c] != 0)
            aug[c], aug[piv] = aug[piv], aug[c]
            pv = aug[c][c]
            aug[c] = [v / pv for v in aug[c]]
            for r in range(d):
                if r != c and aug[r][c] != 0:
                    f = aug[r][c]
                    aug[r] = [v - f * w for v, w in zip(aug[r], aug[c])]
        return CycNum._raw(self.N, tuple(aug[i][d] for i in range(d)))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = CycNum.one(self.N)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # comparison / hashing

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_one(self) -> bool:
        return self.coeffs[0] == 1 and not any(self.coeffs[1:])

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, CycNum):
            return self.N == other.N and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs[0] == other and not any(self.coeffs[1:])
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            if not any(self.coeffs[1:]):
                self._hash = hash(self.coeffs[0])
            else:
                self._hash = hash((self.N, self.coeffs))
        return self._hash

    def key(self) -> tuple:
        """Sort key: lexicographic on (numerator, denominator) pairs."""
        return tuple((c.numerator, c.denominator) for c in self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    # serialization

    def to_json(self) -> dict:
        return {"num": [c.numerator for c in self.coeffs],
                "den": [c.denominator for c in self.coeffs],
                "N": self.N}

    @classmethod
    def from_json(cls, obj: dict) -> "CycNum":
        num, den = obj["num"], obj["den"]
        if len(num) != len(den):
            raise InvalidArgument("num and den arrays differ in length")
        return cls(int(obj["N"]), [Fraction(a, b) for a, b in zip(num, den)])

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append("-" + mono)
            elif c.denominator == 1:
                terms.append(f"{c}*{mono}")
            else:
                terms.append(f"({c})*{mono}")
        if not terms:
            return "0"
        out = terms[0]
        for t in terms[1:]:
            out += (" - " + t[1:]) if t.startswith("-") else (" + " + t)
        return out

    def __repr__(self):
        return f"CycNum({self.N}, {str(self)!r})"

    @classmethod
    def root(cls, N: int, k: int) -> "CycNum":
        return root_of_unity(N, k)


def _reduce(fd: _FieldData, coeffs: Sequence) -> tuple[Fraction, ...]:
    d = fd.degree
    out = [Fraction(c) for c in coeffs[:d]]
    out += [Fraction(0)] * (d - len(out))
    for k in range(d, len(coeffs)):
        c = coeffs[k]
        if c:
            zk = fd.powers[k] if k < len(fd.powers) else _zpow(fd, k)
            for i, v in enumerate(zk):
                if v:
                    out[i] += c * v
    return tuple(out)


def _zpow(fd: _FieldData, k: int) -> tuple[int, ...]:
    return fd.powers[k % fd.n]


def root_of_unity(N: int, k: int) -> CycNum:
    """zeta_N^k in canonical form."""
    if N < 1:
        raise InvalidArgument(f"N must be positive, got {N}")
    fd = field_data(N)
    return CycNum._raw(N, tuple(Fraction(v) for v in fd.powers[k % N]))


def ambient_order(N: int) -> int:
    """Number of roots of unity in Q(zeta_N)."""
    return math.lcm(2, N)


def embedded_root(m: int, k: int, N: int) -> CycNum:
    """zeta_m^k as an element of Q(zeta_N); needs m | lcm(2, N).

    For odd N the primitive 2N-th root is taken to be -zeta_N^((N+1)/2).
    """
    if m < 1:
        raise InvalidArgument(f"root order must be positive, got {m}")
    L = ambient_order(N)
    if L % m:
        raise InvalidArgument(f"zeta_{m} does not lie in Q(zeta_{N})")
    e = (k * (L // m)) % L
    if L == N:
        return root_of_unity(N, e)
    # N odd, L = 2N; zeta_L^e = (-1)^e * zeta_N^(e (N+1)/2)
    r = root_of_unity(N, e * ((N + 1) // 2))
    return -r if e % 2 else r


def mult_order(x: CycNum) -> Union[int, float]:
    """Multiplicative order of x, or INFINITE."""
    if x.is_zero():
        raise InvalidArgument("order of zero is undefined")
    L = ambient_order(x.N)
    if not (x ** L).is_one():
        return INFINITE
    best = L
    for p in _prime_factors(L):
        while best % p == 0 and (x ** (best // p)).is_one():
            best //= p
    return best


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def as_cyc(N: int, v: Scalar) -> CycNum:
    if isinstance(v, CycNum):
        if v.N != N:
            raise InvalidArgument(f"expected an element of Q(zeta_{N})")
        return v
    return CycNum.from_rational(N, v)


# q-combinatorics

def q_number(n: int, q: CycNum) -> CycNum:
    """(n)_q = 1 + q + ... + q^(n-1); (0)_q = 0."""
    if n < 0:
        raise InvalidArgument("q_number needs n >= 0")
    total = CycNum.zero(q.N)
    term = CycNum.one(q.N)
    for _ in range(n):
        total = total + term
        term = term * q
    return total


def q_factorial(n: int, q: CycNum) -> CycNum:
    if n < 0:
        raise InvalidArgument("q_factorial needs n >= 0")
    out = CycNum.one(q.N)
    for k in range(1, n + 1):
        out = out * q_number(k, q)
    return out


def q_binom(n: int, i: int, q: CycNum) -> CycNum:
    """Gaussian binomial via the Pascal rule; defined even when q-factorials vanish."""
    if not 0 <= i <= n:
        raise InvalidArgument(f"q_binom needs 0 <= i <= n, got n={n}, i={i}")
    row = [CycNum.one(q.N)]
    for m in range(1, n + 1):
        new = [CycNum.one(q.N)] * (m + 1)
        for j in range(1, m):
            new[j] = (q ** j) * row[j] + row[j - 1]
        row = new
    return row[i]


# subfields Q(zeta_M) of Q(zeta_N), M | N

def galois(x: CycNum, u: int) -> CycNum:
    """Image of x under zeta_N -> zeta_N^u (gcd(u, N) = 1)."""
    N = x.N
    out = CycNum.zero(N)
    fd = field_data(N)
    acc = [Fraction(0)] * fd.degree
    for i, c in enumerate(x.coeffs):
        if c:
            for k, v in enumerate(fd.powers[(i * u) % N]):
                if v:
                    acc[k] += c * v
    return CycNum._raw(N, tuple(acc)) if any(acc) else out


def lies_in(x: CycNum, M: int) -> bool:
    """Whether x belongs to Q(zeta_M) inside Q(zeta_N)."""
    N = x.N
    if N % M:
        raise InvalidArgument(f"{M} does not divide {N}")
    if x.is_rational():
        return True
    for u in range(1, N):
        if u % M == 1 % M and math.gcd(u, N) == 1 and galois(x, u) != x:
            return False
    return True


def smallest_subfield(values: Iterable[CycNum], N: int) -> int:
    """Least-degree M | N such that every value lies in Q(zeta_M)."""
    vals = [v for v in set(values) if not v.is_rational()]
    divisors = sorted((m for m in range(1, N + 1) if N % m == 0),
                      key=lambda m: (field_data(m).degree, m))
    for M in divisors:
        if all(lies_in(v, M) for v in vals):
            return M
    return N


@lru_cache(maxsize=None)
def _restriction_table(N: int, M: int):
    # columns: zeta_M^k = zeta_N^{k N/M} in Q(zeta_N) coordinates, k < phi(M)
    dm = field_data(M).degree
    cols = [root_of_unity(N, k * (N // M)).coeffs for k in range(dm)]
    dn = field_data(N).degree
    # choose dm independent rows greedily and invert that square block
    rows, basis = [], []
    for r in range(dn):
        cand = basis + [[cols[k][r] for k in range(dm)]]
        if _rank(cand) == len(cand):
            basis = cand
            rows.append(r)
        if len(rows) == dm:
            break
    return rows, _inverse(basis)


def _rank(rows: list) -> int:
    m = [list(r) for r in rows]
    rank, col = 0, 0
    ncols = len(m[0]) if m else 0
    while rank < len(m) and col < ncols:
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(rank + 1, len(m)):
            f = m[i][col] / m[rank][col]
            m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


def _inverse(a: list) -> list:
    n = len(a)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(a)]
    for c in range(n):
        piv = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        pv = aug[c][c]
        aug[c] = [v / pv for v in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def restrict(x: CycNum, M: int) -> CycNum:
    """x as an element of Q(zeta_M); x must lie in that subfield."""
    if M == x.N:
        return x
    rows, inv = _restriction_table(x.N, M)
    rhs = [x.coeffs[r] for r in rows]
    coeffs = [sum(inv[i][j] * rhs[j] for j in range(len(rhs))) for i in range(len(rhs))]
    y = CycNum(M, coeffs)
    if embed(y, x.N) != x:
        raise InvalidArgument(f"{x} does not lie in Q(zeta_{M})")
    return y


def embed(y: CycNum, N: int) -> CycNum:
    """Image of y in Q(zeta_N) for y.N | N."""
    if N % y.N:
        raise InvalidArgument(f"Q(zeta_{y.N}) is not a subfield of Q(zeta_{N})")
    step = N // y.N
    out = CycNum.zero(N)
    for k, c in enumerate(y.coeffs):
        if c:
            out = out + root_of_unity(N, k * step) * c
    return out
