"""Exact linear algebra over Q(zeta_N) through FLINT rational matrices.

A K-matrix with K = Q(zeta_N) of degree d is replaced by its image under the
regular representation (each entry c becomes the d x d matrix of
multiplication by c).  Ranks over K are Q-ranks divided by d.

Subspaces are kept as row bases: the rows of an ``fmpq_mat`` span the subspace
of Q-coordinate vectors.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Dict, Optional

from flint import fmpq, fmpq_mat, fmpz, fmpz_mat, nmod_mat

from .exactfield import CycNum, field_data, root_of_unity


@lru_cache(maxsize=65536)
def _mult_block(c: CycNum) -> tuple:
    """Matrix of multiplication by c on the power basis, as rows of fmpq."""
    d = field_data(c.N).degree
    cols = [(c * root_of_unity(c.N, b)).coeffs for b in range(d)]
    return tuple(tuple(fmpq(cols[b][a].numerator, cols[b][a].denominator)
                       for b in range(d)) for a in range(d))


def degree(N: int) -> int:
    return field_data(N).degree


def map_transpose(entries: Dict[tuple[int, int], CycNum], n_out: int, n_in: int,
                  N: int) -> fmpq_mat:
    """Transpose of the Q-form of a K-linear map K^n_in -> K^n_out.

    ``entries[(i, j)]`` is the coefficient of output i on input j.  Row vectors
    times the result give images of row vectors.
    """
    d = degree(N)
    flat = [0] * (n_in * d * n_out * d)
    width = n_out * d
    for (i, j), c in entries.items():
        if c.is_zero():
            continue
        blk = _mult_block(c)
        for a in range(d):
            row = blk[a]
            for b in range(d):
                v = row[b]
                if v:
                    flat[(j * d + b) * width + i * d + a] = v
    return fmpq_mat(n_in * d, n_out * d, flat)


def scalar_transpose(c: CycNum, n: int) -> fmpq_mat:
    """Transpose of the Q-form of c * I_n."""
    return map_transpose({(i, i): c for i in range(n)}, n, n, c.N)


def identity(m: int) -> fmpq_mat:
    flat = [0] * (m * m)
    for i in range(m):
        flat[i * m + i] = 1
    return fmpq_mat(m, m, flat)


def row_basis(M: fmpq_mat) -> tuple[Optional[fmpq_mat], int]:
    """A basis of the row space of M and its Q-dimension."""
    if M.nrows() == 0 or M.ncols() == 0:
        return None, 0
    R, r = M.rref()
    if r == 0:
        return None, 0
    if r == M.nrows():
        return R, r
    ents = R.entries()
    return fmpq_mat(r, M.ncols(), ents[: r * M.ncols()]), r


def rank(M: fmpq_mat) -> int:
    if M.nrows() == 0 or M.ncols() == 0:
        return 0
    return M.rank()


def matrices_equal(A: fmpq_mat, B: fmpq_mat) -> bool:
    return A.nrows() == B.nrows() and A.ncols() == B.ncols() and A == B


# modular shadows, used only to guess pivots; every guess is confirmed exactly


class ModularImage:
    """Reduction Z[zeta_M] -> F_p for a prime p = 1 mod M, zeta_M -> omega."""

    def __init__(self, M: int, start: int = 2 ** 62):
        k = start // M
        while True:
            p = k * M + 1
            if fmpz(p).is_prime():
                break
            k += 1
        self.p = p
        self.M = M
        primes = _prime_divisors(M)
        g = 2
        while True:
            w = pow(g, (p - 1) // M, p)
            if all(pow(w, M // q, p) != 1 for q in primes):
                break
            g += 1
        self.omega = w
        self._cache: Dict[CycNum, int] = {}

    def __call__(self, c: CycNum) -> int:
        v = self._cache.get(c)
        if v is None:
            p = self.p
            acc = 0
            wk = 1
            for coeff in c.coeffs:
                if coeff:
                    acc += coeff.numerator * pow(coeff.denominator, -1, p) * wk
                wk = wk * self.omega % p
            v = self._cache[c] = acc % p
        return v

    def map_transpose(self, entries: Dict[tuple[int, int], CycNum], n_out: int, n_in: int,
                      scale: int = 1) -> nmod_mat:
        flat = [0] * (n_in * n_out)
        for (i, j), c in entries.items():
            flat[j * n_out + i] = self(c) * scale % self.p
        return nmod_mat(n_in, n_out, flat, self.p)


def _prime_divisors(n: int) -> list:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def integer_transpose(entries: Dict[tuple[int, int], CycNum], n_out: int, n_in: int,
                      N: int) -> tuple[fmpz_mat, int]:
    """Integer multiple of the transposed Q-form, with the scale factor used."""
    T = map_transpose(entries, n_out, n_in, N)
    num, den = T.numer_denom()
    return num, int(den)


def zeta_powers(n: int, N: int) -> list:
    """Q-forms (transposed) of multiplication by zeta^j on K^n, j = 1..d-1, as fmpz."""
    d = degree(N)
    out = []
    for j in range(1, d):
        T = scalar_transpose(root_of_unity(N, j), n)
        out.append(T.numer_denom()[0])
    return out


def pivot_columns(R, r: int) -> list:
    """Pivot positions of the first r rows of a matrix in reduced row echelon form."""
    piv, j = [], 0
    for k in range(r):
        while R[k, j] == 0:
            j += 1
        piv.append(j)
        j += 1
    return piv


def select_rows(M, rows: list, extra: list = (), ctor=None, modulus=None):
    """Rows of M (by index) followed by extra flat rows, as a new matrix."""
    n = M.ncols()
    ents = M.entries()
    flat = []
    for i in rows:
        flat.extend(ents[i * n:(i + 1) * n])
    for row in extra:
        flat.extend(row)
    count = len(rows) + len(extra)
    if modulus is not None:
        return nmod_mat(count, n, [int(v) for v in flat], modulus)
    return fmpz_mat(count, n, flat)
