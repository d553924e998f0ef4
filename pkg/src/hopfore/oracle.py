"""Brute-force decomposition of a weight module from its matrices.

Everything here is rank counting over Q(zeta_N); nothing is taken from the
closed-form rules.

Nilpotent summands.  With r(k, mu) the rank of x^k restricted to the weight
slice mu, a copy of V_t(lam) adds one to r(t-1, lam) - r(t, lam), and so does
every longer summand starting one step earlier, hence

    mult V_t(lam) = [r(t-1, lam) - r(t, lam)] - [r(t, lam') - r(t+1, lam')]

with lam' = chi^{-1} lam.  ``nil_from_ranks`` evaluates this literally.  The
production path gets the same numbers from one sweep per chi-orbit (a
barcode of x), which needs one elimination per step instead of one per
(slice, power) pair.

Invertible summands.  Y = x^{sbar} preserves each weight slice; a copy of
V_t([sigma], beta) contributes one Jordan block J_t(beta) to Y on the slice
of the canonical coset member.  Eigenvalues come from a candidate pool, and
the pool is proved complete by a dimension count.

Exactness.  Ranks over K are read modulo a prime above p, which can only
under-count.  The default route runs every rank computation modulo two
unrelated 62-bit primes and accepts only agreeing answers, falling back to
exact integer arithmetic otherwise; ``exact=True`` certifies every rank over
Q (pivot guesses are confirmed with fmpz ranks, Jordan data uses exact ranks
of powers).  Exact mode is kept for audits: along long cyclic orbits the
integer coordinates grow geometrically and it becomes slow.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Union

from flint import fmpq, fmpq_mat, fmpz_mat, nmod_mat

from . import linalg
from .exactfield import CycNum, restrict, smallest_subfield
from .hopfdata import Case, Character, HopfParams
from .weightmods import (Decomposition, Label, MatrixRep, NilLabel, NonNilLabel,
                         format_character)


class InvalidRep(ValueError):
    pass


class InternalError(RuntimeError):
    pass


class IncompleteEigenPool(RuntimeError):
    def __init__(self, slice_char: Character, missing: int):
        self.slice_char = slice_char
        self.missing = missing
        super().__init__(
            f"eigenvalue pool misses {missing} dimension(s) of the invertible part "
            f"on slice {format_character(slice_char)}")


@dataclass
class JordanType:
    """Jordan blocks keyed by (eigenvalue, size)."""

    blocks: Dict[tuple, int] = field(default_factory=dict)

    def total(self) -> int:
        return sum(size * n for (_, size), n in self.blocks.items())

    def for_value(self, beta: CycNum) -> Dict[int, int]:
        return {size: n for (b, size), n in self.blocks.items() if b == beta}

    def nonzero(self) -> Dict[tuple, int]:
        return {k: v for k, v in self.blocks.items() if not k[0].is_zero()}

    def merge(self, other: "JordanType"):
        for k, v in other.blocks.items():
            self.blocks[k] = self.blocks.get(k, 0) + v

    def to_json(self) -> list:
        rows = sorted(self.blocks.items(), key=lambda kv: (kv[0][0].key(), kv[0][1]))
        return [{"eigenvalue": str(b), "size": size, "count": n} for (b, size), n in rows]


class EigenPool:
    """Candidate eigenvalues for Y on the invertible part, each with an s'-th root."""

    def __init__(self, N: int, entries: Union[Mapping, Iterable, None] = None):
        self.N = N
        self._roots: Dict[CycNum, Optional[CycNum]] = {CycNum.zero(N): None}
        if entries:
            self.update(entries)

    def update(self, entries):
        items = entries.items() if isinstance(entries, Mapping) else entries
        for item in items:
            beta, eta = item if isinstance(item, tuple) else (item, None)
            if beta not in self._roots or self._roots[beta] is None:
                self._roots[beta] = eta
        return self

    def add_labels(self, labels: Iterable[Label]):
        return self.update([(lab.beta, lab.eta) for lab in labels
                            if isinstance(lab, NonNilLabel)])

    def values(self) -> List[CycNum]:
        return sorted(self._roots, key=CycNum.key)

    def root(self, beta: CycNum) -> Optional[CycNum]:
        return self._roots.get(beta)

    def __contains__(self, beta):
        return beta in self._roots

    def __len__(self):
        return len(self._roots)


def eigen_candidates(left: Iterable[Label], right: Iterable[Label], p: HopfParams) -> List[tuple]:
    """(beta, root) candidates for Y on (sum left) (x) (sum right), read off the
    input labels alone: each input beta, its twist by the other factor's
    characters, and the sums theta*lam(a)^s + eta*xi^j for two invertible factors."""
    if p.case is not Case.III:
        return []
    left, right = list(left), list(right)
    out = []

    def add(root):
        if not root.is_zero():
            out.append((root ** p.sprime, root))

    for a in left:
        for b in right:
            if isinstance(a, NonNilLabel) and isinstance(b, NonNilLabel):
                shift = a.eta * p.at_a(b.sigma) ** p.s
                for j in range(p.sprime):
                    add(shift + b.eta * p.xi ** j)
            elif isinstance(a, NonNilLabel):
                add(a.eta)
                add(a.eta * p.at_a(b.lam) ** p.s)
            elif isinstance(b, NonNilLabel):
                add(b.eta)
                add(b.eta * p.at_a(a.lam) ** p.s)
    return out


def weight_slices(rep: MatrixRep, p: HopfParams) -> Dict[Character, List[int]]:
    """Basis indices grouped by weight; x must map slice mu into slice chi*mu."""
    slices: Dict[Character, List[int]] = {}
    for i, w in enumerate(rep.weights):
        slices.setdefault(w, []).append(i)
    shifted = {mu: p.chi * mu for mu in slices}
    for (i, j), v in rep.xmat.items():
        if not v.is_zero() and rep.weights[i] != shifted[rep.weights[j]]:
            raise InvalidRep(f"x maps basis vector {j} outside the chi-shifted slice")
    return slices


def support_components(rep: MatrixRep):
    """Connected components of the support graph of x.

    Returns (comp, degs): comp[i] is the component of basis vector i, and
    degs[c] maps the vectors of component c to integers with
    deg(i) = deg(j) + 1 whenever X[i, j] != 0, or is None when the component
    admits no such function.  Each component spans an x-stable direct summand.
    """
    adj: Dict[int, list] = {}
    for (i, j), v in rep.xmat.items():
        if v.is_zero():
            continue
        adj.setdefault(j, []).append((i, 1))
        adj.setdefault(i, []).append((j, -1))
    comp = [-1] * rep.dim
    degs: List[Optional[dict]] = []
    for s in range(rep.dim):
        if comp[s] >= 0:
            continue
        cid = len(degs)
        deg = {s: 0}
        ok = True
        comp[s] = cid
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w, step in adj.get(u, ()):
                if comp[w] < 0:
                    comp[w] = cid
                    deg[w] = deg[u] + step
                    queue.append(w)
                elif deg[w] != deg[u] + step:
                    ok = False
        degs.append(deg if ok else None)
    return comp, degs


def _key_order(key):
    kind, c, v = key
    return (kind, c, v if kind == "z" else v.key())


class _Graded:
    """A rep cut into slices between which x moves one step.

    Slice keys are ("z", c, k) for the degree-k part of a support component c
    that carries a degree function, and ("w", c, mu) for the weight-mu part of
    a component without one (these only exist when |chi| is finite).  With
    ``refine=False`` everything is one component and the slices are plain
    weight spaces.

    Matrix entries, and extra scalars such as candidate eigenvalues, are moved
    into the smallest cyclotomic subfield containing them; ranks do not depend
    on the field and the regular representation gets smaller.
    """

    def __init__(self, rep: MatrixRep, p: HopfParams, scalars: Iterable[CycNum] = (),
                 refine: bool = True):
        self.p = p
        weight_slices(rep, p)
        self.slices: Dict[Hashable, List[int]] = {}
        self.weight: Dict[Hashable, Character] = {}
        if refine:
            comp, degs = support_components(rep)
            for i in range(rep.dim):
                c = comp[i]
                key = ("z", c, degs[c][i]) if degs[c] is not None else ("w", c, rep.weights[i])
                self.slices.setdefault(key, []).append(i)
                self.weight[key] = rep.weights[i]
        else:
            for i, w in enumerate(rep.weights):
                key = ("w", 0, w)
                self.slices.setdefault(key, []).append(i)
                self.weight[key] = w
        key_of, local = {}, {}
        for key, idx in self.slices.items():
            for k, i in enumerate(idx):
                local[i] = k
                key_of[i] = key
        vals = [v for v in rep.xmat.values() if not v.is_zero()]
        self.N = smallest_subfield(vals + list(scalars), p.N)
        self.d = linalg.degree(self.N)
        conv: Dict[CycNum, CycNum] = {}
        self._blocks: Dict[Hashable, dict] = {key: {} for key in self.slices}
        for (i, j), v in rep.xmat.items():
            if not v.is_zero():
                w = conv.get(v)
                if w is None:
                    w = conv[v] = restrict(v, self.N)
                self._blocks[key_of[j]][(local[i], local[j])] = w
        self._aux: dict = {}
        self._chi_inv = p.chi.inverse()

    def size(self, key) -> int:
        return len(self.slices.get(key, ()))

    def shift(self, key):
        kind, c, v = key
        return (kind, c, v + 1) if kind == "z" else (kind, c, self.p.chi * v)

    def unshift(self, key):
        kind, c, v = key
        return (kind, c, v - 1) if kind == "z" else (kind, c, self._chi_inv * v)

    def scalar(self, c: CycNum) -> CycNum:
        return restrict(c, self.N)

    def _cached(self, k, make):
        if k not in self._aux:
            self._aux[k] = make()
        return self._aux[k]

    def _live(self, key):
        blk = self._blocks.get(key)
        nxt = self.shift(key)
        return blk if blk and nxt in self.slices else None

    def xt(self, key) -> Optional[fmpq_mat]:
        """Transposed Q-form of x from a slice to its successor, or None if x vanishes."""
        def make():
            blk = self._live(key)
            if blk is None:
                return None
            return linalg.map_transpose(blk, self.size(self.shift(key)), self.size(key), self.N)
        return self._cached(("xt", key), make)

    def xt_int(self, key):
        """(c * xt(key) as fmpz_mat, c) for a positive integer c, or None."""
        def make():
            T = self.xt(key)
            if T is None:
                return None
            num, den = T.numer_denom()
            return num, int(den)
        return self._cached(("xtz", key), make)

    def xt_pair(self, key, mod: "linalg.ModularImage"):
        """Integer multiple of the Q-form of x on a slice and its image mod p."""
        def make():
            pair = self.xt_int(key)
            if pair is None:
                return None
            TZ, scale = pair
            blk = self._blocks[key]
            TP = mod.map_transpose(blk, self.size(self.shift(key)), self.size(key), scale)
            return TZ, TP
        return self._cached(("pair", key, mod.p), make)

    def xt_mod(self, key, mod: "linalg.ModularImage"):
        """(None, x on a slice mod p) for the modular-only sweep, or None."""
        def make():
            blk = self._live(key)
            if blk is None:
                return None
            return None, mod.map_transpose(blk, self.size(self.shift(key)), self.size(key))
        return self._cached(("xmod", key, mod.p), make)

    def modular(self, attempt: int = 0) -> "linalg.ModularImage":
        return self._cached(("mod", attempt),
                            lambda: linalg.ModularImage(self.N, 2 ** 62 + attempt * 2 ** 40))

    def zeta_powers(self, n: int) -> list:
        return self._cached(("zeta", n), lambda: linalg.zeta_powers(n, self.N))

    def cycle_int(self, key):
        """(c * Y, c) with Y = x^{sbar} on a slice as a transposed Q-form, c a positive integer."""
        def make():
            m = self.size(key) * self.d
            out, c, cur = None, 1, key
            for _ in range(self.p.sbar):
                pair = self.xt_int(cur)
                if pair is None:
                    return fmpz_mat(m, m), 1
                TZ, s = pair
                out = TZ if out is None else out * TZ
                c *= s
                cur = self.shift(cur)
            return out, c
        return self._cached(("cycle", key), make)

    def cycle(self, key) -> fmpq_mat:
        """Y = x^{sbar} on a slice as an exact transposed Q-form."""
        YZ, c = self.cycle_int(key)
        return fmpq_mat(YZ) * fmpq(1, c)

    def orbits(self):
        """Yield (start, cyclic) covering every slice once.

        A complete chi-orbit of weight slices in one component is cyclic and
        starts at its canonical coset member; everything else splits into
        segments starting at slices without predecessor.
        """
        p = self.p
        seen = set()
        if p.case is Case.III:
            groups: Dict[tuple, list] = {}
            for key in self.slices:
                if key[0] == "w":
                    groups.setdefault((key[1], p.coset_rep(key[2])), []).append(key)
            for (c, sigma), members in sorted(groups.items(),
                                              key=lambda kv: (kv[0][0], kv[0][1].key())):
                if len(members) == p.sbar:
                    yield ("w", c, sigma), True
                    seen.update(members)
        for key in sorted(self.slices, key=_key_order):
            if key not in seen and self.unshift(key) not in self.slices:
                yield key, False


# slow route: literal rank differences on weight slices

@dataclass
class RankProfile:
    """K-ranks r(k) of x^k on one slice, k = 0..len(ranks)-1, then constant."""

    ranks: List[int]

    def __call__(self, k: int) -> int:
        return self.ranks[k] if k < len(self.ranks) else self.ranks[-1]

    @property
    def stable(self) -> int:
        return self.ranks[-1]


def _rank_profile(g: _Graded, key) -> RankProfile:
    """Ranks of x^k on a slice by pushing a basis of the image forward."""
    d = g.d
    period = g.p.sbar if g.p.case is Case.III else None
    ranks = [g.size(key)]
    cur = linalg.identity(g.size(key) * d)
    cap = 4 * sum(len(v) for v in g.slices.values()) + 4 * (period or 0) + 4
    while True:
        T = g.xt(key)
        if T is None:
            ranks.append(0)
            break
        cur, r = linalg.row_basis(cur * T)
        if r % d:
            raise InternalError("Q-rank not divisible by the field degree")
        ranks.append(r // d)
        key = g.shift(key)
        k = len(ranks) - 1
        if r == 0:
            break
        if period is not None and k >= period and ranks[k] == ranks[k - period]:
            break
        if k > cap:
            raise InternalError("x is not nilpotent although |chi| is infinite")
    return RankProfile(ranks)


def rank_profiles(rep: MatrixRep, p: HopfParams) -> Dict[Character, RankProfile]:
    """r(k, mu) for every weight mu of the rep."""
    g = _Graded(rep, p, refine=False)
    return {g.weight[key]: _rank_profile(g, key) for key in g.slices}


def nil_from_ranks(profiles: Dict[Character, RankProfile], p: HopfParams) -> Decomposition:
    """Nilpotent summands from the graded rank differences alone."""
    zero = RankProfile([0])
    chi_inv = p.chi.inverse()
    out = {}
    for lam, prof in profiles.items():
        prev = profiles.get(chi_inv * lam, zero)
        tmax = max(len(prof.ranks), len(prev.ranks)) + 1
        for t in range(1, tmax + 1):
            m = (prof(t - 1) - prof(t)) - (prev(t) - prev(t + 1))
            if m < 0:
                raise InternalError(f"negative multiplicity for V{t} at {format_character(lam)}")
            if m:
                out[NilLabel(t, lam)] = m
    return Decomposition(out)


# explicit Fitting split, used for audits

@dataclass
class FittingSplit:
    """Per-weight dimensions of ker Y^D (nil) and im Y^D (inv), Y = x^{sbar}."""

    nil_dims: Dict[Character, int]
    inv_dims: Dict[Character, int]
    inv_bases: Dict[Character, Optional[fmpq_mat]] = field(default_factory=dict, repr=False)

    @property
    def nil_dim(self) -> int:
        return sum(self.nil_dims.values())

    @property
    def inv_dim(self) -> int:
        return sum(self.inv_dims.values())


def fitting_split(rep: MatrixRep, p: HopfParams) -> FittingSplit:
    """Fitting decomposition for Y = x^{sbar} on each weight slice.

    im Y^D is the limit of the decreasing images Y^j(M_mu); the limit is
    reached once two consecutive images have the same dimension, which happens
    for some j <= D.  Grading and x-stability of both parts are asserted.
    """
    g = _Graded(rep, p, refine=False)
    d = g.d
    w = g.weight
    if p.case is not Case.III:
        for key in g.slices:
            if _rank_profile(g, key).stable:
                raise InternalError("x is not nilpotent although |chi| is infinite")
        return FittingSplit({w[k]: g.size(k) for k in g.slices}, {w[k]: 0 for k in g.slices})
    nil_dims, inv_dims, bases = {}, {}, {}
    for key in g.slices:
        Y = g.cycle(key)
        cur, r = linalg.identity(g.size(key) * d), g.size(key) * d
        for _ in range(g.size(key) + 1):
            nxt, r2 = linalg.row_basis(cur * Y) if cur is not None else (None, 0)
            cur, stop = nxt, r2 == r
            r = r2
            if stop or r == 0:
                break
        else:
            raise InternalError("Fitting images did not stabilize within D steps")
        inv_dims[key] = r // d
        nil_dims[key] = g.size(key) - r // d
        bases[key] = cur
    for key in g.slices:
        T = g.xt(key)
        nxt = g.shift(key)
        if inv_dims[key] != inv_dims.get(nxt, 0):
            raise InternalError("invertible part is not x-stable across slices")
        if T is None:
            continue
        # x Y = Y x makes ker Y^D and im Y^D x-stable
        if not linalg.matrices_equal(g.cycle(key) * T, T * g.cycle(nxt)):
            raise InternalError("x does not commute with x^sbar on a slice")
        if bases[key] is not None:
            joint = linalg.rank(_stack(bases[key] * T, bases[nxt]))
            if joint != inv_dims[nxt] * d:
                raise InternalError("image of Y^D is not x-stable")
    return FittingSplit({w[k]: v for k, v in nil_dims.items()},
                        {w[k]: v for k, v in inv_dims.items()},
                        {w[k]: v for k, v in bases.items()})


def _stack(A: Optional[fmpq_mat], B: Optional[fmpq_mat]) -> fmpq_mat:
    if A is None:
        return B
    if B is None:
        return A
    return fmpq_mat(A.nrows() + B.nrows(), A.ncols(), A.entries() + B.entries())


# production route: one sweep per orbit

class _BadPrime(Exception):
    pass


def _certify(WZ: fmpz_mat, births: List[int], keep: List[int], zpows: list, d: int):
    """Check exactly that the modular pivot guess is the rational one.

    Kept rows are independent over K because they are independent modulo a
    prime above p.  What needs proof is that each dropped row depends on
    earlier rows, i.e. that every birth-prefix ending in a group with a drop
    has K-rank equal to the number of kept rows in it.
    """
    kept = set(keep)
    dropped_groups = sorted({births[i] for i in range(len(births)) if i not in kept})
    for b in dropped_groups:
        k = sum(1 for x in births if x <= b)
        expected = sum(1 for i in keep if i < k)
        A = WZ if k == WZ.nrows() else linalg.select_rows(WZ, list(range(k)))
        if zpows:
            ents = list(A.entries())
            for Z in zpows:
                ents.extend((A * Z).entries())
            A = fmpz_mat(k * d, A.ncols(), ents)
        if A.rank() != expected * d:
            raise _BadPrime()


def _unit(j: int, n: int) -> list:
    row = [0] * n
    row[j] = 1
    return row


def _sweep(g: _Graded, start, cyclic: bool, mod: "linalg.ModularImage", exact: bool = True):
    """Barcode of x along one orbit of slices.

    Tracks a basis of the current slice ordered by birth time.  Pushing it one
    step forward and keeping the independent images oldest-first, a vector
    dies when its image depends on older ones; new vectors are born for the
    part of the next slice not hit by x.  Each finite bar of length t born at
    a slice of weight lam is a copy of V_t(lam).  On a cyclic orbit the start
    slice is artificial, so only bars born during the first full turn count,
    and the start vectors that never die span the invertible part.

    Pivots are chosen modulo a prime.  With ``exact`` the vectors are also
    kept exactly (integer coordinates over Q) and every pivot guess is
    confirmed; without it the caller compares sweeps over different primes.

    Returns ({(key, t): count}, invertible dimension of the start slice).
    """
    d = g.d
    sbar = g.p.sbar
    bars: Dict[tuple, int] = {}
    slice_at = [start]
    m = g.size(start)
    curZ = fmpz_mat(m, m * d, [v for i in range(m) for v in _unit(i * d, m * d)]) if exact else None
    curP = nmod_mat(m, m, [v for i in range(m) for v in _unit(i, m)], mod.p)
    births = [0] * m
    alive0: List[int] = []
    time, key = 0, start
    cap = (sbar + 2 * m * sbar + 4) if cyclic else None

    def bury(dead, t_end):
        for b in dead:
            if not cyclic or 1 <= b <= sbar:
                k = (slice_at[b], t_end - b + 1)
                bars[k] = bars.get(k, 0) + 1

    while True:
        if cyclic:
            alive0.append(births.count(0))
            if (time >= sbar and alive0[time] == alive0[time - sbar]
                    and not any(1 <= b <= sbar for b in births)):
                break
            if time > cap:
                raise InternalError("sweep did not terminate on a cyclic orbit")
        nxt = g.shift(key)
        if not cyclic and nxt not in g.slices:
            bury(births, time)
            break
        m_next = g.size(nxt)
        pair = g.xt_pair(key, mod) if exact else g.xt_mod(key, mod)
        if pair is None or not births:
            bury(births, time)
            keep, fresh = [], list(range(m_next))
            WZ = fmpz_mat(0, m_next * d) if exact else None
            WP = nmod_mat(0, m_next, [], mod.p)
        else:
            TZ, TP = pair
            WZ = curZ * TZ if exact else None
            WP = curP * TP
            R, r = WP.transpose().rref()
            keep = linalg.pivot_columns(R, r)
            if exact and len(keep) < len(births):
                _certify(WZ, births, keep, g.zeta_powers(m_next), d)
            if r < m_next:
                R2, r2 = WP.rref()
                piv = set(linalg.pivot_columns(R2, r2))
                fresh = [j for j in range(m_next) if j not in piv]
            else:
                fresh = []
            kept = set(keep)
            bury([b for i, b in enumerate(births) if i not in kept], time)
        births = [births[i] for i in keep] + [time + 1] * len(fresh)
        if len(keep) == WP.nrows() and not fresh:
            curZ, curP = WZ, WP
        else:
            if exact:
                curZ = linalg.select_rows(WZ, keep, [_unit(j * d, m_next * d) for j in fresh])
            curP = linalg.select_rows(WP, keep, [_unit(j, m_next) for j in fresh], modulus=mod.p)
        time += 1
        key = nxt
        slice_at.append(key)
    return bars, (alive0[-1] if cyclic else 0)


def _certified_sweep(g: _Graded, start, cyclic: bool):
    for attempt in range(8):
        try:
            return _sweep(g, start, cyclic, g.modular(attempt), exact=True)
        except _BadPrime:
            continue
    raise InternalError("no good prime found for the pivot guesses")


def _orbit_barcode(g: _Graded, start, cyclic: bool, exact: bool):
    """Barcode of one orbit: certified, or from two primes that must agree
    (a modular rank never exceeds the true one, so agreement of unrelated
    primes is the fast path and disagreement falls back to certification)."""
    if exact:
        return _certified_sweep(g, start, cyclic)
    first = _sweep(g, start, cyclic, g.modular(0), exact=False)
    second = _sweep(g, start, cyclic, g.modular(1), exact=False)
    return first if first == second else _certified_sweep(g, start, cyclic)


def _nil_and_inv(g: _Graded, p: HopfParams, exact: bool = False):
    """Nilpotent summands and the invertible dimension of every slice."""
    out: Dict[Label, int] = {}
    inv_dims = {key: 0 for key in g.slices}
    for start, cyclic in g.orbits():
        bars, inv = _orbit_barcode(g, start, cyclic, exact)
        for (key, t), n in bars.items():
            lab = NilLabel(t, g.weight[key])
            out[lab] = out.get(lab, 0) + n
        if cyclic and inv:
            key = start
            for _ in range(p.sbar):
                inv_dims[key] = inv
                key = g.shift(key)
    if p.case is not Case.III and any(inv_dims.values()):
        raise InternalError("x is not nilpotent although |chi| is infinite")
    return Decomposition(out), inv_dims


def decompose_nilpotent(rep: MatrixRep, p: HopfParams, exact: bool = False) -> Decomposition:
    """Nilpotent summands of a weight module."""
    return _nil_and_inv(_Graded(rep, p), p, exact)[0]


# Jordan data

def _power_ranks(M: fmpz_mat) -> List[int]:
    """Q-ranks of M^0, M^1, ... until they stop dropping."""
    ranks = [M.nrows()]
    P = None
    while True:
        P = M if P is None else P * M
        r = P.rank()
        ranks.append(r)
        if r == ranks[-2] or r == 0:
            return ranks


def _blocks_from_ranks(ranks: List[int], d: int) -> Dict[int, int]:
    ge = [(ranks[k - 1] - ranks[k]) // d for k in range(1, len(ranks))] + [0]
    return {k + 1: ge[k] - ge[k + 1] for k in range(len(ge) - 1) if ge[k] - ge[k + 1]}


def _jordan_int(YZ: fmpz_mat, c: int, beta: CycNum, n: int) -> Dict[int, int]:
    """Block sizes at beta for Y given as c*Y (transposed Q-form, n x n over K)."""
    if beta.is_zero():
        M = YZ
    else:
        M = (fmpq_mat(YZ) - linalg.scalar_transpose(beta * c, n)).numer_denom()[0]
    return _blocks_from_ranks(_power_ranks(M), linalg.degree(beta.N))


def jordan_blocks(matrix, beta: CycNum) -> List[int]:
    """Sorted block sizes at eigenvalue beta of a square K-matrix (list of rows)."""
    n = len(matrix)
    N = beta.N
    entries = {}
    for i, row in enumerate(matrix):
        for j, v in enumerate(row):
            v = v if isinstance(v, CycNum) else CycNum.from_rational(N, v)
            if not v.is_zero():
                entries[(i, j)] = v
    YZ, c = linalg.integer_transpose(entries, n, n, N)
    sizes = _jordan_int(YZ, c, beta, n)
    return sorted(size for size, k in sizes.items() for _ in range(k))


EXACT_JORDAN_LIMIT = 24


def _power_ranks_mod(M: nmod_mat) -> List[int]:
    ranks = [M.nrows()]
    P = None
    while True:
        P = M if P is None else P * M
        r = P.rank()
        ranks.append(r)
        if r == ranks[-2] or r == 0:
            return ranks


def _cycle_mod(g: _Graded, key, mod: "linalg.ModularImage") -> Optional[nmod_mat]:
    """Y = x^{sbar} on a slice reduced modulo a prime above p (K-matrix, transposed)."""
    def make():
        n = g.size(key)
        out, cur = None, key
        for _ in range(g.p.sbar):
            blk = g._live(cur)
            if blk is None:
                return nmod_mat(n, n, [0] * (n * n), mod.p)
            T = mod.map_transpose(blk, g.size(g.shift(cur)), g.size(cur))
            out = T if out is None else out * T
            cur = g.shift(cur)
        return out
    return g._cached(("cycle_mod", key, mod.p), make)


def _jordan_mod(g: _Graded, key, betas: List[CycNum], mod) -> Optional[Dict[CycNum, Dict[int, int]]]:
    """Block sizes of Y at each beta modulo one prime; None if the betas collide there."""
    images = [mod(g.scalar(b)) for b in betas]
    if len(set(images)) != len(images):
        return None
    Y = _cycle_mod(g, key, mod)
    n = g.size(key)
    out = {}
    for b, bp in zip(betas, images):
        M = Y - nmod_mat(n, n, [bp if i == j else 0 for i in range(n) for j in range(n)], mod.p) if bp else Y
        out[b] = _blocks_from_ranks(_power_ranks_mod(M), 1)
    return out


def slice_jordan(g: _Graded, key, pool: EigenPool, exact: bool = False) -> JordanType:
    """Jordan type of x^{sbar} on a slice over the pool; raises if mass is missing.

    Small slices (and ``exact=True``) use exact ranks of powers over Q.  Larger
    ones use ranks modulo two unrelated 62-bit primes, which must agree; the
    totals are then checked against the exactly certified invertible dimension.
    """
    n = g.size(key)
    betas = pool.values()
    if exact or n * g.d <= EXACT_JORDAN_LIMIT:
        YZ, c = g.cycle_int(key)
        table = {b: _jordan_int(YZ, c, g.scalar(b), n) for b in betas}
    else:
        found, attempt = [], 0
        while len(found) < 2:
            if attempt >= 8:
                raise InternalError("modular Jordan data did not stabilize")
            res = _jordan_mod(g, key, betas, g.modular(attempt))
            attempt += 1
            if res is not None:
                found.append(res)
        if found[0] != found[1]:
            YZ, c = g.cycle_int(key)
            table = {b: _jordan_int(YZ, c, g.scalar(b), n) for b in betas}
        else:
            table = found[0]
    jt = JordanType()
    mass = 0
    for beta in betas:
        for size, k in table[beta].items():
            jt.blocks[(beta, size)] = k
            mass += size * k
    if mass != n:
        raise IncompleteEigenPool(g.weight[key], n - mass)
    return jt


def decompose_invertible(g: _Graded, p: HopfParams, pool: EigenPool,
                         inv_dims: Dict[Hashable, int],
                         tables: Optional[dict] = None, exact: bool = False) -> Decomposition:
    """Non-nilpotent summands from Jordan blocks on canonical coset slices."""
    if p.case is not Case.III:
        return Decomposition()
    starts = sorted({(k[1], p.coset_rep(k[2])) for k, v in inv_dims.items() if v},
                    key=lambda cs: (cs[0], cs[1].key()))
    out: Dict[Label, int] = {}
    for c, sigma in starts:
        key = ("w", c, sigma)
        if key not in g.slices:
            raise InternalError("canonical coset slice missing from a module with invertible part")
        jt = slice_jordan(g, key, pool, exact)
        if tables is not None:
            tables.setdefault(sigma, JordanType()).merge(jt)
        zero_mass = sum(size * k for (b, size), k in jt.blocks.items() if b.is_zero())
        if g.size(key) - zero_mass != inv_dims[key]:
            raise InternalError("generalized 0-eigenspace disagrees with the sweep")
        for (beta, size), k in jt.nonzero().items():
            lab = NonNilLabel(size, sigma, beta, pool.root(beta))
            out[lab] = out.get(lab, 0) + k
    return Decomposition(out)


@dataclass
class OracleReport:
    decomposition: Decomposition
    slice_sizes: Dict[Character, int]
    inv_dims: Dict[Character, int]
    jordan: Dict[Character, JordanType]
    field_order: int

    def to_json(self) -> dict:
        return {
            "decomposition": self.decomposition.to_json(),
            "field": f"Q(zeta_{self.field_order})",
            "slices": [{"weight": format_character(mu), "dim": n,
                        "inv_dim": self.inv_dims.get(mu, 0)}
                       for mu, n in sorted(self.slice_sizes.items(), key=lambda kv: kv[0].key())],
            "jordan": [{"coset_rep": format_character(s), "blocks": jt.to_json()}
                       for s, jt in sorted(self.jordan.items(), key=lambda kv: kv[0].key())],
        }


def _pool(p: HopfParams, pool_hint) -> EigenPool:
    return pool_hint if isinstance(pool_hint, EigenPool) else EigenPool(p.N, pool_hint)


def analyze(rep: MatrixRep, p: HopfParams, pool_hint=None, audit: bool = False,
            exact: bool = False) -> OracleReport:
    """Full pipeline with per-weight tables.

    By default ranks come from two unrelated primes that must agree; with
    ``exact`` every rank is certified over Q.  ``audit`` implies ``exact`` and
    also cross-checks the sweep against the explicit Fitting split and the
    literal rank-difference count on weight slices.
    """
    pool = _pool(p, pool_hint)
    g = _Graded(rep, p, pool.values())
    exact = exact or audit
    nilpart, inv_keys = _nil_and_inv(g, p, exact)
    sizes: Dict[Character, int] = {}
    inv_dims: Dict[Character, int] = {}
    for key, idx in g.slices.items():
        mu = g.weight[key]
        sizes[mu] = sizes.get(mu, 0) + len(idx)
        inv_dims[mu] = inv_dims.get(mu, 0) + inv_keys[key]
    if audit:
        if fitting_split(rep, p).inv_dims != inv_dims:
            raise InternalError("sweep disagrees with the Fitting split")
        if nil_from_ranks(rank_profiles(rep, p), p) != nilpart:
            raise InternalError("sweep disagrees with the rank-difference count")
    tables: dict = {}
    invpart = decompose_invertible(g, p, pool, inv_keys, tables, exact=exact)
    total = nilpart + invpart
    if total.dim(p) != rep.dim:
        raise InternalError(f"dimension audit failed: {total.dim(p)} != {rep.dim}")
    if nilpart.dim(p) != rep.dim - sum(inv_dims.values()):
        raise InternalError("nilpotent summands do not fill the nilpotent part")
    return OracleReport(total, sizes, inv_dims, tables, g.N)


def decompose(rep: MatrixRep, p: HopfParams, pool_hint=None, audit: bool = False,
              exact: bool = False) -> Decomposition:
    """Multiset of indecomposable summands of a weight module."""
    return analyze(rep, p, pool_hint, audit, exact).decomposition


def coset_slice_consistency(rep: MatrixRep, p: HopfParams, pool_hint=None,
                            rng: Optional[random.Random] = None, samples: int = 1) -> List[dict]:
    """Compare Jordan data of x^{sbar} on the canonical slice of each coset with
    that on randomly chosen other slices of the same coset."""
    p.require_case3("coset-slice consistency")
    rng = rng or random.Random(0)
    pool = _pool(p, pool_hint)
    g = _Graded(rep, p, pool.values(), refine=False)
    _, inv = _nil_and_inv(g, p)
    by_coset: Dict[Character, list] = {}
    for key in sorted(g.slices, key=_key_order):
        if inv[key]:
            by_coset.setdefault(p.coset_rep(key[2]), []).append(key)
    out = []
    for sigma, members in sorted(by_coset.items(), key=lambda kv: kv[0].key()):
        base = slice_jordan(g, ("w", 0, sigma), pool).nonzero()
        for _ in range(samples):
            key = rng.choice(members)
            other = slice_jordan(g, key, pool).nonzero()
            out.append({"coset_rep": sigma, "slice": key[2], "equal": base == other})
    return out
