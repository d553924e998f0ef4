"""Indecomposable weight modules: labels, explicit matrices, formal sums."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Dict, Iterable, Iterator, Mapping, Optional, Union

from .exactfield import CycNum
from .hopfdata import Character, HopfParams, InvalidParams, format_character


@dataclass(frozen=True)
class NilLabel:
    """V_t(lam): x acts as a nilpotent shift, m_i has weight chi^i lam."""

    t: int
    lam: Character

    def __post_init__(self):
        if self.t < 1:
            raise InvalidParams("module length must be at least 1")

    def dim(self, p: HopfParams) -> int:
        return self.t

    def sort_key(self) -> tuple:
        return (0, self.t, self.lam.key(), ())

    def __str__(self):
        return f"V{self.t}({format_character(self.lam)})"


@dataclass(frozen=True)
class NonNilLabel:
    """V_t([sigma], beta) with a chosen root eta (eta^{s'} = beta).

    Equality and hashing ignore eta.
    """

    t: int
    sigma: Character
    beta: CycNum
    eta: CycNum = field(compare=False, hash=False)

    def __post_init__(self):
        if self.t < 1:
            raise InvalidParams("module length must be at least 1")
        if self.beta.is_zero():
            raise InvalidParams("beta = 0 gives a nilpotent module; use a NilLabel")

    def dim(self, p: HopfParams) -> int:
        return self.t * p.sbar

    def sort_key(self) -> tuple:
        return (1, self.t, self.sigma.key(), self.beta.key())

    def __str__(self):
        return f"W{self.t}({format_character(self.sigma)}; beta={self.beta})"


Label = Union[NilLabel, NonNilLabel]


def nil(t: int, lam: Character) -> NilLabel:
    return NilLabel(t, lam)


def nonnil(t: int, sigma: Character, eta: CycNum, p: HopfParams) -> NonNilLabel:
    """Canonical non-nilpotent label from a root eta; beta = eta^{s'}."""
    p.require_case3("a non-nilpotent module")
    if eta.is_zero():
        raise InvalidParams("eta must be nonzero")
    return NonNilLabel(t, p.coset_rep(sigma), eta ** p.sprime, eta)


def label_dim(lab: Label, p: HopfParams) -> int:
    return lab.dim(p)


def label_to_json(lab: Label) -> dict:
    if isinstance(lab, NilLabel):
        return {"type": "nil", "t": lab.t, "char": format_character(lab.lam), "beta": None}
    return {"type": "nonnil", "t": lab.t, "char": format_character(lab.sigma),
            "beta": lab.beta.to_json(), "eta": lab.eta.to_json()}


class LabelSum:
    """Finitely supported integer combination of labels."""

    __slots__ = ("_d",)
    signed = True

    def __init__(self, items: Union[Mapping[Label, int], Iterable[tuple[Label, int]], None] = None):
        d: Dict[Label, int] = {}
        if items is not None:
            it = items.items() if isinstance(items, Mapping) else items
            for lab, m in it:
                if m:
                    d[lab] = d.get(lab, 0) + m
                    if not d[lab]:
                        del d[lab]
        if not self.signed and any(m < 0 for m in d.values()):
            raise InvalidParams("negative multiplicity in a module decomposition")
        self._d = d

    @classmethod
    def single(cls, lab: Label, mult: int = 1):
        return cls({lab: mult})

    def items(self):
        return sorted(self._d.items(), key=lambda kv: kv[0].sort_key())

    def labels(self):
        return [lab for lab, _ in self.items()]

    def __iter__(self) -> Iterator[Label]:
        return iter(self.labels())

    def __getitem__(self, lab: Label) -> int:
        return self._d.get(lab, 0)

    def __len__(self):
        return len(self._d)

    def __bool__(self):
        return bool(self._d)

    def __eq__(self, other):
        if isinstance(other, LabelSum):
            return self._d == other._d
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._d.items()))

    def __add__(self, other):
        d = dict(self._d)
        for lab, m in other._d.items():
            d[lab] = d.get(lab, 0) + m
        return type(self)(d)

    def scale(self, k: int):
        if k < 0 and not self.signed:
            raise InvalidParams("cannot scale a decomposition by a negative integer")
        return type(self)({lab: k * m for lab, m in self._d.items()})

    def dim(self, p: HopfParams) -> int:
        return sum(m * lab.dim(p) for lab, m in self._d.items())

    def raw(self) -> Dict[Label, int]:
        return dict(self._d)

    def to_json(self) -> list:
        out = []
        for lab, m in self.items():
            rec = label_to_json(lab)
            rec["mult"] = m
            out.append(rec)
        return out

    def __str__(self):
        if not self._d:
            return "0"
        parts = []
        for lab, m in self.items():
            parts.append(str(lab) if m == 1 else f"{m}*{lab}")
        s = " + ".join(parts)
        return s.replace("+ -", "- ")

    def __repr__(self):
        return f"{type(self).__name__}({self})"


class Decomposition(LabelSum):
    """A module up to isomorphism: nonnegative multiplicities."""

    __slots__ = ()
    signed = False


def decomp_add(a: Decomposition, b: Decomposition) -> Decomposition:
    return a + b


def decomp_scale(k: int, a: Decomposition) -> Decomposition:
    return a.scale(k)


def decomp_dim(a: LabelSum, p: HopfParams) -> int:
    return a.dim(p)


# matrix realizations

Sparse = Dict[tuple[int, int], CycNum]


@dataclass
class MatrixRep:
    """Weight-graded matrices; x acts on column vectors: x e_j = sum_i X[i,j] e_i."""

    dim: int
    weights: list
    xmat: Sparse
    gmats: Optional[list] = None

    def __post_init__(self):
        if len(self.weights) != self.dim:
            raise InvalidParams("one weight per basis vector is required")

    def generator_matrices(self, p: HopfParams) -> list:
        if self.gmats is None:
            self.gmats = [{(i, i): w(p.group.generator(k)) for i, w in enumerate(self.weights)}
                          for k in range(p.group.ngens)]
        return self.gmats

    def x_dense(self) -> list:
        N = self.weights[0].N if self.weights else 1
        z = CycNum.zero(N)
        m = [[z] * self.dim for _ in range(self.dim)]
        for (i, j), v in self.xmat.items():
            m[i][j] = v
        return m


def build_nil(t: int, lam: Character, p: HopfParams) -> MatrixRep:
    if t < 1:
        raise InvalidParams("module length must be at least 1")
    one = CycNum.one(p.N)
    weights = [lam * p.chi_pow(i) for i in range(t)]
    return MatrixRep(t, weights, {(i + 1, i): one for i in range(t - 1)})


def nonnil_coeffs(t: int, beta: CycNum) -> list[CycNum]:
    """alpha_0..alpha_{t-1} with (y - beta)^t = y^t - sum alpha_j y^j."""
    return [beta ** (t - j) * ((-1) ** (t + 1 - j) * comb(t, j)) for j in range(t)]


def build_nonnil(t: int, sigma: Character, eta: CycNum, p: HopfParams) -> MatrixRep:
    p.require_case3("build_nonnil")
    if eta.is_zero():
        raise InvalidParams("eta must be nonzero")
    if t < 1:
        raise InvalidParams("module length must be at least 1")
    sb = p.sbar
    n = t * sb
    one = CycNum.one(p.N)
    weights = [sigma * p.chi_pow(i) for i in range(n)]
    x = {(i + 1, i): one for i in range(n - 1)}
    for j, a in enumerate(nonnil_coeffs(t, eta ** p.sprime)):
        if a:
            x[(j * sb, n - 1)] = a
    return MatrixRep(n, weights, x)


def build(lab: Label, p: HopfParams) -> MatrixRep:
    if isinstance(lab, NilLabel):
        return build_nil(lab.t, lab.lam, p)
    return build_nonnil(lab.t, lab.sigma, lab.eta, p)


def rep_check(rep: MatrixRep, p: HopfParams) -> bool:
    """Diagonal g-action matching weights, x graded by chi, and xg = chi^{-1}(g) g x."""
    gm = rep.generator_matrices(p)
    gens = [p.group.generator(k) for k in range(p.group.ngens)]
    for k, g in enumerate(gens):
        mat = gm[k]
        for (i, j), v in mat.items():
            if i != j and not v.is_zero():
                return False
        for i, w in enumerate(rep.weights):
            if mat.get((i, i), CycNum.zero(p.N)) != w(g):
                return False
    for (i, j), v in rep.xmat.items():
        if v.is_zero():
            continue
        if rep.weights[i] != p.chi * rep.weights[j]:
            return False
        for k, g in enumerate(gens):
            # (x g)_{ij} = v g_j ; (chi^{-1}(g) g x)_{ij} = chi(g)^{-1} g_i v
            if v * gm[k][(j, j)] != p.chi(g).inverse() * gm[k][(i, i)] * v:
                return False
    return True


def tensor_rep(A: MatrixRep, B: MatrixRep, p: HopfParams) -> MatrixRep:
    """x acts as x_A (x) rho_B(a) + 1 (x) x_B; basis e_i (x) f_j has index i*dimB + j."""
    nb = B.dim
    weights = [wa * wb for wa in A.weights for wb in B.weights]
    b_at_a = [p.at_a(w) for w in B.weights]
    x: Sparse = {}
    for (i2, i1), v in A.xmat.items():
        for j in range(nb):
            x[(i2 * nb + j, i1 * nb + j)] = v * b_at_a[j]
    for (j2, j1), v in B.xmat.items():
        for i in range(A.dim):
            key = (i * nb + j2, i * nb + j1)
            x[key] = x[key] + v if key in x else v
    x = {k: v for k, v in x.items() if not v.is_zero()}
    return MatrixRep(A.dim * nb, weights, x)


def direct_sum_rep(*reps: MatrixRep) -> MatrixRep:
    weights, x, off = [], {}, 0
    for r in reps:
        weights.extend(r.weights)
        for (i, j), v in r.xmat.items():
            x[(i + off, j + off)] = v
        off += r.dim
    return MatrixRep(off, weights, x)
