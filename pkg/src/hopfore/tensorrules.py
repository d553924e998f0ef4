"""Closed-form decomposition of tensor products of indecomposable weight modules.

Every kernel returns a ``Decomposition`` together with a ``RuleTrace`` naming
the formula branch that produced it.  Dimensions are asserted on every call.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from .exactfield import CycNum
from .hopfdata import Case, Character, HopfParams
from .weightmods import Decomposition, Label, NilLabel, NonNilLabel


class RuleError(RuntimeError):
    """Two transcriptions of the same rule disagree, or a rule lost dimension."""


@dataclass
class RuleTrace:
    rule_id: str
    branch: Dict[str, object] = field(default_factory=dict)
    parts: List["RuleTrace"] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"rule_id": self.rule_id,
               "branch": {k: (str(v) if isinstance(v, CycNum) else v) for k, v in self.branch.items()}}
        if self.parts:
            out["parts"] = [t.to_json() for t in self.parts]
        return out


class _Acc:
    """Accumulates nilpotent and non-nilpotent terms; length 0 means the zero module."""

    def __init__(self, p: HopfParams):
        self.p = p
        self.d: Dict[Label, int] = {}

    def nil(self, length: int, lam: Character, mult: int = 1):
        if length < 0:
            raise RuleError(f"negative module length {length}")
        if length and mult:
            lab = NilLabel(length, lam)
            self.d[lab] = self.d.get(lab, 0) + mult

    def nonnil(self, length: int, sigma: Character, beta: CycNum, eta: CycNum, mult: int = 1):
        if length < 0:
            raise RuleError(f"negative module length {length}")
        if length and mult:
            lab = NonNilLabel(length, self.p.coset_rep(sigma), beta, eta)
            self.d[lab] = self.d.get(lab, 0) + mult

    def result(self) -> Decomposition:
        return Decomposition(self.d)


# test hook: a function applied to every kernel result before it is returned
_tamper: Optional[Callable[[Decomposition, HopfParams], Decomposition]] = None


@contextlib.contextmanager
def tampered(fn: Optional[Callable[[Decomposition, HopfParams], Decomposition]] = None):
    """Temporarily corrupt rule outputs (harness sanity checks only)."""
    global _tamper
    old = _tamper
    _tamper = fn or shift_first_label
    try:
        yield
    finally:
        _tamper = old


def shift_first_label(dec: Decomposition, p: HopfParams) -> Decomposition:
    """Dimension-preserving corruption: twist the first nilpotent summand by chi,
    or double the eigenvalue of the first summand when none is nilpotent."""
    items = dec.items()
    if not items:
        return dec
    d = dec.raw()
    lab, m = items[0]
    del d[lab]
    if isinstance(lab, NilLabel):
        new = NilLabel(lab.t, p.chi * lab.lam)
    else:
        new = NonNilLabel(lab.t, lab.sigma, lab.beta * 2, lab.eta)
    d[new] = d.get(new, 0) + m
    return Decomposition(d)


def _finish(acc: _Acc, expected_dim: int, trace: RuleTrace):
    dec = acc.result()
    if dec.dim(acc.p) != expected_dim:
        raise RuleError(f"{trace.rule_id}: dimension {dec.dim(acc.p)} != {expected_dim}")
    if _tamper is not None:
        dec = _tamper(dec, acc.p)
    return dec, trace


# nilpotent (x) nilpotent

def _classical(n: int, t: int, mu: Character, p: HopfParams) -> Decomposition:
    acc = _Acc(p)
    for i in range(1, min(n, t) + 1):
        acc.nil(n + t + 1 - 2 * i, mu * p.chi_pow(i - 1))
    return acc.result()


def _general_nil(n: int, t: int, mu: Character, p: HopfParams) -> Tuple[Decomposition, RuleTrace]:
    """The general rule for |q| = s finite, valid for n >= t."""
    if n < t:
        n, t = t, n
    s = p.s
    rp, lp = divmod(n, s)
    r, l = divmod(t, s)
    acc = _Acc(p)
    w = lambda j, i: mu * p.chi_pow(j + i * s)
    top = lambda i, j: n + t - 1 - 2 * i * s - 2 * j
    if l + lp <= s:
        lo, hi = min(l, lp), max(l, lp)
        for i in range(r + 1):
            for j in range(lo):
                acc.nil(top(i, j), w(j, i))
        # the plateau between the two residues runs one more round when l > l'
        for i in range(r + 1 if l > lp else r):
            for j in range(lo, hi):
                acc.nil((r + rp - 2 * i) * s, w(j, i))
        for i in range(r):
            for j in range(hi, l + lp):
                acc.nil(top(i, j), w(j, i))
            for j in range(l + lp, s):
                acc.nil((r + rp - 1 - 2 * i) * s, w(j, i))
        branch = "low-residue-sum"
        m = None
    else:
        m = l + lp - s - 1
        lo, hi = min(l, lp), max(l, lp)
        for i in range(r + 1):
            for j in range(m + 1):
                acc.nil((r + rp + 1 - 2 * i) * s, w(j, i))
            for j in range(m + 1, lo):
                acc.nil(top(i, j), w(j, i))
        for i in range(r + 1 if l > lp else r):
            for j in range(lo, hi):
                acc.nil((r + rp - 2 * i) * s, w(j, i))
        for i in range(r):
            for j in range(hi, s):
                acc.nil(top(i, j), w(j, i))
        branch = "high-residue-sum"
    trace = RuleTrace(f"nil-nil:{branch}:{'l<=l_prime' if l <= lp else 'l>l_prime'}",
                      {"n": n, "t": t, "r_prime": rp, "l_prime": lp, "r": r, "l": l})
    if m is not None:
        trace.branch["m"] = m
    return acc.result(), trace


def _next_to_period(t: int, mu: Character, p: HopfParams) -> Decomposition:
    """V_{s+1}(lam) (x) V_t(sigma) with mu = lam*sigma."""
    s = p.s
    w = lambda k: mu * p.chi_pow(k)
    acc = _Acc(p)
    r, l = divmod(t, s)
    if l == 0:
        acc.nil(t - s, w(s))
        acc.nil(t + s, w(0))
        for i in range(1, s):
            acc.nil(t, w(i))
    elif r == 0:
        acc.nil(s + l, w(0))
        for i in range(1, l):
            acc.nil(s, w(i))
    else:
        acc.nil(t + s, w(0))
        for i in range(1, l):
            acc.nil((r + 1) * s, w(i))
        acc.nil(t + s - 2 * l, w(l))
        for i in range(l + 1, s):
            acc.nil(r * s, w(i))
        acc.nil(t - s, w(s))
    return acc.result()


def _multiple_of_period(n: int, t: int, mu: Character, p: HopfParams) -> Decomposition:
    """V_n (x) V_t with s | t."""
    s = p.s
    r = t // s
    rp, l = divmod(n, s)
    w = lambda j, i: mu * p.chi_pow(j + i * s)
    acc = _Acc(p)
    for i in range(min(rp, r - 1) + 1):
        for j in range(l):
            acc.nil((r + rp - 2 * i) * s, w(j, i))
    for i in range(min(r, rp)):
        for j in range(l, s):
            acc.nil((r + rp - 1 - 2 * i) * s, w(j, i))
    return acc.result()


def _one_past_multiple(n: int, t: int, mu: Character, p: HopfParams) -> Decomposition:
    """V_n (x) V_{rs+1} with s not dividing n."""
    s = p.s
    r = (t - 1) // s
    rp, l = divmod(n, s)
    w = lambda j, i: mu * p.chi_pow(j + i * s)
    acc = _Acc(p)
    for i in range(min(rp, r) + 1):
        acc.nil((r + rp - 2 * i) * s + l, w(0, i))
    for i in range(min(rp, r - 1) + 1):
        for j in range(1, l):
            acc.nil((r + rp - 2 * i) * s, w(j, i))
    for i in range(min(rp, r)):
        acc.nil((r + rp - 2 * i) * s - l, w(l, i))
        for j in range(l + 1, s):
            acc.nil((r + rp - 1 - 2 * i) * s, w(j, i))
    return acc.result()


def _fast_paths(n: int, t: int, mu: Character, p: HopfParams):
    """Special-case formulas that apply to (n, t), as (rule_id, result) pairs."""
    s = p.s
    out = []
    for a, b in ((n, t), (t, n)):
        if a == s + 1:
            out.append(("nil-nil:next-to-period", _next_to_period(b, mu, p)))
        if b % s == 0:
            out.append(("nil-nil:multiple-of-period", _multiple_of_period(a, b, mu, p)))
        if a % s and b % s == 1:
            out.append(("nil-nil:one-past-multiple", _one_past_multiple(a, b, mu, p)))
    return out


def tensor_nil_nil(n: int, lam: Character, t: int, sigma: Character, p: HopfParams,
                   ) -> Tuple[Decomposition, RuleTrace]:
    """V_n(lam) (x) V_t(sigma)."""
    mu = lam * sigma
    if p.s == float("inf"):
        trace = RuleTrace("nil-nil:classical", {"n": n, "t": t})
        acc = _Acc(p)
        acc.d = _classical(n, t, mu, p).raw()
        return _finish(acc, n * t, trace)
    dec, trace = _general_nil(n, t, mu, p)
    checked = []
    for rule_id, alt in _fast_paths(n, t, mu, p):
        if alt != dec:
            raise RuleError(f"{rule_id} disagrees with {trace.rule_id} for n={n}, t={t}: "
                            f"{alt} vs {dec}")
        checked.append(rule_id)
    if checked:
        trace.branch["cross_checked"] = sorted(set(checked))
    acc = _Acc(p)
    acc.d = dec.raw()
    return _finish(acc, n * t, trace)


# nilpotent (x) non-nilpotent

def tensor_nil_nonnil(n: int, lam: Character, lab: NonNilLabel, side: str, p: HopfParams,
                      ) -> Tuple[Decomposition, RuleTrace]:
    """V_n(lam) (x) lab for side "left", lab (x) V_n(lam) for side "right"."""
    p.require_case3("a product with a non-nilpotent module")
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    s, t = p.s, lab.t
    u, r = divmod(n, s)
    beta, eta = lab.beta, lab.eta
    if side == "right":
        la = p.at_a(lam)
        beta, eta = beta * la ** p.sbar, eta * la ** s
    mu = lab.sigma * lam
    acc = _Acc(p)
    for i in range(1, min(t, u) + 1):
        acc.nonnil(2 * i - 1 + abs(t - u), mu, beta, eta, s - r)
    for i in range(1, min(t, u + 1) + 1):
        acc.nonnil(2 * i - 1 + abs(t - u - 1), mu, beta, eta, r)
    trace = RuleTrace(f"nil-nonnil:{side}", {"n": n, "t": t, "u": u, "r": r, "beta": beta})
    return _finish(acc, n * t * p.sbar, trace)


# non-nilpotent (x) non-nilpotent

def alpha_grid(left: NonNilLabel, right: NonNilLabel, p: HopfParams) -> List[Tuple[CycNum, CycNum]]:
    """(alpha_j, alpha_{1j}) for j = 1..s', alpha_{1j} = theta lam(a)^s + eta xi^{j-1}."""
    p.require_case3("alpha_grid")
    base = left.eta * p.at_a(right.sigma) ** p.s
    out = []
    xi_j = CycNum.one(p.N)
    for _ in range(p.sprime):
        a1 = base + right.eta * xi_j
        out.append((a1 ** p.sprime, a1))
        xi_j = xi_j * p.xi
    return out


def is_degenerate(left: NonNilLabel, right: NonNilLabel, p: HopfParams) -> bool:
    """beta + (-1)^{s'+1} alpha lam(a)^{sbar} == 0."""
    sign = 1 if p.sprime % 2 else -1
    return (right.beta + left.beta * p.at_a(right.sigma) ** p.sbar * sign).is_zero()


def tensor_nonnil_nonnil(left: NonNilLabel, right: NonNilLabel, p: HopfParams,
                         ) -> Tuple[Decomposition, RuleTrace]:
    p.require_case3("a product of non-nilpotent modules")
    n, t, s = left.t, right.t, p.s
    mu = left.sigma * right.sigma
    grid = alpha_grid(left, right, p)
    zeros = [j for j, (a, _) in enumerate(grid) if a.is_zero()]
    degenerate = is_degenerate(left, right, p)
    if degenerate != bool(zeros):
        raise RuleError("degeneracy test and alpha grid disagree")
    if len(zeros) > 1:
        raise RuleError("more than one vanishing alpha_j")
    acc = _Acc(p)
    lengths = [2 * i - 1 + abs(n - t) for i in range(1, min(n, t) + 1)]
    for k in lengths:
        for a, a1 in grid:
            if not a.is_zero():
                acc.nonnil(k, mu, a, a1, s)
        if degenerate:
            for j in range(p.sbar):
                acc.nil(k * s, mu * p.chi_pow(j))
    branch = {"n": n, "t": t, "alphas": [str(a) for a, _ in grid]}
    if degenerate:
        branch["j0"] = zeros[0] + 1
    trace = RuleTrace("nonnil-nonnil:" + ("degenerate" if degenerate else "generic"), branch)
    return _finish(acc, n * t * p.sbar ** 2, trace)


# dispatch and bilinear extension

def tensor_labels(A: Label, B: Label, p: HopfParams) -> Tuple[Decomposition, RuleTrace]:
    if isinstance(A, NilLabel) and isinstance(B, NilLabel):
        return tensor_nil_nil(A.t, A.lam, B.t, B.lam, p)
    if isinstance(A, NilLabel):
        return tensor_nil_nonnil(A.t, A.lam, B, "left", p)
    if isinstance(B, NilLabel):
        return tensor_nil_nonnil(B.t, B.lam, A, "right", p)
    return tensor_nonnil_nonnil(A, B, p)


def tensor_decomp(A: Decomposition, B: Decomposition, p: HopfParams,
                  traces: Optional[list] = None) -> Decomposition:
    """Bilinear extension over direct sums, in canonical label order."""
    out: Dict[Label, int] = {}
    for la, ma in A.items():
        for lb, mb in B.items():
            dec, trace = tensor_labels(la, lb, p)
            if traces is not None:
                traces.append(trace)
            for lab, m in dec.items():
                out[lab] = out.get(lab, 0) + ma * mb * m
    res = type(A)(out) if type(A) is type(B) else Decomposition(out)
    if res.dim(p) != A.dim(p) * B.dim(p):
        raise RuleError("dimension not conserved by the bilinear extension")
    return res


def predicted_pool(A: Decomposition, B: Decomposition, p: HopfParams) -> list:
    """(beta, root) pairs of every non-nilpotent label the rules predict for A (x) B,
    for seeding the oracle's eigenvalue pool."""
    if p.case is not Case.III:
        return []
    out = []
    for la, _ in A.items():
        for lb, _ in B.items():
            if isinstance(la, NonNilLabel) and isinstance(lb, NonNilLabel):
                out.extend(alpha_grid(la, lb, p))
            elif isinstance(la, NonNilLabel) or isinstance(lb, NonNilLabel):
                dec, _ = tensor_labels(la, lb, p)
                out.extend((lab.beta, lab.eta) for lab in dec.labels() if isinstance(lab, NonNilLabel))
    return out
