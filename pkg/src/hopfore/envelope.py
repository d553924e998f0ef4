"""Cross-checks between the closed-form rules and the matrix oracle.

The envelope of a session is every pair of indecomposable labels whose tensor
product has dimension at most a bound.  Lengths are enumerated exhaustively;
characters and roots are drawn from a seeded generator, because the character
group and the field are infinite.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple

from .greenring import RingElem, random_character, random_scalar as random_root
from .hopfdata import Case, HopfParams
from .oracle import (IncompleteEigenPool, coset_slice_consistency, decompose, eigen_candidates)
from .tensorrules import RuleTrace, is_degenerate, tensor_decomp
from .weightmods import (Decomposition, Label, NilLabel, NonNilLabel, build, direct_sum_rep,
                         nonnil, tensor_rep)


@dataclass
class PairResult:
    left: Decomposition
    right: Decomposition
    rules: Decomposition
    oracle: Optional[Decomposition]
    traces: List[RuleTrace]
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None and self.rules == self.oracle

    def diff(self) -> Decomposition:
        """rules - oracle, as a signed sum."""
        other = RingElem(self.oracle.raw()).scale(-1) if self.oracle is not None else RingElem()
        return RingElem(self.rules.raw()) + other

    def to_json(self) -> dict:
        return {"left": str(self.left), "right": str(self.right), "match": self.ok,
                "rules": self.rules.to_json(),
                "oracle": None if self.oracle is None else self.oracle.to_json(),
                "diff": self.diff().to_json(), "error": self.error,
                "rule_ids": sorted({tr.rule_id for tr in self.traces})}


def oracle_tensor(A: Decomposition, B: Decomposition, p: HopfParams, exact: bool = False) -> Decomposition:
    """Decompose A (x) B from explicit matrices."""
    ra = direct_sum_rep(*[build(lab, p) for lab, m in A.items() for _ in range(m)])
    rb = direct_sum_rep(*[build(lab, p) for lab, m in B.items() for _ in range(m)])
    return decompose(tensor_rep(ra, rb, p), p, eigen_candidates(A.labels(), B.labels(), p),
                     exact=exact)


def compare(A, B, p: HopfParams) -> PairResult:
    A = A if isinstance(A, Decomposition) else Decomposition.single(A)
    B = B if isinstance(B, Decomposition) else Decomposition.single(B)
    traces: list = []
    rules = tensor_decomp(A, B, p, traces)
    try:
        orc = oracle_tensor(A, B, p)
    except IncompleteEigenPool as e:
        return PairResult(A, B, rules, None, traces, f"incomplete eigen pool: {e}")
    return PairResult(A, B, rules, orc, traces)


@dataclass
class EnvelopeStats:
    pairs: int = 0
    mismatches: List[PairResult] = field(default_factory=list)
    rule_ids: dict = field(default_factory=dict)
    degenerate_j: set = field(default_factory=set)

    def record(self, res: PairResult, tag: str = ""):
        self.pairs += 1
        for tr in res.traces:
            key = tr.rule_id
            self.rule_ids[key] = self.rule_ids.get(key, 0) + 1
        if not res.ok:
            self.mismatches.append(res)

    def to_json(self) -> dict:
        return {"pairs": self.pairs, "mismatches": len(self.mismatches),
                "rule_ids": dict(sorted(self.rule_ids.items())),
                "degenerate_j": sorted(self.degenerate_j)}


def envelope_pairs(p: HopfParams, max_dim: int, rng: random.Random) -> Iterator[Tuple[Label, Label, str]]:
    """Every length combination with tensor dimension <= max_dim, with sampled
    characters and roots; degenerate invertible pairs are forced for each j."""
    for n in range(1, max_dim + 1):
        for t in range(1, max_dim // n + 1):
            yield NilLabel(n, random_character(p, rng)), NilLabel(t, random_character(p, rng)), "nil-nil"
    if p.case is not Case.III:
        return
    sb = p.sbar
    for n in range(1, max_dim // sb + 1):
        for t in range(1, max_dim // (n * sb) + 1):
            W = nonnil(t, random_character(p, rng), random_root(p, rng), p)
            V = NilLabel(n, random_character(p, rng))
            yield V, W, "nil-nonnil"
            yield W, V, "nonnil-nil"
    for n in range(1, max_dim // (sb * sb) + 1):
        for t in range(1, max_dim // (n * sb * sb) + 1):
            A = nonnil(n, random_character(p, rng), random_root(p, rng), p)
            sigma = random_character(p, rng)
            yield A, nonnil(t, sigma, random_root(p, rng), p), "nonnil-nonnil"
            for j in range(p.sprime):
                eta = -(A.eta * p.at_a(sigma) ** p.s) * p.xi ** j
                yield A, nonnil(t, sigma, eta, p), f"degenerate:{j}"


def run_envelope(p: HopfParams, max_dim: int = 400, seed: int = 0, limit: Optional[int] = None) -> EnvelopeStats:
    rng = random.Random(seed)
    stats = EnvelopeStats()
    for k, (A, B, tag) in enumerate(envelope_pairs(p, max_dim, rng)):
        if limit is not None and k >= limit:
            break
        if tag.startswith("degenerate"):
            if not is_degenerate(A, B, p):
                raise AssertionError("forced degenerate pair is not degenerate")
            stats.degenerate_j.add(int(tag.split(":")[1]))
        stats.record(compare(A, B, p), tag)
    return stats


# oracle self-consistency

def envelope_labels(p: HopfParams, max_dim: int, rng: random.Random) -> List[Label]:
    out: List[Label] = [NilLabel(t, random_character(p, rng)) for t in range(1, max_dim + 1)]
    if p.case is Case.III:
        out += [nonnil(t, random_character(p, rng), random_root(p, rng), p)
                for t in range(1, max_dim // p.sbar + 1)]
    return out


def round_trip(lab: Label, p: HopfParams) -> bool:
    pool = [(lab.beta, lab.eta)] if isinstance(lab, NonNilLabel) else []
    return decompose(build(lab, p), p, pool) == Decomposition.single(lab)


def additivity(p: HopfParams, rng: random.Random, max_parts: int = 4, max_len: int = 6) -> Tuple[bool, Decomposition]:
    """decompose(direct sum of builds) equals the formal sum of the parts."""
    parts = []
    for _ in range(rng.randint(2, max_parts)):
        if p.case is Case.III and rng.random() < 0.4:
            parts.append(nonnil(rng.randint(1, 2), random_character(p, rng), random_root(p, rng), p))
        else:
            parts.append(NilLabel(rng.randint(1, max_len), random_character(p, rng)))
    want = Decomposition([(lab, 1) for lab in parts])
    pool = [(lab.beta, lab.eta) for lab in parts if isinstance(lab, NonNilLabel)]
    got = decompose(direct_sum_rep(*[build(lab, p) for lab in parts]), p, pool)
    return got == want, want


def slice_consistency(p: HopfParams, rng: random.Random) -> List[dict]:
    """Jordan data of x^sbar agrees across the slices of one coset, on a random
    tensor product with an invertible part."""
    A = nonnil(1, random_character(p, rng), random_root(p, rng), p)
    B = (NilLabel(rng.randint(1, 4), random_character(p, rng)) if rng.random() < 0.5
         else nonnil(1, random_character(p, rng), random_root(p, rng), p))
    rep = tensor_rep(build(A, p), build(B, p), p)
    return coset_slice_consistency(rep, p, eigen_candidates([A], [B], p), rng, samples=1)
