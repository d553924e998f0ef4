"""Text grammar for scalars, characters, modules and generator polynomials.

A small recursive-descent evaluator.  The same expression syntax is read in
two modes:

* scalar mode: integers, ``z`` (= zeta_N), ``+ - * / ^`` and parentheses,
  evaluated in Q(zeta_N);
* ring mode: integers, ``eps``/``chr(...)``, ``V{t}(...)``, ``W{t}(...; eta=...)``,
  the generators ``y``, ``z``, ``x[...]``, with ``+ - * ^``.  Anything inside
  ``chr(...)``, ``eta=`` or ``x[...]`` is read in scalar mode.

Ring-mode values are generator polynomials until a module class appears; from
then on everything is expanded and multiplied in the Green ring.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional

from .exactfield import CycNum, DivisionByZero, root_of_unity
from .hopfdata import Character, HopfParams, InvalidParams, UnsupportedCase
from .weightmods import Decomposition, LabelSum, NilLabel, nonnil


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int, text: str):
        self.msg, self.pos, self.text = msg, pos, text
        super().__init__(f"{msg} at position {pos}\n  {text}\n  {' ' * pos}^")


@dataclass
class Tok:
    kind: str  # int, name, op, end
    val: str
    pos: int


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")
_OPS = set("+-*/^()[],;=")


def tokenize(text: str) -> List[Tok]:
    out, i = [], 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m.group(0).strip() == "":
            break
        start = m.start(0) + len(m.group(0)) - len(m.group(0).lstrip())
        if m.group(1):
            out.append(Tok("int", m.group(1), start))
        elif m.group(2):
            out.append(Tok("name", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in _OPS:
                raise ParseError(f"unexpected character {ch!r}", start, text)
            out.append(Tok("op", ch, start))
        i = m.end(0)
    out.append(Tok("end", "", len(text)))
    return out


_MODULE = re.compile(r"^([VW])(\d+)$")


class _Parser:
    def __init__(self, text: str, p: Optional[HopfParams], N: int, mode: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.p = p
        self.N = N
        self.mode = mode  # "scalar", "ring" or "module"

    # token helpers
    @property
    def cur(self) -> Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[Tok] = None):
        raise ParseError(msg, (tok or self.cur).pos, self.text)

    def accept(self, val: str) -> bool:
        if self.cur.kind in ("op", "name") and self.cur.val == val:
            self.i += 1
            return True
        return False

    def expect(self, val: str):
        if not self.accept(val):
            self.error(f"expected {val!r}")

    def done(self):
        if self.cur.kind != "end":
            self.error("unexpected trailing input")

    # scalar mode
    def scalar_expr(self) -> CycNum:
        v = self.scalar_term()
        while self.cur.val in ("+", "-") and self.cur.kind == "op":
            op = self.cur.val
            self.i += 1
            w = self.scalar_term()
            v = v + w if op == "+" else v - w
        return v

    def scalar_term(self) -> CycNum:
        v = self.scalar_unary()
        while self.cur.kind == "op" and self.cur.val in ("*", "/"):
            op, tok = self.cur.val, self.cur
            self.i += 1
            w = self.scalar_unary()
            if op == "*":
                v = v * w
            else:
                if w.is_zero():
                    self.error("division by zero", tok)
                v = v / w
        return v

    def scalar_unary(self) -> CycNum:
        if self.accept("-"):
            return -self.scalar_unary()
        if self.accept("+"):
            return self.scalar_unary()
        base = self.scalar_atom()
        if self.cur.kind == "op" and self.cur.val == "^":
            tok = self.cur
            self.i += 1
            k = self.int_exponent()
            if k < 0 and base.is_zero():
                self.error("zero to a negative power", tok)
            try:
                return base ** k
            except DivisionByZero:
                self.error("zero to a negative power", tok)
        return base

    def int_exponent(self) -> int:
        sign = -1 if self.accept("-") else 1
        if self.cur.kind == "int":
            k = int(self.cur.val)
            self.i += 1
            return sign * k
        if self.accept("("):
            k = self.int_exponent()
            self.expect(")")
            return sign * k
        self.error("exponent must be an integer literal")

    def scalar_atom(self) -> CycNum:
        tok = self.cur
        if tok.kind == "int":
            self.i += 1
            return CycNum.from_rational(self.N, int(tok.val))
        if tok.kind == "name" and tok.val == "z":
            self.i += 1
            return root_of_unity(self.N, 1)
        if self.accept("("):
            v = self.scalar_expr()
            self.expect(")")
            return v
        self.error("expected a number, 'z' or '('")

    # characters
    def character(self) -> Character:
        tok = self.cur
        p = self._need_params()
        if self.accept("eps"):
            return p.eps
        if not self.accept("chr"):
            self.error("expected a character: 'eps' or 'chr(...)'")
        self.expect("(")
        free = tor = None
        while not self.accept(")"):
            if self.accept("free"):
                self.expect("=")
                free = self.bracket_list(self.scalar_expr)
            elif self.accept("tor"):
                self.expect("=")
                tor = self.bracket_list(self.signed_int)
            else:
                self.error("expected 'free=' or 'tor='")
            if self.cur.val != ")":
                self.expect(",")
        g = p.group
        free = [CycNum.one(p.N)] * g.free_rank if free is None else free
        tor = [0] * len(g.torsion) if tor is None else tor
        if len(free) != g.free_rank:
            self.error(f"character needs {g.free_rank} free images, got {len(free)}", tok)
        if len(tor) != len(g.torsion):
            self.error(f"character needs {len(g.torsion)} torsion exponents, got {len(tor)}", tok)
        try:
            return p.character(free, tor)
        except InvalidParams as e:
            self.error(str(e), tok)

    def signed_int(self) -> int:
        sign = -1 if self.accept("-") else 1
        if self.cur.kind != "int":
            self.error("expected an integer")
        k = int(self.cur.val)
        self.i += 1
        return sign * k

    def bracket_list(self, item) -> list:
        self.expect("[")
        out = []
        if self.accept("]"):
            return out
        while True:
            out.append(item())
            if self.accept("]"):
                return out
            self.expect(",")

    def _need_params(self) -> HopfParams:
        if self.p is None:
            self.error("characters need a configured session")
        return self.p

    # ring mode
    def ring_expr(self):
        v = self.ring_term()
        while self.cur.kind == "op" and self.cur.val in ("+", "-"):
            op = self.cur.val
            self.i += 1
            w = self.ring_term()
            v = _add(v, w, self.p) if op == "+" else _add(v, _neg(w), self.p)
        return v

    def ring_term(self):
        v = self.ring_unary()
        while self.cur.kind == "op" and self.cur.val in ("*", "/"):
            tok = self.cur
            if tok.val == "/":
                self.error("division is only allowed inside scalar expressions")
            self.i += 1
            w = self.ring_unary()
            if self.mode == "module" and not (isinstance(v, int) or isinstance(w, int)):
                self.error("module expressions allow only integer multiples", tok)
            v = _mul(v, w, self.p)
        return v

    def ring_unary(self):
        if self.accept("-"):
            return _neg(self.ring_unary())
        if self.accept("+"):
            return self.ring_unary()
        base = self.ring_atom()
        if self.cur.kind == "op" and self.cur.val == "^":
            tok = self.cur
            self.i += 1
            k = self.int_exponent()
            if k < 0:
                self.error("negative powers are not defined in the Green ring", tok)
            if self.mode == "module" and not isinstance(base, int):
                self.error("module expressions allow only integer multiples", tok)
            return _pow(base, k, self.p)
        return base

    def ring_atom(self):
        from .greenring import GenPoly, RingElem

        tok = self.cur
        p = self.p
        if tok.kind == "int":
            self.i += 1
            return int(tok.val)
        if self.accept("("):
            v = self.ring_expr()
            self.expect(")")
            return v
        if tok.kind != "name":
            self.error("expected a term")
        m = _MODULE.match(tok.val)
        if m:
            self.i += 1
            return RingElem.single(self.module_label(m.group(1), int(m.group(2)), tok))
        if tok.val in ("eps", "chr"):
            lam = self.character()
            if self.mode == "module":
                self.error("a bare character is not a module; write V1(...)", tok)
            return GenPoly.char(lam, p)
        if self.mode == "module":
            self.error(f"unexpected name {tok.val!r} in a module expression")
        try:
            if self.accept("y"):
                return GenPoly.y(p)
            if self.accept("z"):
                return GenPoly.z(p)
            if self.accept("x"):
                self.expect("[")
                gen = self.x_index(tok)
                self.expect("]")
                return GenPoly.x(gen, p)
        except (InvalidParams, UnsupportedCase) as e:
            self.error(str(e), tok)
        self.error(f"unknown name {tok.val!r}")

    def x_index(self, tok):
        from .greenring import XGen

        p = self.p
        if p.sprime is None:
            self.error("x generators exist only when |chi| is finite", tok)
        if self.accept("eta"):
            self.expect("=")
            at = self.cur
            eta = self.scalar_expr()
            if eta.is_zero():
                self.error("eta must be nonzero", at)
            return XGen.from_root(eta, p)
        at = self.cur
        beta = self.scalar_expr()
        if beta.is_zero():
            self.error("beta must be nonzero", at)
        if p.sprime != 1:
            self.error("x[beta] needs an explicit root when s' > 1; write x[eta=...]", at)
        return XGen(beta, beta)

    def module_label(self, kind: str, t: int, tok: Tok):
        p = self._need_params()
        if t < 1:
            self.error("module length must be at least 1", tok)
        self.expect("(")
        lam = self.character()
        if kind == "V":
            self.expect(")")
            return NilLabel(t, lam)
        if p.sprime is None:
            self.error("W modules exist only when |chi| is finite", tok)
        self.expect(";")
        key = self.cur
        if self.accept("eta"):
            self.expect("=")
            at = self.cur
            eta = self.scalar_expr()
            if eta.is_zero():
                self.error("eta = 0 would make beta = 0, which is a nilpotent module; "
                           "write the V form instead", at)
        elif self.accept("beta"):
            self.expect("=")
            at = self.cur
            beta = self.scalar_expr()
            if beta.is_zero():
                self.error("beta = 0 is a nilpotent module; write the V form instead", at)
            if p.sprime != 1:
                self.error("beta= is accepted only when s' = 1; give the root with eta=", key)
            eta = beta
        else:
            self.error("expected 'eta='")
        self.expect(")")
        return nonnil(t, lam, eta, p)


def _neg(v):
    return v.scale(-1) if isinstance(v, LabelSum) else -v


def _as_elem(v, p):
    from .greenring import GenPoly, RingElem, char_elem, expand

    if isinstance(v, int):
        return char_elem(p.eps).scale(v)
    if isinstance(v, GenPoly):
        return expand(v, p)
    return RingElem(v.raw())


def _add(v, w, p):
    from .greenring import GenPoly

    if isinstance(v, int) and isinstance(w, int):
        return v + w
    if isinstance(v, LabelSum) or isinstance(w, LabelSum):
        return _as_elem(v, p) + _as_elem(w, p)
    return (GenPoly.const(v, p) if isinstance(v, int) else v) + w


def _mul(v, w, p):
    from .greenring import ring_mul

    if isinstance(v, int):
        return v * w if not isinstance(w, LabelSum) else w.scale(v)
    if isinstance(w, int):
        return v * w if not isinstance(v, LabelSum) else v.scale(w)
    if isinstance(v, LabelSum) or isinstance(w, LabelSum):
        return ring_mul(_as_elem(v, p), _as_elem(w, p), p)
    return v * w


def _pow(v, k, p):
    from .greenring import ring_pow

    if isinstance(v, int):
        return v ** k
    if isinstance(v, LabelSum):
        return ring_pow(v, k, p)
    return v ** k


# public entry points

def parse_cyc(text: str, N: int) -> CycNum:
    ps = _Parser(text, None, N, "scalar")
    v = ps.scalar_expr()
    ps.done()
    return v


def parse_character(text: str, p: HopfParams) -> Character:
    ps = _Parser(text, p, p.N, "scalar")
    v = ps.character()
    ps.done()
    return v


def parse_module_expr(text: str, p: HopfParams) -> Decomposition:
    """``2*V3(chr(tor=[1])) + W1(eps; eta=z)`` -> a module decomposition."""
    ps = _Parser(text, p, p.N, "module")
    v = ps.ring_expr()
    ps.done()
    if isinstance(v, int):
        raise ParseError("a module expression needs at least one V or W term", 0, text)
    if any(m < 0 for _, m in v.items()):
        raise ParseError("module expressions cannot have negative multiplicities", 0, text)
    return Decomposition(v.raw())


def parse_ring_expr(text: str, p: HopfParams):
    """A generator polynomial, or a Green ring element once a V/W term appears."""
    from .greenring import GenPoly

    ps = _Parser(text, p, p.N, "ring")
    v = ps.ring_expr()
    ps.done()
    return GenPoly.const(v, p) if isinstance(v, int) else v
