"""Command-line front end.

Exit codes:
  0  success
  1  a relation, basis or self-test check failed
  2  the two engines disagree (MISMATCH)
  3  the oracle's eigenvalue pool did not cover the invertible part
  4  bad or missing session config
  5  malformed command line or expression
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import List, Optional

from .exactfield import CycNum, InvalidArgument
from .hopfdata import Case, Character, GroupSpec, HopfParams, InvalidParams, UnsupportedCase
from .oracle import IncompleteEigenPool
from .parsing import ParseError, parse_cyc, parse_module_expr, parse_ring_expr

EXIT_OK, EXIT_FAIL, EXIT_MISMATCH, EXIT_POOL, EXIT_CONFIG, EXIT_USAGE = 0, 1, 2, 3, 4, 5
SCHEMA_VERSION = 1


class ConfigError(ValueError):
    pass


class UsageError(ValueError):
    pass


def _scalar(v, N: int) -> CycNum:
    if isinstance(v, bool):
        raise ConfigError("booleans are not field elements")
    if isinstance(v, int):
        return CycNum.from_rational(N, v)
    if isinstance(v, str):
        return parse_cyc(v, N)
    if isinstance(v, dict):
        c = CycNum.from_json(v)
        if c.N != N:
            raise ConfigError(f"field element serialized for N={c.N}, session has N={N}")
        return c
    raise ConfigError(f"cannot read {v!r} as a field element")


def params_from_config(obj: dict) -> HopfParams:
    """Build session parameters from the JSON config object."""
    try:
        N = int(obj["N"])
        grp = obj["group"]
        group = GroupSpec(int(grp.get("free_rank", 0)), tuple(int(n) for n in grp.get("torsion", [])))
        chi = obj["chi"]
        free = [_scalar(v, N) for v in chi.get("free", [])]
        tor = [int(e) for e in chi.get("torsion_exp", [])]
        return HopfParams(group, tuple(int(c) for c in obj["a"]), Character(group, N, tuple(free), tuple(tor)), N)
    except KeyError as e:
        raise ConfigError(f"config is missing the field {e.args[0]!r}") from None
    except (InvalidParams, InvalidArgument, ParseError, TypeError, ValueError) as e:
        raise ConfigError(str(e)) from None


def load_config(path: Optional[str]) -> HopfParams:
    if not path:
        raise ConfigError("this command needs --config PATH")
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from None
    return params_from_config(obj)


# output helpers

class Out:
    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def emit(self, kind: str, payload: dict, text: List[str]):
        if self.fmt == "json":
            doc = {"schema": f"hopfore.{kind}/{SCHEMA_VERSION}"}
            doc.update(payload)
            print(json.dumps(doc, indent=2, sort_keys=False), file=self.stream)
        else:
            for line in text:
                print(line, file=self.stream)


# commands

def cmd_tensor(args, p: HopfParams, out: Out) -> int:
    from .envelope import PairResult, oracle_tensor
    from .tensorrules import tensor_decomp

    left = parse_module_expr(args.left, p)
    right = parse_module_expr(args.right, p)
    payload = {"left": left.to_json(), "right": right.to_json(), "engine": args.engine}
    text = []
    rules = orc = None
    if args.engine in ("rules", "both"):
        traces: list = []
        rules = tensor_decomp(left, right, p, traces)
        payload["rules"] = rules.to_json()
        payload["traces"] = [tr.to_json() for tr in traces]
        text.append(f"rules:  {rules}")
    if args.engine in ("oracle", "both"):
        orc = oracle_tensor(left, right, p, exact=args.exact)
        payload["oracle"] = orc.to_json()
        text.append(f"oracle: {orc}")
    code = EXIT_OK
    if args.engine == "both":
        same = rules == orc
        payload["match"] = same
        if same:
            text.append("MATCH")
        else:
            diff = PairResult(left, right, rules, orc, []).diff()
            payload["diff"] = diff.to_json()
            text.append("MISMATCH")
            text.append(f"rules - oracle: {diff}")
            code = EXIT_MISMATCH
    out.emit("tensor", payload, text)
    return code


def cmd_green(args, p: HopfParams, out: Out) -> int:
    from . import greenring as gr

    if args.green_cmd == "mul":
        if not args.exprs:
            raise UsageError("green mul needs at least one expression")
        acc = None
        for text in args.exprs:
            v = gr.expand(parse_ring_expr(text, p), p)
            acc = v if acc is None else gr.ring_mul(acc, v, p)
        out.emit("green.mul", {"inputs": args.exprs, "product": acc.to_json()}, [str(acc)])
        return EXIT_OK
    if args.green_cmd == "express":
        mods = parse_module_expr(args.module, p)
        rows, text = [], []
        total = gr.GenPoly(p)
        for lab, m in mods.items():
            poly = gr.express(lab, p)
            total = total + poly * m
            rows.append({"label": str(lab), "mult": m, "poly": str(poly)})
            text.append(f"[{lab}] = {poly}")
        if len(rows) > 1 or (rows and rows[0]["mult"] != 1):
            text.append(f"total = {total}")
        out.emit("green.express", {"module": args.module, "terms": rows, "total": str(total),
                                   "verified": True}, text)
        return EXIT_OK
    if args.green_cmd == "relations":
        recs = gr.relation_suite(p, samples=args.samples, seed=args.seed)
        failed = [r for r in recs if r["status"] == "fail"]
        text = [f"{r['status'].upper():4} {r['relation_id']}"
                + "".join(f" {k}={r[k]}" for k in ("m", "sample", "branch") if k in r)
                + (f"  diff: {r['diff']}" if r["status"] == "fail" else "")
                for r in recs]
        text.append(f"{len(recs) - len(failed)}/{len(recs)} relations hold")
        out.emit("green.relations", {"relations": recs, "failed": len(failed)}, text)
        return EXIT_FAIL if failed else EXIT_OK
    if args.green_cmd == "basis":
        rep = gr.basis_change_check(p, args.trunc)
        text = [f"truncation: dimension <= {rep.trunc}; {rep.labels} classes, {rep.monomials} monomials",
                "blocks: " + ", ".join(f"dim {b['dim']}: size {b['size']}, det {b['det']}" for b in rep.blocks),
                "unimodular" if rep.ok else "NOT unimodular"] + rep.problems
        out.emit("green.basis", rep.to_json(), text)
        return EXIT_OK if rep.ok else EXIT_FAIL
    raise UsageError("unknown green subcommand")


def run_selftest(p: HopfParams, seed: int, budget: int, tamper: bool = False) -> dict:
    """Envelope comparison, oracle round trips and the relation suite."""
    from contextlib import nullcontext

    from . import envelope as env
    from .greenring import express, expand, relation_suite
    from .tensorrules import tampered

    rng = random.Random(seed)
    report = {"seed": seed, "budget": budget}
    with tampered() if tamper else nullcontext():
        stats = env.run_envelope(p, budget, seed)
    report["envelope"] = stats.to_json()
    report["mismatch_examples"] = [m.to_json() for m in stats.mismatches[:3]]
    labels = env.envelope_labels(p, min(budget, 40), rng)
    report["round_trip"] = {"checked": len(labels),
                            "failed": sum(not env.round_trip(lab, p) for lab in labels)}
    add_fail = sum(not env.additivity(p, rng)[0] for _ in range(10))
    report["additivity"] = {"checked": 10, "failed": add_fail}
    expr_fail = 0
    for lab in labels[:12]:
        try:
            expand(express(lab, p), p)
        except RuntimeError:
            expr_fail += 1
    report["express"] = {"checked": min(12, len(labels)), "failed": expr_fail}
    recs = relation_suite(p, samples=10, seed=seed)
    report["relations"] = {"checked": len(recs), "failed": sum(r["status"] == "fail" for r in recs)}
    return report


def cmd_selftest(args, p: HopfParams, out: Out) -> int:
    rep = run_selftest(p, args.seed, args.budget, args.tamper)
    env = rep["envelope"]
    text = [f"seed {rep['seed']}, tensor dimension <= {rep['budget']}",
            f"envelope: {env['pairs']} pairs, {env['mismatches']} mismatches",
            "rules used: " + ", ".join(f"{k} x{v}" for k, v in env["rule_ids"].items())]
    for key in ("round_trip", "additivity", "express", "relations"):
        r = rep[key]
        text.append(f"{key.replace('_', ' ')}: {r['checked']} checked, {r['failed']} failed")
    for m in rep["mismatch_examples"]:
        text.append(f"MISMATCH {m['left']} (x) {m['right']}")
    out.emit("selftest", rep, text)
    if env["mismatches"]:
        return EXIT_MISMATCH
    if any(rep[k]["failed"] for k in ("round_trip", "additivity", "express", "relations")):
        return EXIT_FAIL
    return EXIT_OK


def cmd_config(args, p: HopfParams, out: Out) -> int:
    desc = p.describe()
    text = [f"{k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}" for k, v in desc.items()]
    if p.case is Case.III:
        text.append("coset representatives: lexicographically least member of lam<chi>")
    out.emit("config", {"valid": True, "params": desc}, text)
    return EXIT_OK


# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="session config JSON")
    common.add_argument("--format", choices=["text", "json"], default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for sampled checks")

    ap = _Parser(prog="hopfore", parents=[common],
                 description="Weight modules over kG(chi^-1, a, 0): tensor products and the Green ring.")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    t = sub.add_parser("tensor", parents=[common], help="decompose a tensor product")
    t.add_argument("--left", required=True)
    t.add_argument("--right", required=True)
    t.add_argument("--engine", choices=["rules", "oracle", "both"], default="both")
    t.add_argument("--exact", action="store_true", help="certify every oracle rank over Q")

    g = sub.add_parser("green", parents=[common], help="Green ring operations")
    gs = g.add_subparsers(dest="green_cmd", required=True, parser_class=_Parser)
    m = gs.add_parser("mul", parents=[common], help="multiply ring elements")
    m.add_argument("exprs", nargs="+")
    e = gs.add_parser("express", parents=[common], help="write classes through generators")
    e.add_argument("--module", required=True)
    r = gs.add_parser("relations", parents=[common], help="check the ring identities")
    r.add_argument("--samples", type=int, default=10)
    b = gs.add_parser("basis", parents=[common], help="check the change of basis")
    b.add_argument("--trunc", type=int, default=20)

    s = sub.add_parser("selftest", parents=[common], help="cross-check everything")
    s.add_argument("--budget", type=int, default=48, help="largest tensor dimension compared")
    s.add_argument("--tamper", action="store_true",
                   help="perturb the rules on purpose; the run must then report mismatches")

    c = sub.add_parser("config", parents=[common], help="session config tools")
    cs = c.add_subparsers(dest="config_cmd", required=True, parser_class=_Parser)
    cs.add_parser("validate", parents=[common], help="check a config file")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    args.format = getattr(args, "format", "text")
    args.seed = getattr(args, "seed", 0)
    args.config = getattr(args, "config", None)
    out = Out(args.format)
    try:
        p = load_config(args.config)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    handler = {"tensor": cmd_tensor, "green": cmd_green, "selftest": cmd_selftest,
               "config": cmd_config}[args.cmd]
    try:
        return handler(args, p, out)
    except IncompleteEigenPool as e:
        print(f"incomplete eigenvalue pool: {e}", file=sys.stderr)
        return EXIT_POOL
    except (ParseError, UsageError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidParams, UnsupportedCase) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
