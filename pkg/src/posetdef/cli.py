"""Command-line front door.

Every command prints one JSON report (or DOT text with ``--format dot``).
Exit status: 0 when all checks pass, 1 when a checked invariant fails (the
report carries a witness), 2 on input or usage errors.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from typing import Optional, Sequence

from . import io
from .chains import min_chain_cover
from .coloring import DEFAULT_MAX_ELEMENTS, verify_coloring
from .decomposition import (
    barrier_partition,
    check_antichain_compression,
    check_barrier_partition,
    check_block_sequence,
    compress_antichain,
    compress_chain,
    decompose,
    evaluate,
)
from .definability import Ctx, assemble_psi, case_split, define_antichain, define_chain_case1, define_chain_case2
from .errors import (
    IndiscernibilityBroken,
    InternalBoundViolation,
    InvalidColoring,
    NoOrderSensitiveDelta,
    PosetDefError,
)
from .formula import dumps as formula_dumps
from .generate import trace_instances
from .poset import is_antichain, is_chain
from .trace import (
    example_4_1_search,
    independence_dimension,
    is_delta_indiscernible,
    trace_coloring,
)

# errors that mean "the mathematics failed on this input" rather than "bad input"
INVARIANT_ERRORS = (InvalidColoring, InternalBoundViolation, IndiscernibilityBroken, NoOrderSensitiveDelta)


class Report:
    def __init__(self, argv: Sequence[str]):
        self.data: dict = {"command": list(argv), "inputs": {}, "checks": [], "result": None}

    def input(self, name: str, path: str) -> None:
        with open(path, "rb") as fh:
            self.data["inputs"][name] = hashlib.sha256(fh.read()).hexdigest()

    def check(self, name: str, passed: bool, witness=None) -> None:
        entry = {"name": name, "passed": bool(passed)}
        if not passed and witness is not None:
            entry["witness"] = witness
        self.data["checks"].append(entry)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.data["checks"])


def _parse_elements(text: Optional[str]) -> list:
    if text is None:
        raise PosetDefError("--elements is required for this command")
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise PosetDefError(f"--elements must be comma-separated integers, got {text!r}") from None


class Loader:
    def __init__(self, args, report: Report):
        self.args = args
        self.report = report

    def _load(self, flag: str):
        path = getattr(self.args, flag)
        if path is None:
            raise PosetDefError(f"--{flag} is required for this command")
        obj = io.load_json(path)
        self.report.input(flag, path)
        return obj

    def poset(self):
        return io.poset_from_json(self._load("poset"))

    def coloring(self, P):
        return io.coloring_from_json(self._load("coloring"), P, self.args.n_param)

    def trace(self):
        return io.trace_from_json(self._load("trace"))

    def seq(self, P):
        return io.seq_from_json(self._load("seq"), P)

    def ctx(self, row: Optional[int] = None) -> Ctx:
        P = self.poset()
        T = self.trace()
        seq = self.seq(P)
        return Ctx(T, seq, self.args.n_param, row)


# commands ---------------------------------------------------------------------

def cmd_poset(args, rep: Report, ld: Loader):
    P = ld.poset()
    if args.action == "dot":
        colors = ld.coloring(P).f if args.coloring else None
        return io.poset_dot(P, colors)
    cover = min_chain_cover(P)
    rep.check("strict order", True)
    rep.data["result"] = {"n": P.n, "relations": len(P.pairs()), "covers": len(P.covers()), "width": cover.width}


def cmd_dilworth(args, rep: Report, ld: Loader):
    P = ld.poset()
    cover = min_chain_cover(P)
    witness = sorted(cover.width_witness)
    rep.check("chains cover P", sorted(i for c in cover.chains for i in c) == list(range(P.n)))
    rep.check("chains are chains", all(is_chain(P, c) for c in cover.chains))
    rep.check("witness is an antichain", is_antichain(P, witness), witness)
    rep.check("witness size equals chain count", len(witness) == len(cover.chains), witness)
    if args.format == "dot":
        return io.poset_dot(P, chains=cover.chains)
    rep.data["result"] = {"width": len(witness), "chains": len(cover.chains), "cover": [list(c) for c in cover.chains], "antichain": witness}


def cmd_coloring(args, rep: Report, ld: Loader):
    P = ld.poset()
    CP = ld.coloring(P)
    if args.action == "verify":
        r = verify_coloring(CP, args.max_elements)
        rep.check("bichromatic antichains bounded", r.bichromatic <= CP.N, list(r.bichromatic_witness))
        rep.check("alternation bounded", r.alternation < 2 * CP.N + 2, list(r.alternation_witness))
        rep.data["result"] = r.to_dict()
        return
    if args.action == "decompose":
        try:
            D = decompose(CP, args.max_elements)
        except InvalidColoring as e:
            rep.check("valid colouring", False, e.report.to_dict() if e.report else None)
            return
        bad = [i for i in range(P.n) if evaluate(D, i) != CP.f[i]]
        rep.check("decomposition reproduces the colouring", not bad, bad)
        problems = check_block_sequence(CP, D.blocks)
        rep.check("block sequence invariants", not problems, problems)
        if args.emit:
            with open(args.emit, "w", encoding="utf-8") as fh:
                fh.write(io.dumps(D.to_dict()))
        if args.format == "dot":
            return io.poset_dot(P, CP.f, [D.block_of(i) for i in range(P.n)], [c for cov in D.chain_covers for c in cov])
        rep.data["result"] = D.to_dict()
        return
    # compress
    S = _parse_elements(args.elements)
    t = args.color
    if is_chain(P, S) and not (len(S) > 1 and is_antichain(P, S)):
        comp = compress_chain(CP, S, t)
        rep.check("at most N+1 intervals", comp.K <= CP.N)
        rep.data["result"] = {"kind": "chain", **comp.to_dict()}
        return
    comp = compress_antichain(CP, S, t)
    bad = check_antichain_compression(CP, S, comp)
    rep.check("comparability equivalences", not bad, bad)
    rep.check("size bounds", len(comp.A0) <= 2 * CP.N + 1 and len(comp.J_minus) <= CP.N and len(comp.J_plus) <= CP.N)
    bp = barrier_partition(CP, S, t)
    bad_pairs = check_barrier_partition(CP, S, bp)
    rep.check("barrier partition", not bad_pairs, [list(p) for p in bad_pairs[:20]])
    rep.data["result"] = {"kind": "antichain", **comp.to_dict(), "barrier": bp.to_dict()["blocks"]}


def cmd_trace(args, rep: Report, ld: Loader):
    if args.action == "id":
        T = ld.trace()
        N, witness = independence_dimension(T)
        rep.check("shattered witness", True)
        rep.data["result"] = {"N": N, "witness": list(witness)}
        return
    if args.action == "indiscernible":
        ctx = ld.ctx()
        r = is_delta_indiscernible(ctx.T, ctx.seq, ctx.N, all_arities=args.all_arities)
        rep.check("Delta-indiscernible", r.ok, [list(x) for x in r.counterexample] if r.counterexample else None)
        rep.data["result"] = {"N": ctx.N, "tuples_checked": r.tuples_checked}
        return
    # every row colouring of an indiscernible instance must verify
    if args.trace is not None:
        ctx = ld.ctx()
        instances = [(ctx.T, ctx.seq, ctx.N)]
    else:
        instances = [(x.T, x.seq, x.N) for x in trace_instances(args.seed, args.size, args.count)]
    failures = []
    for k, (T, seq, N) in enumerate(instances):
        ok = is_delta_indiscernible(T, seq, N).ok
        if not ok:
            failures.append({"instance": k, "reason": "not indiscernible"})
            continue
        for a in range(T.U):
            r = verify_coloring(trace_coloring(T, seq, a, N))
            if not r.passed:
                failures.append({"instance": k, "row": a, "condition": r.condition, "witness": list(r.witness)})
    rep.check("every row colouring is N-indiscernible", not failures, failures[:10])
    rep.data["result"] = {"instances": len(instances), "violations": len(failures)}


def cmd_define(args, rep: Report, ld: Loader):
    ctx = ld.ctx()
    cs = case_split(ctx)
    if args.action == "psi":
        rows = range(ctx.T.U) if args.row is None else [args.row]
        out = []
        for a in rows:
            r = assemble_psi(ctx, a)
            sub = ctx.with_row(a)
            problems = [p for d in r.definitions for dd in d.all_definitions() for p in dd.problems(sub)]
            rep.check(f"row {a}: formula equals the row", r.ok, list(r.mismatches))
            rep.check(f"row {a}: constituent definitions", not problems, problems)
            out.append({"row": a, "formula": formula_dumps(r.formula), "template": r.template, "definitions": len(r.definitions)})
        rep.data["result"] = {"N": ctx.N, "case": cs.to_dict(), "rows": out}
        return
    if args.row is None:
        raise PosetDefError("--row is required for this command")
    sub = ctx.with_row(args.row)
    S = _parse_elements(args.elements)
    if args.action == "antichain":
        d = define_antichain(sub, S, args.color)
    elif cs.case == 1:
        d = define_chain_case1(sub, S, args.color)
    else:
        d = define_chain_case2(sub, S, args.color)
    problems = [p for dd in d.all_definitions() for p in dd.problems(sub)]
    rep.check("rough definition", not problems, problems)
    rep.data["result"] = {
        "N": ctx.N,
        "case": cs.case,
        "kind": d.kind,
        "parameters": sorted(d.params),
        "budget": d.budget,
        "formula": formula_dumps(d.formula),
    }


def cmd_four_sets(args, rep: Report, ld: Loader):
    r = example_4_1_search()
    rep.check("no admissible poset", r.admissible == 0)
    rep.data["result"] = r.to_dict()


COMMANDS = {
    "poset": (cmd_poset, ("check", "dot")),
    "dilworth": (cmd_dilworth, None),
    "coloring": (cmd_coloring, ("verify", "decompose", "compress")),
    "trace": (cmd_trace, ("id", "indiscernible", "lemma34")),
    "define": (cmd_define, ("antichain", "chain", "psi")),
    "example41": (cmd_four_sets, None),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--poset", metavar="FILE")
    common.add_argument("--coloring", metavar="FILE")
    common.add_argument("--trace", metavar="FILE")
    common.add_argument("--seq", metavar="FILE")
    common.add_argument("--n-param", type=int, metavar="N", help="override N (default: from the colouring file, or the independence dimension)")
    common.add_argument("--seed", type=int, default=0, metavar="S", help="seed for generated corpora (default 0)")
    common.add_argument("--size", type=int, default=6, help="elements per generated instance (default 6)")
    common.add_argument("--count", type=int, default=20, help="generated instances (default 20)")
    common.add_argument("--emit", metavar="FILE", help="write the decomposition JSON here")
    common.add_argument("--format", choices=("json", "dot"), default="json")
    common.add_argument("--max-elements", type=int, default=DEFAULT_MAX_ELEMENTS, metavar="CAP", help=f"size cap for exponential searches (default {DEFAULT_MAX_ELEMENTS})")
    common.add_argument("--elements", metavar="LIST", help="comma-separated element indices")
    common.add_argument("--color", type=int, choices=(0, 1), default=1, help="colour class of --elements (default 1)")
    common.add_argument("--row", type=int, help="trace row to colour by")
    common.add_argument("--all-arities", action="store_true", help="check every arity up to N+1")
    common.add_argument("--timings", action="store_true", help="add wall-clock timings (reports stop being reproducible)")

    parser = argparse.ArgumentParser(prog="posetdef", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, actions) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common])
        if actions:
            p.add_argument("action", choices=actions)
        else:
            p.set_defaults(action=None)
    return parser


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    rep = Report(argv)
    start = time.perf_counter()
    handler = COMMANDS[args.command][0]
    try:
        text = handler(args, rep, Loader(args, rep))
    except INVARIANT_ERRORS as e:
        rep.check(type(e).__name__, False, str(e))
        text = None
    except PosetDefError as e:
        print(f"posetdef: error: {e}", file=sys.stderr)
        return 2
    if text is not None:
        out.write(text)
        return 0 if rep.passed else 1
    rep.data["passed"] = rep.passed
    if args.timings:
        rep.data["timings"] = {"total_seconds": round(time.perf_counter() - start, 6)}
    out.write(io.dumps(rep.data))
    return 0 if rep.passed else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
