"""Command-line front end.

Exit codes: 0 proved / ok, 1 refuted (``decide``), rejected (``check``) or
a clean sweep that saw refutations (``sweep``), 2 usage or input error,
3 internal failure (budget exceeded, checker rejection, corpus or sweep
mismatch).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import kernels
from .corpus import enumerate_formulas, standard_corpus
from .formula import FormulaSyntaxError, parse, to_str
from .model import forces, model_to_dot, model_to_json, refute_semantic, validate_model
from .proofgraph import ProofCheckError, check_proof, graph_from_json, graph_to_json
from .search import Config, Proved, SearchError, decide, decide_formula
from .sequent import sequent_from_obj

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    pass


def _err(msg: str) -> None:
    print(f"csprove: {msg}", file=sys.stderr)


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _load_sequent(arg: str):
    text = arg
    if not arg.lstrip().startswith("{"):
        try:
            text = Path(arg).read_text(encoding="utf-8")
        except OSError as e:
            raise UsageError(f"cannot read sequent file {arg!r}: {e.strerror}") from None
    try:
        return sequent_from_obj(json.loads(text))
    except FormulaSyntaxError:
        raise
    except (ValueError, TypeError, KeyError) as e:
        raise UsageError(f"malformed sequent JSON: {e}") from None


def _config(args) -> Config:
    return Config(
        max_steps=args.max_steps,
        trace=sys.stderr if args.trace else None,
        one_label_per_round=args.one_label,
    )


def cmd_decide(args) -> int:
    if (args.formula is None) == (args.sequent is None):
        raise UsageError("decide needs exactly one of FORMULA or --sequent")
    config = _config(args)
    if args.sequent is not None:
        verdict = decide(_load_sequent(args.sequent), config)
    else:
        verdict = decide_formula(parse(args.formula), config)
    if isinstance(verdict, Proved):
        print("PROVED")
        if args.proof_out:
            _write(args.proof_out, graph_to_json(verdict.proof, indent=2) + "\n")
        return EXIT_OK
    print("REFUTED")
    if args.model_out:
        _write(args.model_out, model_to_json(verdict.model, indent=2) + "\n")
    if args.dot:
        dot = model_to_dot(verdict.model)
        if args.model_out:
            _write(str(Path(args.model_out).with_suffix(".dot")), dot)
        else:
            sys.stdout.write(dot)
    return EXIT_NEGATIVE


def cmd_check(args) -> int:
    try:
        text = Path(args.proof).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read proof file {args.proof!r}: {e.strerror}") from None
    try:
        graph = graph_from_json(text)
    except FormulaSyntaxError:
        raise
    except (ValueError, TypeError, KeyError) as e:
        raise UsageError(f"malformed proof JSON: {e}") from None
    try:
        check_proof(graph)
    except ProofCheckError as e:
        print(f"REJECTED: {e}")
        return EXIT_NEGATIVE
    print("OK")
    return EXIT_OK


def cmd_corpus(args) -> int:
    config = _config(args)
    mismatches = 0
    for entry in standard_corpus():
        verdict = decide_formula(entry.formula, config)
        got = "provable" if isinstance(verdict, Proved) else "refutable"
        ok = got == entry.expected
        if ok and not isinstance(verdict, Proved):
            validate_model(verdict.model)
            ok = not forces(verdict.model, 0, entry.formula) and refute_semantic(entry.formula, 4) is not None
        mismatches += not ok
        print(f"{entry.name:14s} {entry.expected:9s} {got:9s} {'ok' if ok else 'MISMATCH'}  {to_str(entry.formula)}")
    print(f"{mismatches} mismatch(es)")
    return EXIT_INTERNAL if mismatches else EXIT_OK


def cmd_sweep(args) -> int:
    atoms = [a.strip() for a in args.atoms.split(",") if a.strip()]
    if not atoms:
        raise UsageError("--atoms needs at least one atom name")
    if args.max_nodes < 1 or args.oracle_bound < 1:
        raise UsageError("--max-nodes and --oracle-bound must be positive")
    try:
        formulas = enumerate_formulas(atoms, args.max_nodes)
    except ValueError as e:
        raise UsageError(str(e)) from None
    config = _config(args)
    start = time.perf_counter()
    proved = refuted = 0
    mismatches = []
    for f in formulas:
        verdict = decide_formula(f, config)
        if isinstance(verdict, Proved):
            proved += 1
            if refute_semantic(f, args.oracle_bound, args.kernel) is not None:
                mismatches.append(("proved but oracle refutes", f))
        else:
            refuted += 1
            if forces(verdict.model, 0, f):
                mismatches.append(("extracted model does not refute", f))
    for why, f in mismatches:
        print(f"MISMATCH {why}: {to_str(f)}")
    elapsed = time.perf_counter() - start
    print(f"{len(formulas)} formulas: {proved} proved, {refuted} refuted, "
          f"{len(mismatches)} mismatch(es), {elapsed:.1f}s")
    if mismatches:
        return EXIT_INTERNAL
    return EXIT_NEGATIVE if refuted else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="csprove", description="Decide formulas of the bimodal provability logic CS.")
    sub = ap.add_subparsers(dest="command", required=True)

    def search_flags(p):
        p.add_argument("--max-steps", type=int, default=None, help="override the per-branch label expansion cap")
        p.add_argument("--trace", action="store_true", help="log search events to stderr as JSON lines")
        p.add_argument("--one-label", action="store_true", help="expand a single label per label round")

    p = sub.add_parser("decide", help="prove or refute a formula or a sequent")
    p.add_argument("formula", nargs="?", help="formula in concrete syntax")
    p.add_argument("--sequent", help="sequent as JSON text or a path to a JSON file")
    p.add_argument("--proof-out", help="write the proof graph JSON here")
    p.add_argument("--model-out", help="write the countermodel JSON here")
    p.add_argument("--dot", action="store_true", help="also emit the countermodel as DOT")
    search_flags(p)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("check", help="check a proof graph file")
    p.add_argument("--proof", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("corpus", help="run the built-in corpus")
    search_flags(p)
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("sweep", help="decide every small formula and compare with the semantic oracle")
    p.add_argument("--atoms", default="p", help="comma separated atom names")
    p.add_argument("--max-nodes", type=int, default=6)
    p.add_argument("--oracle-bound", type=int, default=3)
    p.add_argument("--kernel", choices=sorted(kernels.BACKENDS), default=None)
    search_flags(p)
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except FormulaSyntaxError as e:
        _err(f"syntax error: {e}")
        return EXIT_USAGE
    except UsageError as e:
        _err(str(e))
        return EXIT_USAGE
    except ValueError as e:
        # root preconditions rejected by decide
        _err(str(e))
        return EXIT_USAGE
    except SearchError as e:
        _err(f"internal error: {e}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
