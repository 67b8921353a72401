"""Command-line entry point: ``ewpm <command> [options]``.

Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 feasibility or precision limits.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

import numpy as np

from ._parallel import resolve_workers
from .engines import ENGINES, solve_delta_ewpm
from .errors import (
    BoundsError,
    CapExceeded,
    DegenerateInput,
    EwpmError,
    FeasibilityExceeded,
    IsolationViolated,
    ParseError,
    PrecisionExhausted,
)
from .experiments import (
    delta_records,
    engine_equivalence_records,
    isolation_records,
    planarity_records,
)
from .geometry import random_instance
from .io import format_record, instance_hash, read_instance, write_instance
from .lowerbound import check_distinct_weights, close_pair, construction1, default_bits, unroll, verify_theorem1
from .verification import (
    check_isolation,
    check_planarity,
    check_wtv_uniqueness,
    gap_scan,
    near_min_union,
)
from .weights import choose_ell, w_ell_assignment

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _delta(text: str) -> Fraction:
    num, sep, den = text.partition("/")
    try:
        value = Fraction(int(num), int(den)) if sep else Fraction(int(num))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"delta must be an exact rational 'p/q', got {text!r}")
    if value <= 0:
        raise argparse.ArgumentTypeError("delta must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--bits", type=int, default=None, help="interval precision in bits")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1, help="worker processes; 0 = all cores")
    common.add_argument("--out", type=Path, default=None)
    common.add_argument("--delta", type=_delta, default=None, help="additive error as p/q")
    common.add_argument("--ell", type=int, default=None, help="override the distance precision")
    common.add_argument("--engine", choices=ENGINES, default="mvv")

    parser = _Parser(prog="ewpm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", parents=[common], help="delta-approximate matching of an instance file")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--certify", action="store_true", help="compare against the brute-force optimum")

    p = sub.add_parser("gen", parents=[common], help="write a generated instance")
    p.add_argument("kind", choices=("c1", "c2", "random"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--grid", type=int, default=16)

    p = sub.add_parser("verify", parents=[common], help="run a structural check")
    p.add_argument("check", choices=("isolation", "planarity", "gap", "distinct", "theorem1", "wtv"))
    p.add_argument("--input", type=Path)
    p.add_argument("--grid", type=int)
    p.add_argument("--n", type=int)

    p = sub.add_parser("bench", parents=[common], help="seeded batch over random instances")
    p.add_argument("suite", nargs="?", default="solve",
                   choices=("solve", "equivalence", "isolation", "planarity"))
    p.add_argument("--count", type=int, default=20)
    return parser


def _emit(lines: List[str], out: Optional[Path]) -> None:
    text = "".join(line + "\n" for line in lines)
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _need(args, name):
    value = getattr(args, name)
    if value is None:
        raise _UsageError(f"--{name} is required for this command")
    return value


def _cmd_solve(args) -> int:
    inst = read_instance(args.input)
    delta = args.delta if args.delta is not None else Fraction(1, 100)
    t0 = time.perf_counter()
    res = solve_delta_ewpm(
        inst, delta, engine=args.engine, workers=resolve_workers(args.threads),
        ell=args.ell, bits=args.bits or 128, certify=args.certify,
    )
    lo, hi = res.exact_weight_bracket
    _emit([format_record({
        "command": "solve", "instance": instance_hash(inst), "engine": args.engine,
        "ell": res.ell, "K": res.K, "matching": res.matching,
        "weight_lower": lo, "weight_upper": hi, "pass": res.certified,
        "delta": delta, "optimum_lower": res.optimum_lower,
        "wall_ms": (time.perf_counter() - t0) * 1e3,
    })], args.out)
    return EXIT_FAIL if res.certified is False else EXIT_OK


def _cmd_gen(args) -> int:
    if args.kind == "c1":
        inst = construction1(args.n).instance
    elif args.kind == "c2":
        c1 = construction1(args.n)
        inst = unroll(c1, close_pair(c1, args.bits or 0)).instance
    else:
        inst = random_instance(args.n, args.grid, np.random.default_rng(args.seed))
    text = write_instance(inst)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text, encoding="utf-8")
    return EXIT_OK


def _report_record(rep, inst=None, **extra) -> str:
    fields = {
        "command": f"verify-{rep.check}",
        "instance": instance_hash(inst) if inst is not None else None,
        "pass": rep.passed,
        "witness": _witness(rep.witness),
    }
    fields.update(extra)
    return format_record(fields)


def _witness(w):
    if w is None:
        return None
    if isinstance(w, tuple):
        return "|".join(str(x).replace(" ", "") for x in w)
    return str(w).replace(" ", "")


def _cmd_verify(args) -> int:
    workers = resolve_workers(args.threads)
    t0 = time.perf_counter()
    inst = None
    extra = {}
    if args.check == "gap":
        rep = gap_scan(_need(args, "grid"), bits=args.bits or 128, workers=workers, seed=args.seed)
        extra = {"min_gap_lower": rep.details.get("min_gap_lower"),
                 "min_gap_upper": rep.details.get("min_gap_upper"),
                 "bound": rep.details.get("bound")}
    elif args.check == "distinct":
        c1 = construction1(_need(args, "n"))
        rep, inst = check_distinct_weights(c1), c1.instance
    elif args.check == "theorem1":
        n = _need(args, "n")
        rep = verify_theorem1(n, bits=args.bits or default_bits(n))
        inst = construction1(n).instance
        extra = {"gap_upper": rep.details["gap_upper"], "bound": rep.details["bound"],
                 "extent": rep.details["extent"]}
    else:
        inst = read_instance(_need(args, "input"))
        if args.check == "isolation":
            ell = args.ell or choose_ell(inst.n, inst.grid_bound, args.delta or 1).ell
            rep = check_isolation(w_ell_assignment(inst, ell), workers=workers)
            extra = {"ell": ell, "matching": rep.details.get("matching")}
        else:
            union = near_min_union(inst, bits=args.bits or 128, workers=workers)
            rep = check_planarity(union) if args.check == "planarity" else check_wtv_uniqueness(union)
            extra = {"matching": union.optimum, "union_edges": len(union.edges)}
    extra["wall_ms"] = (time.perf_counter() - t0) * 1e3
    _emit([_report_record(rep, inst, **extra)], args.out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def _cmd_bench(args) -> int:
    workers = resolve_workers(args.threads)
    kw = {"count": args.count, "seed": args.seed, "workers": workers}
    if args.suite == "solve":
        lines = delta_records(delta=args.delta or Fraction(1, 100), engine=args.engine, **kw)
    elif args.suite == "equivalence":
        lines = engine_equivalence_records(**kw)
    elif args.suite == "isolation":
        lines = isolation_records(**kw)
    else:
        lines = planarity_records(**kw)
    _emit(lines, args.out)
    return EXIT_OK if all("\tpass=pass" in line for line in lines) else EXIT_FAIL


COMMANDS = {"solve": _cmd_solve, "gen": _cmd_gen, "verify": _cmd_verify, "bench": _cmd_bench}


def run_cli(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"ewpm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (FeasibilityExceeded, PrecisionExhausted, CapExceeded) as exc:
        print(f"ewpm: limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (ParseError, BoundsError, OSError, ValueError, DegenerateInput) as exc:
        print(f"ewpm: input error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IsolationViolated as exc:
        print(f"ewpm: verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except EwpmError as exc:
        print(f"ewpm: error: {exc}", file=sys.stderr)
        return EXIT_LIMIT


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
