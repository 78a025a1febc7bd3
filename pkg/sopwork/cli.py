"""Command-line front end.

    sopwork run MACHINE --oracle SPEC --input BITS [--trace FILE]
    sopwork check {step-count,running-time,opt,majorant} ...
    sopwork poly {eval,sum,product,plus,subst-arg,subst-fun,majorant,pn} ...
    sopwork gallery {list,show}
    sopwork adversary {flr-stress,delayed-growth} ...

Machines are gallery names (`gallery:max-length` or `max-length`) or program
files; oracles are pattern names (`doubling`, ...) or oracle documents.
Reports go to stdout as JSON. Exit codes: 0 pass/halted, 1 verdict failed,
2 usage or unreadable input, 3 fuel exhausted.
"""
from __future__ import annotations
import argparse
import json
import logging
import os
import random
import sys
from typing import Any, Callable, Sequence
from ._internal import registry
from ._internal.comtypes import Verdict
from ._internal.constants import ExitCode, Status, ZERO
from ._internal.errors import Error
from . import gallery, machine, oracle, resources, sopoly, transformers
from .workbench import Workbench


__all__ = ["main", "build_parser"]


####################################################################################
###################################### Inputs ######################################
####################################################################################

def _machine(spec: str) -> machine.Machine:
    name = spec[len(registry.GALLERY_PREFIX):] if spec.startswith(registry.GALLERY_PREFIX) else spec
    if name in registry.machines:
        return registry.get_machine(name)
    return machine.load_machine(spec)


def _length_fn(spec: str) -> sopoly.LengthFn:
    """A comma-separated table (`"1,2,4"`, constant tail) or a document."""
    if os.path.exists(spec):
        with open(spec, "r", encoding="utf-8") as f:
            return sopoly.length_fn_from_json(json.load(f))
    try:
        return sopoly.LengthFn(tuple(int(v) for v in spec.split(",") if v.strip()))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad length function {spec!r} ({e})") from None


def _modified(M: machine.Machine, args: argparse.Namespace) -> machine.Machine:
    if getattr(args, "compose", None):
        M = transformers.compose_machines(M, _machine(args.compose))
    if getattr(args, "clock_flr", None) is not None:
        if not args.clock_poly:
            raise SystemExit("--clock-flr needs --clock-poly")
        M = transformers.clock_finite_revision(M, args.clock_flr, sopoly.UniPoly.parse(args.clock_poly))
    if getattr(args, "clock_majorant", None):
        if args.clock_majorant == "declared":
            T = M.bounds.running_time
            if T is None:
                raise SystemExit(f"{M.name} declares no running time")
        else:
            T = sopoly.load_description(args.clock_majorant)
        M = transformers.clock_with_majorant(M, T)
    return M


def _emit(report: dict[str, Any]) -> None:
    json.dump(report, sys.stdout, indent=1, sort_keys=True, default=str)
    sys.stdout.write("\n")


def _verdict_exit(v: Verdict) -> int:
    return ExitCode.PASS if v.passed else ExitCode.FAIL




####################################################################################
####################################### Verbs ######################################
####################################################################################

def cmd_run(args: argparse.Namespace) -> int:
    M = _modified(_machine(args.machine), args)
    o = oracle.load_oracle(args.oracle)
    outcome = machine.run(M, o, args.input)
    tr = outcome.trace
    if args.trace:
        resources.dump_trace(tr, args.trace, sparse=args.sparse_trace)
    _emit({
        "machine"  : M.name,
        "status"   : outcome.status.value,
        "output"   : outcome.output,
        "time"     : tr.time,
        "queries"  : len(tr.queries),
        "revisions": resources.count_revisions(tr),
        "m"        : tr.m,
    })
    return ExitCode.HALTED if outcome.halted else ExitCode.FUEL


def _traces(args: argparse.Namespace) -> tuple[list[resources.Trace], oracle.Oracle | None, int]:
    """Traces to check: a trace file, or runs of a machine on `--input` or on
    `0^k` for every `k <= --max-input`.
    """
    o = oracle.load_oracle(args.oracle) if args.oracle else None
    if args.trace:
        return [resources.load_trace(args.trace)], o, ExitCode.OK
    if not args.machine or o is None:
        raise SystemExit("give --trace, or a machine with --oracle")
    M = _modified(_machine(args.machine), args)
    inputs = [args.input] if args.input is not None else [ZERO * k for k in range(args.max_input + 1)]
    traces = []
    for a in inputs:
        outcome = machine.run(M, o, a)
        if not outcome.halted:
            _emit({"machine": M.name, "status": outcome.status.value, "input_length": len(a)})
            return traces, o, ExitCode.FUEL
        traces.append(outcome.trace)
    return traces, o, ExitCode.OK


def _sweep(traces: Sequence[resources.Trace], check: Callable[[resources.Trace], Verdict]) -> int:
    last = Verdict(True, None, "no traces")
    for tr in traces:
        last = check(tr)
        if not last.passed:
            _emit({**last.to_dict(), "input_length": tr.input_length, "time": tr.time})
            return ExitCode.FAIL
    _emit({**last.to_dict(), "checked": len(traces)})
    return ExitCode.PASS


def cmd_check(args: argparse.Namespace) -> int:
    if args.what == "majorant":
        return _check_majorant(args)
    traces, o, code = _traces(args)
    if code != ExitCode.OK:
        return code
    if args.what in ("step-count", "opt"):
        if not args.poly:
            raise SystemExit(f"check {args.what} needs --poly")
        t = sopoly.UniPoly.parse(args.poly)
        fn = resources.check_step_count if args.what == "step-count" else resources.check_opt
        return _sweep(traces, lambda tr: fn(tr, t))
    if not args.description or o is None:
        raise SystemExit("check running-time needs --description and --oracle")
    T = sopoly.load_description(args.description)
    sizes = oracle.SizeFn(o)
    return _sweep(traces, lambda tr: resources.check_running_time(tr, T, sizes.as_length_fn(tr.input_length)))


def _check_majorant(args: argparse.Namespace) -> int:
    if args.samples:
        with open(args.samples, "r", encoding="utf-8") as f:
            rows = json.load(f)
        samples = [
            (sopoly.description_from_json(r["description"]), sopoly.length_fn_from_json(r["length"]), int(r["n"]))
            for r in rows
        ]
    else:
        rng = random.Random(Workbench.seed)
        samples = [
            (sopoly.random_description(rng, rng.randint(0, Workbench.sample_depth)), sopoly.random_length_fn(rng), rng.randint(0, 16))
            for _ in range(args.count)
        ]
    for i, (T, l, n) in enumerate(samples):
        v = sopoly.check_majorant_bound(T, l, n)
        if not v.passed:
            _emit({**v.to_dict(), "sample": i, "description": str(T)})
            return ExitCode.FAIL
    _emit({"passed": True, "checked": len(samples)})
    return ExitCode.PASS


def cmd_poly(args: argparse.Namespace) -> int:
    op = args.op
    T = sopoly.load_description(args.description)
    if op == "eval":
        _emit({"value": sopoly.eval_description(T, _length_fn(args.length), args.n)})
        return ExitCode.OK
    if op == "majorant":
        m = sopoly.majorant(T)
        _emit({"N": m.height, "p": str(m.bound), "coefficients": list(m.bound.coefficients)})
        return ExitCode.OK
    if op == "pn":
        m = sopoly.majorant(T)
        i = m.height if args.i is None else args.i
        _emit({"i": i, "value": sopoly.eval_pN(m, _length_fn(args.length), args.n, i)})
        return ExitCode.OK
    if op == "plus":
        result = sopoly.apply_plus(T)
    else:
        if not args.other:
            raise SystemExit(f"poly {op} needs a second description")
        other = sopoly.load_description(args.other)
        combine = {
            "sum"      : sopoly.sum_descriptions,
            "product"  : sopoly.product_descriptions,
            "subst-arg": sopoly.subst_second_arg,
            "subst-fun": sopoly.subst_function_arg,
        }[op]
        result = combine(T, other)
    if args.out:
        sopoly.dump_description(result, args.out)
    _emit(sopoly.description_to_json(result))
    return ExitCode.OK


def cmd_gallery(args: argparse.Namespace) -> int:
    if args.op == "list":
        _emit({name: str(registry.get_machine(name)) for name in sorted(registry.machines)})
        return ExitCode.OK
    M = _modified(_machine(args.machine), args)
    sys.stdout.write(machine.dumps_program(M.program))
    return ExitCode.OK


def cmd_adversary(args: argparse.Namespace) -> int:
    M = _modified(_machine(args.machine), args)
    if args.op == "flr-stress":
        finalized, a, report = gallery.flr_stress(M, args.N)
    else:
        finalized, a, report = gallery.delayed_growth_adversary(M, args.level)
    if args.out:
        oracle.dump_oracle(finalized, args.out)
    _emit({"machine": M.name, "input": a, **report.to_dict()})
    return ExitCode.FUEL if report.status != Status.HALTED.value else ExitCode.OK




####################################################################################
###################################### Parser ######################################
####################################################################################

def _modifier_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--compose", metavar="MACHINE", help="answer queries with MACHINE run against the oracle")
    p.add_argument("--clock-flr", type=int, metavar="N", help="clock with N revisions and the --clock-poly budget")
    p.add_argument("--clock-poly", metavar="C0,C1,..", help="step budget of the --clock-flr clock, lowest degree first")
    p.add_argument("--clock-majorant", metavar="DESC", help="clock with the majorant of DESC ('declared' uses the machine's own)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sopwork", description="Second-order complexity workbench.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--fuel", type=int, help=f"step limit per run (default {Workbench.fuel})")
    parser.add_argument("--seed", type=int, help=f"sampler seed (default {Workbench.seed})")
    parser.add_argument("--depth", type=int, help=f"height limit of sampled descriptions (default {Workbench.sample_depth})")
    verbs = parser.add_subparsers(dest="verb", required=True)
    mods = _modifier_options()

    p = verbs.add_parser("run", parents=[mods], help="run a machine")
    p.add_argument("machine")
    p.add_argument("--oracle", required=True)
    p.add_argument("--input", default="", type=_bits)
    p.add_argument("--trace", metavar="FILE")
    p.add_argument("--sparse-trace", action="store_true", help="omit plain steps from the trace file")
    p.set_defaults(func=cmd_run)

    p = verbs.add_parser("check", parents=[mods], help="check a resource bound")
    p.add_argument("what", choices=("step-count", "running-time", "opt", "majorant"))
    p.add_argument("machine", nargs="?")
    p.add_argument("--oracle")
    p.add_argument("--input", type=_bits)
    p.add_argument("--max-input", type=int, default=8, help="check inputs 0^k for k up to this (default 8)")
    p.add_argument("--trace", metavar="FILE")
    p.add_argument("--poly", help="step-count to check, lowest degree first")
    p.add_argument("--description", metavar="FILE")
    p.add_argument("--samples", metavar="FILE")
    p.add_argument("--count", type=int, default=1000)
    p.set_defaults(func=cmd_check)

    p = verbs.add_parser("poly", help="description calculus")
    p.add_argument("op", choices=("eval", "sum", "product", "plus", "subst-arg", "subst-fun", "majorant", "pn"))
    p.add_argument("description")
    p.add_argument("other", nargs="?")
    p.add_argument("--length", default="0", help="length function table or document")
    p.add_argument("-n", type=int, default=0)
    p.add_argument("-i", type=int)
    p.add_argument("-o", "--out", metavar="FILE")
    p.set_defaults(func=cmd_poly)

    p = verbs.add_parser("gallery", parents=[mods], help="list or print gallery machines")
    p.add_argument("op", choices=("list", "show"))
    p.add_argument("machine", nargs="?", default="halt")
    p.set_defaults(func=cmd_gallery)

    p = verbs.add_parser("adversary", parents=[mods], help="run an adversary against a machine")
    p.add_argument("op", choices=("flr-stress", "delayed-growth"))
    p.add_argument("machine")
    p.add_argument("-N", type=int, default=3)
    p.add_argument("--level", type=int, default=0)
    p.add_argument("-o", "--out", metavar="FILE", help="write the finalized oracle here")
    p.set_defaults(func=cmd_adversary)
    return parser


def _bits(text: str) -> str:
    if any(c not in "01" for c in text):
        raise argparse.ArgumentTypeError(f"{text!r} is not a bit-string")
    return text


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s:%(name)s:%(message)s",
    )
    saved = Workbench.settings()
    try:
        Workbench.configure(fuel=args.fuel, seed=args.seed, sample_depth=args.depth)
        return int(args.func(args))
    except SystemExit as e:
        if isinstance(e.code, str):
            parser.error(e.code)
        raise
    except (Error, ValueError, KeyError, OSError, json.JSONDecodeError, argparse.ArgumentTypeError) as e:
        sys.stderr.write(f"sopwork: {e}\n")
        return ExitCode.USAGE
    finally:
        Workbench.configure(**saved)
