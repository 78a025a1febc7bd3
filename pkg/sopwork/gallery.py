"""Witness machines and adversaries.

Every machine here is built from macros, so its exact cost is a closed form;
the frozen bounds below were fitted against those forms and are asserted by
the test-suite.

    iterated-apply     φ^|a|(0)                                    3n + 2L + 4
    max-length         0^max{|φ(0^k)| : k <= |a|}                  2n(n+1) + 14(n+1) + 4ΣL_k
    bruteforce-length  0^|φ|(|a|), every string of length <= |a|
    abort-early        bruteforce-length, abandoned (output ε) once the
                       queries outnumber twice the longest answer
    identity           φ(a)                                        4n + 2L + 8

`L` is the length of the final answer, `L_k` that of φ(0^k).
"""
from __future__ import annotations
from dataclasses import dataclass, field, asdict
from typing import Any
from ._internal import registry
from ._internal.constants import BLANK, INPUT, ONE, ORACLE, OUTPUT, START, ZERO, Status
from ._internal.errors import NonConvergence, OracleError
from ._internal.utilities import bitstring, natural, tower, log
from .machine import Ask, Break, Compare, Do, If, Loop, Machine, Bounds, Node, Stop, While, build, op, rewind, rewind_together, run, seq
from .oracle import AdaptiveOracle, Oracle, OracleKind, TableOracle, in_class_A
from .resources import count_revisions
from .sopoly import UniPoly, const, leaf, node, var
from .workbench import Workbench


__all__ = [
    "ITERATED_APPLY_STEP_COUNT",
    "MAX_LENGTH_STEP_COUNT",
    "MAX_LENGTH_RUNNING_TIME",
    "IDENTITY_RUNNING_TIME",
    "BRUTEFORCE_CLAIMED_BOUND",
    "BRUTEFORCE_CLASS_A_CONSTANT",
    "iterated_apply_machine",
    "max_length_machine",
    "bruteforce_length_machine",
    "bruteforce_class_a_lengths",
    "abort_early_machine",
    "identity_machine",
    "constant_machine",
    "halt_machine",
    "max_length_value",
    "FlrReport",
    "flr_stress",
    "DelayedGrowthReport",
    "delayed_growth_adversary",
]


_X0, _X1 = var(0, 2), var(1, 2)

ITERATED_APPLY_STEP_COUNT = UniPoly((6, 5, 1))
MAX_LENGTH_STEP_COUNT     = UniPoly((14, 20, 6))
# C(1 + n + n^2 + l(n) + n*l(n)) with C = 16
MAX_LENGTH_RUNNING_TIME   = node(const(16, 2) * (const(1, 2) + _X0 + _X0 * _X0 + _X1 + _X0 * _X1), leaf(var(0, 1)))
IDENTITY_RUNNING_TIME     = node(const(8, 2) + var(0, 2, 8) + var(1, 2, 8), leaf(var(0, 1)))
# claimed, not true on every oracle: 16 + 16n + 16 l(l(3n + 6))
BRUTEFORCE_CLAIMED_BOUND  = node(
    const(16, 2) + var(0, 2, 16) + var(1, 2, 16),
    node(var(1, 2), leaf(UniPoly((6, 3)))),
)
# fit_constant of bruteforce-length against the claimed bound on
# make_delayed_growth(0..1), inputs from `bruteforce_class_a_lengths`
BRUTEFORCE_CLASS_A_CONSTANT = 2


def _do(*specs: tuple[str, str | None, int]) -> Do:
    return Do(tuple(op(t, w, m) for t, w, m in specs))


def _merge_max(extra: Node | None = None) -> Node:
    """Raise the output (a block of zeros) to the answer length while blanking
    the oracle tape; `extra` runs whenever the output grows by one cell.
    Oracle and output heads end on cell 0.
    """
    grow = _do((OUTPUT, ZERO, 1), (ORACLE, BLANK, 1))
    if extra is None:
        cell = grow
    else:
        cell = If(OUTPUT, {ZERO: _do((OUTPUT, None, 1), (ORACLE, BLANK, 1)), BLANK: seq(grow, extra)})
    return seq(While(ORACLE, {ZERO: cell, ONE: cell}), rewind_together(ORACLE, OUTPUT))


def _transfer(src: str, dst: str) -> Node:
    """Copy `src` onto the blank tape `dst`, leaving both heads past the copy."""
    return While(src, {
        ZERO: _do((dst, ZERO, 1), (src, None, 1)),
        ONE : _do((dst, ONE, 1), (src, None, 1)),
    })




####################################################################################
##################################### Machines #####################################
####################################################################################

@registry.register_machine("iterated-apply")
def iterated_apply_machine() -> Machine:
    """φ^|a|(0): write `0` on the oracle tape, query once per input cell, copy
    the last answer to the output.
    """
    step_on = seq(Ask(), _do((INPUT, None, 1)))
    program = build(seq(
        _do((ORACLE, ZERO, 0)),
        While(INPUT, {ZERO: step_on, ONE: step_on}),
        _transfer(ORACLE, OUTPUT),
    ))
    return Machine(program, "iterated-apply", Bounds(step_count=ITERATED_APPLY_STEP_COUNT))


@registry.register_machine("max-length")
def max_length_machine() -> Machine:
    """Query `0^k` for `k = 0..|a|` with a unary counter and keep the longest
    answer length on the output in unary.
    """
    program = build(Loop(seq(
        _transfer("count", ORACLE),
        _do(("count", ZERO, 0)),
        rewind_together("count", ORACLE),
        Ask(),
        _merge_max(),
        If(INPUT, {BLANK: Break()}),
        _do((INPUT, None, 1)),
    )))
    bounds = Bounds(step_count=MAX_LENGTH_STEP_COUNT, running_time=MAX_LENGTH_RUNNING_TIME)
    return Machine(program, "max-length", bounds)


def _shortlex_successor(on_new_length: Node) -> Node:
    """Next string of `cur` in shortlex order, least significant bit first;
    `on_new_length` runs after the length grows.
    """
    return seq(
        While("cur", {ONE: _do(("cur", ZERO, 1))}),
        If("cur", {
            ZERO : seq(_do(("cur", ONE, 0)), rewind("cur")),
            BLANK: seq(_do(("cur", ZERO, 0)), rewind("cur"), on_new_length),
        }),
    )


def _bruteforce(after_merge: Node | None = None, grow: Node | None = None) -> Node:
    return Loop(seq(
        _transfer("cur", ORACLE),
        rewind_together("cur", ORACLE),
        Ask(),
        _merge_max(grow),
        after_merge or seq(),
        _shortlex_successor(Compare("cur", INPUT, greater=Break())),
    ))


@registry.register_machine("bruteforce-length")
def bruteforce_length_machine() -> Machine:
    """0^|φ|(|a|) by querying every string of length at most |a|."""
    program = build(_bruteforce())
    return Machine(program, "bruteforce-length", Bounds(running_time=BRUTEFORCE_CLAIMED_BOUND))


def bruteforce_class_a_lengths(depth: int) -> range:
    """Input lengths on which the claimed bound, scaled by
    `BRUTEFORCE_CLASS_A_CONSTANT`, holds for class-A constructions truncated at
    `depth`: those below the last spike length `2^(2^depth)`. Past it the
    truncated size function stops growing and brute force outruns the bound.
    """
    return range(tower(natural(depth)))


@registry.register_machine("abort-early")
def abort_early_machine() -> Machine:
    """Brute force that gives up with ε once the number of queries exceeds
    twice the longest answer seen. `slack` holds `2b - q` in unary with its
    head on the first blank.
    """
    abort = seq(_do((OUTPUT, BLANK, 0)), Stop())
    check = seq(
        _do(("slack", None, -1)),
        If("slack", {ZERO: _do(("slack", BLANK, 0)), START: abort}),
    )
    grow = _do(("slack", ZERO, 1))
    program = build(_bruteforce(after_merge=check, grow=seq(grow, grow)))
    return Machine(program, "abort-early")


@registry.register_machine("identity")
def identity_machine() -> Machine:
    """φ(a): relay the input to the oracle and the answer to the output."""
    program = build(seq(
        _transfer(INPUT, ORACLE),
        rewind_together(ORACLE, INPUT),
        Ask(),
        _transfer(ORACLE, OUTPUT),
    ))
    return Machine(program, "identity", Bounds(running_time=IDENTITY_RUNNING_TIME))


@registry.register_machine("constant")
def constant_machine(c: str = "") -> Machine:
    bitstring(c)
    program = build(seq(_do((OUTPUT, b, 1)) for b in c))
    return Machine(program, f"constant({c})", Bounds(running_time=leaf(len(c) + 1), revisions=0))


@registry.register_machine("halt")
def halt_machine() -> Machine:
    return Machine(build(Stop()), "halt", Bounds(step_count=UniPoly((1,)), revisions=0))


def max_length_value(o: Oracle, n: int) -> str:
    """Reference value of the max-length functional on inputs of length `n`."""
    return ZERO * max(o.answer_length(ZERO * k) for k in range(n + 1))




####################################################################################
################################### Adversaries ####################################
####################################################################################

@dataclass
class FlrReport:
    """Outcome of `flr_stress`.

    Args:
        * N (int): Revision allowance under test; the input is `0^N`.
        * revisions (int): Strict increases of the revision profile.
        * exceeded (bool): Whether `revisions > N`.
        * output (str): The machine's output.
        * expected (str): The max-length value on the finalized oracle.
        * consistent (bool): `output == expected`.
        * planted (str | None): String that received the late answer, if any.
        * time (int): Steps of the run.
        * status (str): Run status.
    """
    N         : int
    revisions : int
    exceeded  : bool
    output    : str
    expected  : str
    consistent: bool
    planted   : str | None
    time      : int
    status    : str

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def flr_stress(M: Machine, N: int, *, fuel: int | None = None) -> tuple[TableOracle, str, FlrReport]:
    """Answer the `i`-th fresh query of `M` with `0^(N+i)` on input `0^N`.
    Afterwards `0^(T+1)` (T the run's time) is planted on the first unqueried
    `0^m`, `m <= N`, and the run is judged against the max-length functional
    on the resulting table.
    """
    natural(N)
    a = ZERO * N
    adaptive = AdaptiveOracle(lambda b, o: ZERO * (N + o.fresh_count + 1), "flr-stress")
    outcome = run(M, adaptive, a, fuel)
    if outcome.status is not Status.HALTED:
        log("warning", "flr-stress", f"{M.name} did not halt", f"time {outcome.trace.time}")
    planted = next((ZERO * m for m in range(N + 1) if not adaptive.asked(ZERO * m)), None)
    extra = {planted: ZERO * (outcome.trace.time + 1)} if planted is not None else {}
    finalized = adaptive.finalize("", extra)
    revisions = count_revisions(outcome.trace)
    expected = max_length_value(finalized, N)
    report = FlrReport(
        N=N,
        revisions=revisions,
        exceeded=revisions > N,
        output=outcome.output,
        expected=expected,
        consistent=outcome.output == expected,
        planted=planted,
        time=outcome.trace.time,
        status=outcome.status.value,
    )
    log("info", "flr-stress", f"{M.name}: {revisions} revisions, consistent={report.consistent}", f"N={N}")
    return finalized, a, report


class _Amend(Exception):
    def __init__(self, query: str):
        super().__init__(query)
        self.query = query


class _Watcher(Oracle):
    """ε everywhere except on planted strings. Raises `_Amend` when a query
    completes a watched length whose strings were all answered ε.
    """
    kind    = OracleKind.ADAPTIVE
    is_pure = False

    def __init__(self, plants: dict[str, str], watch: frozenset[int]):
        self.plants = plants
        self.watch  = watch
        self.asked: dict[int, set[str]] = {}
        self._planted_lengths = {len(k) for k in plants}

    def query(self, a: str) -> str:
        try:
            return self.plants[a]
        except KeyError:
            pass
        w = len(a)
        seen = self.asked.setdefault(w, set())
        seen.add(a)
        if w in self.watch and w not in self._planted_lengths and len(seen) == 1 << w:
            raise _Amend(a)
        return ""

    def unasked(self, w: int) -> str | None:
        seen = self.asked.get(w, set())
        for k in range(1 << w):
            s = format(k, f"0{w}b") if w else ""
            if s not in seen and s not in self.plants:
                return s
        return None


@dataclass
class DelayedGrowthReport:
    """Outcome of `delayed_growth_adversary`.

    Args:
        * level (int): Construction level `n`.
        * input_length (int): `2^(2^(n+1)) - 1`.
        * iterations (int): Replays until no amendment was needed.
        * bindings (list[dict]): For each watched length, how its answer was
        placed (`triggered` during replay or `finalized` afterwards).
        * output (str): The machine's output on the finalized oracle.
        * expected (str): `0^|φ|(|a|)`.
        * correct (bool): `output == expected`.
        * in_class_A (bool): Membership of the finalized oracle to depth `n`.
        * psi_time (int): Steps of the machine on the truncated companion.
        * psi_output (str): Its output there.
        * status (str): Status of the final replay.
    """
    level       : int
    input_length: int
    iterations  : int
    bindings    : list[dict[str, Any]] = field(default_factory=list)
    output      : str = ""
    expected    : str = ""
    correct     : bool = False
    in_class_A  : bool = False
    psi_time    : int = 0
    psi_output  : str = ""
    status      : str = Status.HALTED.value

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def delayed_growth_adversary(M: Machine, n: int, *, fuel: int | None = None, iteration_cap: int | None = None) -> tuple[TableOracle, str, DelayedGrowthReport]:
    """Replay `M` on input `0^(2^(2^(n+1)) - 1)` against an oracle that answers
    ε, except that when `M` completes the strings of a watched length
    `w = 2^(2^m)` (all answered ε so far) the last of them gets `0^(2^w)` and
    the run starts over. At the fixpoint every watched length without an
    answer gets one on a string `M` never asked, which makes the table a
    class-A oracle to depth `n` that `M` cannot tell from the replay.
    """
    if not 0 <= n <= 1:
        raise ValueError(f"the delayed-growth construction runs at levels 0 and 1 (got {n})")
    cap = Workbench.get("iteration_cap", iteration_cap)
    a = ZERO * (tower(n + 1) - 1)
    watch = frozenset(tower(m) for m in range(n + 1))
    plants: dict[str, str] = {}
    bindings: list[dict[str, Any]] = []
    for iteration in range(1, cap + 1):
        watcher = _Watcher(dict(plants), watch)
        try:
            outcome = run(M, watcher, a, fuel)
        except _Amend as amend:
            b = amend.query
            plants[b] = ZERO * (1 << len(b))
            bindings.append({"length": len(b), "query": b, "answer_length": 1 << len(b), "how": "triggered", "iteration": iteration})
            log("info", "delayed-growth", f"planted 0^{1 << len(b)} on {b!r}", f"iteration {iteration}")
            continue
        break
    else:
        raise NonConvergence(f"{M.name} still forced amendments after {cap} replays")

    for w in sorted(watch):
        if any(len(k) == w for k in plants):
            continue
        b = watcher.unasked(w)
        if b is None:
            raise OracleError(f"every string of length {w} was asked without a trigger")
        plants[b] = ZERO * (1 << w)
        bindings.append({"length": w, "query": b, "answer_length": 1 << w, "how": "finalized", "iteration": iteration})
        log("info", "delayed-growth", f"finalized 0^{1 << w} on {b!r}")

    finalized = TableOracle(plants, "")
    expected = ZERO * finalized.size(len(a))
    psi = TableOracle({k: v for k, v in plants.items() if len(k) <= tower(n)}, "")
    psi_run = run(M, psi, a, fuel)
    report = DelayedGrowthReport(
        level=n,
        input_length=len(a),
        iterations=iteration,
        bindings=bindings,
        output=outcome.output,
        expected=expected,
        correct=outcome.output == expected,
        in_class_A=in_class_A(finalized, n).passed,
        psi_time=psi_run.trace.time,
        psi_output=psi_run.output,
        status=outcome.status.value,
    )
    log("info", "delayed-growth", f"{M.name} at level {n}: correct={report.correct}", f"{iteration} replays")
    return finalized, a, report
