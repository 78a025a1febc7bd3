"""Machine-to-machine and oracle-to-oracle constructions.

`compose_machines` relays a machine's queries to a second machine;
`clock_finite_revision` and `clock_with_majorant` wrap a machine with a
unary step budget so its resources hold on every oracle; `retract_to_reg`
maps an oracle onto a length-monotone one.

Clocked machines tick after each simulated instruction (halts excepted). A
tick consumes one cell of the `clock.budget` tape, whose head sits on its last
`0` (or on the start cell once it is empty). Running out, exceeding the
revision allowance or seeing an answer past the recorded length all end in
the same way: the output is cut to ε and the machine halts.
"""
from __future__ import annotations
from typing import Any, Callable
from ._internal.constants import BLANK, INPUT, ONE, ORACLE, OUTPUT, ZERO, Status
from ._internal.errors import BudgetExceeded, MacroError
from ._internal.utilities import natural, log
from .machine import (
    Act,
    Ask,
    Assembler,
    Branch,
    Compare,
    Do,
    Label,
    Machine,
    Node,
    Stop,
    While,
    copy,
    decrement,
    erase,
    op,
    restore_head,
    rewind,
    run,
    save_head,
    seq,
    unary_poly,
    write_literal,
)
from .oracle import Oracle, OracleKind, TableOracle, oracle_to_json
from .sopoly import Description, LengthFn, UniPoly, leaf, majorant, product_descriptions, subst_function_arg, subst_second_arg, sum_descriptions


__all__ = [
    "COMPOSE_CONSTANT",
    "compose_machines",
    "compose_bound",
    "clock_finite_revision",
    "clock_with_majorant",
    "clocked_step_count",
    "MachineOracle",
    "RetractedOracle",
    "retract_to_reg",
]


# fit_constant of max-length and identity composed with identity, seeded tables
COMPOSE_CONSTANT = 1

CLOCK_PREFIX = "clock."
_REC    = "clock.rec"
_BUDGET = "clock.budget"
_REV    = "clock.rev"
_SAVE   = "clock.save"
_TOLD   = "clock.told"
_TNEW   = "clock.tnew"
_POLY   = "clock.x"     # scratch prefix for unary_poly




####################################################################################
################################### Composition ####################################
####################################################################################

def _composite_names(M: Machine, N: Machine) -> tuple[dict[str, str], dict[str, str]]:
    outer = {INPUT: INPUT, OUTPUT: OUTPUT, ORACLE: "m.oracle"}
    outer.update({t: f"m.{t}" for t in M.program.work_tapes})
    inner = {INPUT: "n.input", OUTPUT: "n.output", ORACLE: ORACLE}
    inner.update({t: f"n.{t}" for t in N.program.work_tapes})
    return outer, inner


def compose_machines(M: Machine, N: Machine) -> Machine:
    """Machine computing `M` against the oracle `b -> N(b)`: each query of `M`
    runs a fresh copy of `N` on the query and hands back its output. `N` is
    expected to leave blank-free tape prefixes behind, as every macro-built
    program does.
    """
    outer, inner = _composite_names(M, N)
    inner_tapes = [inner[t] for t in N.program.tapes]
    asm = Assembler()

    def relay(nxt: Label) -> Label:
        back = asm.compile(seq(
            rewind("n.output"),
            copy("n.output", "m.oracle"),
            restore_head("m.oracle", "glue.save"),
        ), nxt)
        start = asm.splice(N.program, inner, on_halt=back)
        return asm.compile(seq(
            save_head("m.oracle", "glue.save"),
            (seq(rewind(t), erase(t)) for t in inner_tapes),
            copy("m.oracle", "n.input"),
        ), start)

    entry = asm.splice(M.program, outer, on_query=relay)
    program = asm.finish(entry)
    log("debug", "compose", f"{M.name} over {N.name}: {program.size} instructions")
    return Machine(program, f"{M.name}∘{N.name}")


def compose_bound(TM: Description, TN: Description, C: int = COMPOSE_CONSTANT) -> Description:
    """`C·(T(S(l,.),n) + S(l, T(S(l,.),n))·T(S(l,.),n))` for running times `T`
    of the outer and `S` of the inner machine.
    """
    inner = subst_function_arg(TM, TN)
    total = sum_descriptions(inner, product_descriptions(subst_second_arg(TN, inner), inner))
    return product_descriptions(leaf(C), total)


class MachineOracle(Oracle):
    """The derived oracle `b -> N(b)` with `N` run against `o`."""
    kind = OracleKind.DERIVED

    def __init__(self, N: Machine, o: Oracle, fuel: int | None = None):
        self.machine = N
        self.source  = o
        self.fuel    = fuel
        self.is_pure = o.is_pure
        self.exact_size = o.is_pure

    def query(self, a: str) -> str:
        outcome = run(self.machine, self.source, a, self.fuel)
        if outcome.status is not Status.HALTED:
            raise BudgetExceeded(f"{self.machine.name} ran out of fuel on a query of length {len(a)}")
        return outcome.output

    def __repr__(self) -> str:
        return f"MachineOracle({self.machine.name}, {self.source!r})"




####################################################################################
##################################### Clocking #####################################
####################################################################################

def _check_clockable(M: Machine) -> None:
    for t in M.program.tapes:
        if t.startswith(CLOCK_PREFIX):
            raise MacroError(f"tape {t!r} collides with the clock's tapes")


def _do(*specs: tuple[str, str | None, int]) -> Do:
    return Do(tuple(op(t, w, m) for t, w, m in specs))


def _abort() -> Node:
    return seq(rewind(OUTPUT), _do((OUTPUT, BLANK, 0)), Stop())


def _record_input() -> Node:
    """`clock.rec := 0^|a|`, heads back on cell 0."""
    step_on = _do((_REC, ZERO, 1), (INPUT, None, 1))
    return seq(While(INPUT, {ZERO: step_on, ONE: step_on}), rewind(INPUT, _REC))


class _Clock:
    """Shared plumbing of both clocks: the abort block and memoized ticks."""

    def __init__(self, asm: Assembler):
        self.asm   = asm
        self.abort = asm.compile(_abort(), asm.label())
        self._ticks: dict[int, Label] = {}

    def tick(self, target: Label) -> Label:
        try:
            return self._ticks[id(target)]
        except KeyError:
            pass
        asm = self.asm
        consume = asm.emit(Act((op(_BUDGET, BLANK, -1),), target))
        label = self._ticks[id(target)] = asm.emit(Branch(_BUDGET, consume, self.abort, self.abort, self.abort))
        return label

    def simulate(self, M: Machine, on_query: Callable[[Label], Label]) -> Label:
        return self.asm.splice(M.program, on_query=on_query, edge=self.tick)


def clock_finite_revision(M: Machine, N: int, p: UniPoly) -> Machine:
    """`M` with at most `N` length revisions of its own and a step budget of
    `p(o)`, `o` the recorded length (input length, raised at each revision).
    The revision past the allowance aborts, so traces show at most `N + 1`.
    """
    natural(N)
    _check_clockable(M)
    asm = Assembler()
    clock = _Clock(asm)
    abort = _abort()

    revision = seq(
        decrement(_REV, if_zero=abort),
        unary_poly(_REC, _TOLD, p, _POLY), rewind(_TOLD),
        copy(ORACLE, _REC),
        unary_poly(_REC, _TNEW, p, _POLY), rewind(_TNEW),
        # budget += p(new) - p(old)
        _do((_BUDGET, None, 1)),
        While(_TOLD, {ZERO: _do((_TOLD, None, 1), (_TNEW, None, 1))}),
        While(_TNEW, {ZERO: _do((_BUDGET, ZERO, 1), (_TNEW, None, 1))}),
        _do((_BUDGET, None, -1)),
        rewind(_TOLD, _TNEW),
        erase(_TOLD), erase(_TNEW),
    )

    def on_query(nxt: Label) -> Label:
        return asm.compile(seq(
            Ask(),
            save_head(ORACLE, _SAVE),
            Compare(ORACLE, _REC, greater=revision),
            restore_head(ORACLE, _SAVE),
        ), nxt)

    start = clock.simulate(M, on_query)
    entry = asm.compile(seq(
        _record_input(),
        unary_poly(_REC, _BUDGET, p, _POLY),
        _do((_BUDGET, None, -1)),
        write_literal(_REV, format(N, "b")[::-1] if N else ""),
    ), start)
    program = asm.finish(entry)
    log("debug", "clock", f"{M.name} with N={N}, p={p}: {program.size} instructions")
    bounds = M.bounds._replace(step_count=clocked_step_count(p, N), revisions=N + 1)
    return Machine(program, f"clocked({M.name})", bounds)


def clock_with_majorant(M: Machine, T: Description) -> Machine:
    """`M` behind a budget of `p_N(|φ|, |a|)`, where `(N, p)` is the majorant
    of the declared running time `T`. The budget is found by `N` lookahead queries
    `φ(0^p(m))` (raising `m` to the longest answer) plus one final lookahead;
    the simulation then aborts on exhaustion and on any answer longer than
    the recorded maximum. At most `N + 2` revisions show in a trace: the
    lookaheads, and the one answer that triggers an abort.
    """
    _check_clockable(M)
    N, p = majorant(T)
    asm = Assembler()
    clock = _Clock(asm)
    abort = _abort()

    def lookahead() -> Node:
        return seq(
            erase(ORACLE),
            unary_poly(_REC, ORACLE, p, _POLY), rewind(ORACLE),
            Ask(),
            Compare(ORACLE, _REC, greater=copy(ORACLE, _REC)),
        )

    def on_query(nxt: Label) -> Label:
        return asm.compile(seq(
            Ask(),
            save_head(ORACLE, _SAVE),
            Compare(ORACLE, _REC, greater=abort),
            restore_head(ORACLE, _SAVE),
        ), nxt)

    start = clock.simulate(M, on_query)
    entry = asm.compile(seq(
        _record_input(),
        (lookahead() for _ in range(N)),
        unary_poly(_REC, _BUDGET, p, _POLY),
        _do((_BUDGET, None, -1)),
        lookahead(),
        erase(ORACLE),
    ), start)
    program = asm.finish(entry)
    log("debug", "clock", f"{M.name} with majorant {N}, {p}: {program.size} instructions")
    bounds = M.bounds._replace(step_count=clocked_step_count(p, N + 1), revisions=N + 2)
    return Machine(program, f"majorant-clocked({M.name})", bounds)


def clocked_step_count(p: UniPoly, rounds: int) -> UniPoly:
    """Step-count of a machine clocked with polynomial `p` and `rounds`
    budget extensions or lookaheads: `64(rounds+2)·Q(m)^2` with
    `Q = E + p + m + 16` and `E` the cost bound of one budget computation.
    """
    d = p.degree
    shifted = UniPoly((5, 1))
    power = UniPoly((1,))
    E = UniPoly((4,)) + 2 * p + (10 * (d + 1)) * UniPoly((2, 1))
    for c in p.coefficients:
        E = E + (c + 9) * power
        power = power * shifted
    Q = E + p + UniPoly((16, 1))
    return (64 * (rounds + 2)) * (Q * Q)




####################################################################################
#################################### Retraction ####################################
####################################################################################

class RetractedOracle(Oracle):
    """`a -> φ(a)` cut or zero-padded to length `m(|a|)`, where
    `m(n) = max{|φ(0^k)| : k <= n}`; with `printed`, `m(n) = |φ(0^n)|`.
    """
    kind = OracleKind.DERIVED

    def __init__(self, source: Oracle, printed: bool = False):
        if not source.is_pure:
            raise ValueError("only pure oracles can be retracted")
        self.source  = source
        self.printed = printed
        self._m: list[int] = []

    def target_length(self, n: int) -> int:
        if self.printed:
            return self.source.answer_length(ZERO * n)
        m = self._m
        while len(m) <= n:
            k = len(m)
            here = self.source.answer_length(ZERO * k)
            m.append(max(here, m[-1]) if m else here)
        return m[n]

    def query(self, a: str) -> str:
        size = self.target_length(len(a))
        answer = self.source.query(a)[:size]
        return answer + ZERO * (size - len(answer))

    def answer_length(self, a: str) -> int:
        return self.target_length(len(a))

    def size(self, n: int, *, budget: int | None = None) -> int:
        if self.printed:
            return super().size(n, budget=budget)
        return self.target_length(n)

    def length_fn(self, bound: int) -> LengthFn:
        exact = not self.printed and isinstance(self.source, TableOracle)
        if exact:
            bound = max(bound, self.source.longest_key + 1)
        return LengthFn.from_callable(self.size, bound, exact=exact)

    def to_json(self) -> dict[str, Any]:
        return {"kind": "retract", "source": oracle_to_json(self.source), "printed": self.printed}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RetractedOracle):
            return NotImplemented
        return self.source == other.source and self.printed == other.printed

    __hash__ = None

    def __repr__(self) -> str:
        flag = ", printed=True" if self.printed else ""
        return f"RetractedOracle({self.source!r}{flag})"


def retract_to_reg(o: Oracle, printed: bool = False) -> RetractedOracle:
    return RetractedOracle(o, printed)
