"""The instrumented oracle-machine model.

A `Program` is a flat list of instructions over named tapes. Every tape is
one-way infinite to the right, holds `0`, `1` or blank (`_`), and has a
read-only start cell left of cell 0 that scans as `^`. Heads start on cell 0.
The fixed tapes are `input` (never written), `output` and `oracle`; every
other name is a work tape.

Each executed instruction costs one step:

    Act     per tape an optional write, then a move (L, S or R)
    Branch  continue at the successor chosen by one tape's scanned symbol
    Query   replace the oracle tape by φ(b), b its content up to the first
            blank; no head moves
    Halt

Programs are usually written as structured nodes (`Do`, `Ask`, `Stop`, `Seq`,
`If`, `While`, `Loop`, `Break`) and the macros below, then compiled by
`build`. The `Assembler` that does this is also how the transformers splice
whole programs into each other.
"""
from __future__ import annotations
import json
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable, Iterable, Mapping, NamedTuple, Sequence
from typing_extensions import TypeAlias
from ._internal.comtypes import Filepath
from ._internal.constants import BLANK, FIXED_TAPES, INPUT, ONE, ORACLE, OUTPUT, START, SYMBOLS, ZERO, Move, Status
from ._internal.errors import MacroError, ProgramFormatError, err_bad_symbol, err_unknown_tape
from ._internal.utilities import bitstring, natural, log
from .oracle import Oracle
from .resources import QueryRecord, Trace, Event, EventKind
from .sopoly import Description, UniPoly
from .workbench import Workbench


__all__ = [
    # flat instructions
    "TapeOp",
    "Act",
    "Branch",
    "Query",
    "Halt",
    "Program",
    "Bounds",
    "Machine",
    # structured nodes
    "Node",
    "Do",
    "Ask",
    "Stop",
    "Seq",
    "If",
    "While",
    "Loop",
    "Break",
    "Compare",
    "op",
    "seq",
    # macros
    "rewind",
    "rewind_together",
    "erase",
    "copy",
    "write_literal",
    "increment",
    "decrement",
    "length_compare",
    "repeat",
    "unary_poly",
    "save_head",
    "restore_head",
    "rewind_cost",
    "erase_cost",
    "copy_cost",
    "write_literal_cost",
    "increment_cost",
    "compare_cost",
    "save_head_cost",
    "restore_head_cost",
    "unary_poly_cost_bound",
    # assembly and execution
    "Label",
    "Assembler",
    "build",
    "Config",
    "RunOutcome",
    "initial_config",
    "step",
    "run",
    # documents
    "dumps_program",
    "loads_program",
    "load_machine",
    "dump_machine",
]




####################################################################################
############################### Flat instruction set ###############################
####################################################################################

class TapeOp(NamedTuple):
    """One tape's part of an `Act`: write `write` (None keeps the cell), then
    move the head by `move` (-1, 0 or 1).
    """
    tape : str
    write: str | None = None
    move : int = 0


class Act(NamedTuple):
    ops : tuple[TapeOp, ...]
    next: int


class Branch(NamedTuple):
    tape    : str
    on_zero : int
    on_one  : int
    on_blank: int
    on_start: int


class Query(NamedTuple):
    next: int


class Halt(NamedTuple):
    pass


Instruction: TypeAlias = Act | Branch | Query | Halt

# runtime cell codes
_CELL = {ZERO: 0, ONE: 1, BLANK: 2}
_TO_CELLS = bytes.maketrans(b"01", b"\x00\x01")
_TO_TEXT  = bytes.maketrans(b"\x00\x01", b"01")
_OP_ACT, _OP_BRANCH, _OP_QUERY, _OP_HALT = range(4)


def _successors(ins: Instruction) -> tuple:
    if isinstance(ins, Act | Query):
        return (ins.next,)
    if isinstance(ins, Branch):
        return (ins.on_zero, ins.on_one, ins.on_blank, ins.on_start)
    return ()


@dataclass(frozen=True)
class Program:
    """Flat instruction graph.

    Args:
        * tapes (tuple[str, ...]): Declared tape names; always includes
        `input`, `output` and `oracle`.
        * code (tuple[Instruction, ...]): Instructions; successors are indices.
        * entry (int, optional): Index of the first instruction. Defaults to 0.
    """
    tapes: tuple[str, ...]
    code : tuple[Instruction, ...]
    entry: int = 0

    def __post_init__(self):
        object.__setattr__(self, "tapes", tuple(self.tapes))
        object.__setattr__(self, "code", tuple(self.code))
        declared = set(self.tapes)
        if len(declared) != len(self.tapes):
            raise MacroError("duplicate tape names")
        for t in FIXED_TAPES:
            if t not in declared:
                raise err_unknown_tape(t, self)
        size = len(self.code)
        if not 0 <= self.entry < size:
            raise MacroError(f"entry {self.entry} outside the program (size {size})")
        for i, ins in enumerate(self.code):
            if not isinstance(ins, Act | Branch | Query | Halt):
                raise MacroError(f"instruction {i} has unknown type {type(ins).__qualname__!r}")
            for j in _successors(ins):
                if not (isinstance(j, int) and 0 <= j < size):
                    raise MacroError(f"instruction {i} jumps to {j!r}")
            if isinstance(ins, Branch) and ins.tape not in declared:
                raise err_unknown_tape(ins.tape, self)
            if isinstance(ins, Act):
                seen = set()
                for o in ins.ops:
                    if o.tape not in declared:
                        raise err_unknown_tape(o.tape, self)
                    if o.tape in seen:
                        raise MacroError(f"instruction {i} touches {o.tape!r} twice")
                    seen.add(o.tape)
                    if o.write is not None and o.write not in SYMBOLS:
                        raise err_bad_symbol(o.write)
                    if o.write is not None and o.tape == INPUT:
                        raise MacroError(f"instruction {i} writes the input tape")
                    if o.move not in (-1, 0, 1):
                        raise MacroError(f"instruction {i} moves {o.tape!r} by {o.move}")

    @property
    def size(self) -> int:
        return len(self.code)

    @property
    def work_tapes(self) -> tuple[str, ...]:
        return tuple(t for t in self.tapes if t not in FIXED_TAPES)

    @cached_property
    def tape_index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.tapes)}

    @cached_property
    def _encoded(self) -> tuple[tuple, ...]:
        idx = self.tape_index
        encoded = []
        for ins in self.code:
            if isinstance(ins, Act):
                ops = tuple((idx[o.tape], -1 if o.write is None else _CELL[o.write], o.move) for o in ins.ops)
                encoded.append((_OP_ACT, ops, ins.next))
            elif isinstance(ins, Branch):
                encoded.append((_OP_BRANCH, idx[ins.tape], (ins.on_zero, ins.on_one, ins.on_blank, ins.on_start)))
            elif isinstance(ins, Query):
                encoded.append((_OP_QUERY, ins.next))
            else:
                encoded.append((_OP_HALT,))
        return tuple(encoded)


class Bounds(NamedTuple):
    """Claimed resource bounds of a machine; the resources checkers test them,
    nothing trusts them.

    Args:
        * step_count (UniPoly, optional): Claimed step-count.
        * revisions (int, optional): Claimed bound on length revisions.
        * running_time (Description, optional): Claimed second-order running time.
    """
    step_count  : UniPoly | None = None
    revisions   : int | None = None
    running_time: Description | None = None


@dataclass(frozen=True)
class Machine:
    program: Program
    name   : str = "machine"
    bounds : Bounds = Bounds()

    @property
    def size(self) -> int:
        return self.program.size

    def __str__(self) -> str:
        return f"{self.name} ({self.program.size} instructions, {len(self.program.tapes)} tapes)"




####################################################################################
################################ Structured programs ###############################
####################################################################################

class Node:
    """Structured program node."""
    __slots__ = ()


def _cases(cases: Mapping[str, Node]) -> tuple[tuple[str, Node], ...]:
    out = []
    for sym, body in dict(cases).items():
        if sym not in (ZERO, ONE, BLANK, START):
            raise err_bad_symbol(sym)
        if not isinstance(body, Node):
            raise MacroError(f"case {sym!r} is not a program node")
        out.append((sym, body))
    return tuple(out)


@dataclass(frozen=True)
class Do(Node):
    ops: tuple[TapeOp, ...]


@dataclass(frozen=True)
class Ask(Node):
    pass


@dataclass(frozen=True)
class Stop(Node):
    pass


@dataclass(frozen=True)
class Seq(Node):
    body: tuple[Node, ...] = ()


@dataclass(frozen=True)
class If(Node):
    """Dispatch on `tape`'s scanned symbol; symbols without a case fall through."""
    tape : str
    cases: tuple[tuple[str, Node], ...]

    def __init__(self, tape: str, cases: Mapping[str, Node]):
        object.__setattr__(self, "tape", tape)
        object.__setattr__(self, "cases", _cases(cases))


@dataclass(frozen=True)
class While(Node):
    """Repeat while `tape` scans a symbol that has a case, running that case."""
    tape : str
    cases: tuple[tuple[str, Node], ...]

    def __init__(self, tape: str, cases: Mapping[str, Node]):
        object.__setattr__(self, "tape", tape)
        object.__setattr__(self, "cases", _cases(cases))


@dataclass(frozen=True)
class Loop(Node):
    """Repeat `body` until a `Break` inside it (not inside a nested `Loop`)."""
    body: Node


@dataclass(frozen=True)
class Break(Node):
    pass


@dataclass(frozen=True)
class Compare(Node):
    """Compare the content lengths of tapes `a` and `b`, rewind both together,
    then continue with `less`, `equal` or `greater` (|a| against |b|).
    """
    a      : str
    b      : str
    less   : Node = Seq()
    equal  : Node = Seq()
    greater: Node = Seq()


def op(tape: str, write: str | None = None, move: int | str = 0) -> TapeOp:
    if isinstance(move, str):
        move = Move[move.upper()].value
    return TapeOp(tape, write, int(move))


def seq(*nodes: Node | Iterable[Node]) -> Seq:
    """Sequence nodes; iterables (nested ones included) are flattened."""
    body: list[Node] = []
    for n in nodes:
        if isinstance(n, Node):
            body.append(n)
        elif isinstance(n, Iterable) and not isinstance(n, str):
            body.extend(seq(*n).body)
        else:
            raise MacroError(f"{n!r} is not a program node")
    return Seq(body=tuple(body))


def _do(*ops: TapeOp) -> Do:
    return Do(tuple(ops))


_L, _S, _R = Move.LEFT.value, Move.STAY.value, Move.RIGHT.value
_ANY = (ZERO, ONE, BLANK)




####################################################################################
###################################### Macros ######################################
####################################################################################
# Unless noted, macros expect and leave every head they use on cell 0 and
# tapes holding a blank-free prefix followed by blanks. Costs count every
# executed instruction.

def rewind(*tapes: str) -> Seq:
    """Return each head to cell 0. From position h: 2h+4 steps per tape."""
    body: list[Node] = []
    for t in tapes:
        body += [While(t, {s: _do(op(t, move=_L)) for s in _ANY}), _do(op(t, move=_R))]
    return seq(body)


def rewind_together(lead: str, *others: str) -> Seq:
    """Rewind heads that sit on the same position, moving them in lockstep."""
    tapes = (lead, *others)
    return seq(
        While(lead, {s: _do(*(op(t, move=_L) for t in tapes)) for s in _ANY}),
        _do(*(op(t, move=_R) for t in tapes)),
    )


def erase(t: str) -> Seq:
    """Blank `t`'s content. 4k+5 steps for content length k."""
    return seq(
        While(t, {ZERO: _do(op(t, BLANK, _R)), ONE: _do(op(t, BLANK, _R))}),
        rewind(t),
    )


def copy(src: str, dst: str) -> Seq:
    """Overwrite `dst` with `src`'s content. 6k+10 steps into a blank target."""
    if src == dst:
        raise MacroError(f"copy of {src!r} onto itself")
    return seq(
        While(src, {
            ZERO: _do(op(dst, ZERO, _R), op(src, move=_R)),
            ONE : _do(op(dst, ONE, _R), op(src, move=_R)),
        }),
        While(dst, {ZERO: _do(op(dst, BLANK, _R)), ONE: _do(op(dst, BLANK, _R))}),
        rewind(src, dst),
    )


def write_literal(t: str, bits: str) -> Seq:
    """Overwrite `t` with `bits`. 3k+5 steps on a blank tape."""
    bitstring(bits)
    return seq(
        (_do(op(t, b, _R)) for b in bits),
        While(t, {ZERO: _do(op(t, BLANK, _R)), ONE: _do(op(t, BLANK, _R))}),
        rewind(t),
    )


def increment(t: str) -> Seq:
    """Binary increment, least significant bit first ("111" -> "0001").
    4c+6 steps with c leading ones.
    """
    return seq(
        While(t, {ONE: _do(op(t, ZERO, _R))}),
        _do(op(t, ONE)),
        rewind(t),
    )


def decrement(t: str, if_zero: Node = Seq()) -> Seq:
    """Binary decrement, least significant bit first. A zero value (all
    zeros or empty) is left unchanged and `if_zero` runs.
    """
    return seq(
        While(t, {ZERO: _do(op(t, ONE, _R))}),
        If(t, {
            ONE  : seq(_do(op(t, ZERO)), rewind(t)),
            BLANK: seq(
                _do(op(t, move=_L)),
                While(t, {ONE: _do(op(t, ZERO, _L))}),
                _do(op(t, move=_R)),
                if_zero,
            ),
        }),
    )


def length_compare(a: str, b: str, less: Node = Seq(), equal: Node = Seq(), greater: Node = Seq()) -> Compare:
    """5m+6 steps before the continuation, m the shorter length."""
    if a == b:
        raise MacroError(f"length comparison of {a!r} with itself")
    return Compare(a, b, less, equal, greater)


def repeat(t: str, body: Node) -> Seq:
    """Run `body` once per cell of `t`'s content; `body` must not touch `t`.
    k(B+4)+5 steps for k cells and a body of B steps.
    """
    step_on = seq(body, _do(op(t, move=_R)))
    return seq(While(t, {ZERO: step_on, ONE: step_on}), rewind(t))


def unary_poly(x: str, dst: str, p: UniPoly, scratch: str) -> Seq:
    """Append `p(|x|)` zeros to `dst` from its current head position, leaving
    `dst`'s head after the last one. Uses `deg p` blank scratch tapes named
    `scratch1`, `scratch2`, ..., which are blank again afterwards.
    """
    d = p.degree
    copies = [f"{scratch}{i}" for i in range(1, d + 1)]
    parts: list[Node] = [copy(x, s) for s in copies]
    for j, c in enumerate(p.coefficients):
        if not c:
            continue
        body: Node = seq(_do(op(dst, ZERO, _R)) for _ in range(c))
        for s in reversed(copies[:j]):
            body = repeat(s, body)
        parts.append(body)
    parts.extend(erase(s) for s in copies)
    return seq(parts)


def save_head(t: str, save: str) -> Seq:
    """Move `t`'s head from position h to cell 0, leaving h+1 zeros on the
    blank tape `save` with its head after them. 2h+4 steps.
    """
    return seq(
        While(t, {s: _do(op(t, move=_L), op(save, ZERO, _R)) for s in _ANY}),
        _do(op(t, move=_R)),
    )


def restore_head(t: str, save: str) -> Seq:
    """Undo `save_head`: `t` goes from cell 0 back to h, `save` ends blank
    with its head on cell 0. 2h+5 steps.
    """
    return seq(
        _do(op(save, move=_L)),
        While(save, {ZERO: _do(op(save, BLANK, _L), op(t, move=_R))}),
        _do(op(save, move=_R), op(t, move=_L)),
    )


def rewind_cost(h: int) -> int:
    return 2 * h + 4


def erase_cost(k: int) -> int:
    return 4 * k + 5


def copy_cost(k: int) -> int:
    return 6 * k + 10


def write_literal_cost(k: int) -> int:
    return 3 * k + 5


def increment_cost(c: int) -> int:
    return 4 * c + 6


def compare_cost(m: int) -> int:
    return 5 * m + 6


def save_head_cost(h: int) -> int:
    return 2 * h + 4


def restore_head_cost(h: int) -> int:
    return 2 * h + 5


def unary_poly_cost_bound(p: UniPoly) -> UniPoly:
    """Polynomial in |x| bounding the steps of `unary_poly(x, dst, p, ...)`."""
    shifted = UniPoly((5, 1))
    bound = UniPoly()
    for j, c in enumerate(p.coefficients):
        if c:
            bound = bound + (c + 9) * _power(shifted, j)
    return bound + UniPoly((20, 10)) * p.degree




def _power(p: UniPoly, k: int) -> UniPoly:
    result = UniPoly((1,))
    for _ in range(k):
        result = result * p
    return result


####################################################################################
##################################### Assembly #####################################
####################################################################################

class Label:
    """Forward reference to an instruction index, bound once."""
    __slots__ = ("target",)

    def __init__(self, target: int | Label | None = None):
        self.target = target


class Assembler:
    """Builds flat programs from structured nodes and spliced programs.

    Successors are `Label`s until `finish`, which resolves them, drops
    unreachable instructions and renumbers from the entry.
    """

    def __init__(self):
        self._code : list[Instruction] = []
        self._tapes: dict[str, None] = dict.fromkeys(FIXED_TAPES)

    def label(self, target: int | Label | None = None) -> Label:
        return Label(target)

    def bind(self, label: Label, target: int | Label) -> Label:
        if label.target is not None:
            raise MacroError("label bound twice")
        label.target = target
        return label

    def declare(self, *tapes: str) -> None:
        for t in tapes:
            self._tapes.setdefault(t, None)

    def emit(self, ins: Instruction) -> Label:
        if isinstance(ins, Act):
            self.declare(*(o.tape for o in ins.ops))
        elif isinstance(ins, Branch):
            self.declare(ins.tape)
        self._code.append(ins)
        return Label(len(self._code) - 1)

    def compile(self, node: Node, cont: Label, brk: Label | None = None) -> Label:
        """Emit `node` so that it continues at `cont`; return its entry."""
        if isinstance(node, Seq):
            entry = cont
            for part in reversed(node.body):
                entry = self.compile(part, entry, brk)
            return entry
        if isinstance(node, Do):
            return self.emit(Act(node.ops, cont))
        if isinstance(node, Ask):
            return self.emit(Query(cont))
        if isinstance(node, Stop):
            return self.emit(Halt())
        if isinstance(node, If):
            succ = {sym: self.compile(body, cont, brk) for sym, body in node.cases}
            return self._branch(node.tape, succ, cont)
        if isinstance(node, While):
            head = self.label()
            succ = {sym: self.compile(body, head, brk) for sym, body in node.cases}
            self.bind(head, self._branch(node.tape, succ, cont))
            return head
        if isinstance(node, Loop):
            head = self.label()
            self.bind(head, self.compile(node.body, head, cont))
            return head
        if isinstance(node, Break):
            if brk is None:
                raise MacroError("break outside a loop")
            return brk
        if isinstance(node, Compare):
            return self._compare(node, cont, brk)
        raise MacroError(f"unknown program node {node!r}")

    def _branch(self, tape: str, succ: Mapping[str, Label], default: Label) -> Label:
        return self.emit(Branch(
            tape,
            succ.get(ZERO, default),
            succ.get(ONE, default),
            succ.get(BLANK, default),
            succ.get(START, default),
        ))

    def _compare(self, node: Compare, cont: Label, brk: Label | None) -> Label:
        a, b = node.a, node.b
        back = rewind_together(a, b)
        less    = self.compile(seq(back, node.less), cont, brk)
        equal   = self.compile(seq(back, node.equal), cont, brk)
        greater = self.compile(seq(back, node.greater), cont, brk)
        head = self.label()
        advance = self.emit(Act((op(a, move=_R), op(b, move=_R)), head))
        a_cell  = self.emit(Branch(b, advance, advance, greater, greater))
        a_end   = self.emit(Branch(b, less, less, equal, equal))
        self.bind(head, self.emit(Branch(a, a_cell, a_cell, a_end, a_end)))
        return head

    def splice(
        self,
        program : Program,
        rename  : Mapping[str, str] = (),
        *,
        on_halt : Label | None = None,
        on_query: Callable[[Label], Label] | None = None,
        edge    : Callable[[Label], Label] | None = None,
    ) -> Label:
        """Copy `program` in, renaming tapes. `on_halt` replaces halts by a
        jump, `on_query(next)` replaces each query by the returned block, and
        `edge(target)` wraps every transfer between copied instructions.
        Returns the entry of the copy.
        """
        rename = dict(rename)
        rn = lambda t: rename.get(t, t)
        self.declare(*(rn(t) for t in program.tapes))
        labels = [self.label() for _ in program.code]
        succ = (lambda j: edge(labels[j])) if edge else (lambda j: labels[j])
        for i, ins in enumerate(program.code):
            if isinstance(ins, Act):
                ops = tuple(TapeOp(rn(o.tape), o.write, o.move) for o in ins.ops)
                self.bind(labels[i], self.emit(Act(ops, succ(ins.next))))
            elif isinstance(ins, Branch):
                self.bind(labels[i], self.emit(Branch(
                    rn(ins.tape), succ(ins.on_zero), succ(ins.on_one), succ(ins.on_blank), succ(ins.on_start),
                )))
            elif isinstance(ins, Query):
                nxt = succ(ins.next)
                self.bind(labels[i], on_query(nxt) if on_query else self.emit(Query(nxt)))
            else:
                self.bind(labels[i], on_halt if on_halt is not None else self.emit(Halt()))
        return labels[program.entry]

    @staticmethod
    def _resolve(label: Label | int) -> int:
        seen = set()
        while isinstance(label, Label):
            if id(label) in seen or label.target is None:
                raise MacroError("unbound label or a loop that executes no instruction")
            seen.add(id(label))
            label = label.target
        return label

    def finish(self, entry: Label) -> Program:
        start = self._resolve(entry)
        resolved = []
        for ins in self._code:
            if isinstance(ins, Act):
                resolved.append(Act(ins.ops, self._resolve(ins.next)))
            elif isinstance(ins, Branch):
                resolved.append(Branch(ins.tape, *(self._resolve(j) for j in ins[1:])))
            elif isinstance(ins, Query):
                resolved.append(Query(self._resolve(ins.next)))
            else:
                resolved.append(ins)
        # reachable instructions, numbered in depth-first order from the entry
        order: dict[int, int] = {}
        stack = [start]
        while stack:
            i = stack.pop()
            if i in order:
                continue
            order[i] = len(order)
            stack.extend(reversed(_successors(resolved[i])))
        code = []
        for i in order:
            ins = resolved[i]
            if isinstance(ins, Act):
                code.append(Act(ins.ops, order[ins.next]))
            elif isinstance(ins, Branch):
                code.append(Branch(ins.tape, *(order[j] for j in ins[1:])))
            elif isinstance(ins, Query):
                code.append(Query(order[ins.next]))
            else:
                code.append(ins)
        return Program(tuple(self._tapes), tuple(code), 0)


def build(node: Node) -> Program:
    """Compile a structured program. Falling off the end halts."""
    asm = Assembler()
    end = asm.label()
    entry = asm.compile(node, end)
    asm.bind(end, asm.emit(Halt()))
    return asm.finish(entry)




####################################################################################
##################################### Execution ####################################
####################################################################################

def _content(cells: bytearray) -> str:
    end = cells.find(2)
    if end < 0:
        end = len(cells)
    return bytes(cells[:end]).translate(_TO_TEXT).decode("ascii")


def _execute(code: Sequence[tuple], oracle_idx: int, oracle: Oracle, tapes: list[bytearray], pos: list[int], pc: int, fuel: int, t0: int = 0):
    """Run from `pc` for at most `fuel` steps, mutating `tapes` and `pos`.
    Returns (halted, steps taken, pc, query records).
    """
    queries: list[QueryRecord] = []
    t = 0
    while t < fuel:
        ins = code[pc]
        kind = ins[0]
        t += 1
        if kind == _OP_BRANCH:
            p = pos[ins[1]]
            if p < 0:
                pc = ins[2][3]
            else:
                cells = tapes[ins[1]]
                pc = ins[2][cells[p] if p < len(cells) else 2]
        elif kind == _OP_ACT:
            for ti, w, mv in ins[1]:
                p = pos[ti]
                if w >= 0 and p >= 0:
                    cells = tapes[ti]
                    size = len(cells)
                    if p < size:
                        cells[p] = w
                    elif w != 2:
                        cells.extend(b"\x02" * (p - size))
                        cells.append(w)
                if mv:
                    p += mv
                    pos[ti] = p if p >= -1 else -1
            pc = ins[2]
        elif kind == _OP_QUERY:
            b = _content(tapes[oracle_idx])
            answer = oracle.query(b)
            tapes[oracle_idx] = bytearray(answer.encode("ascii").translate(_TO_CELLS))
            queries.append(QueryRecord(t0 + t, len(b), len(answer)))
            pc = ins[1]
        else:
            return True, t, pc, queries
    return False, t, pc, queries


@dataclass(frozen=True)
class Config:
    """Complete machine state between steps. Immutable; `step` returns a new one."""
    program  : Program
    tapes    : tuple[bytes, ...]
    positions: tuple[int, ...]
    pc       : int
    time     : int = 0
    halted   : bool = False

    def content(self, tape: str) -> str:
        return _content(bytearray(self.tapes[self.program.tape_index[tape]]))

    def head(self, tape: str) -> int:
        return self.positions[self.program.tape_index[tape]]

    @property
    def output(self) -> str:
        return self.content(OUTPUT)


class RunOutcome(NamedTuple):
    """Result of `run`.

    Args:
        * status (Status): `halted` or `fuel-exhausted`.
        * output (str): Output tape up to its first blank.
        * trace (Trace): Step and query accounting of the run.
    """
    status: Status
    output: str
    trace : Trace

    @property
    def halted(self) -> bool:
        return self.status is Status.HALTED


def _program_of(m: Machine | Program) -> Program:
    return m.program if isinstance(m, Machine) else m


def initial_config(m: Machine | Program, a: str) -> Config:
    program = _program_of(m)
    bitstring(a)
    tapes = [b""] * len(program.tapes)
    tapes[program.tape_index[INPUT]] = a.encode("ascii").translate(_TO_CELLS)
    return Config(program, tuple(tapes), (0,) * len(program.tapes), program.entry)


def step(config: Config, o: Oracle) -> tuple[Config, Event]:
    """One transition from `config`."""
    if config.halted:
        raise ValueError("the configuration has already halted")
    program = config.program
    tapes = [bytearray(c) for c in config.tapes]
    pos = list(config.positions)
    halted, _, pc, queries = _execute(program._encoded, program.tape_index[ORACLE], o, tapes, pos, config.pc, 1, config.time)
    time = config.time + 1
    if halted:
        event = Event(time, EventKind.HALT)
    elif queries:
        q = queries[0]
        event = Event(time, EventKind.QUERY, q.query_length, q.answer_length)
    else:
        event = Event(time, EventKind.PLAIN)
    return Config(program, tuple(bytes(c) for c in tapes), tuple(pos), pc, time, halted), event


def run(m: Machine | Program, o: Oracle, a: str, fuel: int | None = None) -> RunOutcome:
    """Run `m` on input `a` against `o` for at most `fuel` steps."""
    fuel = natural(Workbench.get("fuel", fuel))
    program = _program_of(m)
    bitstring(a)
    tapes = [bytearray() for _ in program.tapes]
    tapes[program.tape_index[INPUT]] = bytearray(a.encode("ascii").translate(_TO_CELLS))
    pos = [0] * len(program.tapes)
    halted, time, _, queries = _execute(program._encoded, program.tape_index[ORACLE], o, tapes, pos, program.entry, fuel)
    trace = Trace(len(a), time, tuple(queries), halted)
    if not halted:
        name = getattr(m, "name", "program")
        log("warning", name, f"fuel exhausted after {time} steps", f"input length {len(a)}")
        return RunOutcome(Status.FUEL_EXHAUSTED, _content(tapes[program.tape_index[OUTPUT]]), trace)
    return RunOutcome(Status.HALTED, _content(tapes[program.tape_index[OUTPUT]]), trace)




####################################################################################
#################################### Documents #####################################
####################################################################################
# Flat form: {"tapes": [...], "entry": 0, "code": [["act", [[tape, write, move], ...], next],
#             ["branch", tape, [zero, one, blank, start]], ["query", next], ["halt"]]}
# Structured form: nested lists, e.g. ["seq", ["copy", "input", "oracle"], ["ask"]].

def _instruction_to_json(ins: Instruction) -> list:
    if isinstance(ins, Act):
        return ["act", [[o.tape, o.write, o.move] for o in ins.ops], ins.next]
    if isinstance(ins, Branch):
        return ["branch", ins.tape, [ins.on_zero, ins.on_one, ins.on_blank, ins.on_start]]
    if isinstance(ins, Query):
        return ["query", ins.next]
    return ["halt"]


def dumps_program(program: Program) -> str:
    lines = [json.dumps(_instruction_to_json(ins)) for ins in program.code]
    code = ",\n  ".join(lines)
    return (
        '{"tapes": ' + json.dumps(list(program.tapes))
        + ', "entry": ' + str(program.entry)
        + ', "code": [\n  ' + code + "\n]}\n"
    )


def _instruction_from_json(obj: list) -> Instruction:
    kind, *rest = obj
    if kind == "act":
        ops, nxt = rest
        return Act(tuple(op(t, w, m) for t, w, m in ops), int(nxt))
    if kind == "branch":
        tape, succ = rest
        return Branch(tape, *(int(j) for j in succ))
    if kind == "query":
        return Query(int(rest[0]))
    if kind == "halt":
        return Halt()
    raise ProgramFormatError(f"unknown instruction {kind!r}")


def _node_from_json(obj: Any) -> Node:
    if not isinstance(obj, list) or not obj:
        raise ProgramFormatError(f"expected a non-empty list (got {obj!r})")
    kind, *args = obj
    nodes = lambda xs: [_node_from_json(x) for x in xs]
    cases = lambda d: {sym: _node_from_json(body) for sym, body in d.items()}
    match kind:
        case "do":
            return Do(tuple(op(*spec) for spec in args))
        case "ask":
            return Ask()
        case "stop":
            return Stop()
        case "seq":
            return Seq(tuple(nodes(args)))
        case "if":
            return If(args[0], cases(args[1]))
        case "while":
            return While(args[0], cases(args[1]))
        case "loop":
            return Loop(_node_from_json(args[0]))
        case "break":
            return Break()
        case "rewind":
            return rewind(*args)
        case "erase":
            return erase(args[0])
        case "copy":
            return copy(args[0], args[1])
        case "write":
            return write_literal(args[0], args[1])
        case "increment":
            return increment(args[0])
        case "decrement":
            return decrement(args[0], _node_from_json(args[1]) if len(args) > 1 else Seq())
        case "compare":
            a, b, *rest = args
            return length_compare(a, b, *nodes(rest))
        case "repeat":
            return repeat(args[0], _node_from_json(args[1]))
        case "poly":
            return unary_poly(args[0], args[1], UniPoly(args[2]), args[3])
    raise ProgramFormatError(f"unknown program node {kind!r}")


def loads_program(text: str) -> Program:
    """Read either document form; structured programs are compiled."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProgramFormatError(str(e)) from None
    try:
        if isinstance(obj, dict):
            code = tuple(_instruction_from_json(i) for i in obj["code"])
            return Program(tuple(obj["tapes"]), code, int(obj.get("entry", 0)))
        return build(_node_from_json(obj))
    except (KeyError, TypeError, ValueError, IndexError) as e:
        if isinstance(e, ProgramFormatError | MacroError):
            raise
        raise ProgramFormatError(f"bad program ({e})") from None


def load_machine(path: Filepath) -> Machine:
    with open(path, "r", encoding="utf-8") as f:
        program = loads_program(f.read())
    name = os.path.splitext(os.path.basename(os.fspath(path)))[0]
    log("debug", name, f"loaded {program.size} instructions", os.fspath(path))
    return Machine(program, name)


def dump_machine(m: Machine, path: Filepath) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps_program(m.program))
