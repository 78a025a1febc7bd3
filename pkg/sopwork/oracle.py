"""Oracles: total functions from bit-strings to bit-strings.

Three kinds exist. `TableOracle` is a finite map plus a default answer,
pattern oracles (`ConstantPattern`, `DoublingPattern`, ...) have closed forms,
and `AdaptiveOracle` asks a policy on the first query of each string and
memoizes the answer. Only adaptive oracles have state, and their size
functions are lower bounds read off the memo.
"""
from __future__ import annotations
import json
import random
from abc import ABC, abstractmethod
from enum import Enum
from typing import Any, Callable, ClassVar, Mapping
from typing_extensions import TypeAlias
from ._internal import registry
from ._internal.comtypes import Filepath, Verdict
from ._internal.constants import ZERO
from ._internal.errors import BudgetExceeded, OracleError, ProgramFormatError, err_budget
from ._internal.utilities import bitstring, natural, shortlex, strings_of_length, tower, log
from .sopoly import LengthFn, TailRule
from .workbench import Workbench


__all__ = [
    "OracleKind",
    "Oracle",
    "TableOracle",
    "PatternOracle",
    "ConstantPattern",
    "DoublingPattern",
    "PadPattern",
    "ExponentialPattern",
    "DelayedGrowthPattern",
    "AdaptiveOracle",
    "Policy",
    "SizeFn",

    "query",
    "size_fn",
    "brute_force_size",
    "is_length_monotone",
    "in_class_A",
    "make_delayed_growth",

    "random_table",
    "random_reg_table",
    "oracle_to_json",
    "oracle_from_json",
    "load_oracle",
    "dump_oracle",
]



class OracleKind(str, Enum):
    TABLE    = "table"
    PATTERN  = "pattern"
    ADAPTIVE = "adaptive"
    DERIVED  = "derived"


class Oracle(ABC):
    kind      : ClassVar[OracleKind]
    is_pure   : ClassVar[bool] = True
    exact_size: ClassVar[bool] = True

    @abstractmethod
    def query(self, a: str) -> str: ...

    def __call__(self, a: str) -> str:
        return self.query(a)

    def answer_length(self, a: str) -> int:
        return len(self.query(a))

    def size(self, n: int, *, budget: int | None = None) -> int:
        """`max{|φ(a)| : |a| <= n}`, by enumeration unless overridden."""
        return brute_force_size(self, n, budget=budget)

    def length_fn(self, bound: int) -> LengthFn:
        return LengthFn.from_callable(self.size, bound, exact=self.exact_size)

    def __repr__(self) -> str:
        return f"<{type(self).__qualname__}>"


def _answer(value: str, where: object) -> str:
    try:
        return bitstring(value)
    except (TypeError, ValueError) as e:
        raise OracleError(f"{where} returned a non bit-string ({e})") from None




####################################################################################
###################################### Tables ######################################
####################################################################################

class TableOracle(Oracle):
    """Finite map plus a default answer for every other string.

    Args:
        * entries (Mapping[str, str]): Explicit answers.
        * default (str, optional): Answer of every string without an entry.
        Defaults to the empty string.
    """
    kind = OracleKind.TABLE

    def __init__(self, entries: Mapping[str, str] = (), default: str = ""):
        entries = dict(entries)
        for key, value in entries.items():
            bitstring(key)
            bitstring(value)
        self._entries = entries
        self._default = bitstring(default)

    @property
    def entries(self) -> dict[str, str]:
        return dict(self._entries)

    @property
    def default(self) -> str:
        return self._default

    @property
    def longest_key(self) -> int:
        return max((len(k) for k in self._entries), default=-1)

    def query(self, a: str) -> str:
        return self._entries.get(a, self._default)

    def size(self, n: int, *, budget: int | None = None) -> int:
        # past the longest key every length class contains a default answer
        return brute_force_size(self, min(n, self.longest_key + 1), budget=budget)

    def length_fn(self, bound: int = 0) -> LengthFn:
        return LengthFn.from_callable(self.size, max(bound, self.longest_key + 1))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TableOracle):
            return NotImplemented
        return self._entries == other._entries and self._default == other._default

    def __repr__(self) -> str:
        return f"TableOracle({self._entries!r}, default={self._default!r})"




####################################################################################
##################################### Patterns #####################################
####################################################################################

class PatternOracle(Oracle):
    """Oracle with a closed form. Subclasses define the answer, its length,
    the size function and whether the pattern is length-monotone.
    """
    kind = OracleKind.PATTERN
    name    : ClassVar[str]
    monotone: ClassVar[bool | None] = None

    @property
    def params(self) -> dict[str, Any]:
        return {}

    @abstractmethod
    def answer_length(self, a: str) -> int: ...

    @abstractmethod
    def size(self, n: int, *, budget: int | None = None) -> int: ...

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PatternOracle):
            return NotImplemented
        return self.name == other.name and self.params == other.params

    def __hash__(self) -> int:
        return hash((self.name, tuple(sorted(self.params.items()))))

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{type(self).__qualname__}({args})"


@registry.register_pattern("constant")
class ConstantPattern(PatternOracle):
    name     = "constant"
    monotone = True

    def __init__(self, c: str = ""):
        self.c = bitstring(c)

    @property
    def params(self) -> dict[str, Any]:
        return {"c": self.c}

    def query(self, a: str) -> str:
        return self.c

    def answer_length(self, a: str) -> int:
        return len(self.c)

    def size(self, n: int, *, budget: int | None = None) -> int:
        return len(self.c)

    def length_fn(self, bound: int = 0) -> LengthFn:
        return LengthFn.constant(len(self.c))


@registry.register_pattern("empty")
def empty_pattern() -> ConstantPattern:
    return ConstantPattern("")


@registry.register_pattern("doubling")
class DoublingPattern(PatternOracle):
    """`a -> aa`."""
    name     = "doubling"
    monotone = True

    def query(self, a: str) -> str:
        return a + a

    def answer_length(self, a: str) -> int:
        return 2 * len(a)

    def size(self, n: int, *, budget: int | None = None) -> int:
        return 2 * n

    def length_fn(self, bound: int = 0) -> LengthFn:
        return LengthFn((0,), TailRule.AFFINE, 2)


@registry.register_pattern("pad")
class PadPattern(PatternOracle):
    """`a` followed by zeros up to length `slope*|a| + offset` (never shorter
    than `a` itself since `slope >= 1`).
    """
    name     = "pad"
    monotone = True

    def __init__(self, slope: int = 1, offset: int = 0):
        if slope < 1:
            raise OracleError(f"pad slope must be positive (got {slope})")
        self.slope  = slope
        self.offset = natural(offset)

    @property
    def params(self) -> dict[str, Any]:
        return {"slope": self.slope, "offset": self.offset}

    def query(self, a: str) -> str:
        return a + ZERO * (self.answer_length(a) - len(a))

    def answer_length(self, a: str) -> int:
        return self.slope * len(a) + self.offset

    def size(self, n: int, *, budget: int | None = None) -> int:
        return self.slope * n + self.offset

    def length_fn(self, bound: int = 0) -> LengthFn:
        return LengthFn((self.offset,), TailRule.AFFINE, self.slope)


@registry.register_pattern("exponential")
class ExponentialPattern(PatternOracle):
    """`a -> 0^(2^|a|)`."""
    name     = "exponential"
    monotone = True

    def query(self, a: str) -> str:
        return ZERO * self.answer_length(a)

    def answer_length(self, a: str) -> int:
        return 1 << len(a)

    def size(self, n: int, *, budget: int | None = None) -> int:
        return 1 << n

    def length_fn(self, bound: int) -> LengthFn:
        # no finite tail rule fits; values past `bound` are underestimated
        return LengthFn(tuple(1 << k for k in range(bound + 1)), exact=False)


@registry.register_pattern("delayed-growth")
class DelayedGrowthPattern(PatternOracle):
    """`0^(2^(2^k)) -> 0^(2^(2^(2^k)))` for `k <= depth`, empty elsewhere."""
    name     = "delayed-growth"
    monotone = False

    def __init__(self, depth: int = 0):
        if not 0 <= depth <= 2:
            raise OracleError(f"delayed growth is available for depth <= 2 (got {depth})")
        self.depth = depth
        self._spikes = {tower(k): 1 << tower(k) for k in range(depth + 1)}

    @property
    def params(self) -> dict[str, Any]:
        return {"depth": self.depth}

    def _is_spike(self, a: str) -> bool:
        return len(a) in self._spikes and ZERO * len(a) == a

    def query(self, a: str) -> str:
        return ZERO * self.answer_length(a)

    def answer_length(self, a: str) -> int:
        return self._spikes[len(a)] if self._is_spike(a) else 0

    def size(self, n: int, *, budget: int | None = None) -> int:
        return max((v for k, v in self._spikes.items() if k <= n), default=0)

    def length_fn(self, bound: int = 0) -> LengthFn:
        return LengthFn.from_callable(self.size, max(bound, max(self._spikes)))


def make_delayed_growth(depth: int) -> DelayedGrowthPattern:
    return DelayedGrowthPattern(depth)




####################################################################################
##################################### Adaptive #####################################
####################################################################################

Policy: TypeAlias = Callable[[str, "AdaptiveOracle"], str]


class AdaptiveOracle(Oracle):
    """Answers fresh queries through `policy(a, oracle)` and memoizes them, so
    a run sees a single consistent function. The memo keeps query order.
    Confined to one run at a time.
    """
    kind       = OracleKind.ADAPTIVE
    is_pure    = False
    exact_size = False

    def __init__(self, policy: Policy, name: str = "adaptive"):
        self.policy = policy
        self.name   = name
        self.memo: dict[str, str] = {}

    @property
    def fresh_count(self) -> int:
        return len(self.memo)

    def asked(self, a: str) -> bool:
        return a in self.memo

    def query(self, a: str) -> str:
        try:
            return self.memo[a]
        except KeyError:
            pass
        answer = _answer(self.policy(a, self), self.name)
        self.memo[a] = answer
        return answer

    def size(self, n: int, *, budget: int | None = None) -> int:
        """Largest memoized answer on a query of length <= n (a lower bound)."""
        return max((len(v) for k, v in self.memo.items() if len(k) <= n), default=0)

    def finalize(self, default: str = "", extra: Mapping[str, str] = ()) -> TableOracle:
        """Freeze the memo (plus `extra` entries for unasked strings) into a table."""
        entries = dict(self.memo)
        for key, value in dict(extra).items():
            if key in entries:
                raise OracleError(f"{key!r} was already answered")
            entries[key] = value
        return TableOracle(entries, default)

    def __repr__(self) -> str:
        return f"<AdaptiveOracle {self.name!r} ({len(self.memo)} answered)>"




####################################################################################
################################## Size functions ##################################
####################################################################################

def brute_force_size(o: Oracle, n: int, *, budget: int | None = None) -> int:
    """Reference size function: the maximum answer length over all
    `2^(n+1) - 1` strings of length at most `n`.
    """
    budget = Workbench.get("exhaustive_bound", budget)
    if n > budget:
        raise err_budget("exhaustive size", n, budget)
    return max(o.answer_length(a) for a in shortlex(n))


class SizeFn:
    """Cached size function `|φ|` of one oracle. Values of adaptive oracles are
    lower bounds (`exact` is False) and are not cached.
    """
    __slots__ = ("oracle", "_cache")

    def __init__(self, oracle: Oracle):
        self.oracle = oracle
        self._cache: dict[int, int] = {}

    @property
    def exact(self) -> bool:
        return self.oracle.exact_size

    def __call__(self, n: int) -> int:
        if not self.exact:
            return self.oracle.size(n)
        try:
            return self._cache[n]
        except KeyError:
            value = self._cache[n] = self.oracle.size(n)
            return value

    def as_length_fn(self, bound: int = 0) -> LengthFn:
        return self.oracle.length_fn(bound)


def query(o: Oracle, a: str) -> str:
    return o.query(a)


def size_fn(o: Oracle, n: int, *, budget: int | None = None) -> int:
    return o.size(natural(n), budget=budget)


def is_length_monotone(o: Oracle, bound: int = 8, *, budget: int | None = None) -> Verdict:
    """`|a| <= |b|  =>  |φ(a)| <= |φ(b)|` for all strings up to length `bound`.
    A failure reports the first pair `(a, b)` found in shortlex order.
    """
    if not o.is_pure:
        raise OracleError("length monotonicity is only decided for pure oracles")
    if isinstance(o, PatternOracle) and o.monotone:
        return Verdict(True, None, f"{o.name} pattern is monotone in closed form")
    budget = Workbench.get("exhaustive_bound", budget)
    if bound > budget:
        raise err_budget("monotonicity check", bound, budget)
    best, best_at = -1, None
    for k in range(bound + 1):
        strings = list(strings_of_length(k))
        lengths = [o.answer_length(a) for a in strings]
        top = max(range(len(strings)), key=lengths.__getitem__)
        if lengths[top] > best:
            best, best_at = lengths[top], strings[top]
        for a, la in zip(strings, lengths):
            if la < best:
                return Verdict(False, (best_at, a), f"|φ({best_at!r})| = {best} > |φ({a!r})| = {la}")
    return Verdict(True, None, f"monotone on strings of length <= {bound}")


def in_class_A(o: Oracle, depth: int) -> Verdict:
    """`|φ|(2^(2^n)) >= 2^(2^(2^n))` for every `n <= depth`."""
    for n in range(depth + 1):
        at = tower(n)
        if at > 4 and not isinstance(o, PatternOracle):
            raise BudgetExceeded(f"class A at depth {n} needs a closed-form size function")
        need = 1 << at
        have = o.size(at)
        if have < need:
            return Verdict(False, n, f"|φ|({at}) = {have} < {need}")
    note = "" if o.exact_size else " (memo lower bound)"
    return Verdict(True, None, f"tower growth holds to depth {depth}{note}")




####################################################################################
##################################### Samplers #####################################
####################################################################################

def _bits(rng: random.Random, k: int) -> str:
    return "".join(rng.choice("01") for _ in range(k))


def random_table(rng: random.Random, max_key_len: int = 3, max_entries: int = 6, max_answer: int = 6) -> TableOracle:
    entries = {}
    for _ in range(rng.randint(0, max_entries)):
        entries[_bits(rng, rng.randint(0, max_key_len))] = _bits(rng, rng.randint(0, max_answer))
    return TableOracle(entries, _bits(rng, rng.randint(0, max_answer)))


def random_reg_table(rng: random.Random, max_len: int = 4, max_answer: int = 8) -> TableOracle:
    """Length-monotone table: every string of length <= `max_len` gets an
    answer whose length depends only on its own length, non-decreasing, and
    the default is at least as long as all of them.
    """
    top = rng.randint(0, max_len)
    lengths = sorted(rng.randint(0, max_answer) for _ in range(top + 2))
    entries = {a: _bits(rng, lengths[len(a)]) for a in shortlex(top)}
    return TableOracle(entries, _bits(rng, lengths[-1]))




####################################################################################
#################################### Documents #####################################
####################################################################################

def oracle_to_json(o: Oracle) -> dict[str, Any]:
    if isinstance(o, TableOracle):
        return {"kind": "table", "entries": o.entries, "default": o.default}
    if isinstance(o, PatternOracle):
        return {"kind": "pattern", "name": o.name, "params": o.params}
    to_json = getattr(o, "to_json", None)
    if to_json is None:
        raise OracleError(f"{o!r} has no document form")
    return to_json()


def oracle_from_json(obj: Any) -> Oracle:
    try:
        kind = obj["kind"]
        if kind == "table":
            return TableOracle(obj.get("entries", {}), obj.get("default", ""))
        if kind == "pattern":
            return registry.get_pattern(obj["name"], **obj.get("params", {}))
        if kind == "retract":
            from .transformers import retract_to_reg
            return retract_to_reg(oracle_from_json(obj["source"]), printed=bool(obj.get("printed", False)))
    except (KeyError, TypeError, ValueError) as e:
        raise ProgramFormatError(f"bad oracle document ({e})") from None
    raise ProgramFormatError(f"unknown oracle kind {kind!r}")


def load_oracle(spec: Filepath) -> Oracle:
    """Load an oracle from a document, or by pattern name (`doubling`,
    `constant`, ...) with default parameters.
    """
    if isinstance(spec, str) and spec in registry.patterns:
        return registry.get_pattern(spec)
    with open(spec, "r", encoding="utf-8") as f:
        try:
            obj = json.load(f)
        except json.JSONDecodeError as e:
            raise ProgramFormatError(str(e)) from None
    o = oracle_from_json(obj)
    log("debug", "oracle", f"loaded {o!r}", str(spec))
    return o


def dump_oracle(o: Oracle, path: Filepath) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(oracle_to_json(o), f, indent=1, sort_keys=True)
        f.write("\n")
