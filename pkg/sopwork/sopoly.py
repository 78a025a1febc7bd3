"""Second-order polynomials as description trees.

A `Description` is an ordered tree of `MultiPoly` nodes. A leaf `t(X0)`
denotes `(l, n) -> t(n)`; an inner node with children `C1..Ck` denotes
`(l, n) -> t(n, l(C1(l, n)), ..., l(Ck(l, n)))`. Every second-order polynomial
has such a description, and the operations below build descriptions of sums,
products, `P+`, and both compositions directly on the trees.
"""
from __future__ import annotations
import json
import random
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Any, Callable, Iterator, Mapping, NamedTuple, Sequence
from typing_extensions import Self, TypeAlias
from ._internal.comtypes import ExpVector, Filepath, Verdict
from ._internal.errors import ArityError, BudgetExceeded, ProgramFormatError, err_arity, err_overflow
from ._internal.utilities import natural, log
from .workbench import Workbench


__all__ = [
    # types
    "MultiPoly",
    "UniPoly",
    "Description",
    "LengthFn",
    "TailRule",
    "Majorant",
    # construction helpers
    "var",
    "const",
    "leaf",
    "node",
    # operations
    "eval_description",
    "sum_descriptions",
    "product_descriptions",
    "apply_plus",
    "subst_second_arg",
    "subst_function_arg",
    "majorant",
    "eval_pN",
    "check_majorant_bound",
    "sp_bound",
    # samplers
    "random_multipoly",
    "random_description",
    "random_length_fn",
    # documents
    "description_to_json",
    "description_from_json",
    "load_description",
    "dump_description",
    "length_fn_to_json",
    "length_fn_from_json",
]


LengthLike: TypeAlias = "LengthFn | Callable[[int], int]"


def _checked(value: int, max_bits: int | None) -> int:
    max_bits = max_bits or Workbench.max_bits
    if value.bit_length() > max_bits:
        err = err_overflow(value, max_bits)
        log("error", "sopoly", "value exceeds bit cap", str(err))
        raise err
    return value




####################################################################################
################################### Polynomials ####################################
####################################################################################

class MultiPoly:
    """Polynomial with natural coefficients in the variables `X0..X{arity-1}`.
    Stored as a map from exponent vectors to coefficients; zero coefficients
    are never stored. Instances are immutable and hashable.
    """
    __slots__ = ("_arity", "_terms", "__dict__")

    def __init__(self, arity: int, terms: Mapping[ExpVector, int] = ()):
        if arity < 1:
            raise err_arity(1, arity, "polynomial")
        store: dict[ExpVector, int] = {}
        for exps, coef in dict(terms).items():
            exps = tuple(exps)
            if len(exps) != arity:
                raise err_arity(arity, len(exps), f"exponent vector {exps}")
            if coef < 0 or any(e < 0 for e in exps):
                raise ValueError(f"Coefficients and exponents must be natural (got {coef} * {exps}).")
            if coef:
                store[exps] = store.get(exps, 0) + coef
        self._arity = arity
        self._terms = dict(sorted(store.items()))

    @classmethod
    def constant(cls, arity: int, c: int) -> Self:
        return cls(arity, {(0,) * arity: c})

    @classmethod
    def variable(cls, arity: int, index: int, coef: int = 1) -> Self:
        if not 0 <= index < arity:
            raise err_arity(index + 1, arity, f"variable X{index}")
        return cls(arity, {tuple(int(i == index) for i in range(arity)): coef})

    @property
    def arity(self) -> int:
        return self._arity

    @property
    def terms(self) -> dict[ExpVector, int]:
        return dict(self._terms)

    @cached_property
    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def __call__(self, *point: int) -> int:
        if len(point) != self._arity:
            raise err_arity(self._arity, len(point), "evaluation point")
        total = 0
        for exps, coef in self._terms.items():
            term = coef
            for x, e in zip(point, exps):
                if e:
                    term *= x ** e
            total += term
        return total

    def _same_arity(self, other: MultiPoly) -> None:
        if not isinstance(other, MultiPoly):
            raise TypeError(f"Expected a 'MultiPoly' (got {type(other).__qualname__!r}).")
        if other._arity != self._arity:
            raise err_arity(self._arity, other._arity, "operand")

    def __add__(self, other: MultiPoly) -> MultiPoly:
        self._same_arity(other)
        terms = dict(self._terms)
        for exps, coef in other._terms.items():
            terms[exps] = terms.get(exps, 0) + coef
        return MultiPoly(self._arity, terms)

    def __mul__(self, other: MultiPoly) -> MultiPoly:
        self._same_arity(other)
        terms: dict[ExpVector, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                terms[exps] = terms.get(exps, 0) + c1 * c2
        return MultiPoly(self._arity, terms)

    def __pow__(self, k: int) -> MultiPoly:
        result = MultiPoly.constant(self._arity, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def remap(self, arity: int, mapping: Mapping[int, int]) -> MultiPoly:
        """Re-index variables into a polynomial of `arity` variables: old
        variable `i` becomes new variable `mapping[i]`. Variables absent from
        `mapping` must not occur.
        """
        terms: dict[ExpVector, int] = {}
        for exps, coef in self._terms.items():
            new = [0] * arity
            for i, e in enumerate(exps):
                if not e:
                    continue
                try:
                    new[mapping[i]] += e
                except KeyError:
                    raise ArityError(f"variable X{i} has no image under the re-indexing") from None
            key = tuple(new)
            terms[key] = terms.get(key, 0) + coef
        return MultiPoly(arity, terms)

    def compose(self, subs: Sequence[MultiPoly]) -> MultiPoly:
        """Substitute `subs[i]` for `X{i}`. All substitutes share one arity,
        which becomes the arity of the result.
        """
        if len(subs) != self._arity:
            raise err_arity(self._arity, len(subs), "substitution")
        arity = subs[0].arity
        for s in subs:
            if s.arity != arity:
                raise err_arity(arity, s.arity, "substitute")
        powers: dict[tuple[int, int], MultiPoly] = {}
        result = MultiPoly(arity)
        for exps, coef in self._terms.items():
            term = MultiPoly.constant(arity, coef)
            for i, e in enumerate(exps):
                if not e:
                    continue
                if (i, e) not in powers:
                    powers[i, e] = subs[i] ** e
                term = term * powers[i, e]
            result = result + term
        return result

    def on_diagonal(self) -> UniPoly:
        """The single-variable polynomial `n -> t(n, ..., n)`."""
        coefs = [0] * (self.degree + 1)
        for exps, coef in self._terms.items():
            coefs[sum(exps)] += coef
        return UniPoly(coefs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self._arity == other._arity and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self._arity, tuple(self._terms.items())))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exps, coef in sorted(self._terms.items(), key=lambda kv: (-sum(kv[0]), kv[0])):
            factors = [f"X{i}" if e == 1 else f"X{i}^{e}" for i, e in enumerate(exps) if e]
            if coef != 1 or not factors:
                factors.insert(0, str(coef))
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"{type(self).__qualname__}({self._arity}, {self._terms!r})"


def var(index: int, arity: int, coef: int = 1) -> MultiPoly:
    return MultiPoly.variable(arity, index, coef)


def const(c: int, arity: int = 1) -> MultiPoly:
    return MultiPoly.constant(arity, c)


class UniPoly:
    """Single-variable polynomial with natural coefficients, lowest degree
    first. Used for majorants, step-counts and first-order bounds.
    """
    __slots__ = ("_coefs",)

    def __init__(self, coefficients: Sequence[int] = ()):
        coefs = [int(c) for c in coefficients]
        if any(c < 0 for c in coefs):
            raise ValueError(f"Coefficients must be natural (got {coefs}).")
        while coefs and not coefs[-1]:
            coefs.pop()
        self._coefs = tuple(coefs)

    @classmethod
    def identity(cls) -> Self:
        return cls((0, 1))

    @classmethod
    def parse(cls, text: str) -> Self:
        """Read a comma-separated coefficient list, e.g. `"6,5,1"` for n^2 + 5n + 6."""
        try:
            return cls([int(c) for c in text.replace(" ", "").split(",") if c])
        except ValueError:
            raise ProgramFormatError(f"bad coefficient list {text!r}") from None

    @property
    def coefficients(self) -> tuple[int, ...]:
        return self._coefs

    @property
    def degree(self) -> int:
        return max(len(self._coefs) - 1, 0)

    def __call__(self, n: int) -> int:
        total = 0
        for c in reversed(self._coefs):
            total = total * n + c
        return total

    def __add__(self, other: UniPoly | int) -> UniPoly:
        other = _as_unipoly(other)
        size = max(len(self._coefs), len(other._coefs))
        a = self._coefs + (0,) * (size - len(self._coefs))
        b = other._coefs + (0,) * (size - len(other._coefs))
        return UniPoly([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __mul__(self, other: UniPoly | int) -> UniPoly:
        other = _as_unipoly(other)
        if not self._coefs or not other._coefs:
            return UniPoly()
        coefs = [0] * (len(self._coefs) + len(other._coefs) - 1)
        for i, a in enumerate(self._coefs):
            for j, b in enumerate(other._coefs):
                coefs[i + j] += a * b
        return UniPoly(coefs)

    __rmul__ = __mul__

    def compose(self, inner: UniPoly) -> UniPoly:
        """`n -> self(inner(n))`."""
        result = UniPoly()
        for c in reversed(self._coefs):
            result = result * inner + c
        return result

    def max(self, other: UniPoly) -> UniPoly:
        """Coefficient-wise maximum; dominates both operands on the naturals."""
        size = max(len(self._coefs), len(other._coefs))
        a = self._coefs + (0,) * (size - len(self._coefs))
        b = other._coefs + (0,) * (size - len(other._coefs))
        return UniPoly([max(x, y) for x, y in zip(a, b)])

    def to_multipoly(self, arity: int = 1, index: int = 0) -> MultiPoly:
        terms = {}
        for d, c in enumerate(self._coefs):
            exps = [0] * arity
            exps[index] = d
            terms[tuple(exps)] = c
        return MultiPoly(arity, terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self._coefs == other._coefs

    def __hash__(self) -> int:
        return hash(self._coefs)

    def __str__(self) -> str:
        if not self._coefs:
            return "0"
        parts = []
        for d in range(len(self._coefs) - 1, -1, -1):
            c = self._coefs[d]
            if not c:
                continue
            mono = "" if d == 0 else ("n" if d == 1 else f"n^{d}")
            coef = "" if (c == 1 and mono) else str(c)
            parts.append(f"{coef}{mono}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"{type(self).__qualname__}({list(self._coefs)!r})"


def _as_unipoly(value: UniPoly | int) -> UniPoly:
    if isinstance(value, UniPoly):
        return value
    return UniPoly((natural(value),))




####################################################################################
############################# Trees and length functions ###########################
####################################################################################

@dataclass(frozen=True)
class Description:
    """Description (polynomial tree) of a second-order polynomial.

    Args:
        * node (MultiPoly): Root polynomial. `X0` is the scalar slot, `X1..Xk`
        bind the children in order.
        * children (tuple[Description, ...]): Sub-descriptions.
    """
    node    : MultiPoly
    children: tuple[Description, ...] = ()

    def __post_init__(self):
        if not isinstance(self.children, tuple):
            object.__setattr__(self, "children", tuple(self.children))
        if self.node.arity != len(self.children) + 1:
            raise err_arity(len(self.children) + 1, self.node.arity)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @cached_property
    def height(self) -> int:
        return 1 + max((c.height for c in self.children), default=-1)

    @cached_property
    def size(self) -> int:
        return 1 + sum(c.size for c in self.children)

    def nodes(self) -> Iterator[MultiPoly]:
        yield self.node
        for child in self.children:
            yield from child.nodes()

    def __str__(self) -> str:
        if self.is_leaf:
            return f"[{self.node}]"
        return f"[{self.node}]({', '.join(str(c) for c in self.children)})"


def leaf(poly: MultiPoly | UniPoly | int) -> Description:
    if isinstance(poly, int):
        poly = const(poly)
    elif isinstance(poly, UniPoly):
        poly = poly.to_multipoly()
    return Description(poly)


def node(poly: MultiPoly, *children: Description) -> Description:
    return Description(poly, tuple(children))


class TailRule(str, Enum):
    CONSTANT = "constant"
    AFFINE   = "affine"


@dataclass(frozen=True)
class LengthFn:
    """Monotone function on the naturals given by a finite table and a tail.

    Args:
        * table (tuple[int, ...]): Values at `0..B`.
        * tail (TailRule, optional): Beyond `B` either repeat the last value or
        extend it with `slope` per step. Defaults to constant.
        * slope (int, optional): Slope of an affine tail. Defaults to 0.
        * exact (bool, optional): False when the values are only a lower bound of
        the size function they stand for. Defaults to True.
    """
    table: tuple[int, ...]
    tail : TailRule = TailRule.CONSTANT
    slope: int = 0
    exact: bool = True

    def __post_init__(self):
        table = tuple(int(v) for v in self.table)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "tail", TailRule(self.tail))
        if not table:
            raise ValueError("A length function needs at least one table value.")
        if any(v < 0 for v in table) or self.slope < 0:
            raise ValueError("Length functions take natural values.")
        if any(a > b for a, b in zip(table, table[1:])):
            raise ValueError(f"Length function table is not monotone: {table}.")

    @classmethod
    def identity(cls) -> Self:
        return cls((0,), TailRule.AFFINE, 1)

    @classmethod
    def constant(cls, c: int) -> Self:
        return cls((c,))

    @classmethod
    def from_callable(cls, fn: Callable[[int], int], bound: int, tail: TailRule = TailRule.CONSTANT, slope: int = 0, exact: bool = True) -> Self:
        return cls(tuple(fn(k) for k in range(bound + 1)), tail, slope, exact)

    @property
    def bound(self) -> int:
        return len(self.table) - 1

    def __call__(self, n: int) -> int:
        if n < len(self.table):
            return self.table[n]
        last = self.table[-1]
        if self.tail is TailRule.AFFINE:
            return last + self.slope * (n - self.bound)
        return last


class Majorant(NamedTuple):
    """Majorant of a description.

    Args:
        * height (int): Height `N` of the originating tree.
        * bound (UniPoly): Polynomial `p` with `p(n) >= n` dominating every node
        on the diagonal.
    """
    height: int
    bound : UniPoly

    def __str__(self) -> str:
        return f"N={self.height} p={self.bound}"




####################################################################################
#################################### Operations ####################################
####################################################################################

def eval_description(T: Description, l: LengthLike, n: int, *, max_bits: int | None = None) -> int:
    """Evaluate the second-order polynomial described by `T` at `(l, n)`."""
    if T.is_leaf:
        return _checked(T.node(n), max_bits)
    args = [n]
    for child in T.children:
        args.append(_checked(l(eval_description(child, l, n, max_bits=max_bits)), max_bits))
    return _checked(T.node(*args), max_bits)


def _merge_roots(TP: Description, TQ: Description, op: Callable[[MultiPoly, MultiPoly], MultiPoly]) -> Description:
    k, m = len(TP.children), len(TQ.children)
    arity = 1 + k + m
    tp = TP.node.remap(arity, {i: i for i in range(k + 1)})
    tq = TQ.node.remap(arity, {0: 0, **{j: k + j for j in range(1, m + 1)}})
    return Description(op(tp, tq), TP.children + TQ.children)


def sum_descriptions(TP: Description, TQ: Description) -> Description:
    return _merge_roots(TP, TQ, MultiPoly.__add__)


def product_descriptions(TP: Description, TQ: Description) -> Description:
    return _merge_roots(TP, TQ, MultiPoly.__mul__)


def apply_plus(T: Description) -> Description:
    """Description of `(l, n) -> l(T(l, n))`."""
    return Description(var(1, 2), (T,))


def subst_second_arg(TP: Description, TQ: Description) -> Description:
    """Description of `(l, n) -> P(l, Q(l, n))`.

    Every node of `TP` reads its scalar slot through `Q`'s root: `X0` becomes
    `q(X0, Y1..Yj)` where the `Y` bind fresh copies of `Q`'s children, which
    are appended after the node's own (transformed) children.
    """
    q, q_children = TQ.node, TQ.children
    j = len(q_children)

    def transport(T: Description) -> Description:
        k = len(T.children)
        arity = 1 + k + j
        q_here = q.remap(arity, {0: 0, **{s: k + s for s in range(1, j + 1)}})
        subs = [q_here] + [var(i, arity) for i in range(1, k + 1)]
        children = tuple(transport(c) for c in T.children) + q_children
        return Description(T.node.compose(subs), children)

    return transport(TP)


def subst_function_arg(TP: Description, TQ: Description) -> Description:
    """Description of `(l, n) -> P(Q(l, .), n)`.

    Each edge of `TP` applies `l' = Q(l, .)` to a child value `v`. The child
    is transported first; its root `r` is inlined into the parent (its own
    children are re-attached there) and `Q`'s root is composed on top, with
    `Q`'s children re-rooted at `v` through `subst_second_arg`.
    """
    q, q_children = TQ.node, TQ.children
    j = len(q_children)

    def transport(T: Description) -> Description:
        if T.is_leaf:
            return T
        moved = [transport(c) for c in T.children]
        arity = 1 + sum(len(c.children) + j for c in moved)
        children: list[Description] = []
        slots = [var(0, arity)]
        offset = 1
        for child in moved:
            g = len(child.children)
            r = child.node.remap(arity, {0: 0, **{s: offset + s - 1 for s in range(1, g + 1)}})
            children.extend(child.children)
            offset += g
            ys = [var(offset + s, arity) for s in range(j)]
            children.extend(subst_second_arg(D, child) for D in q_children)
            offset += j
            slots.append(q.compose([r] + ys))
        return Description(T.node.compose(slots), tuple(children))

    return transport(TP)


def majorant(T: Description) -> Majorant:
    p = UniPoly.identity()
    for t in T.nodes():
        p = p.max(t.on_diagonal())
    return Majorant(T.height, p)


def eval_pN(m: Majorant, l: LengthLike, n: int, i: int, *, cap: int | None = None, max_bits: int | None = None) -> int:
    """`p_0 = p(n)`, `p_{i+1} = p(max(n, l(p_i)))`; returns `p_i`."""
    cap = Workbench.get("pn_cap", cap)
    if i > cap:
        raise BudgetExceeded(f"iteration index {i} exceeds the cap {cap}")
    p = m.bound
    value = _checked(p(n), max_bits)
    for _ in range(i):
        value = _checked(p(max(n, _checked(l(value), max_bits))), max_bits)
    return value


def check_majorant_bound(T: Description, l: LengthLike, n: int, *, max_bits: int | None = None) -> Verdict:
    m = majorant(T)
    value = eval_description(T, l, n, max_bits=max_bits)
    bound = eval_pN(m, l, n, m.height, max_bits=max_bits)
    detail = f"P(l,{n}) = {value} <= p_{m.height}(l,{n}) = {bound}"
    if value <= bound:
        return Verdict(True, None, detail)
    return Verdict(False, n, detail.replace("<=", ">"))


def sp_bound(p: UniPoly, revisions: int) -> Description:
    """Description of `(p o (l + id))^N (p(n))`, the running time of a machine
    with step-count `p` and at most `N` length revisions.
    """
    step = Description(p.to_multipoly().compose([var(0, 2) + var(1, 2)]), (leaf(var(0, 1)),))
    desc = leaf(p)
    for _ in range(revisions):
        desc = subst_second_arg(step, desc)
    return desc




####################################################################################
##################################### Samplers #####################################
####################################################################################

def random_multipoly(rng: random.Random, arity: int, max_degree: int = 2, max_terms: int = 3, max_coef: int = 4) -> MultiPoly:
    terms: dict[ExpVector, int] = {}
    for _ in range(rng.randint(1, max_terms)):
        exps = [0] * arity
        for _ in range(rng.randint(0, max_degree)):
            exps[rng.randrange(arity)] += 1
        key = tuple(exps)
        terms[key] = terms.get(key, 0) + rng.randint(1, max_coef)
    return MultiPoly(arity, terms)


def random_description(rng: random.Random, depth: int | None = None, max_children: int = 2, **poly_kw) -> Description:
    """Random tree of height at most `depth`."""
    depth = Workbench.get("sample_depth", depth)
    if depth == 0 or rng.random() < 0.3:
        return leaf(random_multipoly(rng, 1, **poly_kw))
    k = rng.randint(1, max_children)
    children = tuple(random_description(rng, depth - 1, max_children, **poly_kw) for _ in range(k))
    return Description(random_multipoly(rng, k + 1, **poly_kw), children)


def random_length_fn(rng: random.Random, bound: int = 16, max_value: int = 64, affine: bool = False) -> LengthFn:
    table = sorted(rng.randint(0, max_value) for _ in range(bound + 1))
    if affine:
        return LengthFn(tuple(table), TailRule.AFFINE, rng.randint(0, 2))
    return LengthFn(tuple(table))




####################################################################################
#################################### Documents #####################################
####################################################################################

def description_to_json(T: Description) -> dict[str, Any]:
    return {
        "poly": [{"exps": list(e), "coef": c} for e, c in T.node.terms.items()],
        "children": [description_to_json(c) for c in T.children],
    }


def description_from_json(obj: Any) -> Description:
    try:
        children = tuple(description_from_json(c) for c in obj.get("children", ()))
        arity = len(children) + 1
        terms: dict[ExpVector, int] = {}
        for mono in obj["poly"]:
            exps = tuple(int(e) for e in mono["exps"])
            if len(exps) != arity:
                raise err_arity(arity, len(exps), f"monomial {list(exps)}")
            terms[exps] = terms.get(exps, 0) + int(mono["coef"])
    except (KeyError, TypeError, AttributeError) as e:
        raise ProgramFormatError(f"bad description node ({e})") from None
    return Description(MultiPoly(arity, terms), children)


def load_description(path: Filepath) -> Description:
    with open(path, "r", encoding="utf-8") as f:
        try:
            return description_from_json(json.load(f))
        except json.JSONDecodeError as e:
            raise ProgramFormatError(str(e)) from None


def dump_description(T: Description, path: Filepath) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(description_to_json(T), f, indent=1)
        f.write("\n")


def length_fn_to_json(l: LengthFn) -> dict[str, Any]:
    return {"table": list(l.table), "tail": l.tail.value, "slope": l.slope, "exact": l.exact}


def length_fn_from_json(obj: Any) -> LengthFn:
    try:
        return LengthFn(tuple(obj["table"]), TailRule(obj.get("tail", "constant")), int(obj.get("slope", 0)), bool(obj.get("exact", True)))
    except (KeyError, TypeError, ValueError) as e:
        raise ProgramFormatError(f"bad length function ({e})") from None
