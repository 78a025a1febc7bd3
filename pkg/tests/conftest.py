from __future__ import annotations
import random
import pytest
from hypothesis import strategies as st
from sopwork import Workbench
from sopwork.sopoly import Description, LengthFn, MultiPoly, TailRule


@pytest.fixture(autouse=True)
def _workbench_defaults():
    Workbench.reset()
    yield
    Workbench.reset()


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0)


def multipolys(arity: int, max_exp: int = 2, max_terms: int = 3, max_coef: int = 4) -> st.SearchStrategy[MultiPoly]:
    exps = st.tuples(*[st.integers(0, max_exp)] * arity)
    return st.dictionaries(exps, st.integers(0, max_coef), max_size=max_terms).map(lambda t: MultiPoly(arity, t))


def descriptions(depth: int = 3, max_children: int = 2, **poly_kw) -> st.SearchStrategy[Description]:
    leaves = multipolys(1, **poly_kw).map(Description)
    if depth == 0:
        return leaves
    inner = st.lists(descriptions(depth - 1, max_children, **poly_kw), min_size=1, max_size=max_children).flatmap(
        lambda children: multipolys(len(children) + 1, **poly_kw).map(lambda p: Description(p, tuple(children)))
    )
    return st.one_of(leaves, inner)


@st.composite
def length_fns(draw, bound: int = 16, max_value: int = 64) -> LengthFn:
    table = sorted(draw(st.lists(st.integers(0, max_value), min_size=1, max_size=bound + 1)))
    if draw(st.booleans()):
        return LengthFn(tuple(table), TailRule.AFFINE, draw(st.integers(0, 2)))
    return LengthFn(tuple(table))


bitstrings = st.text(alphabet="01", max_size=4)
