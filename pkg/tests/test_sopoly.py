import random
import pytest
from hypothesis import given, settings, strategies as st
from sopwork import sopoly
from sopwork._internal.errors import ArithmeticOverflow, ArityError, BudgetExceeded, ProgramFormatError
from sopwork.sopoly import (
    LengthFn,
    MultiPoly,
    TailRule,
    UniPoly,
    const,
    leaf,
    node,
    var,
)
from conftest import descriptions, length_fns


X0, X1 = var(0, 2), var(1, 2)
DOUBLE = LengthFn((0,), TailRule.AFFINE, 2)


class TestPolynomials:
    def test_multipoly_evaluation(self):
        p = const(3, 2) + X0 * X1 + var(1, 2, 2) ** 2
        assert p(2, 5) == 3 + 10 + 100
        assert p.degree == 2

    def test_zero_coefficients_are_dropped(self):
        assert MultiPoly(1, {(2,): 0, (0,): 1}) == const(1)
        assert MultiPoly(1).is_zero()

    def test_arity_is_checked(self):
        with pytest.raises(ArityError):
            X0 + var(0, 1)
        with pytest.raises(ArityError):
            MultiPoly(2, {(1,): 1})

    def test_negative_coefficients_rejected(self):
        with pytest.raises(ValueError):
            MultiPoly(1, {(1,): -1})

    def test_compose(self):
        # (X0 + X1)^2 with X0 := Y0^2, X1 := 1
        p = (X0 + X1) ** 2
        q = p.compose([var(0, 1) ** 2, const(1)])
        assert all(q(y) == (y * y + 1) ** 2 for y in range(6))

    def test_on_diagonal(self):
        p = const(16, 2) + X0 * X1 + var(1, 2, 3)
        assert p.on_diagonal() == UniPoly((16, 3, 1))

    def test_unipoly_algebra_and_format(self):
        p = UniPoly((6, 5, 1))
        assert str(p) == "n^2 + 5n + 6"
        assert str(UniPoly((0, 2))) == "2n"
        assert (p + 1)(2) == 21
        assert (2 * p)(1) == 24
        assert p.compose(UniPoly((1, 1)))(2) == p(3)
        assert UniPoly((1, 5)).max(UniPoly((3, 0, 2))) == UniPoly((3, 5, 2))
        assert UniPoly((0, 0, 0)) == UniPoly()

    def test_unipoly_parse(self):
        assert UniPoly.parse("6, 5,1") == UniPoly((6, 5, 1))
        with pytest.raises(ProgramFormatError):
            UniPoly.parse("a,1")


class TestLengthFn:
    def test_tails(self):
        l = LengthFn((1, 2, 4))
        assert [l(n) for n in range(5)] == [1, 2, 4, 4, 4]
        assert DOUBLE(7) == 14

    def test_must_be_monotone(self):
        with pytest.raises(ValueError):
            LengthFn((3, 1))
        with pytest.raises(ValueError):
            LengthFn(())


class TestEvaluation:
    def test_leaf(self):
        assert sopoly.eval_description(leaf(UniPoly((6, 5, 1))), DOUBLE, 3) == 30

    def test_node_reads_children_through_l(self):
        # n + l(n)
        T = node(X0 + X1, leaf(var(0, 1)))
        assert sopoly.eval_description(T, DOUBLE, 3) == 9

    def test_nested(self):
        # l(l(n)) * n
        T = node(X0 * X1, node(X1, leaf(var(0, 1))))
        assert sopoly.eval_description(T, DOUBLE, 3) == 36

    def test_overflow_guard(self):
        T = node(X1 ** 2, node(X1 ** 2, leaf(var(0, 1) ** 2)))
        with pytest.raises(ArithmeticOverflow):
            sopoly.eval_description(T, lambda v: v ** 2, 2 ** 20, max_bits=64)

    def test_height_and_size(self):
        T = node(X0 * X1, node(X1, leaf(var(0, 1))))
        assert T.height == 2
        assert T.size == 3
        assert leaf(5).height == 0

    @settings(deadline=None)
    @given(length_fns(), st.integers(0, 16))
    def test_two_trees_for_twice_l(self, l, n):
        by_sum = node(var(1, 3) + var(2, 3), leaf(var(0, 1)), leaf(var(0, 1)))
        by_scale = node(var(1, 2, 2), leaf(var(0, 1)))
        assert sopoly.eval_description(by_sum, l, n) == sopoly.eval_description(by_scale, l, n) == 2 * l(n)

    @settings(deadline=None)
    @given(descriptions(3), length_fns(), st.integers(0, 8), st.integers(0, 4), st.integers(0, 4))
    def test_monotone_in_l_and_n(self, T, l, n, dl, dn):
        higher = LengthFn(tuple(v + dl for v in l.table), l.tail, l.slope)
        assert sopoly.eval_description(T, l, n) <= sopoly.eval_description(T, higher, n + dn)


class TestOperations:
    @settings(deadline=None)
    @given(descriptions(2), descriptions(2), length_fns(), st.integers(0, 16))
    def test_sum_and_product(self, TP, TQ, l, n):
        p = sopoly.eval_description(TP, l, n)
        q = sopoly.eval_description(TQ, l, n)
        assert sopoly.eval_description(sopoly.sum_descriptions(TP, TQ), l, n) == p + q
        assert sopoly.eval_description(sopoly.product_descriptions(TP, TQ), l, n) == p * q

    @settings(deadline=None)
    @given(descriptions(3), length_fns(), st.integers(0, 16))
    def test_plus(self, T, l, n):
        assert sopoly.eval_description(sopoly.apply_plus(T), l, n) == l(sopoly.eval_description(T, l, n))

    @settings(deadline=None)
    @given(descriptions(2), descriptions(2), length_fns(max_value=16), st.integers(0, 8))
    def test_subst_second_arg(self, TP, TQ, l, n):
        R = sopoly.subst_second_arg(TP, TQ)
        inner = sopoly.eval_description(TQ, l, n)
        assert sopoly.eval_description(R, l, n) == sopoly.eval_description(TP, l, inner)

    @settings(deadline=None, max_examples=60)
    @given(descriptions(2, max_exp=1), descriptions(1, max_exp=1), length_fns(max_value=16), st.integers(0, 8))
    def test_subst_function_arg(self, TP, TQ, l, n):
        R = sopoly.subst_function_arg(TP, TQ)
        lq = lambda v: sopoly.eval_description(TQ, l, v)
        assert sopoly.eval_description(R, l, n) == sopoly.eval_description(TP, lq, n)

    def test_subst_function_arg_example(self):
        # P = n + l(n), Q = l(v) + v  =>  n + (l(n) + n)
        P = node(X0 + X1, leaf(var(0, 1)))
        Q = node(X0 + X1, leaf(var(0, 1)))
        R = sopoly.subst_function_arg(P, Q)
        assert sopoly.eval_description(R, DOUBLE, 5) == 5 + (10 + 5)

    def test_subst_second_arg_sweep(self):
        rng = random.Random(7)
        for _ in range(1000):
            TP = sopoly.random_description(rng, 2, max_terms=2)
            TQ = sopoly.random_description(rng, 2, max_terms=2)
            l = sopoly.random_length_fn(rng, bound=8, max_value=16)
            n = rng.randint(0, 6)
            inner = sopoly.eval_description(TQ, l, n)
            assert sopoly.eval_description(sopoly.subst_second_arg(TP, TQ), l, n) == sopoly.eval_description(TP, l, inner)

    def test_subst_function_arg_sweep(self):
        rng = random.Random(8)
        for _ in range(1000):
            TP = sopoly.random_description(rng, 2, max_terms=2, max_degree=1)
            TQ = sopoly.random_description(rng, 1, max_terms=2, max_degree=1)
            l = sopoly.random_length_fn(rng, bound=8, max_value=16)
            n = rng.randint(0, 6)
            lq = lambda v: sopoly.eval_description(TQ, l, v)
            assert sopoly.eval_description(sopoly.subst_function_arg(TP, TQ), l, n) == sopoly.eval_description(TP, lq, n)


class TestMajorant:
    def test_example(self):
        m = sopoly.majorant(node(const(16, 2) + var(0, 2, 16) + var(1, 2, 16), node(X1, leaf(UniPoly((6, 3))))))
        assert m.height == 2
        assert m.bound == UniPoly((16, 32))

    def test_twice_l(self):
        T = node(var(1, 2, 2), leaf(var(0, 1)))
        m = sopoly.majorant(T)
        assert m == sopoly.Majorant(1, UniPoly((0, 2)))
        l = LengthFn.identity()
        # p_1 = p(max(3, l(6))) = 12
        assert sopoly.eval_pN(m, l, 3, 1) == 12
        v = sopoly.check_majorant_bound(T, l, 3)
        assert v and "6 <= p_1(l,3) = 12" in v.detail

    def test_bound_dominates_identity(self):
        assert sopoly.majorant(leaf(3)).bound == UniPoly((3, 1))

    def test_pN_iteration(self):
        m = sopoly.Majorant(1, UniPoly((1, 1)))
        # p_0 = 4, p_1 = p(max(3, l(4))) = 9
        assert sopoly.eval_pN(m, DOUBLE, 3, 0) == 4
        assert sopoly.eval_pN(m, DOUBLE, 3, 1) == 9

    def test_pN_cap(self):
        with pytest.raises(BudgetExceeded):
            sopoly.eval_pN(sopoly.majorant(leaf(1)), DOUBLE, 1, 65)

    @settings(deadline=None)
    @given(descriptions(4), length_fns(), st.integers(0, 16))
    def test_bound_holds(self, T, l, n):
        assert sopoly.check_majorant_bound(T, l, n)

    @settings(deadline=None)
    @given(descriptions(4), length_fns(), st.integers(0, 16))
    def test_pN_chain(self, T, l, n):
        m = sopoly.majorant(T)
        chain = [sopoly.eval_pN(m, l, n, i) for i in range(m.height + 1)]
        assert chain == sorted(chain)
        assert chain[0] >= n

    def test_seeded_sweep(self):
        rng = random.Random(0)
        for _ in range(10_000):
            T = sopoly.random_description(rng, 4)
            l = sopoly.random_length_fn(rng, affine=rng.random() < 0.5)
            assert sopoly.check_majorant_bound(T, l, rng.randint(0, 16))


def test_sp_bound():
    p = UniPoly.identity()
    assert sopoly.eval_description(sopoly.sp_bound(p, 0), DOUBLE, 3) == 3
    # p(m + l(m)) at m = p(n)
    assert sopoly.eval_description(sopoly.sp_bound(p, 1), DOUBLE, 3) == 9
    assert sopoly.eval_description(sopoly.sp_bound(p, 2), DOUBLE, 3) == 27


class TestDocuments:
    def test_description_round_trip(self, tmp_path):
        T = node(X0 * X1 + const(2, 2), node(X1, leaf(UniPoly((6, 3)))))
        path = tmp_path / "T.json"
        sopoly.dump_description(T, path)
        assert sopoly.load_description(path) == T

    def test_description_arity_checked(self):
        with pytest.raises(ArityError):
            sopoly.description_from_json({"poly": [{"exps": [1, 0], "coef": 1}], "children": []})
        with pytest.raises(ProgramFormatError):
            sopoly.description_from_json({"children": []})

    def test_length_fn_document(self):
        l = LengthFn((1, 3), TailRule.AFFINE, 2, exact=False)
        assert sopoly.length_fn_from_json(sopoly.length_fn_to_json(l)) == l
        with pytest.raises(ProgramFormatError):
            sopoly.length_fn_from_json({"table": [3, 1]})
