import random
import pytest
from hypothesis import given, settings
from sopwork import oracle
from sopwork._internal import registry
from sopwork._internal.errors import BudgetExceeded, OracleError, ProgramFormatError
from sopwork.oracle import (
    AdaptiveOracle,
    ConstantPattern,
    DelayedGrowthPattern,
    DoublingPattern,
    ExponentialPattern,
    PadPattern,
    SizeFn,
    TableOracle,
)
from conftest import bitstrings


class TestTable:
    def test_query_and_default(self):
        o = TableOracle({"0": "111", "01": ""}, "0")
        assert o("0") == "111"
        assert o("01") == ""
        assert o("1111") == "0"

    def test_size_past_longest_key(self):
        o = TableOracle({"0": "111", "01": ""}, "0")
        assert [o.size(n) for n in range(5)] == [1, 3, 3, 3, 3]
        assert o.size(10**6) == 3
        l = o.length_fn()
        assert l.exact
        assert l(50) == 3

    def test_rejects_non_bits(self):
        with pytest.raises(ValueError):
            TableOracle({"2": "0"})


class TestPatterns:
    def test_registered(self):
        for name in ("constant", "empty", "doubling", "pad", "exponential", "delayed-growth"):
            assert name in registry.patterns

    def test_closed_forms_agree_with_enumeration(self):
        for o in (ConstantPattern("01"), DoublingPattern(), PadPattern(2, 1), ExponentialPattern()):
            for n in range(5):
                assert o.size(n) == oracle.brute_force_size(o, n)
                assert all(o.answer_length(a) == len(o(a)) for a in ("", "0", "101"))

    def test_pad(self):
        assert PadPattern(2, 1)("10") == "10000"
        with pytest.raises(OracleError):
            PadPattern(0)

    def test_exponential_length_fn_is_lower_bound(self):
        l = ExponentialPattern().length_fn(4)
        assert l(4) == 16
        assert not l.exact

    def test_delayed_growth(self):
        o = DelayedGrowthPattern(1)
        assert o("00") == "0000"
        assert o("01") == ""
        assert o.answer_length("0000") == 16
        assert [o.size(n) for n in (1, 2, 3, 4)] == [0, 4, 4, 16]
        assert not o.monotone
        with pytest.raises(OracleError):
            DelayedGrowthPattern(3)


class TestAdaptive:
    def test_memoizes_in_order(self):
        o = AdaptiveOracle(lambda a, self: "0" * (self.fresh_count + 1))
        assert o("1") == "0"
        assert o("00") == "00"
        assert o("1") == "0"
        assert o.fresh_count == 2
        assert list(o.memo) == ["1", "00"]
        assert o.size(1) == 1
        assert o.size(2) == 2

    def test_finalize(self):
        o = AdaptiveOracle(lambda a, self: a)
        o("01")
        t = o.finalize("1", {"0": "00"})
        assert t == TableOracle({"01": "01", "0": "00"}, "1")
        with pytest.raises(OracleError):
            o.finalize("", {"01": ""})

    def test_policy_must_answer_bits(self):
        o = AdaptiveOracle(lambda a, self: "x")
        with pytest.raises(OracleError):
            o("")

    def test_size_fn_is_not_cached(self):
        o = AdaptiveOracle(lambda a, self: a + a)
        s = SizeFn(o)
        assert not s.exact
        assert s(2) == 0
        o("11")
        assert s(2) == 4

    def test_size_fn_as_length_fn(self):
        s = SizeFn(TableOracle({"0": "111"}, "1"))
        l = s.as_length_fn()
        assert l.exact
        assert [l(n) for n in range(4)] == [s(n) for n in range(4)] == [1, 3, 3, 3]


class TestPredicates:
    def test_monotone(self):
        assert oracle.is_length_monotone(DoublingPattern())
        assert oracle.is_length_monotone(TableOracle({"": "0"}, "00"), 4)
        v = oracle.is_length_monotone(TableOracle({"0": "111"}, ""), 3)
        assert not v
        assert v.witness == ("0", "1")

    def test_monotone_needs_pure_oracle(self):
        with pytest.raises(OracleError):
            oracle.is_length_monotone(AdaptiveOracle(lambda a, self: ""))

    def test_monotone_budget(self):
        with pytest.raises(BudgetExceeded):
            oracle.is_length_monotone(TableOracle(), 17)

    def test_class_A(self):
        assert oracle.in_class_A(DelayedGrowthPattern(2), 2)
        assert oracle.in_class_A(ExponentialPattern(), 1)
        v = oracle.in_class_A(DoublingPattern(), 1)
        assert not v and v.witness == 1
        with pytest.raises(BudgetExceeded):
            oracle.in_class_A(TableOracle({}, "0" * 16), 2)

    def test_random_reg_tables_are_monotone(self):
        rng = random.Random(3)
        for _ in range(200):
            assert oracle.is_length_monotone(oracle.random_reg_table(rng), 6)

    def test_monotone_size_is_answer_on_zeros(self):
        rng = random.Random(13)
        checked = 0
        for _ in range(300):
            o = oracle.random_reg_table(rng) if rng.random() < 0.5 else oracle.random_table(rng)
            if not oracle.is_length_monotone(o, 5):
                continue
            checked += 1
            assert [oracle.size_fn(o, n) for n in range(6)] == [len(o("0" * n)) for n in range(6)]
        assert checked >= 100


class TestDocuments:
    @settings(deadline=None)
    @given(bitstrings)
    def test_table_document(self, tmp_path_factory, a):
        o = TableOracle({a: a + "1"}, "0")
        path = tmp_path_factory.mktemp("oracle") / "o.json"
        oracle.dump_oracle(o, path)
        assert oracle.load_oracle(path) == o

    def test_pattern_document(self, tmp_path):
        path = tmp_path / "pad.json"
        oracle.dump_oracle(PadPattern(3, 2), path)
        assert oracle.load_oracle(path) == PadPattern(3, 2)

    def test_load_by_name(self):
        assert oracle.load_oracle("doubling") == DoublingPattern()

    def test_bad_documents(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"kind": "nope"}')
        with pytest.raises(ProgramFormatError):
            oracle.load_oracle(path)
        path.write_text("{")
        with pytest.raises(ProgramFormatError):
            oracle.load_oracle(path)

    def test_adaptive_has_no_document(self):
        with pytest.raises(OracleError):
            oracle.oracle_to_json(AdaptiveOracle(lambda a, self: ""))
