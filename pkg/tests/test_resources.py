import random
import pytest
from hypothesis import given, settings, strategies as st
from sopwork import resources
from sopwork._internal.errors import LowerBoundError, ProgramFormatError
from sopwork.gallery import ITERATED_APPLY_STEP_COUNT, iterated_apply_machine
from sopwork.machine import run
from sopwork.oracle import DoublingPattern, random_table
from sopwork.resources import Event, EventKind, Trace
from sopwork.sopoly import LengthFn, TailRule, UniPoly, eval_description, leaf


# input 2; step 2 answers 3 (revision), step 4 answers 1, step 5 answers 5 (revision)
SAMPLE = Trace(2, 7, ((2, 2, 3), (4, 0, 1), (5, 1, 5)), halted=True)


class TestTrace:
    def test_events(self):
        kinds = [e.kind for e in SAMPLE.events()]
        assert kinds == [
            EventKind.PLAIN, EventKind.QUERY, EventKind.PLAIN, EventKind.QUERY,
            EventKind.QUERY, EventKind.PLAIN, EventKind.HALT,
        ]
        assert len(SAMPLE) == 7
        assert SAMPLE.m == 5

    def test_from_events(self):
        assert Trace.from_events(2, SAMPLE.events()) == SAMPLE

    def test_from_events_checks_order(self):
        with pytest.raises(ValueError):
            Trace.from_events(0, [Event(2, EventKind.PLAIN)])

    @pytest.mark.parametrize("queries", [((3, 0, 0), (2, 0, 0)), ((9, 0, 0),)])
    def test_query_steps_validated(self, queries):
        with pytest.raises(ValueError):
            Trace(0, 5, queries)

    def test_halt_cannot_be_a_query(self):
        with pytest.raises(ValueError):
            Trace(0, 2, ((2, 0, 0),), halted=True)


class TestRevisions:
    def test_profile(self):
        assert resources.revision_profile(SAMPLE) == [2, 2, 3, 3, 3, 5, 5, 5]
        assert resources.count_revisions(SAMPLE) == 2
        assert resources.revision_range(SAMPLE) == 3

    def test_no_queries(self):
        tr = Trace(4, 3)
        assert resources.revision_profile(tr) == [4, 4, 4, 4]
        assert resources.count_revisions(tr) == 0

    def test_equal_answer_is_not_a_revision(self):
        tr = Trace(3, 2, ((1, 0, 3),))
        assert resources.count_revisions(tr) == 0

    def test_segments(self):
        assert resources.profile_segments(SAMPLE) == [(0, 1, 2), (2, 4, 3), (5, 7, 5)]
        assert resources.profile_segments(Trace(4, 0)) == [(0, 0, 4)]

    @settings(deadline=None)
    @given(st.integers(0, 5), st.lists(st.integers(0, 9), max_size=12))
    def test_profile_is_running_max(self, n, answers):
        tr = Trace(n, len(answers) + 1, tuple((i + 1, 0, v) for i, v in enumerate(answers)))
        profile = resources.revision_profile(tr)
        assert profile == [max([n, *answers[:s]]) for s in range(tr.time + 1)]
        assert resources.revision_range(tr) == len(set(profile))


class TestStepCount:
    def test_pass(self):
        assert resources.check_step_count(SAMPLE, UniPoly((2, 1)))

    def test_least_violation(self):
        # o is 2 on steps 0..1, 3 on 2..4 and 5 on 5..7
        v = resources.check_step_count(SAMPLE, UniPoly.identity())
        assert not v
        assert v.witness == 4

    def test_violation_inside_first_segment(self):
        v = resources.check_step_count(Trace(0, 5), UniPoly((2,)))
        assert v.witness == 3

    @settings(deadline=None)
    @given(st.integers(0, 6), st.lists(st.integers(0, 9), max_size=10), st.integers(0, 3), st.integers(0, 2))
    def test_agrees_with_definition(self, n, answers, c0, c1):
        tr = Trace(n, len(answers) + 2, tuple((i + 1, 0, v) for i, v in enumerate(answers)))
        t = UniPoly((c0, c1))
        profile = resources.revision_profile(tr)
        bad = [s for s in range(tr.time + 1) if s > t(profile[s])]
        v = resources.check_step_count(tr, t)
        assert v.passed == (not bad)
        if bad:
            assert v.witness == bad[0]

    def test_iterated_apply_sweep(self):
        m = iterated_apply_machine()
        rng = random.Random(11)
        for _ in range(1000):
            o = random_table(rng)
            a = "".join(rng.choice("01") for _ in range(rng.randint(0, 6)))
            outcome = run(m, o, a)
            assert resources.check_step_count(outcome.trace, ITERATED_APPLY_STEP_COUNT)


class TestRunningTime:
    def test_pass_and_fail(self):
        l = LengthFn((0,), TailRule.AFFINE, 2)
        assert resources.check_running_time(SAMPLE, leaf(7), l)
        v = resources.check_running_time(SAMPLE, leaf(6), l)
        assert not v and v.witness == 2

    def test_lower_bound_pass_is_refused(self):
        l = LengthFn((1,), exact=False)
        with pytest.raises(LowerBoundError):
            resources.check_running_time(SAMPLE, leaf(100), l)
        assert not resources.check_running_time(SAMPLE, leaf(1), l)

    def test_iterated_apply_is_not_polynomially_bounded_on_doubling(self):
        # time 3n + 2^(n+1) + 4 outgrows 100 + 200n at n = 11
        m = iterated_apply_machine()
        o = DoublingPattern()
        T = leaf(UniPoly((100, 200)))
        verdicts = [resources.check_running_time(run(m, o, "0" * k).trace, T, o.length_fn(k)) for k in range(13)]
        assert verdicts[0]
        first = next(v for v in verdicts if not v)
        assert first.witness == 11


class TestOpt:
    def test_pass_and_fail(self):
        assert resources.check_opt(SAMPLE, UniPoly((2, 1)))
        v = resources.check_opt(SAMPLE, UniPoly.identity())
        assert not v and v.witness == 7

    def test_weaker_than_step_count(self):
        # a long answer at the last step covers the whole run for opt only
        tr = Trace(0, 4, ((4, 0, 9),))
        assert resources.check_opt(tr, UniPoly.identity())
        v = resources.check_step_count(tr, UniPoly.identity())
        assert not v and v.witness == 1

    @settings(deadline=None)
    @given(st.integers(0, 6), st.lists(st.integers(0, 9), max_size=10), st.integers(0, 3), st.integers(0, 2), st.integers(0, 1))
    def test_step_count_implies_opt(self, n, answers, c0, c1, c2):
        tr = Trace(n, len(answers) + 2, tuple((i + 1, 0, v) for i, v in enumerate(answers)))
        t = UniPoly((c0, c1, c2))
        if resources.check_step_count(tr, t):
            assert resources.check_opt(tr, t)


def test_fit_constant():
    assert resources.fit_constant([(10, 3), (7, 7), (0, 0)]) == 4
    with pytest.raises(ValueError):
        resources.fit_constant([(5, 0)])


def test_sp_time_bound():
    l = LengthFn((0,), TailRule.AFFINE, 1)
    T = resources.sp_time_bound(UniPoly((1, 1)), 1)
    # p(m + l(m)) at m = p(3) = 4
    assert eval_description(T, l, 3) == 9


class TestDocuments:
    def test_dense_text(self):
        text = resources.dumps_trace(SAMPLE)
        assert text.splitlines()[0] == "# input_length=2 time=7 halted=1"
        assert text.splitlines()[2] == "2 query 2 3"
        assert text.splitlines()[-1] == "7 halt"
        assert resources.loads_trace(text) == SAMPLE

    def test_sparse_text(self, tmp_path):
        path = tmp_path / "t.trace"
        resources.dump_trace(SAMPLE, path, sparse=True)
        assert len(path.read_text().splitlines()) == 1 + 3 + 1
        assert resources.load_trace(path) == SAMPLE

    @pytest.mark.parametrize("text", [
        "",
        "1 plain\n",
        "# time=3\n",
        "# input_length=0 time=3 halted=0\n3 halt\n",
        "# input_length=0 time=3 halted=0\n1 jump\n",
        "# input_length=0 time=3 halted=0\n1 query 2\n",
    ])
    def test_bad_text(self, text):
        with pytest.raises(ProgramFormatError):
            resources.loads_trace(text)
