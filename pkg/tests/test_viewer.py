import sys
import pytest
from hypothesis import given, settings, strategies as st
from sopwork import viewer
from sopwork.resources import Trace, check_step_count
from sopwork.sopoly import UniPoly


SAMPLE = Trace(2, 7, ((2, 2, 3), (4, 0, 1), (5, 1, 5)), halted=True)


def test_series():
    series = viewer.profile_series(SAMPLE, UniPoly.identity())
    assert series.steps == [0, 1, 2, 4, 5, 7]
    assert series.profile == [2, 2, 3, 3, 5, 5]
    assert series.budget == series.profile
    assert series.query_steps == [2, 4, 5]
    assert series.answer_lengths == [3, 1, 5]
    assert series.first_violation == 4


def test_single_segment():
    series = viewer.profile_series(Trace(0, 5), UniPoly((2,)))
    assert series.steps == [0, 5]
    assert series.first_violation == 3
    assert viewer.profile_series(Trace(0, 5), UniPoly((9,))).first_violation is None


@settings(deadline=None)
@given(st.integers(0, 6), st.lists(st.integers(0, 9), max_size=10), st.integers(0, 3), st.integers(0, 2))
def test_violation_matches_checker(n, answers, c0, c1):
    tr = Trace(n, len(answers) + 2, tuple((i + 1, 0, v) for i, v in enumerate(answers)))
    t = UniPoly((c0, c1))
    v = check_step_count(tr, t)
    assert viewer.profile_series(tr, t).first_violation == (None if v else v.witness)


def test_show_needs_extra(monkeypatch):
    monkeypatch.setitem(sys.modules, "dearpygui", None)
    with pytest.raises(ImportError, match="sopwork\\[viewer\\]"):
        viewer.show_profile(SAMPLE, UniPoly.identity())
