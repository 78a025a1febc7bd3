"""Plots of a run's revision profile against a step-count.

`profile_series` is plain data and always available; `show_profile` needs the
`viewer` extra (dearpygui).
"""
from __future__ import annotations
from typing import NamedTuple
from ._internal.utilities import log
from .resources import Trace, profile_segments
from .sopoly import UniPoly


__all__ = [
    "ProfileSeries",
    "profile_series",
    "show_profile",
]




class ProfileSeries(NamedTuple):
    """Breakpoints of the step functions `o(n)` and `t(o(n))`.

    Args:
        * steps (list[int]): x values; each constant segment contributes its
        first and last step.
        * profile (list[int]): `o` at those steps.
        * budget (list[int]): `t(o)` at those steps.
        * query_steps (list[int]): Steps of the queries.
        * answer_lengths (list[int]): Answer length of each query.
        * first_violation (int | None): Least `n > t(o(n))`, if any.
    """
    steps          : list[int]
    profile        : list[int]
    budget         : list[int]
    query_steps    : list[int]
    answer_lengths : list[int]
    first_violation: int | None


def profile_series(tr: Trace, t: UniPoly) -> ProfileSeries:
    steps, profile, budget = [], [], []
    violation = None
    for lo, hi, value in profile_segments(tr):
        limit = t(value)
        if violation is None and hi > limit:
            violation = max(lo, limit + 1)
        for x in (lo, hi) if hi > lo else (lo,):
            steps.append(x)
            profile.append(value)
            budget.append(limit)
    return ProfileSeries(
        steps,
        profile,
        budget,
        [q.step for q in tr.queries],
        [q.answer_length for q in tr.queries],
        violation,
    )


def show_profile(tr: Trace, t: UniPoly, title: str = "revision profile") -> None:
    """Open a window plotting the step line `n`, the profile and the budget
    `t(o(n))`, with the queries as markers. Blocks until the window closes.
    """
    try:
        from dearpygui import dearpygui
    except ImportError:
        raise ImportError("show_profile needs dearpygui; install sopwork[viewer]") from None

    series = profile_series(tr, t)
    xs = [float(x) for x in series.steps]
    log("debug", "viewer", f"plotting {len(xs)} breakpoints, {len(series.query_steps)} queries", title)

    dearpygui.create_context()
    dearpygui.create_viewport(title=title, width=900, height=600)
    with dearpygui.window(label=title, tag="sopwork.profile", width=880, height=560):
        with dearpygui.plot(label=f"t = {t}", height=-1, width=-1):
            dearpygui.add_plot_legend()
            dearpygui.add_plot_axis(dearpygui.mvXAxis, label="step")
            with dearpygui.plot_axis(dearpygui.mvYAxis, label="length / steps"):
                dearpygui.add_line_series(xs, xs, label="n")
                dearpygui.add_line_series(xs, [float(v) for v in series.profile], label="o(n)")
                dearpygui.add_line_series(xs, [float(v) for v in series.budget], label="t(o(n))")
                dearpygui.add_scatter_series(
                    [float(s) for s in series.query_steps],
                    [float(v) for v in series.answer_lengths],
                    label="answers",
                )
                if series.first_violation is not None:
                    dearpygui.add_vline_series([float(series.first_violation)], label="violation")
    dearpygui.set_primary_window("sopwork.profile", True)
    dearpygui.setup_dearpygui()
    dearpygui.show_viewport()
    while dearpygui.is_dearpygui_running():
        dearpygui.render_dearpygui_frame()
    dearpygui.destroy_context()
