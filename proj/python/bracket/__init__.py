"""Bracketed difference-in-differences estimation (C++ core)."""

from ._core import (
    BracketError,
    Panel,
    analyze,
    bracket_bounds,
    construct_control_groups,
    coverage,
    minmax_ci,
    normal_quantile,
    placebo,
    run_cli,
    scenario_names,
    simulate,
    synthetic_control,
)

__all__ = [
    "BracketError",
    "Panel",
    "analyze",
    "bracket_bounds",
    "construct_control_groups",
    "coverage",
    "minmax_ci",
    "normal_quantile",
    "placebo",
    "run_cli",
    "scenario_names",
    "simulate",
    "synthetic_control",
]
