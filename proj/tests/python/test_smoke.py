import json
import os
from pathlib import Path

import pytest

import bracket

DATA = Path(os.environ.get("BRACKET_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))
NEIGHBORS = {"Arkansas", "Illinois", "Iowa", "Kansas", "Kentucky", "Nebraska", "Oklahoma", "Tennessee"}


@pytest.fixture(scope="module")
def region():
    return bracket.Panel.from_csv(DATA / "missouri_region.csv")


def test_panel_loads(region):
    assert len(region) == 9 * 23
    assert "Missouri" in region.units()
    again = bracket.Panel.from_csv_text(region.to_csv())
    assert again.to_csv() == region.to_csv()


def test_construct_and_analyze(region):
    groups = bracket.construct_control_groups(region, "Missouri", NEIGHBORS)
    assert groups["lower"] == {"Iowa", "Kansas", "Kentucky", "Nebraska", "Oklahoma"}
    assert groups["upper"] == {"Arkansas", "Illinois", "Tennessee"}
    report = bracket.analyze(region, "Missouri", groups["lower"], groups["upper"], split_year=2003)
    assert report["schema_version"] == 1
    assert round(report["est_upper_ctrl"]["point"], 1) == 1.3
    assert round(report["est_lower_ctrl"]["point"], 1) == 0.9
    lo, hi = report["bracket"]
    assert lo <= report["est_pooled"]["point"] <= hi
    assert all(not d["evidence"] for d in report["diagnostics"])


def test_group_percents():
    panel = bracket.Panel.from_csv(DATA / "group_periods.csv")
    r = bracket.analyze(panel, "Missouri", {"Lower Controls"}, {"Upper Controls"}, pooled={"All Controls"})
    assert abs(r["est_upper_ctrl"]["pct_point"] - 27) <= 0.5
    assert abs(r["est_lower_ctrl"]["pct_point"] - 17) <= 0.5
    assert abs(r["est_pooled"]["pct_point"] - 24) <= 0.5


def test_small_helpers():
    assert bracket.bracket_bounds(1.3, 0.9) == (0.9, 1.3)
    assert bracket.minmax_ci((0.6, 1.2), (0.9, 1.7)) == (0.6, 1.7)
    assert abs(bracket.normal_quantile(0.975) - 1.959963984540054) < 1e-12


def test_placebo(region):
    results = bracket.placebo(region, DATA / "us_adjacency.csv")
    assert [r["unit"] for r in results] == sorted(r["unit"] for r in results)
    mo = next(r for r in results if r["unit"] == "Missouri")
    assert mo["beta_lc"] is not None and mo["beta_uc"] is not None


def test_simulation():
    assert "linear_interaction" in bracket.scenario_names()
    r = bracket.simulate("linear_interaction", reps=500, seed=1)
    assert r["bracket_holds"]
    assert r == bracket.simulate("linear_interaction", reps=500, seed=1)
    sc = bracket.synthetic_control(0.35)
    assert abs(sc["bias"] - (1.625 - 1 / 0.65)) < 1e-9


def test_errors_carry_class():
    with pytest.raises(bracket.BracketError) as info:
        bracket.Panel.from_csv("/nonexistent.csv")
    assert info.value.error_class == "FileNotFound"
    with pytest.raises(bracket.BracketError):
        bracket.synthetic_control(0.9)


def test_run_cli(tmp_path):
    code, out, err = bracket.run_cli(
        ["analyze", "--config", str(DATA / "configs" / "group_periods.cfg"), "--out-dir", str(tmp_path)])
    assert code == 0, err
    assert "Bracket: [0.9, 1.3]" in out
    report = json.loads((tmp_path / "bracket_report.json").read_text())
    assert report["kind"] == "bracket_report"
    code, _, err = bracket.run_cli(["analyze"])
    assert code == 2 and err.startswith("error: ConfigError:")
