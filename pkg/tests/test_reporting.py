"""Tests for plot data and the full corner report."""

import pandas as pd
import pytest

from src.errors import PreconditionError
from src.families import CARA, Linear
from src.model import make_beliefs, make_dataset
from src.reporting import PLOT_COLUMNS, CornerReport, build_report, plot_data, save_plot_csv, save_plot_svg


class TestPlotData:
    def test_layout(self, example_dataset, example_beliefs):
        frame = plot_data(example_dataset, example_beliefs, Linear(), points=50)

        assert list(frame.columns) == PLOT_COLUMNS
        assert sorted(frame["observation"].unique()) == [1, 2, 3]
        counts = frame.groupby(["observation", "curve"]).size()
        for observation in (1, 2, 3):
            assert counts[(observation, "budget")] == 50
            assert counts[(observation, "demand")] == 1
            assert counts[(observation, "indifference")] >= 49

    def test_budget_line_spends_the_wealth(self, example_dataset, example_beliefs):
        frame = plot_data(example_dataset, example_beliefs, CARA(beta=0.002), points=20)
        budget = frame[(frame["observation"] == 1) & (frame["curve"] == "budget")]

        assert (budget["x1"] + 4 * budget["x2"]).to_numpy() == pytest.approx([100.0] * 20)

    def test_indifference_curve_passes_through_the_demand(self, example_dataset, example_beliefs):
        family = CARA(beta=0.002)
        frame = plot_data(example_dataset, example_beliefs, family, points=200)
        curve = frame[(frame["observation"] == 1) & (frame["curve"] == "indifference")]
        level = 0.25 * family.evaluate(100.0)

        values = 0.25 * family.evaluate(curve["x1"].to_numpy()) + 0.75 * family.evaluate(curve["x2"].to_numpy())

        assert values == pytest.approx([level] * len(curve), rel=1e-9)

    def test_two_states_only(self):
        data = make_dataset([((1, 1, 1), (3, 0, 0))])

        with pytest.raises(PreconditionError, match="two states"):
            plot_data(data, make_beliefs("1/3,1/3,1/3"), Linear())

    def test_files(self, example_dataset, example_beliefs, tmp_path):
        frame = plot_data(example_dataset, example_beliefs, Linear(), points=10)
        csv_path = tmp_path / "plots" / "linear.csv"
        svg_path = tmp_path / "plots" / "linear.svg"

        save_plot_csv(frame, csv_path)
        save_plot_svg(frame, svg_path, title="linear")

        assert list(pd.read_csv(csv_path).columns) == PLOT_COLUMNS
        assert svg_path.read_text().lstrip().startswith("<?xml")

    def test_svg_is_reproducible(self, example_dataset, example_beliefs, tmp_path):
        frame = plot_data(example_dataset, example_beliefs, Linear(), points=10)

        save_plot_svg(frame, tmp_path / "a.svg")
        save_plot_svg(frame, tmp_path / "b.svg")

        assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()


class TestCornerReport:
    def test_example_dataset_passes(self, example_dataset):
        report = build_report(example_dataset, grid_points=200)

        assert report["verdict"] == "pass"
        assert report["garp"]["verdict"] == "pass"
        assert report["sarseu"]["verdict"] == "pass"
        assert report["beliefs"] == {
            "source": "found",
            "feasible": True,
            "mode": "strict",
            "pi": ["1/2", "1/2"],
            "min_slack": "1",
        }
        assert report["families"]["crra"]["nonempty"] is False
        for tag in ("shifted_power", "cara", "quadratic", "hyperbolic", "linear", "convex_quadratic"):
            assert report["families"][tag]["certificate"]["valid"], tag

    def test_given_beliefs(self, example_dataset, example_beliefs):
        report = build_report(example_dataset, example_beliefs, grid_points=200)

        assert report["beliefs"]["source"] == "given"
        assert report["beliefs"]["pi"] == ["1/4", "3/4"]
        assert report["families"]["cara"]["region"]["upper"] == "ln(4/3)/100"
        assert report["verdict"] == "pass"

    def test_fixed_alpha_reaches_shifted_power(self, example_dataset, example_beliefs):
        report = build_report(example_dataset, example_beliefs, {"alpha": "1/2"}, grid_points=200)

        shifted = report["families"]["shifted_power"]
        assert shifted["region"]["parameter"] == "c"
        assert shifted["region"]["lower"] == "900/7"
        assert shifted["certificate"]["params"] == {"alpha": 0.5, "c": pytest.approx(1800 / 7)}

    def test_conflicting_corners_fail(self, conflicting_dataset):
        report = build_report(conflicting_dataset, grid_points=200)

        assert report["verdict"] == "fail"
        assert report["beliefs"]["feasible"] is False
        assert report["families"] == {}

    def test_incompatible_given_beliefs_fail(self, example_dataset):
        report = build_report(example_dataset, make_beliefs("9/10,1/10"), grid_points=200)

        assert report["beliefs"]["feasible"] is False
        assert report["verdict"] == "fail"

    def test_plots_for_certified_families(self, example_dataset, tmp_path):
        report = CornerReport(example_dataset, grid_points=200)
        report.generate_report()

        written = report.save_plots(tmp_path)

        assert len(written) == 12
        assert (tmp_path / "cara.svg").exists()
        assert not (tmp_path / "crra.csv").exists()
