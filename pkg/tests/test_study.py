import math
from unittest.mock import patch

import pandas as pd
import pytest

from mcfauc.inference.analysis import InferenceResult, analyze_cohort
from mcfauc.model.errors import DegenerateEstimateError, StudyAbortedError
from mcfauc.simulation.scenario import ScenarioSpec, load_scenario
from mcfauc.simulation.study import (
    SUMMARY_COLUMNS,
    ReplicateRecord,
    power_curve,
    run_replicate,
    run_study,
    summarize,
    tables_to_frame,
)
from tests.test_scenarios import SCENARIO_DIR


@pytest.fixture
def quick_spec():
    return ScenarioSpec(case=1, theta=-0.32, n=200, scheme="spb", replicates=6, base_seed=7)


def _result(estimand, adjusted, point, se):
    half = 1.96 * se
    lower, upper = point - half, point + half
    if estimand == "ratio":
        lower, upper = math.exp(lower), math.exp(upper)
    return InferenceResult(
        estimand=estimand,
        adjusted=adjusted,
        point=point,
        se=se,
        ci_lower=lower,
        ci_upper=upper,
        z=point / se,
        p_value=0.5,
        tau=2.0,
        alpha=0.05,
        n0=100,
        n1=100,
        variance_unadjusted=1.0,
        variance_adjusted=0.9 if adjusted else None,
    )


def _record(index, points):
    """points maps (estimand, adjusted) to (point, se)."""
    return ReplicateRecord(
        index=index,
        results=tuple(_result(e, a, *points[(e, a)]) for e, a in points),
    )


class TestRunStudy:
    def test_summary_shape(self, quick_spec):
        table = run_study(quick_spec)
        assert [(c.estimand, c.analysis) for c in table.cells] == [
            ("difference", "unadjusted"),
            ("difference", "adjusted"),
            ("ratio", "unadjusted"),
            ("ratio", "adjusted"),
        ]
        for cell in table.cells:
            assert cell.replicates == 6
            assert 0 <= cell.cp <= 100
            assert 0 <= cell.power <= 100
        assert table.efficiency_violations == 0
        assert list(table.to_frame().columns) == SUMMARY_COLUMNS

    def test_threads_do_not_change_the_table(self, quick_spec):
        serial = run_study(quick_spec, threads=1)
        parallel = run_study(quick_spec, threads=3)
        pd.testing.assert_frame_equal(serial.to_frame(), parallel.to_frame())
        pd.testing.assert_frame_equal(serial.replicate_frame(), parallel.replicate_frame())

    def test_same_seed_same_table(self, quick_spec):
        assert run_study(quick_spec).to_dict() == run_study(quick_spec).to_dict()

    def test_progress_callback(self, quick_spec):
        seen = []
        run_study(quick_spec, on_replicate=lambda record: seen.append(record.index))
        assert sorted(seen) == list(range(6))

    def test_every_replicate_failing_aborts(self, quick_spec):
        with patch(
            "mcfauc.simulation.study.analyze_cohort",
            side_effect=DegenerateEstimateError("log-ratio undefined"),
        ):
            with pytest.raises(StudyAbortedError, match="6 of 6 replicates failed") as exc_info:
                run_study(quick_spec, max_failure_rate=0.5)
        assert len(exc_info.value.failures) == 6

    def test_failures_within_the_allowed_rate_are_excluded(self, quick_spec):
        calls = []

        def flaky(cohort, config, covariates=None):
            calls.append(1)
            if len(calls) == 1:
                raise DegenerateEstimateError("log-ratio undefined")
            return analyze_cohort(cohort, config, covariates)

        with patch("mcfauc.simulation.study.analyze_cohort", side_effect=flaky):
            table = run_study(quick_spec, max_failure_rate=0.2)
        assert len(table.failures) == 1
        assert all(cell.replicates == 5 for cell in table.cells)
        assert table.to_dict()["failures"] == 1

    def test_failures_above_the_rate_abort(self, quick_spec):
        calls = []

        def flaky(cohort, config, covariates=None):
            calls.append(1)
            if len(calls) <= 2:
                raise DegenerateEstimateError("log-ratio undefined")
            return analyze_cohort(cohort, config, covariates)

        with patch("mcfauc.simulation.study.analyze_cohort", side_effect=flaky):
            with pytest.raises(StudyAbortedError):
                run_study(quick_spec, max_failure_rate=0.2)

    def test_other_errors_propagate(self, quick_spec):
        with patch("mcfauc.simulation.study.analyze_cohort", side_effect=RuntimeError("boom")):
            with pytest.raises(RuntimeError):
                run_replicate(quick_spec, 0)

    def test_power_curve(self, quick_spec):
        tables = power_curve(quick_spec, [-0.5, 0.0])
        assert [t.spec.theta for t in tables] == [-0.5, 0.0]
        frame = tables_to_frame(tables)
        assert len(frame) == 8
        assert sorted(frame["theta"].unique().tolist()) == [-0.5, 0.0]

    def test_rmst_study(self):
        spec = ScenarioSpec(endpoint="rmst", case=2, theta=0.3, n=200, replicates=4, base_seed=3)
        table = run_study(spec)
        assert table.to_frame()["endpoint"].unique().tolist() == ["rmst"]


class TestSummarize:
    def test_cell_metrics(self):
        spec = ScenarioSpec(replicates=2)
        records = [
            _record(
                0,
                {
                    ("difference", False): (0.2, 0.1),
                    ("difference", True): (0.28, 0.02),
                    ("ratio", False): (-0.3, 0.1),
                    ("ratio", True): (-0.2, 0.1),
                },
            ),
            _record(
                1,
                {
                    ("difference", False): (0.4, 0.1),
                    ("difference", True): (0.40, 0.02),
                    ("ratio", False): (-0.1, 0.1),
                    ("ratio", True): (-0.1, 0.1),
                },
            ),
        ]
        table = summarize(spec, records)
        unadjusted = table.cell("difference", "unadjusted")
        adjusted = table.cell("difference", "adjusted")
        assert unadjusted.est == pytest.approx(0.3)
        assert adjusted.est == pytest.approx(0.3)
        assert adjusted.bias == pytest.approx(0.04)
        assert adjusted.mean_se == pytest.approx(0.02)
        assert adjusted.mc_sd == pytest.approx(0.12 / math.sqrt(2))
        assert adjusted.bias_se == pytest.approx(0.06)
        # Est 0.3 lies inside both unadjusted intervals, but only the first adjusted interval.
        assert unadjusted.cp == pytest.approx(100.0)
        assert adjusted.cp == pytest.approx(50.0)
        assert unadjusted.power == pytest.approx(100.0)
        ratio = table.cell("ratio", "adjusted")
        assert ratio.est == pytest.approx(-0.2)
        assert ratio.bias == pytest.approx(0.05)
        assert ratio.cp == pytest.approx(100.0)

    def test_unknown_cell(self):
        table = summarize(ScenarioSpec(replicates=1), [_record(0, {(e, a): (0.1, 0.1) for e in ("difference", "ratio") for a in (False, True)})])
        with pytest.raises(KeyError):
            table.cell("difference", "weighted")


@pytest.mark.slow
class TestMonteCarlo:
    def test_case1_spb_constant_effect(self):
        table = run_study(load_scenario(SCENARIO_DIR / "case1-spb.yaml"), threads=4)
        unadjusted = table.cell("ratio", "unadjusted")
        adjusted = table.cell("ratio", "adjusted")
        assert unadjusted.est == pytest.approx(-0.32, abs=0.02)
        assert abs(adjusted.bias) <= 3 * adjusted.bias_se + 0.002
        assert adjusted.mean_se < unadjusted.mean_se
        # Ignoring the stratified design leaves the unadjusted SE conservative.
        assert unadjusted.mean_se >= 0.98 * unadjusted.mc_sd
        assert adjusted.mean_se == pytest.approx(adjusted.mc_sd, rel=0.1)
        assert table.efficiency_violations == 0

    def test_case1_null_small_sample(self):
        table = run_study(load_scenario(SCENARIO_DIR / "case1-simple-null.yaml"), threads=4)
        for cell in table.cells:
            assert 3.5 - 1.5 <= cell.power <= 6.5 + 1.5
            assert 92.0 <= cell.cp <= 98.0
        difference = table.cell("difference", "unadjusted")
        ratio = table.cell("ratio", "unadjusted")
        assert abs(difference.power - ratio.power) <= 1.5
        assert table.efficiency_violations == 0

    def test_case5_small_sample(self):
        table = run_study(load_scenario(SCENARIO_DIR / "case5-small-sample.yaml"), threads=4)
        assert len(table.cells) == 4
        for cell in table.cells:
            assert 93.5 <= cell.cp <= 96.5, (cell.estimand, cell.analysis, cell.cp)
        assert table.cell("ratio", "adjusted").mean_se < table.cell("ratio", "unadjusted").mean_se
        assert table.efficiency_violations == 0

    @pytest.mark.parametrize("scenario", ["case5-power", "case5-power-spb"])
    def test_case5_power_ordering(self, scenario):
        spec = load_scenario(SCENARIO_DIR / f"{scenario}.yaml")
        assert spec.thetas == (-0.10, -0.05, 0.0)
        tables = {table.spec.theta: table for table in power_curve(spec, spec.thetas, threads=4)}

        alternative = tables[-0.10]
        for estimand in ("difference", "ratio"):
            unadjusted = alternative.cell(estimand, "unadjusted").power
            adjusted = alternative.cell(estimand, "adjusted").power
            # A gain of five points is impossible once the adjusted test saturates.
            assert adjusted >= min(unadjusted + 5.0, 99.0), (estimand, unadjusted, adjusted)

        if spec.scheme == "simple":
            for cell in tables[0.0].cells:
                assert 3.5 <= cell.power <= 6.5, (cell.estimand, cell.analysis, cell.power)
        assert all(table.efficiency_violations == 0 for table in tables.values())

    @pytest.mark.parametrize("scenario", ["rmst-case1", "rmst-case2"])
    def test_rmst_coverage_and_bias(self, scenario):
        table = run_study(load_scenario(SCENARIO_DIR / f"{scenario}.yaml"), threads=4)
        for cell in table.cells:
            assert 93.0 <= cell.cp <= 97.0, (cell.estimand, cell.analysis, cell.cp)
            assert cell.mean_se == pytest.approx(cell.mc_sd, rel=0.1)
        for estimand in ("difference", "ratio"):
            adjusted = table.cell(estimand, "adjusted")
            assert abs(adjusted.bias) <= 3 * adjusted.bias_se + 0.002
            assert adjusted.mean_se < table.cell(estimand, "unadjusted").mean_se
        assert table.efficiency_violations == 0
