import numpy as np
import pytest

from mcfauc.model.cohort import (
    AnalysisConfig,
    Cohort,
    EventData,
    center_covariates,
    risk_set_count,
)
from mcfauc.model.errors import AnalysisConfigError, CohortValidationError, NoCovariatesError
from tests.helpers import record


class TestSubjectRecord:
    def test_valid_record(self):
        r = record("A", 1, followup=2.0, events=(1.0,))
        assert r.events == (1.0,)
        assert r.to_dict()["events"] == [1.0]

    def test_event_after_followup(self):
        with pytest.raises(CohortValidationError, match="event after follow-up"):
            record("A", followup=2.0, events=(2.5,))

    def test_events_must_increase(self):
        with pytest.raises(CohortValidationError, match="strictly increasing"):
            record("A", events=(1.0, 1.0))

    def test_event_tied_with_death(self):
        with pytest.raises(CohortValidationError, match="tied with the terminal event"):
            record("A", followup=1.5, terminal=1, events=(1.5,))

    def test_event_at_censoring_time_is_allowed(self):
        assert record("A", followup=1.5, terminal=0, events=(1.5,)).events == (1.5,)

    @pytest.mark.parametrize("arm", [2, -1])
    def test_bad_arm(self, arm):
        with pytest.raises(CohortValidationError, match="arm must be 0 or 1"):
            record("A", arm=arm)

    def test_negative_followup(self):
        with pytest.raises(CohortValidationError, match="followup"):
            record("A", followup=-1.0)

    def test_from_dict_ignores_unknown_fields(self):
        r = record("A", events=(1.0,))
        data = {**r.to_dict(), "site": "north"}
        assert type(r).from_dict(data) == r


class TestCohort:
    def test_minimal_cohort(self):
        cohort = Cohort((record("A", 1, events=(1.0,)), record("B", 0)))
        assert cohort.n == 2
        assert cohort.records(1)[0].events == (1.0,)
        assert (cohort.n0, cohort.n1) == (1, 1)

    def test_duplicate_id(self):
        with pytest.raises(CohortValidationError, match="duplicate id"):
            Cohort((record("A"), record("A")))

    def test_covariate_count_mismatch(self):
        with pytest.raises(CohortValidationError, match="covariates"):
            Cohort((record("A", covariates=(1.0,)), record("B", covariates=(1.0, 2.0))))

    def test_default_covariate_names(self):
        cohort = Cohort((record("A", covariates=(1.0, 2.0)),))
        assert cohort.covariate_names == ("x1", "x2")

    def test_require_two_arms(self):
        with pytest.raises(CohortValidationError, match="both arms"):
            Cohort((record("A", 0), record("B", 0))).require_two_arms()

    def test_select_covariates(self):
        cohort = Cohort(
            (record("A", covariates=(1.0, 2.0, 3.0)), record("B", 1, covariates=(4.0, 5.0, 6.0))),
            ("age", "bmi", "score"),
        )
        selected = cohort.select_covariates(["score", "age"])
        assert selected.covariate_names == ("score", "age")
        np.testing.assert_array_equal(selected.covariate_matrix, [[3.0, 1.0], [6.0, 4.0]])

    def test_select_unknown_covariate(self):
        cohort = Cohort((record("A", covariates=(1.0,)),), ("age",))
        with pytest.raises(CohortValidationError, match="unknown covariate"):
            cohort.select_covariates(["bmi"])

    def test_event_data_per_arm(self, small_cohort):
        data = small_cohort.event_data(1)
        assert data.n == 2
        np.testing.assert_array_equal(data.event_times, [0.5, 1.5, 1.0])
        np.testing.assert_array_equal(data.event_owner, [0, 0, 1])
        assert small_cohort.event_data(1) is data

    def test_from_arrays(self):
        cohort = Cohort.from_arrays(
            arm=[0, 1],
            followup=[2.0, 1.0],
            terminal=[0, 1],
            events=[[0.5], []],
            covariates=np.array([[1.0], [2.0]]),
            covariate_names=["age"],
        )
        assert [r.id for r in cohort.subjects] == ["s0", "s1"]
        assert cohort.subjects[1].terminal == 1


class TestCenterCovariates:
    def test_single_covariate(self):
        cohort = Cohort((record("A", covariates=(1.0,)), record("B", 1, covariates=(3.0,))))
        centered = center_covariates(cohort)
        np.testing.assert_allclose(centered.matrix[:, 0], [-1.0, 1.0])
        np.testing.assert_allclose(centered.reconstruct(), cohort.covariate_matrix)

    def test_constant_column_is_flagged(self):
        cohort = Cohort(tuple(record(f"s{i}", i % 2, covariates=(5.0, float(i))) for i in range(3)))
        centered = center_covariates(cohort)
        np.testing.assert_allclose(centered.matrix[:, 0], [0.0, 0.0, 0.0])
        assert centered.degenerate.tolist() == [True, False]
        assert centered.usable.tolist() == [1]

    def test_columns_sum_to_zero(self, case1_cohort):
        centered = center_covariates(case1_cohort)
        scale = np.abs(case1_cohort.covariate_matrix).sum(axis=0)
        assert np.all(np.abs(centered.matrix.sum(axis=0)) <= 1e-10 * scale)

    def test_no_covariates(self, small_cohort):
        with pytest.raises(NoCovariatesError):
            center_covariates(small_cohort)


class TestRiskSet:
    @pytest.fixture
    def data(self):
        return EventData.from_records([record("a", followup=1.0), record("b", followup=2.0), record("c", followup=3.0)])

    def test_counts_with_ge(self, data):
        assert risk_set_count(data, 2.0) == 2

    def test_everybody_at_time_zero(self, data):
        assert risk_set_count(data, 0.0) == 3

    def test_empty_after_max_followup(self, data):
        assert risk_set_count(data, 3.5) == 0

    def test_vectorized(self, data):
        np.testing.assert_array_equal(data.risk_count(np.array([0.0, 1.0, 1.5, 3.0])), [3, 3, 2, 1])


class TestAnalysisConfig:
    def test_defaults(self):
        config = AnalysisConfig(tau=2.0)
        assert config.estimands == ("difference", "ratio")
        assert config.alpha == 0.05

    def test_single_estimand(self):
        assert AnalysisConfig(tau=2.0, estimand="ratio").estimands == ("ratio",)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"tau": 0.0},
            {"tau": float("nan")},
            {"tau": 1.0, "alpha": 1.0},
            {"tau": 1.0, "estimand": "odds"},
            {"tau": 1.0, "endpoint": "lwyy"},
            {"tau": 1.0, "followup_limit": -2.0},
            {"tau": 1.0, "rmst_weight": "uniform"},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(AnalysisConfigError):
            AnalysisConfig(**kwargs)
