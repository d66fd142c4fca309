import numpy as np
import pytest

from mcfauc.estimators import (
    StepFunction,
    arm_estimators,
    auc,
    influence_auc,
    influence_rmst,
    jackknife_se,
    kaplan_meier,
)
from mcfauc.estimators.influence import InfluenceSet
from mcfauc.model.cohort import EventData
from mcfauc.model.errors import HorizonError
from tests.helpers import record, simulated_cohort


def _auc_influence(records, tau):
    data = EventData.from_records(records)
    return influence_auc(data, arm_estimators(data), tau)


class TestAucInfluence:
    def test_hand_example(self):
        influence = _auc_influence([record("A", events=(1.0,)), record("B")], 2.0)
        np.testing.assert_allclose(influence.p, [0.5, -0.5])
        np.testing.assert_allclose(influence.q, [0.0, 0.0])
        np.testing.assert_allclose(influence.psi, [0.5, -0.5])

    def test_no_deaths_gives_zero_q(self, rng):
        records = [
            record(f"s{i}", followup=2.0, events=tuple(np.unique(rng.uniform(0, 2, size=3))))
            for i in range(20)
        ]
        assert np.all(_auc_influence(records, 1.5).q == 0.0)

    def test_psi_sums_to_zero(self, case1_cohort):
        for arm in (0, 1):
            data = case1_cohort.event_data(arm)
            influence = influence_auc(data, arm_estimators(data), 1.5, arm=arm)
            assert abs(influence.p.sum()) <= 1e-10 * np.abs(influence.p).sum()
            assert abs(influence.q.sum()) <= 1e-10 * max(np.abs(influence.q).sum(), 1.0)
            assert influence.arm == arm

    def test_time_rescaling(self, case1_cohort):
        # Stretching time by c scales the area, and therefore psi, by c.
        data = case1_cohort.event_data(0)
        stretched = EventData(data.followup * 3.0, data.terminal, data.event_times * 3.0, data.event_owner)
        base = influence_auc(data, arm_estimators(data), 1.5)
        scaled = influence_auc(stretched, arm_estimators(stretched), 4.5)
        np.testing.assert_allclose(scaled.psi, 3.0 * base.psi, rtol=1e-9, atol=1e-12)

    def test_mismatched_estimators(self, small_cohort):
        with pytest.raises(ValueError, match="not built from these records"):
            influence_auc(small_cohort.event_data(0), arm_estimators(small_cohort.event_data(1)), 2.0)

    def test_to_frame(self):
        influence = InfluenceSet(arm=1, tau=2.0, p=[0.5, -0.5], q=[0.0, 0.0])
        frame = influence.to_frame(ids=["A", "B"])
        assert list(frame.columns) == ["id", "arm", "P", "Q", "psi"]
        assert frame["psi"].tolist() == [0.5, -0.5]
        assert influence.second_moment() == pytest.approx(0.25)


class TestRmstInfluence:
    def test_hand_example(self):
        records = [record("A", followup=1.0, terminal=1), record("B", followup=2.0)]
        data = EventData.from_records(records)
        influence = influence_rmst(data, kaplan_meier(data), 2.0)
        np.testing.assert_allclose(influence.psi, [-0.25, 0.25])
        np.testing.assert_allclose(influence.p, [0.0, 0.0])

    def test_no_deaths(self):
        data = EventData.from_records([record("A", followup=1.0), record("B", followup=2.0)])
        assert np.all(influence_rmst(data, kaplan_meier(data), 1.0).psi == 0.0)

    @pytest.mark.parametrize("case", [1, 2])
    @pytest.mark.parametrize("weight", ["survival", "at_risk"])
    def test_sums_to_zero_on_simulated_arms(self, case, weight):
        cohort = simulated_cohort(case=case, theta=0.3, n=400, seed=5, endpoint="rmst")
        for arm in (0, 1):
            data = cohort.event_data(arm)
            psi = influence_rmst(data, kaplan_meier(data), 5.0, weight=weight).psi
            assert np.count_nonzero(psi) > 0
            assert abs(psi.sum()) <= 1e-10 * max(1.0, np.abs(psi).sum())

    def test_survival_vanishes(self):
        data = EventData.from_records([record("A", followup=1.0, terminal=1), record("B", followup=2.0)])
        survival = StepFunction(np.array([0.5]), np.array([0.0]), "cumulative", 1.0)
        with pytest.raises(HorizonError, match="survival vanished before horizon"):
            influence_rmst(data, survival, 2.0)

    def test_at_risk_weight_without_censoring_matches_survival_weight(self, rng):
        deaths = rng.exponential(1.0, size=50)
        data = EventData.from_records([record(f"s{i}", followup=float(d), terminal=1) for i, d in enumerate(deaths)])
        tau = float(np.quantile(deaths, 0.5))
        survival = kaplan_meier(data)
        np.testing.assert_allclose(
            influence_rmst(data, survival, tau, weight="at_risk").psi,
            influence_rmst(data, survival, tau).psi,
            atol=1e-12,
        )


def test_jackknife_small_arm():
    records = [record("A", events=(1.0,)), record("B"), record("C", events=(0.5, 1.5))]
    se = jackknife_se(records, 2.0)
    assert se > 0
    with pytest.raises(ValueError, match="at least two"):
        jackknife_se(records[:1], 2.0)


@pytest.mark.slow
def test_influence_se_agrees_with_jackknife():
    agreements = 0
    for seed in range(50):
        data = simulated_cohort(case=1, theta=0.0, n=1000, seed=seed).event_data(0)
        est = arm_estimators(data)
        influence = influence_auc(data, est, 1.8)
        plug_in = np.sqrt(influence.second_moment() / data.n)
        jackknife = jackknife_se(data, 1.8)
        assert auc(est, 1.8) > 0
        if abs(plug_in - jackknife) <= 0.10 * jackknife:
            agreements += 1
    assert agreements >= 45
