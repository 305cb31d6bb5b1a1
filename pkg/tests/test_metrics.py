import numpy as np
import pytest
from hypothesis import given, strategies as st

from eecpsim.engine import ClusterAssignment, RoundReport, SimulationTrace, run_simulation
from eecpsim.metrics import (
    LifetimeMilestones,
    TrialResult,
    aggregate_trials,
    lifetime_milestones,
    per_round_series,
)
from eecpsim.model import NetworkConfig


def fake_trace(n, deaths_at, rounds, heads_per_round=1, config=None):
    """Trace whose only content is when nodes die; deaths_at maps round -> count."""
    config = config or NetworkConfig(n_nodes=n, p_opt=1.0, max_rounds=max(rounds, 1))
    reports, dead, residual = [], 0, float(n)
    for r in range(rounds):
        k = deaths_at.get(r, 0)
        newly = tuple(range(dead, dead + k))
        dead += k
        residual -= 0.1 + k
        reports.append(
            RoundReport(
                round=r, heads=tuple(range(heads_per_round)), assignment=ClusterAssignment((), np.zeros(n, int)),
                relay_of=np.full(heads_per_round, -1), energy_spent=np.zeros(n), packets_to_bs=heads_per_round,
                deaths=newly, alive_after=n - dead, residual_energy=residual,
            )
        )
    return SimulationTrace(config, 0, 1.0, [], np.ones(n), np.zeros(n), reports)


class TestMilestones:
    def test_counting(self):
        m = lifetime_milestones(fake_trace(4, {3: 1, 7: 3}, 8))
        assert m == LifetimeMilestones(3, 7, 7)

    def test_censored(self):
        assert lifetime_milestones(fake_trace(4, {}, 10)) == LifetimeMilestones(None, None, None)

    def test_single_node(self):
        assert lifetime_milestones(fake_trace(1, {5: 1}, 6)) == LifetimeMilestones(5, 5, 5)

    def test_half_uses_ceiling(self):
        # 5 nodes: half-dead needs 3 deaths
        m = lifetime_milestones(fake_trace(5, {1: 2, 4: 1, 9: 2}, 10))
        assert m == LifetimeMilestones(1, 4, 9)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            lifetime_milestones(fake_trace(3, {}, 0))

    @given(st.dictionaries(st.integers(0, 49), st.integers(0, 3), max_size=20))
    def test_ordering(self, deaths):
        n = max(1, sum(deaths.values()))
        m = lifetime_milestones(fake_trace(n, deaths, 50))
        vals = [v for v in (m.first_dead_round, m.half_dead_round, m.last_dead_round) if v is not None]
        assert vals == sorted(vals)


class TestSeries:
    def test_single_round(self):
        t = fake_trace(10, {}, 1, heads_per_round=2)
        s = per_round_series(t)
        assert s.alive.tolist() == [10] and s.ch_count.tolist() == [2] and s.packets.tolist() == [2]

    def test_identities_on_real_trace(self):
        trace = run_simulation(NetworkConfig(n_nodes=30, initial_energy=0.02, max_rounds=5000), seed=1)
        s = per_round_series(trace)
        deaths = np.cumsum([len(r.deaths) for r in trace.reports])
        np.testing.assert_array_equal(s.alive, 30 - deaths)
        assert (np.diff(s.residual_j) <= 0).all()
        assert (np.diff(s.packets_cum) >= 0).all()
        assert s.packets.sum() == s.packets_cum[-1]
        s2 = per_round_series(trace)
        for name in ("alive", "ch_count", "packets", "packets_cum", "residual_j"):
            np.testing.assert_array_equal(getattr(s, name), getattr(s2, name))


class TestAggregate:
    def test_singleton(self):
        t = fake_trace(4, {3: 1, 7: 3}, 8)
        agg = aggregate_trials([t])
        s = per_round_series(t)
        np.testing.assert_array_equal(agg.mean.alive, s.alive)
        assert (agg.std.alive == 0).all() and (agg.std.residual_j == 0).all()

    def test_milestone_mean(self):
        cfg = NetworkConfig(n_nodes=2, p_opt=1.0, max_rounds=300)
        a = fake_trace(2, {100: 1, 250: 1}, 251, config=cfg)
        b = fake_trace(2, {200: 1, 260: 1}, 261, config=cfg)
        agg = aggregate_trials([a, b])
        assert agg.milestones["first"].mean == 150
        assert agg.milestones["first"].censored == 0

    def test_censored_trials_reported(self):
        cfg = NetworkConfig(n_nodes=2, p_opt=1.0, max_rounds=300)
        a = fake_trace(2, {100: 1, 250: 1}, 251, config=cfg)
        b = fake_trace(2, {200: 1}, 300, config=cfg)
        st_ = aggregate_trials([a, b]).milestones["last"]
        assert st_.mean == 250 and st_.censored == 1 and st_.restricted_mean == 275

    def test_ragged_padding(self):
        cfg = NetworkConfig(n_nodes=2, p_opt=1.0, max_rounds=100)
        short = fake_trace(2, {10: 1, 49: 1}, 50, config=cfg)
        long = fake_trace(2, {20: 2}, 100, config=cfg)
        agg = aggregate_trials([short, long])
        assert len(agg.mean) == 100
        s = per_round_series(short)
        l = per_round_series(long)
        # past round 49 the short trial contributes alive=0, no packets, held cumulative packets
        assert agg.mean.alive[75] == (0 + l.alive[75]) / 2
        assert agg.mean.packets[75] == (0 + l.packets[75]) / 2
        assert agg.mean.packets_cum[75] == (s.packets_cum[-1] + l.packets_cum[75]) / 2
        assert agg.mean.residual_j[99] == (s.residual_j[-1] + l.residual_j[99]) / 2

    def test_accepts_trial_results(self):
        t = fake_trace(4, {3: 4}, 5)
        a = aggregate_trials([TrialResult.from_trace(t)])
        b = aggregate_trials([t])
        np.testing.assert_array_equal(a.mean.alive, b.mean.alive)

    def test_rejects_mixed_configs(self):
        a = fake_trace(4, {}, 5)
        b = fake_trace(4, {}, 6)
        with pytest.raises(ValueError):
            aggregate_trials([a, b])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            aggregate_trials([])
