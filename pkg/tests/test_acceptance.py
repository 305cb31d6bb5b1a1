"""Exit criteria. Each test records one PASS/FAIL line in the terminal summary."""

import json
from decimal import Decimal, getcontext

import numpy as np
import pytest

from eecpsim.election import analytic_avg_distance, elect_cluster_heads
from eecpsim.engine import run_round
from eecpsim.experiment import ExperimentSpec, compare, run_experiment, run_trials
from eecpsim.model import NetworkConfig, build_network, deploy_network
from eecpsim.radio import RadioParams, crossover_distance, tx_energy

TRIALS = 30
BASE_SEED = 1
# Above the energy bound: a lone 1 J gateway spending L*E_elec = 2e-5 J/round lasts at most 50,000
# rounds, so no milestone is censored.
HORIZON = 60_000


def acceptance_spec(out_dir) -> ExperimentSpec:
    return ExperimentSpec(
        base=NetworkConfig(max_rounds=HORIZON), trials=TRIALS, base_seed=BASE_SEED, output_dir=out_dir
    )


@pytest.fixture(scope="module")
def experiment(tmp_path_factory):
    out = tmp_path_factory.mktemp("acceptance")
    return run_experiment(acceptance_spec(out))


def _snapshot(directory):
    return {p.relative_to(directory).as_posix(): p.read_bytes() for p in sorted(directory.rglob("*")) if p.is_file()}


def test_c1_equation_oracles(criterion):
    p = RadioParams()
    getcontext().prec = 30
    checks = {
        "tx 50 m": abs(tx_energy(4000, 50, p) / 1.2e-4 - 1) < 1e-12,
        "tx 100 m": abs(tx_energy(4000, 100, p) / 5.4e-4 - 1) < 1e-12,
        "d0": abs(crossover_distance(p.eps_fs, p.eps_mp) - 87.7058) <= 1e-3,
        "d0 vs decimal": abs(crossover_distance(p.eps_fs, p.eps_mp)
                             - float((Decimal(10) / Decimal("0.0013")).sqrt())) < 1e-12,
    }
    a = analytic_avg_distance(100, 100, p.eps_fs, p.eps_mp)
    checks["d_to_bs"] = abs(a.d_to_bs / 38.25 - 1) <= 0.005
    checks["k"] = abs(a.k_opt / 23.92 - 1) <= 0.005
    checks["d_avg"] = abs(a.d_avg / 46.41 - 1) <= 0.005
    detail = f"k={a.k_opt:.4f} d_avg={a.d_avg:.4f} d0={p.d0:.5f}"
    ok = criterion("C1 equation oracles", all(checks.values()), detail)
    assert ok, {k: v for k, v in checks.items() if not v}


def test_c2_hand_oracle_round(criterion):
    cfg = NetworkConfig(n_nodes=4, gateway_fraction=0, bs_position=(50, 50), p_opt=0.25)
    state = build_network(cfg, [(50, 40), (50, 60), (30, 50), (70, 50)])
    spent = run_round(state, 40.0, heads={0}).energy_spent
    L, e, fs, da = 4000, 5e-9, 10e-12, 5e-9
    hand = [
        3 * (L * e) + da * L * 4 + (L * e + L * fs * 100),
        L * e + L * fs * 400,
        L * e + L * fs * 500,
        L * e + L * fs * 500,
    ]
    worst = max(abs(s / h - 1) for s, h in zip(spent, hand))
    assert criterion("C2 four-node hand oracle", worst <= 1e-15, f"max rel err {worst:.2e}")


def test_c3_energy_conservation(experiment, criterion):
    worst = 0.0
    for results in experiment.trials.values():
        assert len(results) == TRIALS
        for r in results:
            drop = r.initial_energy - r.final_energy
            worst = max(worst, abs(drop - r.spent_energy) / r.spent_energy)
    assert criterion("C3 energy conservation, 2x30 trials", worst <= 1e-9, f"max rel err {worst:.2e}")


def test_c4_election_statistics(criterion):
    cfg = NetworkConfig(protocol="leach_het", n_nodes=100, p_opt=0.1, max_rounds=30)
    counts = []
    epoch_ok = True
    for seed in range(1000):
        state = deploy_network(cfg, seed)
        seen_this_epoch = set()
        for r in range(30):
            if r % 10 == 0:
                seen_this_epoch = set()
            report = run_round(state, 40.0)
            if r == 0:
                counts.append(len(report.heads))
            if seen_this_epoch & set(report.heads):
                epoch_ok = False
            seen_this_epoch |= set(report.heads)
    mean = float(np.mean(counts))
    ok = 9 <= mean <= 11 and epoch_ok
    assert criterion("C4 election statistics", ok, f"mean CH count {mean:.3f}, epoch property {epoch_ok}")


def test_c5_threshold_scaling(criterion):
    n, reps, d_avg = 1000, 100, 40.0
    cfg = NetworkConfig(n_nodes=n, gateway_fraction=0, bs_position=(50, 50), protocol="eecp")
    freqs = {}
    for label, radius in (("half", d_avg / 2), ("zero", 0.0)):
        angles = np.linspace(0, 2 * np.pi, n, endpoint=False)
        pos = np.column_stack([50 + radius * np.cos(angles), 50 + radius * np.sin(angles)])
        state = build_network(cfg, pos, seed=17)
        hits = 0
        for _ in range(reps):
            state.round = 0
            state.epoch_elected[:] = False
            hits += len(elect_cluster_heads(state, d_avg))
        freqs[label] = hits / (n * reps)
    ok = abs(freqs["half"] / 0.05 - 1) <= 0.10 and abs(freqs["zero"] / 0.10 - 1) <= 0.10
    assert criterion("C5 threshold scaling", ok, f"freq(D_avg/2)={freqs['half']:.4f} freq(0)={freqs['zero']:.4f}")


def _fmt_cmp(c):
    return ", ".join(
        f"{k}: {v['mean_a']:.1f} vs {v['mean_b']:.1f} (d={v['paired_cohens_d'] if v['paired_cohens_d'] is None else round(v['paired_cohens_d'], 2)})"
        for k, v in c.items()
    )


def test_c6_directional_reproduction(experiment, criterion):
    out = experiment.spec.output_dir
    summary = json.loads((out / "summary.json").read_text())
    literal = summary["comparison_eecp_vs_leach_het"]
    directional = {
        "first dead later": literal["first"]["a_greater"],
        "last dead later": literal["last"]["a_greater"],
        "more packets": literal["packets_total"]["a_greater"],
    }
    criterion("C6a EECP (literal) vs LEACH-het", all(directional.values()), _fmt_cmp(literal))
    if all(directional.values()):
        return

    eecp = experiment.trials["eecp"]
    leach = experiment.trials["leach_het"]
    seeds = [experiment.spec.seed(i) for i in range(TRIALS)]
    base = experiment.spec.config_for("eecp")
    clamped = run_trials(base.replace(threshold_variant="clamped_scaling"), seeds)
    no_relay = run_trials(base.replace(relays=False), seeds)
    diagnostic = compare(clamped, leach)
    relay = compare(eecp, no_relay)
    diag_ok = all(diagnostic[k]["a_greater"] for k in ("first", "last", "packets_total"))
    criterion("C6b diagnostic: EECP (clamped scaling) vs LEACH-het", diag_ok, _fmt_cmp(diagnostic))
    relay_ok = relay["last"]["a_greater"]
    (out / "c6_diagnostics.json").write_text(
        json.dumps({"literal_vs_leach_het": literal, "clamped_vs_leach_het": diagnostic,
                    "relays_vs_no_relays": relay}, indent=2, sort_keys=True) + "\n"
    )
    criterion("C6c relays vs relay-disabled ablation (mean lifetime)", relay_ok, _fmt_cmp(relay))
    assert relay_ok, (
        "EECP literal fails the directional checks "
        f"{[k for k, v in directional.items() if not v]} and relays do not lengthen mean lifetime"
    )


def test_c7_determinism(experiment, criterion):
    out = experiment.spec.output_dir
    before = _snapshot(out)
    before.pop("c6_diagnostics.json", None)
    run_experiment(acceptance_spec(out))
    after = _snapshot(out)
    after.pop("c6_diagnostics.json", None)
    same = before == after
    n_csv = sum(k.endswith(".csv") for k in before)
    assert criterion("C7 byte-identical rerun", same, f"{len(before)} files, {n_csv} CSV")
