# tests/test_acceptance.py

"""End-to-end physics checks at CI sizes; run with `pytest -m slow`."""

import numpy as np
import pytest

from quasichaos.pipeline.config_loader import parse_config
from quasichaos.pipeline.run_pipeline import compute
from quasichaos.pipeline.sweep import SweepRunner

pytestmark = pytest.mark.slow

FLOQUET = {"n_steps": 512, "n_times": 64}


def ci_config(**sections):
    return parse_config({"floquet": FLOQUET, **sections}).resolved("ci", 0)


def run(experiment, config, options=None):
    result = compute(experiment, config, SweepRunner(workers=4), options)
    assert result.failures == []
    return result


def test_level_statistics_separate_driven_from_undriven():
    result = run("level-stats", ci_config(drive={"eps_tilde": 0.5}))
    driven, undriven = result.summary["driven"], result.summary["undriven"]
    assert result.summary["ng_samples"] == 50
    assert driven["ks_wigner_dyson"] < driven["ks_poisson"]
    assert undriven["ks_poisson"] < undriven["ks_wigner_dyson"]


def test_parity_selection_rule_at_half_integer_charge():
    symmetric = run("rates", ci_config(transmon={"hbar_eff_inv": 3.0, "ng": 0.5}, drive={"eps_tilde": 0.4}))
    assert symmetric.summary["max_mixing_low_states"] < 1e-6
    assert "parity" in symmetric.tables

    generic = run("rates", ci_config(transmon={"hbar_eff_inv": 3.0, "ng": 0.25}, drive={"eps_tilde": 0.4}))
    assert generic.summary["max_mixing_low_states"] > 1e-3


def test_steady_state_thermal_without_drive_and_plateau_with_drive():
    undriven = run("steady-state", ci_config(drive={"eps_tilde": 0.0}))
    assert undriven.summary["boltzmann"]["log_residual"] < 0.05
    assert undriven.summary["window_population_ratio"] > 1e8

    driven = run("steady-state", ci_config(drive={"eps_tilde": 0.4}))
    assert driven.summary["window_population_ratio"] < 1e2


def test_drive_enhances_charge_dispersion():
    config = ci_config(dispersion={"eps_tilde": 0.4, "level": 1, "hbar_eff_inv_scan": [2.0, 3.0, 4.0, 5.0]})
    result = run("dispersion", config)
    summary = result.summary
    assert summary["dispersion_ratio"] >= 10.0
    assert summary["scaling"]["undriven_r_squared"] > 0.98
    assert summary["scaling"]["undriven_slope"] < 0
    assert summary["t5_over_t1"] >= 10.0 * summary["t5_over_t1_undriven"]


def test_ionization_thresholds_of_ground_and_first_excited_states():
    config = ci_config(
        transmon={"hbar_eff_inv": 3.0, "ng": 0.13},
        sweep={"eps_tilde_start": 0.0, "eps_tilde_stop": 1.3, "eps_tilde_step": 0.005},
    )
    thresholds = run("floquet-sweep", config).summary["ionization_eps_tilde"]
    assert thresholds["first_excited"] == pytest.approx(0.75, abs=0.1)
    assert thresholds["ground"] == pytest.approx(1.1, abs=0.1)


def test_joint_grid_purity_below_and_above_threshold():
    config = ci_config(cqed={"amplitudes_eps_tilde": [0.1, 0.95], "g_GHz": 0.25, "kappa_MHz": 1.0})
    result = run("cqed-grid", config)
    assert result.summary["vacuum_weight"]["0.1"] > 0.9

    grid = result.tables["grid"]
    strong = grid[grid["eps_tilde"] == 0.95]
    assert strong["purity"].min() < 0.5
    regular = strong[(strong["Nt_avg"] < 1.5) & (strong["Nr_avg"] < 1.5)]
    assert not regular.empty
    assert (regular["purity"] > 0.9).all()


def test_cavity_pull_matches_perturbative_shift_at_weak_coupling():
    config = ci_config(cqed={"amplitudes_eps_tilde": [0.0, 0.1], "g_GHz": 0.025})
    table = run("cavity-pull", config).tables["pull"]
    regular = table[(table["Nt_avg"] < 1.5) & (table["chi_divergent"] == 0)]
    assert len(regular) >= 2
    assert np.allclose(regular["pull_MHz"], regular["chi_MHz"], rtol=0.05)


def test_ground_state_dipole_grows_across_ionization():
    result = run("dipole-stats", ci_config(sweep={"eps_tilde": [0.5, 1.3]}), {"M": 25})
    summary = result.summary
    assert summary["rmt_prediction"] == pytest.approx(np.sqrt(25 / 12), abs=1e-12)
    ground = summary["ground_offdiag"]
    assert ground["1.3"] >= 3.0 * ground["0.5"]
