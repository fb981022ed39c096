# tests/test_services.py

import numpy as np
import pytest

from quasichaos.pipeline.config_loader import parse_config
from quasichaos.pipeline.run_pipeline import compute
from quasichaos.pipeline.sweep import SweepRunner

SMALL = {"basis": {"cutoff": 10}, "floquet": {"n_steps": 256, "n_times": 32}}


def small_config(**sections):
    return parse_config({**SMALL, **sections}).resolved("ci", 0)


def test_poincare_section_rows():
    config = small_config(
        drive={"eps_tilde": 0.2},
        classical={"starts": 2, "n_periods": 100, "steps_per_period": 200},
    )
    result = compute("poincare", config, SweepRunner())
    section = result.tables["section"]
    assert len(section) == 2 * 100
    assert sorted(section["start_id"].unique()) == [0, 1]
    assert len(result.tables["starts"]) == 2
    assert result.summary["eps_tilde"] == pytest.approx(0.2)


def test_rates_at_symmetric_charge_include_parity():
    result = compute("rates", small_config(drive={"eps_tilde": 0.1}), SweepRunner())
    assert set(result.tables) == {"rates", "parity"}
    rates = result.tables["rates"]
    assert list(rates.columns[:4]) == ["i", "j", "gamma_even_k", "gamma_odd_k"]
    assert (rates[["gamma_even_k", "gamma_odd_k"]] >= 0).all().all()
    assert result.summary["nonzero_rates"] == len(rates)


def test_rates_away_from_symmetric_charge_skip_parity():
    result = compute("rates", small_config(transmon={"hbar_eff_inv": 3.0, "ng": 0.2}), SweepRunner())
    assert set(result.tables) == {"rates"}


def test_steady_state_populations_are_normalized():
    result = compute("steady-state", small_config(drive={"eps_tilde": 0.1}), SweepRunner())
    populations = result.tables["populations"]["population"]
    assert populations.sum() == pytest.approx(1.0)
    assert (populations >= 0).all()
    assert result.summary["residual"] < 1e-8


def test_husimi_of_ground_mode():
    result = compute("husimi", small_config(drive={"eps_tilde": 0.05}), SweepRunner())
    assert result.summary["state_index"] == 0
    assert result.summary["normalization"] == pytest.approx(1.0, abs=0.05)
    assert len(result.tables["husimi"]) == 201 * 201


def test_undriven_dispersion_ratio_is_one():
    config = small_config(dispersion={"eps_tilde": 0.0, "level": 1})
    result = compute("dispersion", config, SweepRunner())
    assert set(result.tables) == {"band", "fourier", "band_undriven", "fourier_undriven"}
    assert len(result.tables["band"]) == 65
    assert result.summary["dispersion_ratio"] == pytest.approx(1.0)
    assert np.allclose(result.tables["band"]["energy_GHz"], result.tables["band_undriven"]["energy_GHz"])


def test_undriven_folded_without_losses():
    config = small_config(cqed={"dims": [20, 10], "g_GHz": 0.1})
    result = compute("undriven-folded", config, SweepRunner())
    table = result.tables["folded"]
    assert len(table) == result.summary["states"]
    assert not result.summary["non_hermitian"]
    assert np.allclose(table["linewidth_MHz"], 0.0)


def test_dipole_stats_without_sweep():
    result = compute("dipole-stats", small_config(), SweepRunner(), {"M": 10})
    table = result.tables["dipole"]
    assert len(table) == 10
    assert (table["eps_tilde"] == 0.0).all()
    assert result.summary["M"] == 10
