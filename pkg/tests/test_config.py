# tests/test_config.py

import pytest

from quasichaos.core.errors import ConfigError
from quasichaos.pipeline.config_loader import load_config, parse_config
from quasichaos.schemas.config import PRESETS, RunConfig


def test_defaults_without_a_file():
    config = load_config(None)
    assert config.transmon.hbar_eff_inv == 3.0
    assert config.basis.cutoff == 17
    assert config.floquet.n_steps == 1024 and config.floquet.n_times == 128
    assert config.sweep is None
    assert config.cqed.kappa_MHz == 1.0


@pytest.mark.parametrize("preset", ["ci", "paper"])
def test_presets_fill_omitted_sizes(preset):
    config = RunConfig().resolved(preset, seed=5)
    values = PRESETS[preset]
    assert config.preset == preset
    assert config.seed == 5
    assert config.cqed.dims == values["cqed_dims"]
    assert config.level_stats.ng_samples == values["ng_samples"]
    assert config.dispersion.ng_points == values["ng_points"]
    assert config.classical.n_periods == values["n_periods"]


def test_explicit_values_beat_presets():
    config = parse_config(
        {"preset": "paper", "seed": 11, "level_stats": {"ng_samples": 30}, "cqed": {"dims": [25, 15]}}
    ).resolved("ci", seed=0)
    assert config.preset == "paper"
    assert config.seed == 11
    assert config.level_stats.ng_samples == 30
    assert tuple(config.cqed.dims) == (25, 15)


@pytest.mark.parametrize(
    "data",
    [
        {"transmon": {"EC_GHz": 0.3, "hbar_eff_inv": 3.0}},
        {"transmon": {"EC_GHz": 0.3}},
        {"drive": {"amplitude_GHz": 0.1, "eps_tilde": 0.2}},
        {"drive": {"photons": 4.0}},
        {"floquet": {"n_times": 12, "n_steps": 1200}},
        {"floquet": {"n_times": 128, "n_steps": 1000}},
        {"floquet": {"n_steps": 128, "n_times": 32}},
        {"sweep": {"eps_tilde": []}},
        {"sweep": {"eps_tilde_start": 0.0, "eps_tilde_stop": 0.5}},
        {"sweep": {"eps_tilde_start": 0.5, "eps_tilde_stop": 0.1, "eps_tilde_step": 0.1}},
        {"cqed": {"dims": [10, 10]}},
        {"cqed": {"amplitudes_eps_tilde": []}},
        {"cqed": {"n_times": 16, "K": 8}},
        {"level_stats": {"window_lo": 2.5, "window_hi": 1.6}},
        {"transmon": {"hbar_eff_inv": 3.0, "colour": "blue"}},
        {"unknown_section": {}},
    ],
)
def test_invalid_configurations(data):
    with pytest.raises(ConfigError):
        parse_config(data)


def test_sweep_range_expands_inclusively():
    config = parse_config({"sweep": {"eps_tilde_start": 0.0, "eps_tilde_stop": 0.3, "eps_tilde_step": 0.1}})
    assert config.sweep.values() == pytest.approx([0.0, 0.1, 0.2, 0.3])


def test_absolute_transmon_units():
    config = parse_config({"transmon": {"EC_GHz": 0.3, "EJ_GHz": 21.6, "ng": 0.25}})
    assert config.transmon.is_absolute
    assert config.transmon.hbar_eff_inv is None


def test_non_mapping_document_is_rejected():
    with pytest.raises(ConfigError):
        parse_config([1, 2, 3])


def test_yaml_file_round_trip(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("transmon:\n  hbar_eff_inv: 4.0\nsweep:\n  eps_tilde: [0.0, 0.1]\n", encoding="utf-8")
    config = load_config(path)
    assert config.transmon.hbar_eff_inv == 4.0
    assert config.sweep.values() == [0.0, 0.1]


def test_empty_yaml_file_means_defaults(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("", encoding="utf-8")
    assert load_config(path) == RunConfig()


def test_malformed_yaml_is_a_config_error(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("transmon: [unclosed\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(path)


def test_missing_file_is_a_config_error(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.yaml")
