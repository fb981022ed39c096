# tests/test_cqed.py

import math

import numpy as np
import pytest

from quasichaos.core.errors import InvalidParameterError, ResourceGuardError
from quasichaos.core.models import CqedGridPoint, CqedParams, MatrixElementTensor
from quasichaos.core.units import angular_to_ghz, ghz_to_angular, mhz_to_angular
from quasichaos.physics.cqed import (
    annihilation,
    branch_pulls,
    cavity_pull_spectroscopy,
    cqed_floquet,
    critical_photon_number,
    dipole_statistics,
    drive_scan,
    grid,
    grid_frame,
    joint_hamiltonian,
    mean_field_excitations,
    perturbative_pull,
    resonator_bath,
    resonator_charge,
    resonator_elements,
    resonator_rates_and_steady_state,
    transmon_eigenbasis,
    undriven_spectrum_folded,
)
from quasichaos.physics.dissipation import matrix_elements
from quasichaos.physics.floquet import floquet_solve

OMEGA_A = ghz_to_angular(6.0)


def cqed(transmon, g=0.0, kappa=0.0, dims=(20, 10)) -> CqedParams:
    return CqedParams(transmon=transmon, omega_a=OMEGA_A, g=g, kappa=kappa, dims=dims)


def test_annihilation_number_operator():
    a = annihilation(6)
    assert np.allclose(a.T @ a, np.diag(np.arange(6.0)))


def test_transmon_eigenbasis(transmon):
    energies, n_matrix = transmon_eigenbasis(transmon, 20)
    assert energies[0] == 0.0
    assert np.all(np.diff(energies) > 0)
    assert np.allclose(n_matrix, n_matrix.T)
    # charge parity at n_g = 0 forbids 0-0 and 0-2 elements
    assert abs(n_matrix[0, 0]) < 1e-10 and abs(n_matrix[0, 2]) < 1e-10
    assert abs(n_matrix[0, 1]) > 0.1


def test_joint_operators_are_hermitian(transmon):
    params = cqed(transmon.with_drive(1.0), g=ghz_to_angular(0.1))
    ham = joint_hamiltonian(params)
    assert ham.static.shape == (200, 200)
    assert np.allclose(ham.static, ham.static.conj().T)
    assert np.allclose(ham.drive, ham.drive.conj().T)
    assert ham.eps == 1.0
    charge = resonator_charge(params)
    assert np.allclose(charge, charge.conj().T)


def test_cqed_params_validation(transmon):
    with pytest.raises(InvalidParameterError):
        cqed(transmon, dims=(10, 10))
    with pytest.raises(InvalidParameterError):
        cqed(transmon, g=-1.0)
    with pytest.raises(InvalidParameterError):
        CqedParams(transmon=transmon, omega_a=0.0, g=0.0)


def test_dimension_guard(transmon):
    with pytest.raises(ResourceGuardError):
        cqed_floquet(cqed(transmon, dims=(35, 40)))


def test_detuning_guard(transmon):
    kappa = mhz_to_angular(1.0)
    params = CqedParams(transmon=transmon, omega_a=transmon.omega_d + 5.0 * kappa, g=0.0, kappa=kappa)
    with pytest.raises(InvalidParameterError):
        cqed_floquet(params, n_steps=256)


@pytest.fixture(scope="module")
def uncoupled(transmon):
    params = cqed(transmon, kappa=mhz_to_angular(1.0))
    return params, cqed_floquet(params, n_steps=256, n_times=32)


def test_uncoupled_grid_is_integer_rectangle(uncoupled):
    params, solution = uncoupled
    points = grid(solution, params.dims)
    nt = np.array([p.Nt_avg for p in points])
    nr = np.array([p.Nr_avg for p in points])
    assert np.allclose(nt, np.round(nt), atol=1e-10)
    assert np.allclose(nr, np.round(nr), atol=1e-10)
    pairs = {(int(round(a)), int(round(b))) for a, b in zip(nt, nr)}
    assert pairs == {(a, b) for a in range(20) for b in range(10)}
    assert min(p.purity for p in points) > 1.0 - 1e-10

    top = [p for p in points if round(p.Nr_avg) == 9]
    assert all(p.comm_error == pytest.approx(10.0) for p in top)

    frame = grid_frame(points)
    assert list(frame.columns) == ["mode", "Nt_avg", "Nr_avg", "purity", "steady_pop", "comm_error"]


def test_uncoupled_steady_state_stays_in_vacuum_row(uncoupled):
    params, solution = uncoupled
    result = resonator_rates_and_steady_state(solution, params)
    assert result.steady.residual < 1e-10
    assert result.rates.total.shape == (200, 200)
    assert np.all(result.steady.populations >= 0)
    assert result.steady.populations.sum() == pytest.approx(1.0)
    assert result.Nr_mean == pytest.approx(0.0, abs=1e-9)


def test_drive_scan_without_drive(transmon):
    params = cqed(transmon, kappa=mhz_to_angular(1.0))
    table = drive_scan(params, [0.0], n_steps=256, n_times=32)
    assert list(table.columns) == ["eps_d", "Nr_mean", "Nt_mean", "n_occ", "vacuum_weight"]
    assert table["Nr_mean"].iloc[0] == pytest.approx(0.0, abs=1e-9)
    assert 0.0 <= table["vacuum_weight"].iloc[0] <= 1.0


def test_resonator_rates_need_kappa(transmon, uncoupled):
    _, solution = uncoupled
    with pytest.raises(InvalidParameterError):
        resonator_rates_and_steady_state(solution, cqed(transmon))


def test_resonator_bath(transmon):
    bath = resonator_bath(cqed(transmon, kappa=0.01))
    assert bath.temperature_K == 0.0
    assert bath.omega_ref == OMEGA_A
    assert bath.omega_c == pytest.approx(10.0 * OMEGA_A)
    assert bath.prefactor == pytest.approx(0.02)


def test_cavity_pull_picks_strongest_absorption_line():
    values = np.zeros((2, 2, 3), dtype=complex)
    values[0, 1, 1] = 0.5
    elements = MatrixElementTensor(
        values=values, K=1, n_times=4, quasienergies=np.array([0.0, 1.1]), omega_d=10.0
    )
    points = [
        CqedGridPoint(mode=0, Nt_avg=0.0, Nr_avg=0.1, purity=0.99),
        CqedGridPoint(mode=1, Nt_avg=3.0, Nr_avg=0.1, purity=0.5),
    ]
    records = cavity_pull_spectroscopy(points, elements, omega_a=1.0)
    assert len(records) == 1
    record = records[0]
    assert record.state == 0 and record.partner == 1 and record.k == 0
    assert record.pull == pytest.approx(0.1)
    assert record.weight == pytest.approx(0.25)


def test_cavity_pull_without_vacuum_modes_is_empty():
    values = np.zeros((1, 1, 1), dtype=complex)
    elements = MatrixElementTensor(values=values, K=0, n_times=4, quasienergies=np.zeros(1), omega_d=1.0)
    points = [CqedGridPoint(mode=0, Nt_avg=0.0, Nr_avg=2.0, purity=0.99)]
    assert cavity_pull_spectroscopy(points, elements, omega_a=1.0) == []


def two_level_elements():
    values = np.zeros((2, 2, 1), dtype=complex)
    values[0, 1, 0] = values[1, 0, 0] = 1.0
    return MatrixElementTensor(values=values, K=0, n_times=4, quasienergies=np.array([0.0, 2.0]), omega_d=10.0)


def test_perturbative_pull_two_level():
    # level 1 sits above the resonator: the ground-state line is pushed down
    pull = perturbative_pull(two_level_elements(), g=0.1, omega_a=1.0)
    expected = 0.01 * (1.0 / (1.0 - 2.0) - 1.0 / (1.0 + 2.0))
    assert pull.chi[0] == pytest.approx(expected)
    assert pull.chi[0] < 0
    assert pull.chi[1] == pytest.approx(-expected)
    assert not pull.divergent.any()


def test_perturbative_pull_matches_full_simulation(transmon, basis, fast):
    qubit = transmon.with_ng(0.25)
    params = CqedParams(transmon=qubit, omega_a=ghz_to_angular(8.0), g=mhz_to_angular(25.0), dims=(20, 12))
    solution = cqed_floquet(params, **fast)
    records = cavity_pull_spectroscopy(grid(solution, params.dims), resonator_elements(solution, params), params.omega_a)
    ground = next(r for r in records if round(r.Nt_avg) == 0)

    single = floquet_solve(qubit, basis, **fast).sorted_by_mean_energy()
    chi = perturbative_pull(matrix_elements(single), params.g, params.omega_a).chi[0]
    assert ground.pull > 0
    assert chi == pytest.approx(ground.pull, rel=0.02)


def test_perturbative_pull_flags_resonance():
    pull = perturbative_pull(two_level_elements(), g=0.1, omega_a=2.0)
    assert pull.divergent.all()


def test_folded_spectrum_linewidths(transmon):
    kappa = mhz_to_angular(1.0)
    spectrum = undriven_spectrum_folded(cqed(transmon, kappa=kappa))
    assert np.allclose(-2.0 * spectrum.energies.imag, kappa * spectrum.Nr, atol=1e-12)
    assert np.all(spectrum.folded >= -0.5 * OMEGA_A) and np.all(spectrum.folded < 0.5 * OMEGA_A)
    assert spectrum.keep.all()


def test_uncoupled_branch_pulls_vanish(transmon):
    params = cqed(transmon)
    spectrum = undriven_spectrum_folded(params)
    partners, pulls = branch_pulls(spectrum, params)
    below_top = np.round(spectrum.Nr) < params.dims[1] - 1
    assert np.allclose(pulls[below_top], 0.0, atol=1e-9)
    assert np.allclose(spectrum.Nr[partners][below_top], spectrum.Nr[below_top] + 1)


def test_mean_field_without_photons_gives_bare_levels(transmon, fast):
    nt = mean_field_excitations(transmon, ghz_to_angular(0.1), [0.0], **fast)
    assert nt.shape[0] == 1
    assert np.allclose(nt[0, :10], np.arange(10), atol=1e-8)


def test_dipole_statistics_references():
    stats = dipole_statistics(np.ones((30, 30)), 25)
    assert stats.rmt_prediction == pytest.approx(1.44338, abs=1e-5)
    assert stats.projector_mean == pytest.approx(1.44222, abs=1e-5)
    assert stats.projector_norm_squared == pytest.approx(1300.0)
    assert np.allclose(stats.per_state, 1.0)
    assert np.allclose(stats.per_state_offdiag, 1.0)


def test_dipole_statistics_from_tensor():
    values = np.zeros((3, 3, 3), dtype=complex)
    values[0, 1, :] = [0.6, 0.0, 0.8]
    values[1, 0, :] = [0.8, 0.0, 0.6]
    elements = MatrixElementTensor(values=values, K=1, n_times=4, quasienergies=np.zeros(3), omega_d=1.0)
    stats = dipole_statistics(elements, 2)
    assert np.allclose(stats.per_state, math.sqrt(0.5))
    assert np.allclose(stats.per_state_offdiag, 1.0)


def test_dipole_statistics_range():
    with pytest.raises(InvalidParameterError):
        dipole_statistics(np.ones((4, 4)), 1)
    with pytest.raises(InvalidParameterError):
        dipole_statistics(np.ones((4, 4)), 5)


def test_critical_photon_number_reference_inputs():
    result = critical_photon_number(ghz_to_angular(0.25), ghz_to_angular(7.5), 12)
    assert angular_to_ghz(result.g_eff) == pytest.approx(0.5)
    assert angular_to_ghz(result.delta_eff) == pytest.approx(0.625)
    assert result.n_crit == pytest.approx(1.5625)
    assert result.n_crit_shifted == pytest.approx(0.5625)
    # balance condition g_eff √n_crit = δ_eff
    assert result.g_eff * math.sqrt(result.n_crit) == pytest.approx(result.delta_eff)


def test_critical_photon_number_scaling():
    base = critical_photon_number(1.0, 40.0, 12).n_crit
    weaker = critical_photon_number(1.0 / math.sqrt(6.0), 40.0, 12).n_crit
    assert weaker / base == pytest.approx(6.0)
    assert critical_photon_number(1.0, 40.0, 24).n_crit == pytest.approx(base / 8.0)


def test_critical_photon_number_validation():
    with pytest.raises(InvalidParameterError):
        critical_photon_number(1.0, 40.0, 0)
    with pytest.raises(InvalidParameterError):
        critical_photon_number(0.0, 40.0, 12)
