# tests/test_dissipation.py

import numpy as np
import pytest

from quasichaos.core.errors import AliasingError, InvalidParameterError
from quasichaos.core.models import BathSpec, MatrixElementTensor, NoiseSpec, RateMatrix
from quasichaos.core.units import mk_to_kelvin
from quasichaos.physics.dissipation import (
    boltzmann_fit,
    bose_occupation,
    channel_mixing,
    dephasing_rate,
    generator,
    matrix_elements,
    rates,
    spectral_density,
    steady_state,
    thermal_ratio,
)
from quasichaos.physics.floquet import floquet_solve
from quasichaos.physics.model import charge_operator


@pytest.fixture(scope="module")
def sorted_undriven(undriven_solution):
    return undriven_solution.sorted_by_mean_energy()


def test_undriven_elements_carry_one_harmonic_per_pair(sorted_undriven, basis):
    elements = matrix_elements(sorted_undriven)
    assert elements.K == 8
    assert elements.values.shape == (35, 35, 17)
    Z = sorted_undriven.modes0
    assert np.allclose(elements.time_zero(), Z.conj().T @ charge_operator(basis) @ Z, atol=1e-10)

    low = np.abs(elements.values[:6, :6, :]) > 1e-9
    assert np.all(low.sum(axis=2) <= 1)


def test_undriven_transition_energies_are_level_gaps(sorted_undriven):
    elements = matrix_elements(sorted_undriven)
    k = np.argmax(np.abs(elements.values[0, 1, :]))
    gap = sorted_undriven.mean_energy[1] - sorted_undriven.mean_energy[0]
    assert elements.transition_energies()[0, 1, k] == pytest.approx(gap, rel=1e-9)


def test_matrix_elements_need_power_of_two_samples(transmon, small_basis):
    solution = floquet_solve(transmon, small_basis, n_steps=288, n_times=12)
    with pytest.raises(InvalidParameterError):
        matrix_elements(solution)


def test_matrix_elements_need_enough_samples_for_K(undriven_solution):
    with pytest.raises(InvalidParameterError):
        matrix_elements(undriven_solution, K=9)


def test_matrix_elements_detect_aliasing(transmon, small_basis, omega_p):
    solution = floquet_solve(transmon.with_drive(0.4 * omega_p), small_basis, n_steps=256, n_times=4)
    with pytest.raises(AliasingError):
        matrix_elements(solution)


def test_spectral_density_normalization():
    bath = BathSpec(temperature_K=0.0, omega_c=100.0, omega_ref=30.0, prefactor=2.5)
    assert spectral_density(bath, np.array([30.0]))[0] == pytest.approx(2.5)
    assert spectral_density(bath, np.array([0.0]))[0] == 0.0
    assert spectral_density(bath, np.array([-30.0]))[0] == pytest.approx(2.5)


def test_bose_occupation():
    cold = BathSpec(temperature_K=0.0, omega_c=1.0, omega_ref=1.0)
    assert np.all(bose_occupation(cold, np.array([1.0, 10.0])) == 0.0)
    warm = BathSpec(temperature_K=mk_to_kelvin(50.0), omega_c=1.0, omega_ref=1.0)
    occupation = bose_occupation(warm, np.array([-1.0, 0.0, 10.0, 40.0]))
    assert occupation[0] == 0.0 and occupation[1] == 0.0
    assert occupation[2] > occupation[3] > 0


def test_bath_validation():
    with pytest.raises(InvalidParameterError):
        BathSpec(temperature_K=-1.0, omega_c=1.0, omega_ref=1.0)
    with pytest.raises(InvalidParameterError):
        BathSpec(temperature_K=0.0, omega_c=0.0, omega_ref=1.0)


def test_undriven_rates_obey_detailed_balance(sorted_undriven):
    elements = matrix_elements(sorted_undriven)
    gap = float(sorted_undriven.mean_energy[1] - sorted_undriven.mean_energy[0])
    bath = BathSpec(temperature_K=mk_to_kelvin(50.0), omega_c=10.0 * gap, omega_ref=gap)
    gamma = rates(elements, bath)
    assert np.all(np.diagonal(gamma.total) == 0)
    assert np.all(gamma.total >= 0)
    assert gamma.total[1, 0] / gamma.total[0, 1] == pytest.approx(thermal_ratio(bath, gap), rel=1e-6)


def test_zero_temperature_rates_only_go_down(sorted_undriven):
    elements = matrix_elements(sorted_undriven)
    gap = float(sorted_undriven.mean_energy[1] - sorted_undriven.mean_energy[0])
    bath = BathSpec(temperature_K=0.0, omega_c=10.0 * gap, omega_ref=gap)
    gamma = rates(elements, bath)
    assert gamma.total[0, 1] > 0
    assert gamma.total[1, 0] == pytest.approx(0.0, abs=1e-12 * gamma.total[0, 1])
    assert np.allclose(gamma.total, gamma.even + gamma.odd)


def test_rate_frame_columns():
    total = np.array([[0.0, 1.0], [0.5, 0.0]])
    frame = RateMatrix(total=total, even=total, odd=np.zeros((2, 2))).to_frame()
    assert list(frame.columns) == ["i", "j", "gamma_even_k", "gamma_odd_k"]
    assert len(frame) == 2


def test_channel_mixing():
    even = np.array([[0.0, 1.0], [2.0, 0.0]])
    odd = np.array([[0.0, 0.5], [0.0, 0.0]])
    mixing = channel_mixing(RateMatrix(total=even + odd, even=even, odd=odd))
    assert np.allclose(mixing, [[0.0, 0.5], [0.0, 0.0]])


def test_generator_conserves_probability():
    total = np.array([[9.0, 1.0, 0.2], [0.3, 0.0, 0.7], [0.5, 2.0, 0.0]])
    L = generator(total)
    assert np.allclose(L.sum(axis=0), 0.0)
    assert L[0, 1] == 1.0


def test_two_state_steady_state():
    a, b = 0.3, 1.7
    total = np.array([[0.0, b], [a, 0.0]])
    state = steady_state(total)
    assert np.allclose(state.populations, np.array([b, a]) / (a + b))
    assert state.unique
    assert state.residual < 1e-10


def test_disconnected_components_share_weight_equally():
    total = np.zeros((4, 4))
    total[0, 1] = total[1, 0] = 1.0
    total[2, 3] = 2.0
    total[3, 2] = 2.0
    state = steady_state(total)
    assert not state.unique
    assert np.allclose(state.populations, 0.25)
    assert len(state.components) == 2


def test_absorbing_state_collects_everything():
    total = np.array([[0.0, 1.0], [0.0, 0.0]])
    state = steady_state(total)
    assert np.allclose(state.populations, [1.0, 0.0])


def test_reducible_component_falls_back_to_null_space():
    total = np.zeros((3, 3))
    total[1, 0] = 1.0  # 0 -> 1
    total[1, 2] = 3.0  # 2 -> 1
    state = steady_state(total)
    assert np.allclose(state.populations, [0.0, 1.0, 0.0])
    assert state.unique


def test_steady_state_rejects_negative_rates():
    with pytest.raises(InvalidParameterError):
        steady_state(np.array([[0.0, -1.0], [1.0, 0.0]]))


def test_boltzmann_fit_recovers_beta():
    energies = np.array([0.0, 1.0, 2.0, 3.0])
    populations = np.exp(-2.0 * energies)
    populations /= populations.sum()
    fit = boltzmann_fit(energies, populations)
    assert fit.beta == pytest.approx(2.0)
    assert fit.log_residual < 1e-10


def test_boltzmann_fit_needs_two_populated_states():
    with pytest.raises(InvalidParameterError):
        boltzmann_fit(np.array([0.0, 1.0]), np.array([1.0, 0.0]))


def synthetic_elements(omega_d=10.0):
    values = np.zeros((2, 2, 3), dtype=complex)
    values[1, 1, :] = [0.1, 0.5, 0.1]
    values[0, 0, :] = [0.0, 0.2, 0.0]
    return MatrixElementTensor(values=values, K=1, n_times=4, quasienergies=np.array([0.0, 1.0]), omega_d=omega_d)


def test_dephasing_one_over_f_term():
    noise = NoiseSpec(A_e=1e-4, log_factor=4.0)
    rate = dephasing_rate(synthetic_elements(), noise)
    # g_0 = 0.5 - 0.2
    assert rate.one_over_f == pytest.approx(1e-4 * 2.0 * 0.3 * 4.0)
    assert rate.dielectric == 0.0
    assert rate.gamma_phi == pytest.approx(rate.one_over_f)


def test_dephasing_dielectric_term_at_zero_temperature():
    bath = BathSpec(temperature_K=0.0, omega_c=100.0, omega_ref=10.0)
    noise = NoiseSpec(A_e=0.0, dielectric_scale=1e-3, bath=bath)
    rate = dephasing_rate(synthetic_elements(omega_d=10.0), noise, confident=False)
    # only k = +1 absorbs into a cold bath
    assert rate.dielectric == pytest.approx(2.0 * 1e-3 * 1.0 * 0.1**2)
    assert not rate.confident


def test_thermal_ratio_limits():
    cold = BathSpec(temperature_K=0.0, omega_c=1.0, omega_ref=1.0)
    assert thermal_ratio(cold, 30.0) == 0.0
    hot = BathSpec(temperature_K=100.0, omega_c=1.0, omega_ref=1.0)
    assert thermal_ratio(hot, 1e-3) == pytest.approx(1.0, abs=1e-3)


def test_one_over_f_term_does_not_depend_on_charging_energy():
    values = np.zeros((2, 2, 1), dtype=complex)
    values[1, 1, 0] = 0.1
    elements = MatrixElementTensor(values=values, K=0, n_times=4, quasienergies=np.array([0.0, 1.0]), omega_d=10.0)
    rate = dephasing_rate(elements, NoiseSpec(A_e=1e-4, log_factor=4.0))
    assert rate.one_over_f == pytest.approx(8e-5)
    assert rate.dielectric == 0.0
