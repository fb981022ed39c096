# tests/test_dispersion.py

import math

import numpy as np
import pytest

from quasichaos.core.errors import InvalidParameterError
from quasichaos.core.models import BandCurve, MatrixElementTensor
from quasichaos.physics.dispersion import (
    band,
    chaotic_coupling,
    chaotic_coupling_ensemble,
    dispersion_scaling,
    flag_spikes,
    ng_band_grid,
    phase_slip_spectrum,
    tracked_level_energy,
)
from quasichaos.physics.model import static_spectrum


def cosine_band(a: float, b: float, points: int = 64) -> BandCurve:
    ng = ng_band_grid(points)
    energy = a + b * np.cos(2.0 * math.pi * ng)
    flags = np.zeros(len(ng), dtype=bool)
    return BandCurve(level=0, ng=ng, energy=energy, spike=flags, confident=~flags)


def test_band_grid_includes_both_ends():
    grid = ng_band_grid(64)
    assert len(grid) == 65
    assert grid[0] == -0.5 and grid[-1] == 0.5


def test_tracked_energy_without_drive_is_static(transmon, small_basis):
    energies, _ = static_spectrum(transmon.with_ng(0.2), small_basis, 3)
    value, confident = tracked_level_energy(transmon.with_ng(0.2), 2, small_basis)
    assert value == pytest.approx(energies[2])
    assert confident


def test_tracked_energy_under_weak_drive(transmon, small_basis, omega_p, fast):
    energies, _ = static_spectrum(transmon, small_basis, 2)
    value, confident = tracked_level_energy(transmon.with_drive(0.02 * omega_p), 1, small_basis, **fast)
    assert confident
    assert value == pytest.approx(energies[1], abs=0.01 * (energies[1] - energies[0]))


def test_undriven_band_is_symmetric(transmon, small_basis):
    ground = band(0, transmon, 64, small_basis)
    assert np.allclose(ground.energy, ground.energy[::-1], atol=1e-10)
    assert ground.confident.all()

    excited = band(1, transmon, 64, small_basis)
    assert excited.dispersion > ground.dispersion > 0

    frame = excited.to_frame()
    assert list(frame.columns) == ["ng", "energy", "spike_flag", "tracked_flag"]
    assert len(frame) == 65


def test_band_rejects_coarse_grids(transmon):
    with pytest.raises(InvalidParameterError):
        band(0, transmon, 63)
    with pytest.raises(InvalidParameterError):
        band(-1, transmon, 64)


def test_phase_slips_of_a_cosine_band():
    spectrum = phase_slip_spectrum(cosine_band(2.0, 0.3), n_max=4)
    by_n = dict(zip(spectrum.n.tolist(), spectrum.t))
    assert by_n[0] == pytest.approx(2.0)
    assert abs(by_n[1]) == pytest.approx(0.15)
    assert abs(by_n[-1]) == pytest.approx(0.15)
    assert abs(by_n[3]) < 1e-12
    assert spectrum.n_samples == 64


def test_phase_slip_reconstruction():
    curve = cosine_band(-1.0, 0.05)
    spectrum = phase_slip_spectrum(curve, n_max=32)
    assert np.allclose(spectrum.reconstruct(curve.ng), curve.energy, atol=1e-12)

    frame = spectrum.to_frame()
    assert list(frame.columns) == ["n", "abs_tn"]
    assert frame["n"].min() == 0


def test_phase_slip_order_limit():
    with pytest.raises(InvalidParameterError):
        phase_slip_spectrum(cosine_band(0.0, 1.0), n_max=33)


def test_spikes_are_flagged():
    energy = np.linspace(0.0, 0.64, 65)
    energy[30:] += 1.0
    spike = flag_spikes(energy)
    assert spike[30]
    assert spike.sum() == 1


def test_dispersion_scaling_slope():
    x = np.array([3.0, 4.0, 5.0, 6.0])
    fit = dispersion_scaling(np.exp(5.0 - 2.0 * x), x)
    assert fit.slope == pytest.approx(-2.0)
    assert fit.intercept == pytest.approx(5.0)
    assert fit.r_squared == pytest.approx(1.0)
    with pytest.raises(InvalidParameterError):
        dispersion_scaling([1.0], [3.0])


def coupling_elements(K: int = 1) -> MatrixElementTensor:
    values = np.zeros((3, 3, 2 * K + 1), dtype=complex)
    if K:
        values[0, :, K - 1] = [0.0, 1.0, 2.0]
        values[0, :, K] = [0.0, 0.0, 2.0]
    return MatrixElementTensor(values=values, K=K, n_times=4 * max(K, 1), quasienergies=np.zeros(3), omega_d=1.0)


def test_chaotic_coupling_curve():
    coupling = chaotic_coupling(coupling_elements(), 0, j_threshold=2)
    assert np.allclose(coupling.curve, [3.0, 3.0, 2.0 * math.sqrt(2.0)])
    assert coupling.value == pytest.approx(2.0 * math.sqrt(2.0))
    assert chaotic_coupling(coupling_elements(), 0).value is None


def test_chaotic_coupling_rejects_bad_inputs():
    with pytest.raises(InvalidParameterError):
        chaotic_coupling(coupling_elements(K=0), 0)
    with pytest.raises(InvalidParameterError):
        chaotic_coupling(coupling_elements(), 3)


def test_chaotic_coupling_ensemble_rms():
    first = chaotic_coupling(coupling_elements(), 0, j_threshold=0)
    second = chaotic_coupling(coupling_elements(), 0, j_threshold=0)
    second.curve = np.array([1.0, 1.0, 1.0])
    combined = chaotic_coupling_ensemble([first, second])
    assert combined.rms_over_ng
    assert combined.value == pytest.approx(math.sqrt(5.0))
    with pytest.raises(InvalidParameterError):
        chaotic_coupling_ensemble([])
