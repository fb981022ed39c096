# tests/test_chaosmetrics.py

import math

import numpy as np
import pytest
from scipy import integrate

from quasichaos.core.errors import ClassificationRefused, InvalidParameterError
from quasichaos.core.models import ChargeBasis
from quasichaos.physics.chaosmetrics import (
    GAP_RATIO_GOE,
    GAP_RATIO_POISSON,
    distribution_distance,
    ensemble,
    gap_ratio,
    integrated_distribution,
    ng_grid,
    parity_classify,
    parity_operator,
    pool_spacings,
    reference_cdf,
    reference_pdf,
    select_chaotic_window,
    spacings,
    unpaired_charge_states,
)
from quasichaos.physics.model import charge_operator, static_spectrum

@pytest.fixture
def rng():
    return np.random.default_rng(7)

def wigner_samples(rng, size):
    u = rng.uniform(size=size)
    return np.sqrt(-4.0 * np.log1p(-u) / math.pi)

@pytest.mark.parametrize("reference", ["poisson", "wigner_dyson"])
def test_reference_pdf_normalized_with_unit_mean(reference):
    norm, _ = integrate.quad(lambda s: reference_pdf(s, reference), 0, np.inf)
    mean, _ = integrate.quad(lambda s: s * reference_pdf(s, reference), 0, np.inf)
    assert norm == pytest.approx(1.0, abs=1e-8)
    assert mean == pytest.approx(1.0, abs=1e-8)
    assert reference_cdf(np.array([0.0]), reference)[0] == 0.0

def test_unknown_reference_raises():
    with pytest.raises(InvalidParameterError):
        reference_pdf(np.array([1.0]), "goe")

def test_uniform_levels_have_unit_spacings():
    omega = 3.0
    levels = np.arange(6) * omega / 6 - 1.2
    assert np.allclose(spacings(levels, omega), 1.0)

def test_spacings_include_wraparound():
    s = spacings(np.array([-0.4, 0.1, 0.3]), 1.0)
    assert s.sum() == pytest.approx(3.0)
    assert s[-1] == pytest.approx((-0.4 - 0.3 + 1.0) * 3.0)

def test_spacings_need_two_levels():
    with pytest.raises(InvalidParameterError):
        spacings(np.array([0.1]), 1.0)

def test_gap_ratio_of_poisson_spacings(rng):
    s = rng.exponential(size=40000)
    assert gap_ratio(s) == pytest.approx(GAP_RATIO_POISSON, abs=0.01)
    assert GAP_RATIO_POISSON == pytest.approx(0.386, abs=1e-3)
    assert GAP_RATIO_GOE == pytest.approx(0.536, abs=1e-3)

def test_ks_distance_prefers_the_right_reference(rng):
    wd = wigner_samples(rng, 5000)
    assert distribution_distance(wd, "wigner_dyson") < 0.03
    assert distribution_distance(wd, "poisson") > 0.1

    poisson = rng.exponential(size=5000)
    assert distribution_distance(poisson, "poisson") < 0.03
    assert distribution_distance(poisson, "wigner_dyson") > 0.1

def test_ks_distance_needs_enough_samples(rng):
    with pytest.raises(InvalidParameterError):
        distribution_distance(rng.exponential(size=99), "poisson")

def test_integrated_distribution():
    table = integrated_distribution(np.array([0.5, 1.0, 2.0]), np.array([0.0, 1.0, 3.0]))
    assert np.allclose(table["empirical"], [0.0, 2.0 / 3.0, 1.0])
    assert np.allclose(table["poisson"], 1.0 - np.exp(-np.array([0.0, 1.0, 3.0])))
    assert set(table) == {"spacing", "empirical", "poisson", "wigner_dyson"}

def test_pool_spacings_keeps_sample_order():
    pooled = pool_spacings([0.0, 0.25, 0.5], [np.array([1.0, 1.0]), np.empty(0), np.array([0.5])], (1.6, 2.5))
    assert pooled.counts.tolist() == [2, 0, 1]
    assert pooled.sample_ng.tolist() == [0.0, 0.0, 0.5]
    assert pooled.spacings.tolist() == [1.0, 1.0, 0.5]

def test_ng_grid_spans_half_period():
    grid = ng_grid(21)
    assert grid[0] == 0.0 and grid[-1] == 0.5 and len(grid) == 21

def test_ensemble_needs_enough_samples(transmon):
    with pytest.raises(InvalidParameterError):
        ensemble(transmon, ng_samples=19)

def test_ensemble_spacings_have_unit_mean(transmon, basis, omega_p, fast):
    pooled = ensemble(transmon.with_drive(0.2 * omega_p), 20, basis=basis, **fast)
    assert pooled.counts.sum() == pooled.spacings.size > 0
    # per sample the normalized spacings around the circle average to one
    assert pooled.mean == pytest.approx(1.0, abs=1e-9)

def test_empty_window_selects_nothing(undriven_solution):
    assert select_chaotic_window(undriven_solution, 100.0, 101.0).size == 0

def test_window_is_sorted_by_quasienergy(driven_solution):
    inside = select_chaotic_window(driven_solution)
    assert np.all(np.diff(driven_solution.quasienergies[inside]) >= 0)

@pytest.mark.parametrize("ng", [0.25, 0.1, 0.7])
def test_parity_refused_off_symmetric_points(ng):
    with pytest.raises(ClassificationRefused):
        parity_operator(ChargeBasis(cutoff=3), ng)

def test_parity_operator_reflections():
    basis = ChargeBasis(cutoff=3)
    P0 = parity_operator(basis, 0.0)
    assert np.allclose(P0 @ P0, np.eye(7))
    N = charge_operator(basis)
    assert np.allclose(P0 @ N @ P0, -N)

    P_half = parity_operator(basis, 0.5)
    # m -> 1 - m drops the state m = -3
    assert np.allclose(P_half, P_half.T)
    assert P_half.sum() == 6
    assert not P_half[:, 0].any()
    assert np.allclose(parity_operator(basis, 1.0), P0)

def test_parity_squares_to_one_off_the_unpaired_state():
    basis = ChargeBasis(cutoff=3)
    assert unpaired_charge_states(basis, 0.0).size == 0
    edge = unpaired_charge_states(basis, 0.5)
    assert list(edge) == [0]
    P = parity_operator(basis, 0.5)
    square = P @ P
    paired = np.setdiff1d(np.arange(basis.dimension), edge)
    assert np.allclose(square[np.ix_(paired, paired)], np.eye(paired.size))
    assert not square[edge].any()
    assert list(unpaired_charge_states(basis, -0.5)) == [6]


def test_undriven_parity_includes_fold_phase(transmon, basis, undriven_solution):
    labels = parity_classify(undriven_solution, 0.0)
    _, vectors = static_spectrum(transmon, basis, 4)
    P = parity_operator(basis, 0.0)
    lowest = np.argsort(undriven_solution.mean_energy)[:4]
    omega = undriven_solution.omega_d
    for level, idx in enumerate(lowest):
        static = np.sign(vectors[:, level] @ P @ vectors[:, level])
        k = round((undriven_solution.quasienergies[idx] - undriven_solution.mean_energy[idx]) / omega)
        assert labels[idx] == static * (-1) ** k
    assert np.sign(vectors[:, 0] @ P @ vectors[:, 0]) == 1
    assert np.sign(vectors[:, 1] @ P @ vectors[:, 1]) == -1

def test_low_driven_modes_have_definite_parity(driven_solution):
    labels = parity_classify(driven_solution, 0.0)
    lowest = np.argsort(driven_solution.mean_energy)[:3]
    assert np.all(labels[lowest] != 0)
    assert set(np.unique(labels)) <= {-1, 0, 1}
