# quasichaos/physics/dispersion.py

"""
Dispersion
Offset-charge bands of tracked Floquet states, their phase-slip Fourier
coefficients and the coupling of low states to the high-energy subspace.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
import pandas as pd

from quasichaos.core.errors import InvalidParameterError
from quasichaos.core.models import (
    BandCurve,
    ChaoticCoupling,
    ChargeBasis,
    MatrixElementTensor,
    PhaseSlipSpectrum,
    ScalingFit,
    TransmonParams,
)
from quasichaos.physics.floquet import (
    DEFAULT_N_STEPS,
    DEFAULT_N_TIMES,
    TRACKING_THRESHOLD,
    _best_match,
    floquet_solve,
    seed_by_mean_energy,
    unfold_tracked,
)
from quasichaos.physics.model import static_spectrum

logger = logging.getLogger(__name__)

MIN_NG_POINTS = 64
BAND_SWEEP_STEP = 0.01  # amplitude step in units of ω_p
SPIKE_FACTOR = 10.0
SPIKE_WINDOW = 9


def ng_band_grid(ng_points: int) -> np.ndarray:
    """ng_points + 1 values over [-0.5, 0.5], both ends included."""
    return np.linspace(-0.5, 0.5, ng_points + 1)


def tracked_level_energy(
    params: TransmonParams,
    level: int,
    basis: ChargeBasis = ChargeBasis(),
    eps_step: Optional[float] = None,
    n_steps: int = DEFAULT_N_STEPS,
    n_times: int = DEFAULT_N_TIMES,
) -> tuple[float, bool]:
    """
    Unfolded quasienergy of `level` at params.eps_d, reached by ramping the
    drive from zero with overlap tracking.

    Returns:
        (energy, confident) where confident is False once any overlap fell
        below the tracking threshold
    """
    if params.eps_d == 0.0:
        energies, _ = static_spectrum(params, basis, level + 1)
        return float(energies[level]), True

    omega_p = math.sqrt(8.0 * params.E_J * params.E_C)
    step = (eps_step if eps_step is not None else BAND_SWEEP_STEP * omega_p)
    n_ramp = max(1, int(math.ceil(params.eps_d / step)))
    amplitudes = np.linspace(0.0, params.eps_d, n_ramp + 1)

    previous = floquet_solve(params.with_drive(0.0), basis, n_steps, n_times)
    index = int(seed_by_mean_energy(previous, level + 1)[level])
    reference = float(previous.mean_energy[index])
    raw = [float(previous.quasienergies[index])]
    confident = True
    for eps in amplitudes[1:]:
        solution = floquet_solve(params.with_drive(float(eps)), basis, n_steps, n_times)
        index, overlap = _best_match(previous.modes0[:, index], solution)
        confident = confident and overlap >= TRACKING_THRESHOLD
        raw.append(float(solution.quasienergies[index]))
        previous = solution
    branch = unfold_tracked(np.asarray(raw), reference, params.omega_d)
    return float(branch[-1]), confident


def flag_spikes(energy: np.ndarray, factor: float = SPIKE_FACTOR, window: int = SPIKE_WINDOW) -> np.ndarray:
    """Points reached by a jump larger than factor × the local median jump."""
    jumps = pd.Series(np.abs(np.diff(energy)))
    trend = jumps.rolling(window, center=True, min_periods=1).median()
    spike = np.zeros(len(energy), dtype=bool)
    spike[1:] = (jumps > factor * trend).to_numpy()
    return spike


def band(
    level: int,
    params: TransmonParams,
    ng_points: int,
    basis: ChargeBasis = ChargeBasis(),
    eps_step: Optional[float] = None,
    n_steps: int = DEFAULT_N_STEPS,
    n_times: int = DEFAULT_N_TIMES,
    map_fn: Callable[[Callable, Iterable], Iterable] = map,
) -> BandCurve:
    """
    Tracked quasienergy of one level across a full offset-charge period.

    Args:
        level: Undriven level index (0 = ground)
        params: Transmon parameters (n_g overridden per point)
        ng_points: Intervals on [-0.5, 0.5] (>= 64)
        basis: Charge basis
        eps_step: Amplitude step of the tracking ramp
        n_steps: Propagator steps
        n_times: Mode samples
        map_fn: Mapping used to evaluate the n_g points

    Returns:
        BandCurve; points where tracking lost confidence are flagged, not dropped
    """
    if ng_points < MIN_NG_POINTS:
        raise InvalidParameterError(f"band needs ng_points >= {MIN_NG_POINTS} (got {ng_points})")
    if level < 0:
        raise InvalidParameterError(f"level must be nonnegative (got {level})")
    ng = ng_band_grid(ng_points)

    def at(value: float) -> tuple[float, bool]:
        return tracked_level_energy(params.with_ng(float(value)), level, basis, eps_step, n_steps, n_times)

    results = list(map_fn(at, ng))
    energy = np.array([r[0] for r in results])
    confident = np.array([r[1] for r in results], dtype=bool)
    if not confident.all():
        logger.warning(f"Level {level} lost tracking confidence at {int((~confident).sum())} n_g points")
    return BandCurve(level=level, ng=ng, energy=energy, spike=flag_spikes(energy), confident=confident)


def phase_slip_spectrum(curve: BandCurve, n_max: int) -> PhaseSlipSpectrum:
    """
    t_n = ∫ dn_g ε(n_g) e^{i2π n_g n} over one period, n = -n_max..n_max.

    The last grid point duplicates the first period end and is dropped, so
    the integral is the rectangle rule over M = len(ng) - 1 samples.
    """
    samples = len(curve.ng) - 1
    if n_max < 0 or n_max > samples // 2:
        raise InvalidParameterError(f"n_max must lie in [0, {samples // 2}] (got {n_max})")
    ng = curve.ng[:samples]
    energy = curve.energy[:samples]
    n = np.arange(-n_max, n_max + 1)
    t = np.exp(2j * math.pi * np.outer(n, ng)) @ energy / samples
    return PhaseSlipSpectrum(n=n, t=t, n_samples=samples)


def dispersion_scaling(dispersions: Sequence[float], hbar_eff_inv: Sequence[float]) -> ScalingFit:
    """Linear fit of log(dispersion) against ħ_eff⁻¹ with its R²."""
    y = np.log(np.asarray(dispersions, dtype=float))
    x = np.asarray(hbar_eff_inv, dtype=float)
    if x.size < 2 or not np.all(np.isfinite(y)):
        raise InvalidParameterError("dispersion scaling needs two or more positive dispersions")
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    spread = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 - float(np.sum(residual**2)) / spread if spread > 0 else 1.0
    return ScalingFit(slope=float(slope), intercept=float(intercept), r_squared=r_squared)


def chaotic_coupling(
    elements: MatrixElementTensor, i: int, j_threshold: Optional[int] = None
) -> ChaoticCoupling:
    """
    N_ij = √(Σ_{l≥j} Σ_{k∈{-1,0}} |n_ilk|²) for every threshold j.

    The tensor must come from a solution sorted by mean energy.
    """
    if elements.K < 1:
        raise InvalidParameterError("chaotic coupling needs K >= 1")
    if not 0 <= i < elements.values.shape[0]:
        raise InvalidParameterError(f"state index {i} out of range")
    weight = np.abs(elements.at(-1)[i]) ** 2 + np.abs(elements.at(0)[i]) ** 2
    curve = np.sqrt(np.cumsum(weight[::-1])[::-1])
    return ChaoticCoupling(state=i, curve=curve, j_threshold=j_threshold)


def chaotic_coupling_ensemble(curves: Sequence[ChaoticCoupling]) -> ChaoticCoupling:
    """Root-mean-square of coupling curves over offset-charge samples."""
    if not curves:
        raise InvalidParameterError("coupling ensemble needs at least one curve")
    stacked = np.vstack([c.curve for c in curves])
    return ChaoticCoupling(
        state=curves[0].state,
        curve=np.sqrt(np.mean(stacked**2, axis=0)),
        j_threshold=curves[0].j_threshold,
        rms_over_ng=True,
    )
