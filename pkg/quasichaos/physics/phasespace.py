# quasichaos/physics/phasespace.py

"""
Phase Space
Coherent states on the circle and Husimi functions of charge-basis states.

A coherent state centered at (φ̃0, ñ0) has charge amplitudes
c_m ∝ exp(-(m ħ_eff - ñ0)²/(2ħ_eff)) exp(-i m φ̃0), a Gaussian of width √ħ_eff
in both ñ and φ̃.
"""

from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from quasichaos.core.errors import InvalidParameterError
from quasichaos.core.models import ChargeBasis, FloquetSolution, HusimiGrid

logger = logging.getLogger(__name__)

TAIL_TOLERANCE = 1e-6
DEFAULT_GRID = (201, 201)
DEFAULT_N_WINDOW = (-4.0, 4.0)


def _envelope(labels: np.ndarray, n0, hbar_eff: float) -> np.ndarray:
    # exponent is (mħ - ñ0)²/(2ħ), not (m - ñ0)²/(2ħ): the ñ width stays √ħ for every ħ_eff
    return np.exp(-((labels * hbar_eff - n0) ** 2) / (2.0 * hbar_eff))


def tail_mass(n0: float, hbar_eff: float, basis: ChargeBasis) -> float:
    """Fraction of the untruncated envelope weight that falls outside the basis."""
    reach = basis.cutoff + int(math.ceil(12.0 / math.sqrt(hbar_eff) / hbar_eff)) + 1
    wide = np.arange(-reach, reach + 1)
    weights = _envelope(wide, n0, hbar_eff) ** 2
    inside = np.abs(wide) <= basis.cutoff
    total = weights.sum()
    return float(weights[~inside].sum() / total) if total > 0 else 1.0


def circle_coherent_state(phi0: float, n0: float, hbar_eff: float, basis: ChargeBasis) -> np.ndarray:
    """
    Normalized coherent state on the circle centered at (phi0, n0).

    Args:
        phi0: Phase center
        n0: Rescaled momentum center ñ0
        hbar_eff: Effective Planck constant
        basis: Charge basis

    Returns:
        Complex amplitudes in the charge basis

    Raises:
        InvalidParameterError: If n0 lies outside the charge window
    """
    if hbar_eff <= 0:
        raise InvalidParameterError("hbar_eff must be positive")
    window = basis.cutoff * hbar_eff
    if abs(n0) > window:
        raise InvalidParameterError(f"n0={n0} outside the charge window ±{window:.3g}")
    mass = tail_mass(n0, hbar_eff, basis)
    if mass > TAIL_TOLERANCE:
        logger.warning(f"Coherent state at n0={n0} truncated by the cutoff (tail mass {mass:.2e})")
    labels = basis.labels
    state = _envelope(labels, n0, hbar_eff) * np.exp(-1j * labels * phi0)
    return state / np.linalg.norm(state)


def husimi(
    state: np.ndarray,
    hbar_eff: float,
    n_phi: int = DEFAULT_GRID[0],
    n_n: int = DEFAULT_GRID[1],
    n_window: tuple[float, float] = DEFAULT_N_WINDOW,
    time: float = 0.0,
) -> HusimiGrid:
    """
    Husimi function Q(φ̃, ñ) = |⟨z(φ̃, ñ)|ψ⟩|² on a grid.

    Args:
        state: Normalized charge-basis state
        hbar_eff: Effective Planck constant
        n_phi: Phase points over (-π, π]
        n_n: Momentum points over n_window (inclusive)
        n_window: Momentum range
        time: Sample time recorded on the grid

    Returns:
        HusimiGrid with values[i_n, i_phi]
    """
    state = np.asarray(state, dtype=complex)
    basis = ChargeBasis.for_dimension(state.shape[0])
    labels = basis.labels
    phi = np.linspace(-math.pi, math.pi, n_phi + 1)[1:]
    n = np.linspace(n_window[0], n_window[1], n_n)

    envelope = _envelope(labels[None, :], n[:, None], hbar_eff)
    envelope /= np.linalg.norm(envelope, axis=1, keepdims=True)
    # ⟨z|ψ⟩ = Σ_m g_m(ñ) e^{i m φ̃} ψ_m
    phases = np.exp(1j * np.outer(labels, phi))
    amplitudes = (envelope * state[None, :]) @ phases
    return HusimiGrid(phi=phi, n=n, values=np.abs(amplitudes) ** 2, time=time, hbar_eff=hbar_eff)


def mode_husimi(
    solution: FloquetSolution,
    state_index: int,
    hbar_eff: float,
    time_fraction: float = 0.125,
    grid: Optional[tuple[int, int]] = None,
    n_window: tuple[float, float] = DEFAULT_N_WINDOW,
) -> HusimiGrid:
    """Husimi function of a Floquet mode at the sample nearest time_fraction·T."""
    if not 0 <= state_index < solution.n_states:
        raise InvalidParameterError(f"state index {state_index} out of range")
    sample = int(round(time_fraction * solution.n_times)) % solution.n_times
    n_phi, n_n = grid or DEFAULT_GRID
    return husimi(
        solution.modes_t[sample][:, state_index],
        hbar_eff,
        n_phi=n_phi,
        n_n=n_n,
        n_window=n_window,
        time=float(solution.times[sample]),
    )
