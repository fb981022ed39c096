# quasichaos/physics/model.py

"""
Transmon Model
Charge-basis representation of the driven transmon and the classical rescaling.

Charge labels m are counted from the integer nearest to n_g, so the static
Hamiltonian uses the local offset ν = n_g - round(n_g) ∈ [-0.5, 0.5]. Spectra
are periodic in n_g by construction and n_g = ±0.5 give identical matrices up
to the m → -m relabeling.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy import linalg

from quasichaos.core.errors import InvalidParameterError
from quasichaos.core.models import (
    ChargeBasis,
    PeriodicHamiltonian,
    ReducedParams,
    TransmonParams,
)

logger = logging.getLogger(__name__)


def rescale(params: TransmonParams) -> ReducedParams:
    """
    Map transmon parameters onto the rescaled pendulum.

    Args:
        params: Transmon parameters in angular-frequency units

    Returns:
        ReducedParams with ħ_eff = √(8E_C/E_J) and ω_p = √(8E_J E_C)
    """
    hbar_eff = math.sqrt(8.0 * params.E_C / params.E_J)
    omega_p = math.sqrt(8.0 * params.E_J * params.E_C)
    return ReducedParams(
        hbar_eff=hbar_eff,
        eps_tilde=params.eps_d / omega_p,
        omega_tilde=params.omega_d / omega_p,
        ng_tilde=hbar_eff * params.n_g,
        omega_p=omega_p,
    )


def unscale(reduced: ReducedParams) -> TransmonParams:
    """Inverse of `rescale`: E_J = ω_p/ħ_eff and E_C = ω_p ħ_eff/8."""
    if not (reduced.hbar_eff > 0 and reduced.omega_p > 0):
        raise InvalidParameterError("hbar_eff and omega_p must be positive")
    return TransmonParams(
        E_C=reduced.omega_p * reduced.hbar_eff / 8.0,
        E_J=reduced.omega_p / reduced.hbar_eff,
        n_g=reduced.ng_tilde / reduced.hbar_eff,
        eps_d=reduced.eps_tilde * reduced.omega_p,
        omega_d=reduced.omega_tilde * reduced.omega_p,
    )


def from_reduced(
    hbar_eff_inv: float,
    omega_p: float,
    eps_tilde: float = 0.0,
    omega_tilde: float = 1.0,
    n_g: float = 0.0,
) -> TransmonParams:
    """Build transmon parameters from ħ_eff⁻¹, an energy scale ω_p and rescaled drive."""
    if hbar_eff_inv <= 0:
        raise InvalidParameterError(f"hbar_eff_inv must be positive (got {hbar_eff_inv})")
    hbar_eff = 1.0 / hbar_eff_inv
    return unscale(
        ReducedParams(
            hbar_eff=hbar_eff,
            eps_tilde=eps_tilde,
            omega_tilde=omega_tilde,
            ng_tilde=hbar_eff * n_g,
            omega_p=omega_p,
        )
    )


def build_static_hamiltonian(params: TransmonParams, basis: ChargeBasis) -> np.ndarray:
    """
    Static transmon Hamiltonian 4E_C(n - n_g)² - E_J cos φ in the charge basis.

    Args:
        params: Transmon parameters
        basis: Charge basis

    Returns:
        Real symmetric matrix of shape (2N_c+1, 2N_c+1)
    """
    m = basis.labels.astype(float)
    diagonal = 4.0 * params.E_C * (m - params.ng_local) ** 2
    off = np.full(basis.dimension - 1, -0.5 * params.E_J)
    return np.diag(diagonal) + np.diag(off, 1) + np.diag(off, -1)


def charge_operator(basis: ChargeBasis) -> np.ndarray:
    return np.diag(basis.labels.astype(float))


def cos_phi_operator(basis: ChargeBasis) -> np.ndarray:
    off = np.full(basis.dimension - 1, 0.5)
    return np.diag(off, 1) + np.diag(off, -1)


def drive_from_photons(g: float, n_bar: float) -> float:
    """Drive amplitude ε_d = 2g√n̄ produced by n̄ resonator photons."""
    if g <= 0:
        raise InvalidParameterError(f"coupling g must be positive (got {g})")
    if n_bar < 0:
        raise InvalidParameterError(f"photon number must be nonnegative (got {n_bar})")
    return 2.0 * g * math.sqrt(n_bar)


def static_spectrum(
    params: TransmonParams, basis: ChargeBasis, n_levels: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and eigenvectors of the undriven transmon."""
    energies, vectors = linalg.eigh(build_static_hamiltonian(params, basis))
    if n_levels is not None:
        energies, vectors = energies[:n_levels], vectors[:, :n_levels]
    return energies, vectors


def driven_hamiltonian(params: TransmonParams, basis: ChargeBasis) -> PeriodicHamiltonian:
    """H(t) = H_static + ε_d cos(ω_d t) n."""
    return PeriodicHamiltonian(
        static=build_static_hamiltonian(params, basis),
        drive=charge_operator(basis),
        eps=params.eps_d,
        omega=params.omega_d,
    )


def check_cutoff(params: TransmonParams, basis: ChargeBasis, n_levels: int = 15) -> float:
    """Relative change of the lowest levels when the cutoff grows by 10."""
    low, _ = static_spectrum(params, basis, n_levels)
    high, _ = static_spectrum(params, ChargeBasis(basis.cutoff + 10), n_levels)
    change = float(np.max(np.abs(low - high) / np.maximum(np.abs(high), params.E_C)))
    if change > 1e-8:
        logger.warning(
            f"Charge cutoff {basis.cutoff} not converged: lowest {n_levels} levels move by {change:.2e}"
        )
    return change
