# quasichaos/physics/dissipation.py

"""
Dissipation
Floquet-basis matrix elements, Floquet-Markov rates, steady states and
pure dephasing.

Conventions: n_ijk = (1/T)∫ dt ⟨φ_i(t)|X|φ_j(t)⟩ e^{-ikω_d t} and
Δ_ijk = ε_j - ε_i - kω_d, the energy released when the system jumps from
Floquet state j to i. Γ_ij is the rate from j to i.
"""

from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np
from scipy import constants, linalg
from scipy.sparse.csgraph import connected_components

from quasichaos.core.errors import AccuracyError, AliasingError, InvalidParameterError
from quasichaos.core.models import (
    BathSpec,
    BoltzmannFit,
    ChargeBasis,
    DephasingRate,
    FloquetSolution,
    MatrixElementTensor,
    NoiseSpec,
    RateMatrix,
    SteadyState,
)
from quasichaos.physics.model import charge_operator

logger = logging.getLogger(__name__)

ALIASING_TOL = 1e-6
STATIONARITY_TOL = 1e-10
NEGATIVITY_TOL = 1e-12
CHANNEL_TOL = 1e-8


# --- Matrix elements ---


def matrix_elements(
    solution: FloquetSolution, K: Optional[int] = None, operator: Optional[np.ndarray] = None
) -> MatrixElementTensor:
    """
    Fourier components of ⟨φ_i(t)|X|φ_j(t)⟩ over one period.

    Args:
        solution: Floquet solution with n_times samples (power of two)
        K: Largest photon index kept, default n_times/4
        operator: System operator X, the transmon charge by default

    Returns:
        MatrixElementTensor with k = -K..K

    Raises:
        InvalidParameterError: If n_times is not a power of two or n_times < 4K
        AliasingError: If harmonics beyond K carry relative weight above 1e-6
    """
    n_times = solution.n_times
    if n_times & (n_times - 1):
        raise InvalidParameterError(f"n_times must be a power of two (got {n_times})")
    K = n_times // 4 if K is None else K
    if K < 0 or n_times < 4 * K:
        raise InvalidParameterError(f"need n_times >= 4K (n_times={n_times}, K={K})")

    modes = solution.modes_t
    if operator is None:
        operator = charge_operator(ChargeBasis.for_dimension(modes.shape[1]))
    if np.count_nonzero(operator - np.diag(np.diagonal(operator))) == 0:
        weights = np.diagonal(operator)
        series = np.einsum("tdi,d,tdj->tij", modes.conj(), weights, modes, optimize=True)
    else:
        series = np.conj(np.swapaxes(modes, 1, 2)) @ (operator[None, :, :] @ modes)

    coefficients = np.fft.fft(series, axis=0) / n_times
    power = np.abs(coefficients) ** 2
    harmonics = np.fft.fftfreq(n_times, d=1.0 / n_times).astype(int)
    total = float(power.sum())
    dropped = float(power[np.abs(harmonics) > K].sum())
    if total > 0 and dropped / total > ALIASING_TOL:
        raise AliasingError(
            f"harmonics beyond K={K} carry relative weight {dropped / total:.2e}; increase n_times or K"
        )

    ks = np.arange(-K, K + 1)
    values = np.moveaxis(coefficients[ks % n_times], 0, -1)
    return MatrixElementTensor(
        values=values,
        K=K,
        n_times=n_times,
        quasienergies=solution.quasienergies.copy(),
        omega_d=solution.omega_d,
    )


# --- Bath ---


def spectral_density(bath: BathSpec, x: np.ndarray) -> np.ndarray:
    """Ohmic J(x) normalized to J(omega_ref) = prefactor; J(0) = 0."""
    x = np.abs(np.asarray(x, dtype=float))
    return bath.prefactor * (x / bath.omega_ref) * np.exp(-(x - bath.omega_ref) / bath.omega_c)


def bose_occupation(bath: BathSpec, x: np.ndarray) -> np.ndarray:
    """n_B(x) for x in rad/ns; zero at zero temperature and for x <= 0."""
    x = np.asarray(x, dtype=float)
    if bath.temperature_K == 0:
        return np.zeros_like(x)
    ratio = constants.hbar * 1e9 / (constants.k * bath.temperature_K)
    out = np.zeros_like(x)
    positive = x > 0
    with np.errstate(over="ignore"):
        out[positive] = 1.0 / np.expm1(ratio * x[positive])
    return out


# --- Rates ---


def rates(elements: MatrixElementTensor, bath: BathSpec) -> RateMatrix:
    """
    Γ_ij = Σ_k |n_ijk|² [Θ(Δ_ijk) + n_B(|Δ_ijk|)] J(|Δ_ijk|), split by parity of k.

    Args:
        elements: Matrix-element tensor
        bath: Ohmic bath

    Returns:
        RateMatrix with zero diagonal
    """
    delta = elements.transition_energies()
    magnitude = np.abs(delta)
    factor = (delta > 0).astype(float) + bose_occupation(bath, magnitude)
    channel = np.abs(elements.values) ** 2 * factor * spectral_density(bath, magnitude)

    even_k = elements.ks % 2 == 0
    even = channel[:, :, even_k].sum(axis=2)
    odd = channel[:, :, ~even_k].sum(axis=2)
    for part in (even, odd):
        np.fill_diagonal(part, 0.0)
    return RateMatrix(total=even + odd, even=even, odd=odd)


def channel_mixing(rate_matrix: RateMatrix, floor: float = CHANNEL_TOL) -> np.ndarray:
    """min(even, odd)/max(even, odd) per pair; zero where both channels are below floor."""
    upper = np.maximum(rate_matrix.even, rate_matrix.odd)
    lower = np.minimum(rate_matrix.even, rate_matrix.odd)
    return np.divide(lower, upper, out=np.zeros_like(upper), where=upper > floor)


def generator(total: np.ndarray) -> np.ndarray:
    """Master-equation generator L = Γ - diag(outflow), dp/dt = L p."""
    L = np.array(total, dtype=float)
    np.fill_diagonal(L, 0.0)
    L -= np.diag(L.sum(axis=0))
    return L


# --- Steady state ---


class _ReducibleChain(Exception):
    pass


def _gth(total: np.ndarray) -> np.ndarray:
    """Stationary vector by GTH state reduction; every pivot is a sum of rates."""
    q = np.array(total, dtype=float).T  # q[a, b]: rate a → b
    np.fill_diagonal(q, 0.0)
    size = q.shape[0]
    for k in range(size - 1, 0, -1):
        outflow = q[k, :k].sum()
        if outflow <= 0:
            raise _ReducibleChain
        q[:k, k] /= outflow
        q[:k, :k] += np.outer(q[:k, k], q[k, :k])
    p = np.zeros(size)
    p[0] = 1.0
    for k in range(1, size):
        p[k] = p[:k] @ q[:k, k]
    return p / p.sum()


def _null_vector(total: np.ndarray) -> tuple[np.ndarray, bool]:
    basis = linalg.null_space(generator(total))
    if basis.shape[1] == 0:
        raise AccuracyError("rate generator has no null vector")
    vector = basis[:, 0]
    vector = vector * np.sign(vector[np.argmax(np.abs(vector))])
    if vector.min() < -NEGATIVITY_TOL * np.abs(vector).max():
        raise AccuracyError("stationary vector has negative entries")
    vector = np.clip(vector, 0.0, None)
    return vector / vector.sum(), basis.shape[1] == 1


def _solve_component(total: np.ndarray) -> tuple[np.ndarray, bool]:
    if total.shape[0] == 1:
        return np.ones(1), True
    try:
        return _gth(total), True
    except _ReducibleChain:
        return _null_vector(total)


def steady_state(rate_matrix: RateMatrix | np.ndarray) -> SteadyState:
    """
    Stationary populations of the rate equations.

    Each weakly connected component is solved separately; with several
    components the populations are averaged with equal weight and the result
    is flagged as not unique.

    Raises:
        AccuracyError: If the stationarity residual exceeds 1e-10
    """
    total = rate_matrix.total if isinstance(rate_matrix, RateMatrix) else np.asarray(rate_matrix, dtype=float)
    if np.any(total < 0) or not np.all(np.isfinite(total)):
        raise InvalidParameterError("rates must be finite and nonnegative")
    size = total.shape[0]
    off = total.copy()
    np.fill_diagonal(off, 0.0)

    n_components, labels = connected_components(off > 0, directed=True, connection="weak")
    components = [np.flatnonzero(labels == c) for c in range(n_components)]
    unique = n_components == 1
    populations = np.zeros(size)
    for members in components:
        part, part_unique = _solve_component(off[np.ix_(members, members)])
        populations[members] = part / n_components
        unique = unique and part_unique
    if n_components > 1:
        sizes = ", ".join(str(len(m)) for m in components)
        logger.warning(f"Rate graph has {n_components} disconnected components (sizes {sizes})")

    scale = max(float(off.max()), np.finfo(float).tiny)
    residual = float(np.max(np.abs(generator(off) @ populations))) / scale
    if residual > STATIONARITY_TOL:
        raise AccuracyError(f"steady-state residual {residual:.2e} exceeds {STATIONARITY_TOL}")
    return SteadyState(populations=populations, residual=residual, components=components, unique=unique)


def boltzmann_fit(energies: np.ndarray, populations: np.ndarray, floor: float = 1e-300) -> BoltzmannFit:
    """Fit log p = a - βE over populated states; residual relative to the log span."""
    energies = np.asarray(energies, dtype=float)
    populations = np.asarray(populations, dtype=float)
    keep = populations > floor
    if keep.sum() < 2:
        raise InvalidParameterError("Boltzmann fit needs at least two populated states")
    log_p = np.log(populations[keep])
    slope, intercept = np.polyfit(energies[keep], log_p, 1)
    deviation = np.abs(log_p - (slope * energies[keep] + intercept))
    span = max(float(log_p.max() - log_p.min()), 1.0)
    return BoltzmannFit(beta=float(-slope), intercept=float(intercept), log_residual=float(deviation.max() / span))


# --- Dephasing ---


def dephasing_rate(
    elements: MatrixElementTensor,
    noise: NoiseSpec,
    ground: int = 0,
    excited: int = 1,
    confident: bool = True,
) -> DephasingRate:
    """
    Pure dephasing of the tracked 0-1 pair.

    With g_k = n_11k - n_00k, the 1/f term is A_e |2 g_0| times the log factor
    √|log ω_IR t_m| and the dielectric term is Σ_{k≠0} 2 S(kω_d) |g_k|².
    """
    g = elements.values[excited, excited, :] - elements.values[ground, ground, :]
    one_over_f = noise.A_e * abs(2.0 * g[elements.K]) * noise.log_factor

    dielectric = 0.0
    if noise.bath is not None and elements.K > 0:
        frequencies = elements.ks * elements.omega_d
        nonzero = elements.ks != 0
        magnitude = np.abs(frequencies[nonzero])
        spectrum = (
            noise.dielectric_scale
            * spectral_density(noise.bath, magnitude)
            * ((frequencies[nonzero] > 0).astype(float) + bose_occupation(noise.bath, magnitude))
        )
        dielectric = float(np.sum(2.0 * spectrum * np.abs(g[nonzero]) ** 2))

    if not confident:
        logger.warning("Dephasing rate computed from modes that lost tracking confidence")
    return DephasingRate(
        gamma_phi=one_over_f + dielectric,
        one_over_f=float(one_over_f),
        dielectric=dielectric,
        confident=confident,
    )


def thermal_ratio(bath: BathSpec, delta: float) -> float:
    """Expected Γ_up/Γ_down = n_B/(1 + n_B) for a gap delta."""
    n_b = float(bose_occupation(bath, np.array([delta]))[0])
    return n_b / (1.0 + n_b) if math.isfinite(n_b) else 1.0
