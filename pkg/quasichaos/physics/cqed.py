# quasichaos/physics/cqed.py

"""
Circuit QED
Driven transmon coupled to a resonator, H = H_t + ω_a a†a - i g n (a - a†)
+ ε_d cos(ω_d t) n, solved in the joint space of the lowest d_t transmon
eigenstates and d_r Fock states.

Joint basis index = a·d_r + b for transmon eigenstate a and Fock state b.
Transmon energies are counted from the undriven ground state.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import linalg

from quasichaos.core.errors import InvalidParameterError, ResourceGuardError
from quasichaos.core.models import (
    BathSpec,
    ChargeBasis,
    CqedGridPoint,
    CqedParams,
    CqedSteadyState,
    CriticalPhotonNumber,
    DipoleStatistics,
    FloquetSolution,
    FoldedSpectrum,
    MatrixElementTensor,
    PerturbativePull,
    PeriodicHamiltonian,
    PullRecord,
    RateMatrix,
    TransmonParams,
)
from quasichaos.physics.dissipation import matrix_elements, rates, steady_state
from quasichaos.physics.floquet import DEFAULT_N_STEPS, floquet_solve, solve_hamiltonian
from quasichaos.physics.model import charge_operator, drive_from_photons, static_spectrum

logger = logging.getLogger(__name__)

MAX_DIMENSION = 1200
DEFAULT_N_TIMES = 32
DEFAULT_K = 8
NR_CUTOFF = 15.0
VACUUM_PURITY = 0.85
VACUUM_NR_MAX = 0.73
DIVERGENCE_TOL = 2.0 * math.pi * 0.01  # 10 MHz in rad/ns
FOLDED_NT_MAX = 20.0
WEIGHT_FLOOR = 1e-12


# --- Operators ---


def transmon_eigenbasis(params: TransmonParams, d_t: int) -> tuple[np.ndarray, np.ndarray]:
    """Lowest d_t undriven energies (from the ground state) and the charge operator in that basis."""
    basis = ChargeBasis(cutoff=max(17, d_t))
    energies, vectors = static_spectrum(params, basis, d_t)
    n_matrix = vectors.T @ charge_operator(basis) @ vectors
    return energies - energies[0], n_matrix


def annihilation(d_r: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, d_r, dtype=float)), 1)


def resonator_charge(params: CqedParams) -> np.ndarray:
    """Joint-space resonator charge -i(a - a†)/√2."""
    a = annihilation(params.dims[1])
    return np.kron(np.eye(params.dims[0]), -1j * (a - a.T) / math.sqrt(2.0))


def joint_hamiltonian(params: CqedParams) -> PeriodicHamiltonian:
    d_t, d_r = params.dims
    energies, n_t = transmon_eigenbasis(params.transmon, d_t)
    a = annihilation(d_r)
    static = (
        np.kron(np.diag(energies), np.eye(d_r))
        + np.kron(np.eye(d_t), params.omega_a * np.diag(np.arange(d_r, dtype=float)))
        - 1j * params.g * np.kron(n_t, a - a.T)
    )
    return PeriodicHamiltonian(
        static=static.astype(complex),
        drive=np.kron(n_t, np.eye(d_r)).astype(complex),
        eps=params.transmon.eps_d,
        omega=params.transmon.omega_d,
    )


def _check_guards(params: CqedParams) -> None:
    if params.dimension > MAX_DIMENSION:
        raise ResourceGuardError(
            f"joint dimension {params.dimension} exceeds {MAX_DIMENSION}; reduce cqed dims"
        )
    detuning = abs(params.omega_a - params.transmon.omega_d)
    if params.kappa > 0 and detuning <= 10.0 * params.kappa:
        raise InvalidParameterError(
            f"drive too close to the resonator: |ω_a - ω_d| = {detuning:.4g} rad/ns vs κ = {params.kappa:.4g}"
        )


# --- Floquet ---


def cqed_floquet(
    params: CqedParams,
    n_steps: int = DEFAULT_N_STEPS,
    n_times: int = DEFAULT_N_TIMES,
    check_convergence: bool = False,
) -> FloquetSolution:
    """
    Floquet solution of the joint transmon-resonator system.

    Raises:
        ResourceGuardError: If d_t·d_r exceeds 1200
        InvalidParameterError: If the drive is within 10κ of the resonator
    """
    _check_guards(params)
    logger.info(f"Joint Floquet solve: dims={params.dims}, eps_d={params.transmon.eps_d:.4g} rad/ns")
    return solve_hamiltonian(joint_hamiltonian(params), params, n_steps, n_times, check_convergence)


def excitation_numbers(solution: FloquetSolution, dims: tuple[int, int]) -> dict[str, np.ndarray]:
    """
    Time-averaged ⟨N_t⟩, ⟨N_r⟩, transmon purity and commutator error per mode.

    The commutator error is d_r times the weight on the top Fock state,
    which equals |1 - ⟨[a, a†]⟩| in the truncated space.
    """
    d_t, d_r = dims
    n_modes = solution.n_states
    totals = {name: np.zeros(n_modes) for name in ("Nt", "Nr", "purity", "comm_error")}
    a_levels = np.arange(d_t, dtype=float)
    b_levels = np.arange(d_r, dtype=float)
    for sample in solution.modes_t:
        amplitudes = sample.reshape(d_t, d_r, n_modes)
        weights = np.abs(amplitudes) ** 2
        totals["Nt"] += np.einsum("a,abi->i", a_levels, weights)
        totals["Nr"] += np.einsum("b,abi->i", b_levels, weights)
        reduced = np.einsum("abi,cbi->iac", amplitudes, amplitudes.conj(), optimize=True)
        totals["purity"] += np.sum(np.abs(reduced) ** 2, axis=(1, 2))
        totals["comm_error"] += d_r * weights[:, -1, :].sum(axis=0)
    return {name: value / solution.n_times for name, value in totals.items()}


def grid(solution: FloquetSolution, dims: tuple[int, int]) -> list[CqedGridPoint]:
    numbers = excitation_numbers(solution, dims)
    return [
        CqedGridPoint(
            mode=i,
            Nt_avg=float(numbers["Nt"][i]),
            Nr_avg=float(numbers["Nr"][i]),
            purity=float(numbers["purity"][i]),
            comm_error=float(numbers["comm_error"][i]),
        )
        for i in range(solution.n_states)
    ]


def grid_frame(points: Sequence[CqedGridPoint]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "mode": [p.mode for p in points],
            "Nt_avg": [p.Nt_avg for p in points],
            "Nr_avg": [p.Nr_avg for p in points],
            "purity": [p.purity for p in points],
            "steady_pop": [p.steady_pop for p in points],
            "comm_error": [p.comm_error for p in points],
        }
    )


# --- Resonator-mediated dissipation ---


def resonator_bath(params: CqedParams) -> BathSpec:
    """Zero-temperature bath with single-photon loss rate κ at ω_a."""
    return BathSpec(
        temperature_K=0.0,
        omega_c=10.0 * params.omega_a,
        omega_ref=params.omega_a,
        prefactor=2.0 * params.kappa,
    )


def resonator_elements(solution: FloquetSolution, params: CqedParams, K: int = DEFAULT_K) -> MatrixElementTensor:
    return matrix_elements(solution, K, operator=resonator_charge(params))


def resonator_rates_and_steady_state(
    solution: FloquetSolution,
    params: CqedParams,
    nr_cutoff: float = NR_CUTOFF,
    K: int = DEFAULT_K,
    points: Optional[list[CqedGridPoint]] = None,
    elements: Optional[MatrixElementTensor] = None,
) -> CqedSteadyState:
    """
    Rates from the resonator charge and their steady state.

    Modes with ⟨⟨N_r⟩⟩ >= nr_cutoff take no part in the rate equations and
    get zero population.
    """
    if params.kappa <= 0:
        raise InvalidParameterError("resonator rates need kappa > 0")
    points = points if points is not None else grid(solution, params.dims)
    elements = elements if elements is not None else resonator_elements(solution, params, K)
    rate_matrix = rates(elements, resonator_bath(params))

    nr = np.array([p.Nr_avg for p in points])
    nt = np.array([p.Nt_avg for p in points])
    kept = np.flatnonzero(nr < nr_cutoff)
    if kept.size == 0:
        raise InvalidParameterError(f"no Floquet mode below the N_r cutoff {nr_cutoff}")
    mask = np.zeros(solution.n_states, dtype=bool)
    mask[kept] = True
    pair = np.outer(mask, mask)
    cut = RateMatrix(
        total=np.where(pair, rate_matrix.total, 0.0),
        even=np.where(pair, rate_matrix.even, 0.0),
        odd=np.where(pair, rate_matrix.odd, 0.0),
    )
    sub = steady_state(cut.total[np.ix_(kept, kept)])
    populations = np.zeros(solution.n_states)
    populations[kept] = sub.populations
    sub.populations = populations
    sub.components = [kept[c] for c in sub.components]

    occupied = populations[populations > 0]
    n_occ = float(np.exp(-np.sum(occupied * np.log(occupied))))
    vacuum = int(np.argmax(np.abs(solution.modes0[0, :]) ** 2))
    return CqedSteadyState(
        rates=cut,
        steady=sub,
        n_occ=n_occ,
        Nr_mean=float(populations @ nr),
        Nt_mean=float(populations @ nt),
        vacuum_index=vacuum,
        vacuum_weight=float(populations[vacuum]),
    )


def attach_populations(points: Sequence[CqedGridPoint], populations: np.ndarray) -> list[CqedGridPoint]:
    return [
        CqedGridPoint(
            mode=p.mode,
            Nt_avg=p.Nt_avg,
            Nr_avg=p.Nr_avg,
            purity=p.purity,
            steady_pop=float(populations[p.mode]),
            comm_error=p.comm_error,
        )
        for p in points
    ]


# --- Cavity pull ---


def cavity_pull_spectroscopy(
    points: Sequence[CqedGridPoint],
    elements: MatrixElementTensor,
    omega_a: float,
    purity_min: float = VACUUM_PURITY,
    nr_max: float = VACUUM_NR_MAX,
) -> list[PullRecord]:
    """
    Strongest resonator absorption line out of every vacuum-like mode.

    A mode is vacuum-like when its purity exceeds purity_min and its
    ⟨⟨N_r⟩⟩ is at most nr_max. For such a mode i the line is the (j, k) with
    Δ_ijk > 0 maximizing |X_ijk|²; the pull is Δ_ijk - ω_a.
    """
    delta = elements.transition_energies()
    weight = np.abs(elements.values) ** 2
    records = []
    for p in points:
        if p.purity <= purity_min or p.Nr_avg > nr_max:
            continue
        candidates = np.where(delta[p.mode] > 0, weight[p.mode], 0.0)
        j, k_index = np.unravel_index(int(np.argmax(candidates)), candidates.shape)
        if candidates[j, k_index] <= WEIGHT_FLOOR:
            continue
        frequency = float(delta[p.mode, j, k_index])
        records.append(
            PullRecord(
                state=p.mode,
                partner=int(j),
                k=int(elements.ks[k_index]),
                frequency=frequency,
                pull=frequency - omega_a,
                weight=float(candidates[j, k_index]),
                purity=p.purity,
                Nt_avg=p.Nt_avg,
            )
        )
    if not records:
        logger.warning(f"No vacuum-like modes (purity > {purity_min}, N_r <= {nr_max}); pull record empty")
    return records


def perturbative_pull(
    elements: MatrixElementTensor, g: float, omega_a: float, tolerance: float = DIVERGENCE_TOL
) -> PerturbativePull:
    """
    χ_i = Σ_jk g² |n_ijk|² (1/(ω_a - Δ_ijk) - 1/(ω_a + Δ_ijk)) from a
    single-transmon Floquet solution, Δ_ijk = ε_j - ε_i - kω_d.

    Same sign convention as the pull of cavity_pull_spectroscopy. Contributions
    whose denominator is closer to zero than tolerance mark the state as
    divergent; they are still summed.
    """
    # plus/minus below are written in terms of ε_i - ε_j + kω_d
    delta = -elements.transition_energies()
    weight = g**2 * np.abs(elements.values) ** 2
    plus = omega_a + delta
    minus = omega_a - delta
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = weight * (1.0 / plus - 1.0 / minus)
    near = ((np.abs(plus) < tolerance) | (np.abs(minus) < tolerance)) & (weight > WEIGHT_FLOOR * g**2)
    terms = np.where(weight > 0, terms, 0.0)
    divergent = near.any(axis=(1, 2))
    if divergent.any():
        logger.warning(f"{int(divergent.sum())} states have near-resonant denominators in the dispersive shift")
    return PerturbativePull(chi=terms.sum(axis=(1, 2)), divergent=divergent)


# --- Undriven spectrum ---


def undriven_spectrum_folded(params: CqedParams, nt_max: float = FOLDED_NT_MAX) -> FoldedSpectrum:
    """
    Eigenstates of the undriven joint Hamiltonian with energies folded into
    [-ω_a/2, ω_a/2). With κ > 0 the generator carries -iκ/2 a†a.
    """
    d_t, d_r = params.dims
    static = joint_hamiltonian(params).static
    nr_operator = np.kron(np.eye(d_t), np.diag(np.arange(d_r, dtype=float)))
    if params.kappa > 0:
        energies, vectors = linalg.eig(static - 0.5j * params.kappa * nr_operator)
        vectors = vectors / np.linalg.norm(vectors, axis=0)
    else:
        real, vectors = linalg.eigh(static)
        energies = real.astype(complex)
    weights = np.abs(vectors.reshape(d_t, d_r, -1)) ** 2
    nt = np.einsum("a,abi->i", np.arange(d_t, dtype=float), weights)
    nr = np.einsum("b,abi->i", np.arange(d_r, dtype=float), weights)
    half = 0.5 * params.omega_a
    folded = np.mod(energies.real + half, params.omega_a) - half
    return FoldedSpectrum(energies=energies, folded=folded, Nr=nr, Nt=nt, vectors=vectors, keep=nt < nt_max)


def branch_pulls(spectrum: FoldedSpectrum, params: CqedParams) -> tuple[np.ndarray, np.ndarray]:
    """Per state i: the partner j maximizing |⟨j|a†|i⟩| and the pull Re(E_j - E_i) - ω_a."""
    a = annihilation(params.dims[1])
    raising = np.kron(np.eye(params.dims[0]), a.T)
    overlaps = np.abs(spectrum.vectors.conj().T @ raising @ spectrum.vectors)
    partners = np.argmax(overlaps, axis=0)
    pulls = (spectrum.energies[partners] - spectrum.energies).real - params.omega_a
    return partners, pulls


# --- Scans and cross-checks ---


def mean_field_excitations(
    params: TransmonParams,
    g: float,
    photons: Sequence[float],
    d_t: int = 35,
    n_steps: int = DEFAULT_N_STEPS,
    n_times: int = DEFAULT_N_TIMES,
) -> np.ndarray:
    """
    ⟨⟨N_t⟩⟩ of single-transmon Floquet modes at ε_d = 2g√n̄, sorted ascending.

    Returns:
        Array shaped (len(photons), number of modes)
    """
    basis = ChargeBasis(cutoff=max(17, d_t))
    _, vectors = static_spectrum(params, basis)
    levels = np.arange(vectors.shape[1], dtype=float)
    rows = []
    for n_bar in photons:
        solution = floquet_solve(params.with_drive(drive_from_photons(g, n_bar)), basis, n_steps, n_times)
        projected = np.abs(vectors.T[None, :, :] @ solution.modes_t) ** 2
        nt = np.einsum("a,tai->i", levels, projected) / solution.n_times
        rows.append(np.sort(nt))
    return np.vstack(rows)


def scan_point(
    params: CqedParams,
    eps_d: float,
    n_steps: int = DEFAULT_N_STEPS,
    n_times: int = DEFAULT_N_TIMES,
    K: int = DEFAULT_K,
    nr_cutoff: float = NR_CUTOFF,
) -> CqedSteadyState:
    solution = cqed_floquet(params.with_drive(eps_d), n_steps, n_times)
    return resonator_rates_and_steady_state(solution, params, nr_cutoff, K)


def drive_scan(
    params: CqedParams,
    amplitudes: Sequence[float],
    n_steps: int = DEFAULT_N_STEPS,
    n_times: int = DEFAULT_N_TIMES,
    K: int = DEFAULT_K,
    nr_cutoff: float = NR_CUTOFF,
    map_fn: Callable[[Callable, Iterable], Iterable] = map,
) -> pd.DataFrame:
    """Steady-state ⟨⟨N_r⟩⟩, ⟨⟨N_t⟩⟩, N_occ and dressed-vacuum weight per drive amplitude."""

    def at(eps: float) -> CqedSteadyState:
        return scan_point(params, float(eps), n_steps, n_times, K, nr_cutoff)

    states = list(map_fn(at, amplitudes))
    return pd.DataFrame(
        {
            "eps_d": np.asarray(amplitudes, dtype=float),
            "Nr_mean": [s.Nr_mean for s in states],
            "Nt_mean": [s.Nt_mean for s in states],
            "n_occ": [s.n_occ for s in states],
            "vacuum_weight": [s.vacuum_weight for s in states],
        }
    )


# --- Random-matrix and closed-form estimates ---


def dipole_statistics(source: MatrixElementTensor | np.ndarray, M: int) -> DipoleStatistics:
    """
    RMS dipole moments over the lowest M states.

    For a matrix-element tensor |n_ij|² is the period average Σ_k |n_ijk|².
    States must already be ordered by (mean) energy.
    """
    if isinstance(source, MatrixElementTensor):
        squared = np.sum(np.abs(source.values) ** 2, axis=2)
    else:
        squared = np.abs(np.asarray(source)) ** 2
    if not 2 <= M <= squared.shape[0]:
        raise InvalidParameterError(f"M must lie in [2, {squared.shape[0]}] (got {M})")
    block = squared[:M, :M]
    per_state = np.sqrt(block.sum(axis=1) / M)
    per_state_offdiag = np.sqrt((block.sum(axis=1) - np.diagonal(block)) / (M - 1))

    half = (M - 1) / 2.0
    projector = half * (half + 1.0) * M / 3.0
    return DipoleStatistics(
        per_state=per_state,
        per_state_offdiag=per_state_offdiag,
        mean=float(per_state.mean()),
        mean_offdiag=float(per_state_offdiag.mean()),
        rmt_prediction=math.sqrt(M / 12.0),
        projector_norm_squared=projector,
        projector_mean=math.sqrt(projector) / M,
    )


def critical_photon_number(g: float, omega_d: float, n_ch: int) -> CriticalPhotonNumber:
    """
    Photon number where the chaos-assisted coupling 2g√(n+1)√(N_ch/12)
    reaches the chaotic level spacing ω_d/N_ch.

    n_crit = 3ω_d²/(g²N_ch³) solves the balance for n + 1; the shifted value
    is the corresponding n.
    """
    if n_ch < 1:
        raise InvalidParameterError(f"N_ch must be at least 1 (got {n_ch})")
    if g <= 0 or omega_d <= 0:
        raise InvalidParameterError("g and omega_d must be positive")
    n_crit = 3.0 * omega_d**2 / (g**2 * n_ch**3)
    return CriticalPhotonNumber(
        g_eff=2.0 * g * math.sqrt(n_ch / 12.0),
        delta_eff=omega_d / n_ch,
        n_crit=n_crit,
        n_crit_shifted=n_crit - 1.0,
    )
