# quasichaos/physics/floquet.py

"""
Floquet Solver
One-period propagator by midpoint exponential stepping, quasienergies and
periodic modes, mean energy per cycle, overlap tracking along amplitude sweeps
and the ac-Stark shift of the 0-1 transition.
"""

from __future__ import annotations

import logging
import math
from dataclasses import replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import linalg

from quasichaos.core.errors import AccuracyError, ConfigError, InvalidParameterError, NoSolutionError
from quasichaos.core.models import (
    ChargeBasis,
    FloquetSolution,
    PeriodicHamiltonian,
    StarkShiftCurve,
    TrackingResult,
    TransmonParams,
)
from quasichaos.physics.model import driven_hamiltonian

logger = logging.getLogger(__name__)

DEFAULT_N_STEPS = 1024
MIN_N_STEPS = 256
DEFAULT_N_TIMES = 128
UNITARITY_TOL = 1e-9
ORTHONORMALITY_TOL = 1e-8
DEGENERACY_TOL = 1e-12
TRACKING_THRESHOLD = 0.5
CONVERGENCE_TOL = 1e-7
SWEEP_STEP = 0.005  # in units of ω_p
SHIFT_TOL = 2.0 * math.pi * 1e-4  # 0.1 MHz in rad/ns

# complex entries held by one batch of step unitaries
_BATCH_ENTRIES = 2**22


def fold(quasienergies: np.ndarray, omega: float) -> np.ndarray:
    """Map energies into the first Brillouin zone (-ω/2, ω/2]."""
    half = 0.5 * omega
    return half - np.mod(half - np.asarray(quasienergies, dtype=float), omega)


def _is_diagonal(matrix: np.ndarray) -> bool:
    return not np.any(matrix - np.diag(np.diagonal(matrix)))


def _static_eigensystem(static: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if _is_diagonal(static):
        return np.real(np.diagonal(static)).copy(), np.eye(static.shape[0], dtype=complex)
    return linalg.eigh(static)


def _step_unitaries(ham: PeriodicHamiltonian, midpoints: np.ndarray, dt: float) -> np.ndarray:
    drive = ham.eps * np.cos(ham.omega * midpoints)
    stack = ham.static[None, :, :] + drive[:, None, None] * ham.drive[None, :, :]
    w, v = np.linalg.eigh(stack)
    return (v * np.exp(-1j * dt * w)[:, None, :]) @ np.conj(np.swapaxes(v, 1, 2))


def evolve(
    ham: PeriodicHamiltonian, n_steps: int = DEFAULT_N_STEPS, n_times: int = DEFAULT_N_TIMES
) -> tuple[np.ndarray, np.ndarray]:
    """
    Propagate over one period.

    Args:
        ham: Periodic Hamiltonian
        n_steps: Midpoint steps per period (>= 256)
        n_times: Number of uniformly spaced snapshots U(t_j, 0), t_j = jT/n_times

    Returns:
        (U_F, snapshots) with snapshots shaped (n_times, D, D)

    Raises:
        ConfigError: If n_steps is too small or not a multiple of n_times
    """
    if n_steps < MIN_N_STEPS:
        raise ConfigError(f"propagator needs n_steps >= {MIN_N_STEPS} (got {n_steps})")
    if n_times < 1 or n_steps % n_times:
        raise ConfigError(f"n_steps={n_steps} must be a multiple of n_times={n_times}")

    dim = ham.dimension
    period = ham.period
    dt = period / n_steps
    stride = n_steps // n_times
    snapshots = np.empty((n_times, dim, dim), dtype=complex)

    if ham.eps == 0.0:
        w, v = _static_eigensystem(ham.static)
        for j in range(n_times):
            snapshots[j] = (v * np.exp(-1j * w * j * period / n_times)) @ v.conj().T
        return (v * np.exp(-1j * w * period)) @ v.conj().T, snapshots

    batch = max(1, _BATCH_ENTRIES // (dim * dim))
    U = np.eye(dim, dtype=complex)
    snapshots[0] = U
    for first in range(0, n_steps, batch):
        last = min(first + batch, n_steps)
        steps = _step_unitaries(ham, (np.arange(first, last) + 0.5) * dt, dt)
        for offset, step in enumerate(steps):
            U = step @ U
            done = first + offset + 1
            if done % stride == 0 and done < n_steps:
                snapshots[done // stride] = U
    return U, snapshots


def unitarity_defect(U: np.ndarray) -> float:
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))


def gram_deviation(modes: np.ndarray) -> float:
    """Largest entry of |Φ†Φ - 1| for modes stored as columns."""
    gram = modes.conj().T @ modes
    return float(np.max(np.abs(gram - np.eye(gram.shape[0]))))


def _eigenphase_distance(U_a: np.ndarray, U_b: np.ndarray) -> float:
    phases_a = np.angle(linalg.eigvals(U_a))
    phases_b = np.angle(linalg.eigvals(U_b))
    diff = np.angle(np.exp(1j * (phases_a[:, None] - phases_b[None, :])))
    return float(np.max(np.min(np.abs(diff), axis=1)))


def propagator(
    params: TransmonParams,
    basis: ChargeBasis,
    n_steps: int = DEFAULT_N_STEPS,
    check_convergence: bool = False,
    tolerance: float = CONVERGENCE_TOL,
) -> np.ndarray:
    """
    One-period propagator U_F of the driven transmon.

    Raises:
        AccuracyError: If unitarity is lost or, when requested, doubling the step
            count moves quasienergies by more than tolerance·ω_d
    """
    ham = driven_hamiltonian(params, basis)
    U_F, _ = evolve(ham, n_steps, 1)
    _check_unitary(U_F)
    if check_convergence:
        check_step_convergence(ham, U_F, n_steps, tolerance)
    return U_F


def check_step_convergence(
    ham: PeriodicHamiltonian, U_F: np.ndarray, n_steps: int, tolerance: float = CONVERGENCE_TOL
) -> float:
    """Richardson-style self-convergence: compare against 2·n_steps."""
    U_fine, _ = evolve(ham, 2 * n_steps, 1)
    drift = _eigenphase_distance(U_F, U_fine) / ham.period / ham.omega
    if drift > tolerance:
        raise AccuracyError(
            f"quasienergies move by {drift:.2e}·ω_d when doubling n_steps={n_steps}"
        )
    return drift


def _check_unitary(U: np.ndarray) -> float:
    defect = unitarity_defect(U)
    if defect > UNITARITY_TOL:
        raise AccuracyError(f"propagator unitarity defect {defect:.2e} exceeds {UNITARITY_TOL}")
    return defect


def _order_modes(
    quasienergies: np.ndarray, Z: np.ndarray, period: float, static: np.ndarray
) -> tuple[np.ndarray, bool]:
    order = np.argsort(quasienergies, kind="stable")
    gaps = np.diff(quasienergies[order]) * period
    tied = gaps < DEGENERACY_TOL
    if not tied.any():
        return order, False
    # ties resolved by the index of the undriven eigenstate with the largest overlap
    levels, undriven = _static_eigensystem(static)
    undriven = undriven[:, np.argsort(levels, kind="stable")]
    overlaps = np.abs(undriven.conj().T @ Z) ** 2
    dominant = np.argmax(overlaps, axis=0)
    order = list(order)
    start = 0
    while start < len(order):
        stop = start
        while stop < len(order) - 1 and tied[stop]:
            stop += 1
        if stop > start:
            order[start : stop + 1] = sorted(order[start : stop + 1], key=lambda idx: dominant[idx])
        start = stop + 1
    return np.asarray(order), True


def decompose(
    U_F: np.ndarray,
    params: TransmonParams | None,
    n_times: int = DEFAULT_N_TIMES,
    *,
    hamiltonian: Optional[PeriodicHamiltonian] = None,
    snapshots: Optional[np.ndarray] = None,
    n_steps: int = DEFAULT_N_STEPS,
) -> FloquetSolution:
    """
    Eigen-decompose U_F into quasienergies and periodic modes.

    Args:
        U_F: One-period propagator
        params: Transmon parameters (None when a hamiltonian is given)
        n_times: Samples per period for the modes
        hamiltonian: Explicit H(t); built from params when omitted
        snapshots: U(t_j, 0) at the sample times; recomputed when omitted
        n_steps: Step count used when snapshots must be recomputed

    Returns:
        FloquetSolution ordered by quasienergy

    Raises:
        AccuracyError: If the modes lose orthonormality
    """
    if hamiltonian is None:
        if params is None:
            raise InvalidParameterError("decompose needs params or an explicit hamiltonian")
        hamiltonian = driven_hamiltonian(params, ChargeBasis.for_dimension(U_F.shape[0]))
    if snapshots is None or snapshots.shape[0] != n_times:
        _, snapshots = evolve(hamiltonian, n_steps, n_times)

    period = hamiltonian.period
    omega = hamiltonian.omega
    T_schur, Z = linalg.schur(U_F, output="complex")
    eigenvalues = np.diagonal(T_schur)
    quasienergies = fold(-np.angle(eigenvalues) / period, omega)

    order, degenerate = _order_modes(quasienergies, Z, period, hamiltonian.static)
    if degenerate:
        logger.warning("Degenerate eigenphases found; ties ordered by overlap with undriven eigenstates")
    quasienergies = quasienergies[order]
    Z = Z[:, order]

    times = np.arange(n_times) * period / n_times
    modes_t = snapshots @ Z[None, :, :]
    modes_t *= np.exp(1j * np.outer(times, quasienergies))[:, None, :]

    for j in sorted({0, n_times // 2}):
        deviation = gram_deviation(modes_t[j])
        if deviation > ORTHONORMALITY_TOL:
            raise AccuracyError(
                f"Floquet modes not orthonormal at t = {times[j]:.4g} ns (Gram deviation {deviation:.2e})"
            )

    energies = np.empty((n_times, quasienergies.shape[0]))
    for j, t in enumerate(times):
        H_t = hamiltonian.at(t)
        energies[j] = np.real(np.sum(modes_t[j].conj() * (H_t @ modes_t[j]), axis=0))
    # periodic trapezoid rule on a uniform grid is the plain mean
    mean_energy = energies.mean(axis=0)

    return FloquetSolution(
        quasienergies=quasienergies,
        modes_t=modes_t,
        mean_energy=mean_energy,
        times=times,
        omega_d=omega,
        params=params,
        E_J=params.E_J if isinstance(params, TransmonParams) else None,
        degenerate=degenerate,
        unitarity_defect=unitarity_defect(U_F),
        n_steps=n_steps,
    )


def solve_hamiltonian(
    ham: PeriodicHamiltonian,
    params=None,
    n_steps: int = DEFAULT_N_STEPS,
    n_times: int = DEFAULT_N_TIMES,
    check_convergence: bool = False,
    tolerance: float = CONVERGENCE_TOL,
) -> FloquetSolution:
    """Propagate once and decompose, reusing the snapshots."""
    U_F, snapshots = evolve(ham, n_steps, n_times)
    _check_unitary(U_F)
    if check_convergence:
        check_step_convergence(ham, U_F, n_steps, tolerance)
    solution = decompose(U_F, params, n_times, hamiltonian=ham, snapshots=snapshots, n_steps=n_steps)
    if params is not None and not isinstance(params, TransmonParams):
        solution = replace(solution, params=params)
    return solution


def floquet_solve(
    params: TransmonParams,
    basis: ChargeBasis = ChargeBasis(),
    n_steps: int = DEFAULT_N_STEPS,
    n_times: int = DEFAULT_N_TIMES,
    check_convergence: bool = False,
    tolerance: float = CONVERGENCE_TOL,
) -> FloquetSolution:
    """Floquet solution of the driven transmon in one pass."""
    return solve_hamiltonian(
        driven_hamiltonian(params, basis), params, n_steps, n_times, check_convergence, tolerance
    )


def sweep_amplitudes(
    params: TransmonParams,
    eps_values: Sequence[float],
    basis: ChargeBasis = ChargeBasis(),
    n_steps: int = DEFAULT_N_STEPS,
    n_times: int = DEFAULT_N_TIMES,
) -> list[FloquetSolution]:
    return [floquet_solve(params.with_drive(eps), basis, n_steps, n_times) for eps in eps_values]


def seed_by_mean_energy(solution: FloquetSolution, levels: int) -> np.ndarray:
    """Indices of the `levels` modes with the lowest mean energy, ascending."""
    return np.argsort(solution.mean_energy, kind="stable")[:levels]


def _best_match(previous: np.ndarray, solution: FloquetSolution) -> tuple[int, float]:
    overlaps = np.abs(previous.conj() @ solution.modes0)
    best = int(np.argmax(overlaps))
    return best, float(min(overlaps[best], 1.0))


def track(sweep: Sequence[FloquetSolution], seed_indices: Sequence[int]) -> TrackingResult:
    """
    Follow modes along a sweep by maximum overlap at t = 0.

    Raises:
        InvalidParameterError: If the sweep is empty
    """
    if not sweep:
        raise InvalidParameterError("track needs a nonempty sweep")
    seeds = np.asarray(seed_indices, dtype=int)
    n_steps = len(sweep)
    indices = np.empty((n_steps, seeds.size), dtype=int)
    overlaps = np.empty((n_steps, seeds.size))
    indices[0] = seeds
    overlaps[0] = 1.0

    for s in range(1, n_steps):
        for col in range(seeds.size):
            previous = sweep[s - 1].modes0[:, indices[s - 1, col]]
            indices[s, col], overlaps[s, col] = _best_match(previous, sweep[s])

    confident = overlaps >= TRACKING_THRESHOLD
    return TrackingResult(indices=indices, overlaps=overlaps, confident=confident)


def ionization_thresholds(tracking: TrackingResult, eps_values: Sequence[float]) -> list[Optional[float]]:
    """First amplitude at which each tracked state loses confidence."""
    eps_values = np.asarray(eps_values, dtype=float)
    thresholds: list[Optional[float]] = []
    for col in range(tracking.indices.shape[1]):
        lost = tracking.first_loss(col)
        thresholds.append(None if lost is None else float(eps_values[lost]))
    return thresholds


def unfold_tracked(series: np.ndarray, reference: float, omega: float) -> np.ndarray:
    """Add multiples of ω to follow a folded series continuously from `reference`."""
    out = np.empty(len(series))
    previous = reference
    for s, value in enumerate(series):
        previous = value + omega * round((previous - value) / omega)
        out[s] = previous
    return out


def ac_stark_shift(
    sweep: Sequence[FloquetSolution],
    eps_values: Sequence[float],
    tracking: Optional[TrackingResult] = None,
) -> StarkShiftCurve:
    """
    Shift of the 0-1 transition relative to the first sweep point.

    The first sweep point is expected at zero drive; its mean-energy difference
    fixes the Brillouin-zone representative of the unfolded transition.
    """
    if not sweep:
        raise InvalidParameterError("ac_stark_shift needs a nonempty sweep")
    if tracking is None:
        tracking = track(sweep, seed_by_mean_energy(sweep[0], 2))
    omega = sweep[0].omega_d
    i0, i1 = tracking.indices[0]
    reference = float(sweep[0].mean_energy[i1] - sweep[0].mean_energy[i0])

    raw = np.array(
        [
            sol.quasienergies[tracking.indices[s, 1]] - sol.quasienergies[tracking.indices[s, 0]]
            for s, sol in enumerate(sweep)
        ]
    )
    unfolded = unfold_tracked(raw, reference, omega)
    valid = np.logical_and.accumulate(tracking.confident.all(axis=1))
    shift = np.where(valid, unfolded - unfolded[0], np.nan)
    truncated = not bool(valid.all())
    if truncated:
        logger.warning(
            f"Tracking lost at eps_d={float(np.asarray(eps_values)[np.argmin(valid)]):.4g}; Stark curve truncated"
        )
    return StarkShiftCurve(
        eps_d=np.asarray(eps_values, dtype=float), shift=shift, valid=valid, truncated=truncated
    )


def amplitude_for_shift(
    params: TransmonParams,
    target_shift: float,
    basis: ChargeBasis = ChargeBasis(),
    eps_step: Optional[float] = None,
    eps_max: Optional[float] = None,
    n_steps: int = DEFAULT_N_STEPS,
    n_times: int = DEFAULT_N_TIMES,
    tolerance: float = SHIFT_TOL,
    solver: Callable[..., FloquetSolution] = floquet_solve,
) -> float:
    """
    Drive amplitude whose 0-1 ac-Stark shift has magnitude |target_shift|.

    Walks the amplitude grid with overlap tracking until the first bracket, then
    bisects with tracking from the bracket's lower end.

    Raises:
        NoSolutionError: If tracking is lost or eps_max is reached first
    """
    if target_shift == 0.0:
        return 0.0
    target = abs(target_shift)
    omega_p = math.sqrt(8.0 * params.E_J * params.E_C)
    eps_step = eps_step if eps_step is not None else SWEEP_STEP * omega_p
    eps_max = eps_max if eps_max is not None else 2.0 * omega_p

    def solve(eps: float) -> FloquetSolution:
        return solver(params.with_drive(eps), basis, n_steps, n_times)

    base = solve(0.0)
    i0, i1 = seed_by_mean_energy(base, 2)
    reference = float(base.mean_energy[i1] - base.mean_energy[i0])
    omega = base.omega_d

    def advance(prev_sol, prev_idx, prev_diff, eps):
        sol = solve(eps)
        j0, o0 = _best_match(prev_sol.modes0[:, prev_idx[0]], sol)
        j1, o1 = _best_match(prev_sol.modes0[:, prev_idx[1]], sol)
        raw = sol.quasienergies[j1] - sol.quasienergies[j0]
        diff = raw + omega * round((prev_diff - raw) / omega)
        return sol, (j0, j1), diff, min(o0, o1) >= TRACKING_THRESHOLD

    lo = (0.0, base, (i0, i1), reference)
    eps = 0.0
    hi = None
    while eps < eps_max:
        eps = min(eps + eps_step, eps_max)
        sol, idx, diff, confident = advance(lo[1], lo[2], lo[3], eps)
        if not confident:
            raise NoSolutionError(f"tracking lost at eps_d={eps:.4g} before reaching the target shift")
        if abs(diff - reference) >= target:
            hi = (eps, sol, idx, diff)
            break
        lo = (eps, sol, idx, diff)
    if hi is None:
        raise NoSolutionError(f"target shift not reached up to eps_d={eps_max:.4g}")

    for _ in range(60):
        mid = 0.5 * (lo[0] + hi[0])
        sol, idx, diff, confident = advance(lo[1], lo[2], lo[3], mid)
        if not confident:
            raise NoSolutionError(f"tracking lost inside the bracket at eps_d={mid:.4g}")
        error = abs(diff - reference) - target
        if abs(error) < tolerance:
            return mid
        if error < 0:
            lo = (mid, sol, idx, diff)
        else:
            hi = (mid, sol, idx, diff)
    return 0.5 * (lo[0] + hi[0])
