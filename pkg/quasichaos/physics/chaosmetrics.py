# quasichaos/physics/chaosmetrics.py

"""
Chaos Metrics
Quasienergy spacing statistics pooled over offset charge, reference
distributions, Kolmogorov-Smirnov distances, gap ratios and Floquet parity.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Iterable, Literal, Sequence

import numpy as np
from scipy import stats

from quasichaos.core.errors import ClassificationRefused, InvalidParameterError
from quasichaos.core.models import ChargeBasis, FloquetSolution, SpacingEnsemble, TransmonParams
from quasichaos.physics.floquet import DEFAULT_N_STEPS, DEFAULT_N_TIMES, floquet_solve

logger = logging.getLogger(__name__)

Reference = Literal["poisson", "wigner_dyson"]

DEFAULT_WINDOW = (1.6, 2.5)
MIN_NG_SAMPLES = 20
MIN_KS_SAMPLES = 100
PARITY_CONFIDENCE = 0.99
SYMMETRY_TOL = 1e-9

GAP_RATIO_POISSON = 2.0 * math.log(2.0) - 1.0
GAP_RATIO_GOE = 4.0 - 2.0 * math.sqrt(3.0)


# --- Reference distributions ---


def reference_pdf(s: np.ndarray, reference: Reference) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if reference == "poisson":
        return np.exp(-s)
    if reference == "wigner_dyson":
        return 0.5 * math.pi * s * np.exp(-0.25 * math.pi * s**2)
    raise InvalidParameterError(f"unknown reference distribution '{reference}'")


def reference_cdf(s: np.ndarray, reference: Reference) -> np.ndarray:
    s = np.clip(np.asarray(s, dtype=float), 0.0, None)
    if reference == "poisson":
        return -np.expm1(-s)
    if reference == "wigner_dyson":
        return -np.expm1(-0.25 * math.pi * s**2)
    raise InvalidParameterError(f"unknown reference distribution '{reference}'")


# --- Spectra ---


def select_chaotic_window(
    solution: FloquetSolution, lo: float = DEFAULT_WINDOW[0], hi: float = DEFAULT_WINDOW[1]
) -> np.ndarray:
    """Indices with lo < ⟨⟨H⟩⟩/E_J < hi, sorted by quasienergy."""
    scaled = solution.mean_energy_over_EJ
    inside = np.flatnonzero((scaled > lo) & (scaled < hi))
    if inside.size == 0:
        logger.warning(f"No Floquet modes with mean energy in ({lo}, {hi}) E_J")
    return inside[np.argsort(solution.quasienergies[inside], kind="stable")]


def spacings(quasienergies: np.ndarray, omega_d: float) -> np.ndarray:
    """
    Nearest-neighbour spacings on the quasienergy circle, normalized by ω_d/N.

    The last spacing wraps around the Brillouin zone: ε_first - ε_last + ω_d.

    Raises:
        InvalidParameterError: With fewer than two levels
    """
    levels = np.sort(np.asarray(quasienergies, dtype=float))
    if levels.size < 2:
        raise InvalidParameterError(f"spacings need at least two levels (got {levels.size})")
    raw = np.append(np.diff(levels), levels[0] - levels[-1] + omega_d)
    return raw / (omega_d / levels.size)


def gap_ratio(normalized: np.ndarray) -> float:
    """Mean of min/max over cyclically adjacent spacing pairs."""
    s = np.asarray(normalized, dtype=float)
    if s.size < 2:
        raise InvalidParameterError("gap ratio needs at least two spacings")
    pair = np.roll(s, -1)
    upper = np.maximum(s, pair)
    ratios = np.divide(np.minimum(s, pair), upper, out=np.zeros_like(s), where=upper > 0)
    return float(ratios.mean())


def window_spacings(
    params: TransmonParams,
    window: tuple[float, float] = DEFAULT_WINDOW,
    basis: ChargeBasis = ChargeBasis(),
    n_steps: int = DEFAULT_N_STEPS,
    n_times: int = DEFAULT_N_TIMES,
) -> np.ndarray:
    """Normalized spacings of the windowed modes at one offset charge (empty below two levels)."""
    solution = floquet_solve(params, basis, n_steps, n_times)
    inside = select_chaotic_window(solution, *window)
    if inside.size < 2:
        return np.empty(0)
    return spacings(solution.quasienergies[inside], solution.omega_d)


def ng_grid(ng_samples: int) -> np.ndarray:
    return np.linspace(0.0, 0.5, ng_samples)


def pool_spacings(
    ng_values: Sequence[float], per_sample: Sequence[np.ndarray], window: tuple[float, float]
) -> SpacingEnsemble:
    """Pool per-sample spacings in sample order."""
    counts = np.array([len(s) for s in per_sample], dtype=int)
    pooled = np.concatenate([np.asarray(s, dtype=float) for s in per_sample]) if len(per_sample) else np.empty(0)
    sample_ng = np.repeat(np.asarray(ng_values, dtype=float), counts)
    return SpacingEnsemble(spacings=pooled, sample_ng=sample_ng, counts=counts, window=window)


def ensemble(
    params: TransmonParams,
    ng_samples: int,
    window: tuple[float, float] = DEFAULT_WINDOW,
    basis: ChargeBasis = ChargeBasis(),
    n_steps: int = DEFAULT_N_STEPS,
    n_times: int = DEFAULT_N_TIMES,
    map_fn: Callable[[Callable, Iterable], Iterable] = map,
) -> SpacingEnsemble:
    """
    Spacings pooled over n_g uniformly spread on [0, 0.5].

    Args:
        params: Transmon parameters (n_g is overridden per sample)
        ng_samples: Number of offset-charge samples (>= 20)
        window: Mean-energy window in E_J units
        basis: Charge basis
        n_steps: Propagator steps
        n_times: Mode samples
        map_fn: Mapping used to evaluate samples, sequential by default

    Returns:
        SpacingEnsemble
    """
    if ng_samples < MIN_NG_SAMPLES:
        raise InvalidParameterError(f"ensemble needs ng_samples >= {MIN_NG_SAMPLES} (got {ng_samples})")
    ng_values = ng_grid(ng_samples)

    def at(ng: float) -> np.ndarray:
        return window_spacings(params.with_ng(float(ng)), window, basis, n_steps, n_times)

    return pool_spacings(ng_values, list(map_fn(at, ng_values)), window)


def distribution_distance(samples: SpacingEnsemble | np.ndarray, reference: Reference) -> float:
    """
    Kolmogorov-Smirnov distance between pooled spacings and a reference CDF.

    Raises:
        InvalidParameterError: With fewer than 100 spacings
    """
    values = samples.spacings if isinstance(samples, SpacingEnsemble) else np.asarray(samples)
    if values.size < MIN_KS_SAMPLES:
        raise InvalidParameterError(f"KS distance needs >= {MIN_KS_SAMPLES} spacings (got {values.size})")
    return float(stats.kstest(values, lambda s: reference_cdf(s, reference)).statistic)


def integrated_distribution(values: np.ndarray, grid: np.ndarray) -> dict[str, np.ndarray]:
    """Empirical I(Δ) = ∫₀^Δ P with the Poisson and Wigner-Dyson references."""
    values = np.sort(np.asarray(values, dtype=float))
    grid = np.asarray(grid, dtype=float)
    empirical = np.searchsorted(values, grid, side="right") / max(values.size, 1)
    return {
        "spacing": grid,
        "empirical": empirical,
        "poisson": reference_cdf(grid, "poisson"),
        "wigner_dyson": reference_cdf(grid, "wigner_dyson"),
    }


# --- Parity ---


def _symmetric_offset(ng: float) -> float:
    """2ν for ν = n_g - round(n_g) at a symmetric point, else refuse."""
    local = ng - round(ng)
    for candidate in (0.0, 0.5, -0.5):
        if abs(local - candidate) < SYMMETRY_TOL:
            return 2.0 * candidate
    raise ClassificationRefused(
        f"parity is only exact at n_g = 0 or 0.5 mod 1 (got n_g={ng})"
    )


def parity_operator(basis: ChargeBasis, ng: float) -> np.ndarray:
    """
    Reflection m → 2ν - m about the local offset charge.

    At half-integer n_g the reflection maps the outermost charge state out of
    the truncated basis; that row and column stay zero, so P² is the identity
    everywhere except on that state (see unpaired_charge_states).
    """
    shift = int(round(_symmetric_offset(ng)))
    labels = basis.labels
    P = np.zeros((basis.dimension, basis.dimension))
    targets = shift - labels
    inside = np.abs(targets) <= basis.cutoff
    P[targets[inside] + basis.cutoff, np.flatnonzero(inside)] = 1.0
    return P


def unpaired_charge_states(basis: ChargeBasis, ng: float) -> np.ndarray:
    """Basis indices whose mirror image lies outside the truncation."""
    shift = int(round(_symmetric_offset(ng)))
    return np.flatnonzero(np.abs(shift - basis.labels) > basis.cutoff)


def parity_classify(solution: FloquetSolution, ng: float) -> np.ndarray:
    """
    Floquet parity labels ±1 from ⟨φ_k(0)|P|φ_k(T/2)⟩.

    Modes whose expectation falls below 0.99 in magnitude get label 0, as do
    modes with more than 1% weight on an unpaired charge state.

    Raises:
        ClassificationRefused: Away from n_g ≡ 0 or 0.5
    """
    if solution.n_times % 2:
        raise InvalidParameterError("parity needs an even number of mode samples")
    basis = ChargeBasis.for_dimension(solution.modes_t.shape[1])
    P = parity_operator(basis, ng)
    early = solution.modes_t[0]
    late = solution.modes_t[solution.n_times // 2]
    expectation = np.sum(early.conj() * (P @ late), axis=0)
    labels = np.where(np.real(expectation) >= 0, 1, -1)
    truncated = np.sum(np.abs(early[unpaired_charge_states(basis, ng)]) ** 2, axis=0) > 1.0 - PARITY_CONFIDENCE
    if truncated.any():
        logger.warning(f"{int(truncated.sum())} modes reach the unpaired edge of the charge basis")
    ambiguous = (np.abs(expectation) < PARITY_CONFIDENCE) | truncated
    if ambiguous.any():
        logger.warning(f"{int(ambiguous.sum())} modes have no definite parity (|⟨P⟩| < {PARITY_CONFIDENCE})")
    return np.where(ambiguous, 0, labels)
