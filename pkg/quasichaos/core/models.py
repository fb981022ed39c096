# quasichaos/core/models.py

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Optional

import numpy as np
import pandas as pd

from quasichaos.core.errors import InvalidParameterError


# --- System parameters ---


@dataclass(frozen=True)
class TransmonParams:
    """Driven transmon parameters, energies as angular frequencies (rad/ns)."""

    E_C: float
    E_J: float
    n_g: float = 0.0
    eps_d: float = 0.0
    omega_d: float = 1.0

    def __post_init__(self) -> None:
        if not (self.E_C > 0 and self.E_J > 0):
            raise InvalidParameterError(
                f"E_C and E_J must be positive (got E_C={self.E_C}, E_J={self.E_J})"
            )
        if not self.omega_d > 0:
            raise InvalidParameterError(f"omega_d must be positive (got {self.omega_d})")
        if self.eps_d < 0:
            raise InvalidParameterError(f"eps_d must be nonnegative (got {self.eps_d})")
        if not math.isfinite(self.n_g):
            raise InvalidParameterError("n_g must be finite")

    @property
    def ng_reduced(self) -> float:
        """Offset charge modulo 1, in [0, 1)."""
        return self.n_g % 1.0

    @property
    def ng_local(self) -> float:
        """Offset charge relative to its nearest integer, in [-0.5, 0.5]."""
        return self.n_g - round(self.n_g)

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega_d

    def with_drive(self, eps_d: float) -> "TransmonParams":
        return replace(self, eps_d=eps_d)

    def with_ng(self, n_g: float) -> "TransmonParams":
        return replace(self, n_g=n_g)


@dataclass(frozen=True)
class ReducedParams:
    """Rescaled (classical pendulum) parameters."""

    hbar_eff: float
    eps_tilde: float
    omega_tilde: float
    ng_tilde: float
    omega_p: float

    @property
    def period(self) -> float:
        """Drive period in units of 1/ω_p."""
        return 2.0 * math.pi / self.omega_tilde


@dataclass(frozen=True)
class ChargeBasis:
    """Truncated charge basis m = -cutoff..cutoff."""

    cutoff: int = 17

    def __post_init__(self) -> None:
        if self.cutoff < 0:
            raise InvalidParameterError(f"charge cutoff must be nonnegative (got {self.cutoff})")

    @property
    def dimension(self) -> int:
        return 2 * self.cutoff + 1

    @property
    def labels(self) -> np.ndarray:
        return np.arange(-self.cutoff, self.cutoff + 1)

    @classmethod
    def for_dimension(cls, dimension: int) -> "ChargeBasis":
        if dimension % 2 == 0:
            raise InvalidParameterError(f"charge basis dimension must be odd (got {dimension})")
        return cls(cutoff=(dimension - 1) // 2)


@dataclass(frozen=True, eq=False)
class PeriodicHamiltonian:
    """H(t) = static + eps·cos(omega·t)·drive on a fixed Hilbert space."""

    static: np.ndarray
    drive: np.ndarray
    eps: float
    omega: float

    @property
    def dimension(self) -> int:
        return self.static.shape[0]

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    def at(self, t: float) -> np.ndarray:
        return self.static + self.eps * math.cos(self.omega * t) * self.drive


# --- Classical dynamics ---


@dataclass(frozen=True)
class PhasePoint:
    """Point (φ̃, ñ) of the rescaled pendulum phase space."""

    phi: float
    n: float


@dataclass(eq=False)
class Trajectory:
    """Sampled classical trajectory; phi is compact, winding counts 2π turns."""

    times: np.ndarray
    phi: np.ndarray
    n: np.ndarray
    winding: np.ndarray

    @property
    def phi_unwrapped(self) -> np.ndarray:
        return self.phi + 2.0 * math.pi * self.winding

    @property
    def end(self) -> PhasePoint:
        return PhasePoint(phi=float(self.phi[-1]), n=float(self.n[-1]))


@dataclass(eq=False)
class SectionPoints:
    """Stroboscopic points, arrays shaped (n_starts, n_periods)."""

    starts: list[PhasePoint]
    phi: np.ndarray
    n: np.ndarray
    period: float
    t0: float

    def to_frame(self) -> pd.DataFrame:
        n_starts, n_periods = self.phi.shape
        return pd.DataFrame(
            {
                "start_id": np.repeat(np.arange(n_starts), n_periods),
                "period_index": np.tile(np.arange(1, n_periods + 1), n_starts),
                "phi": self.phi.ravel(),
                "n": self.n.ravel(),
            }
        )


@dataclass(frozen=True)
class LayerWidth:
    """Analytic chaotic-layer width W_c/E_J with its validity flag."""

    value: float
    in_domain: bool


@dataclass
class ResonanceReport:
    """Predicted classical resonances for one drive setting."""

    omega_tilde: float
    bounded_orders: list[str] = field(default_factory=list)
    unbounded_momenta: Optional[tuple[float, float]] = None
    bessel_factor: float = 1.0
    layer_width: Optional[LayerWidth] = None


# --- Floquet ---


@dataclass(frozen=True, eq=False)
class FloquetSolution:
    """Quasienergies, periodic modes sampled over one period, mean energies per cycle."""

    quasienergies: np.ndarray  # (N,)
    modes_t: np.ndarray  # (n_times, D, N)
    mean_energy: np.ndarray  # (N,)
    times: np.ndarray  # (n_times,)
    omega_d: float
    params: Any = None
    E_J: Optional[float] = None
    degenerate: bool = False
    unitarity_defect: float = 0.0
    n_steps: int = 0

    @property
    def n_states(self) -> int:
        return self.quasienergies.shape[0]

    @property
    def n_times(self) -> int:
        return self.times.shape[0]

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega_d

    @property
    def modes0(self) -> np.ndarray:
        return self.modes_t[0]

    @property
    def mean_energy_over_EJ(self) -> np.ndarray:
        """⟨⟨H⟩⟩/E_J measured from the bottom of the cosine well (separatrix at 2)."""
        if self.E_J is None:
            raise InvalidParameterError("mean energy in E_J units needs a transmon solution")
        return (self.mean_energy + self.E_J) / self.E_J

    def reordered(self, order: np.ndarray) -> "FloquetSolution":
        order = np.asarray(order)
        return replace(
            self,
            quasienergies=self.quasienergies[order],
            modes_t=self.modes_t[:, :, order],
            mean_energy=self.mean_energy[order],
        )

    def sorted_by_mean_energy(self) -> "FloquetSolution":
        return self.reordered(np.argsort(self.mean_energy, kind="stable"))


@dataclass(eq=False)
class TrackingResult:
    """Per sweep step: tracked index, overlap magnitude and confidence per seed."""

    indices: np.ndarray  # (n_steps, n_seeds)
    overlaps: np.ndarray  # (n_steps, n_seeds)
    confident: np.ndarray  # (n_steps, n_seeds) bool

    def first_loss(self, seed: int) -> Optional[int]:
        lost = np.flatnonzero(~self.confident[:, seed])
        return int(lost[0]) if lost.size else None


@dataclass(eq=False)
class StarkShiftCurve:
    """ac-Stark shift of the 0-1 transition along an amplitude sweep."""

    eps_d: np.ndarray
    shift: np.ndarray  # NaN after tracking loss
    valid: np.ndarray
    truncated: bool


# --- Phase space ---


@dataclass(eq=False)
class HusimiGrid:
    """Husimi function values[i_n, i_phi] on a (φ̃, ñ) grid."""

    phi: np.ndarray
    n: np.ndarray
    values: np.ndarray
    time: float
    hbar_eff: float

    def normalization(self) -> float:
        """Discrete ∫ Q dφ̃ dñ / (2π ħ_eff)."""
        dphi = self.phi[1] - self.phi[0]
        dn = self.n[1] - self.n[0]
        return float(self.values.sum() * dphi * dn / (2.0 * math.pi * self.hbar_eff))

    def to_frame(self) -> pd.DataFrame:
        phi, n = np.meshgrid(self.phi, self.n)
        return pd.DataFrame({"phi": phi.ravel(), "n": n.ravel(), "Q": self.values.ravel()})


# --- Spectral statistics ---


@dataclass(eq=False)
class SpacingEnsemble:
    """Normalized spacings pooled over offset-charge samples."""

    spacings: np.ndarray
    sample_ng: np.ndarray  # n_g of each pooled spacing
    counts: np.ndarray  # levels in the window per sample
    window: tuple[float, float]

    @property
    def mean(self) -> float:
        return float(self.spacings.mean()) if self.spacings.size else float("nan")


# --- Dissipation ---


@dataclass(eq=False)
class MatrixElementTensor:
    """Fourier components values[i, j, k + K] of ⟨φ_i(t)|X|φ_j(t)⟩."""

    values: np.ndarray
    K: int
    n_times: int
    quasienergies: np.ndarray
    omega_d: float

    @property
    def ks(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1)

    def at(self, k: int) -> np.ndarray:
        return self.values[:, :, k + self.K]

    def transition_energies(self) -> np.ndarray:
        """Δ_ijk = ε_j - ε_i - kω_d, shaped like values."""
        eps = self.quasienergies
        return eps[None, :, None] - eps[:, None, None] - self.ks[None, None, :] * self.omega_d

    def time_zero(self) -> np.ndarray:
        return self.values.sum(axis=2)


@dataclass(frozen=True)
class BathSpec:
    """Ohmic bath J(x) = prefactor·(x/omega_ref)·exp(-(x - omega_ref)/omega_c)."""

    temperature_K: float
    omega_c: float
    omega_ref: float
    prefactor: float = 1.0

    def __post_init__(self) -> None:
        if self.temperature_K < 0:
            raise InvalidParameterError("bath temperature must be nonnegative")
        if not (self.omega_c > 0 and self.omega_ref > 0):
            raise InvalidParameterError("bath cutoff and reference frequency must be positive")


@dataclass(frozen=True)
class NoiseSpec:
    """Dephasing noise: 1/f amplitude, log factor, dielectric spectral scale."""

    A_e: float = 1e-4
    log_factor: float = 4.0
    dielectric_scale: float = 1e-3
    bath: Optional[BathSpec] = None


@dataclass(eq=False)
class RateMatrix:
    """Γ_ij (rate from j to i) with even-k and odd-k channel parts."""

    total: np.ndarray
    even: np.ndarray
    odd: np.ndarray

    @property
    def n_states(self) -> int:
        return self.total.shape[0]

    def to_frame(self, threshold: float = 0.0) -> pd.DataFrame:
        i, j = np.nonzero(self.total > threshold)
        return pd.DataFrame(
            {
                "i": i,
                "j": j,
                "gamma_even_k": self.even[i, j],
                "gamma_odd_k": self.odd[i, j],
            }
        )


@dataclass(eq=False)
class SteadyState:
    """Stationary populations of a rate matrix."""

    populations: np.ndarray
    residual: float
    components: list[np.ndarray] = field(default_factory=list)
    unique: bool = True


@dataclass(frozen=True)
class BoltzmannFit:
    """Log-linear fit of populations against energy."""

    beta: float
    intercept: float
    log_residual: float


@dataclass(frozen=True)
class DephasingRate:
    """Pure dephasing rate and its two contributions."""

    gamma_phi: float
    one_over_f: float
    dielectric: float
    confident: bool = True


# --- Dispersion ---


@dataclass(eq=False)
class BandCurve:
    """Unfolded tracked quasienergy of one level across n_g ∈ [-0.5, 0.5]."""

    level: int
    ng: np.ndarray
    energy: np.ndarray
    spike: np.ndarray
    confident: np.ndarray

    @property
    def dispersion(self) -> float:
        return float(self.energy.max() - self.energy.min())

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "ng": self.ng,
                "energy": self.energy,
                "spike_flag": self.spike.astype(int),
                "tracked_flag": self.confident.astype(int),
            }
        )


@dataclass(eq=False)
class PhaseSlipSpectrum:
    """Fourier coefficients t_n of a band over one offset-charge period."""

    n: np.ndarray
    t: np.ndarray
    n_samples: int

    def reconstruct(self, ng: np.ndarray) -> np.ndarray:
        ng = np.asarray(ng, dtype=float)
        weights = np.where(
            (self.n_samples % 2 == 0) & (np.abs(self.n) == self.n_samples // 2), 0.5, 1.0
        )
        phases = np.exp(-2j * math.pi * np.outer(ng, self.n))
        return np.real(phases @ (weights * self.t))

    def to_frame(self) -> pd.DataFrame:
        keep = self.n >= 0
        return pd.DataFrame({"n": self.n[keep], "abs_tn": np.abs(self.t[keep])})


@dataclass(frozen=True)
class ScalingFit:
    """Fit of log(dispersion) against ħ_eff⁻¹."""

    slope: float
    intercept: float
    r_squared: float


@dataclass(eq=False)
class ChaoticCoupling:
    """N_ij coupling curve over the threshold index j."""

    state: int
    curve: np.ndarray
    j_threshold: Optional[int] = None
    rms_over_ng: bool = False

    @property
    def value(self) -> Optional[float]:
        if self.j_threshold is None:
            return None
        return float(self.curve[self.j_threshold])


# --- Circuit QED ---


@dataclass(frozen=True)
class CqedParams:
    """Transmon coupled to a resonator: ω_a a†a - i g n (a - a†)."""

    transmon: TransmonParams
    omega_a: float
    g: float
    kappa: float = 0.0
    dims: tuple[int, int] = (35, 20)

    def __post_init__(self) -> None:
        if not self.omega_a > 0:
            raise InvalidParameterError("omega_a must be positive")
        if self.g < 0:
            raise InvalidParameterError("coupling g must be nonnegative")
        if self.kappa < 0:
            raise InvalidParameterError("kappa must be nonnegative")
        if self.dims[0] < 20 or self.dims[1] < 10:
            raise InvalidParameterError(f"dims must be at least (20, 10) (got {self.dims})")

    @property
    def dimension(self) -> int:
        return self.dims[0] * self.dims[1]

    def with_drive(self, eps_d: float) -> "CqedParams":
        return replace(self, transmon=self.transmon.with_drive(eps_d))


@dataclass(frozen=True)
class CqedGridPoint:
    """Time-averaged coordinates of one joint Floquet mode."""

    mode: int
    Nt_avg: float
    Nr_avg: float
    purity: float
    steady_pop: float = 0.0
    comm_error: float = 0.0


@dataclass(eq=False)
class CqedSteadyState:
    """Resonator-mediated rates and their steady state."""

    rates: RateMatrix
    steady: SteadyState
    n_occ: float
    Nr_mean: float
    Nt_mean: float
    vacuum_index: int
    vacuum_weight: float


@dataclass(frozen=True)
class PullRecord:
    """Strongest resonator transition out of a vacuum-like mode."""

    state: int
    partner: int
    k: int
    frequency: float
    pull: float
    weight: float
    purity: float
    Nt_avg: float


@dataclass(eq=False)
class PerturbativePull:
    """Dispersive shift χ_i per Floquet state and divergence flags."""

    chi: np.ndarray
    divergent: np.ndarray


@dataclass(eq=False)
class FoldedSpectrum:
    """Undriven joint spectrum folded by the resonator frequency."""

    energies: np.ndarray  # complex eigenvalues
    folded: np.ndarray
    Nr: np.ndarray
    Nt: np.ndarray
    vectors: np.ndarray
    keep: np.ndarray  # Nt < 20 filter


@dataclass(frozen=True)
class DipoleStatistics:
    """RMS dipole moments over the lowest M states and random-matrix references."""

    per_state: np.ndarray
    per_state_offdiag: np.ndarray
    mean: float
    mean_offdiag: float
    rmt_prediction: float
    projector_norm_squared: float
    projector_mean: float


@dataclass(frozen=True)
class CriticalPhotonNumber:
    """Chaos-assisted critical photon number with its effective couplings."""

    g_eff: float
    delta_eff: float
    n_crit: float
    n_crit_shifted: float


# --- Runs ---


@dataclass(frozen=True)
class PointFailure:
    """A sweep point whose evaluation raised."""

    index: int
    point: str
    kind: str
    message: str


@dataclass
class ExperimentResult:
    """Tables and scalar summary produced by one experiment."""

    tables: dict[str, pd.DataFrame] = field(default_factory=dict)
    summary: dict[str, Any] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    failures: list[PointFailure] = field(default_factory=list)
    defaults: dict[str, Any] = field(default_factory=dict)
