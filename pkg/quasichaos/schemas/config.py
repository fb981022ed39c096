# quasichaos/schemas/config.py

"""
Pydantic schemas for the run configuration.

Every key carries its unit in the name (_GHz, _MHz, _mK); rescaled keys
(eps_tilde, omega_tilde, hbar_eff_inv) are dimensionless.
"""

from __future__ import annotations

from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

Preset = Literal["paper", "ci"]

PRESETS: dict[str, dict[str, object]] = {
    "ci": {"cqed_dims": (20, 12), "ng_samples": 50, "ng_points": 64, "n_periods": 1000},
    "paper": {"cqed_dims": (35, 20), "ng_samples": 200, "ng_points": 128, "n_periods": 2000},
}

DEFAULT_OMEGA_D_GHZ = 7.5
DEFAULT_OMEGA_TILDE = 1.34


class Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TransmonSection(Section):
    """Absolute (EC_GHz, EJ_GHz) or rescaled (hbar_eff_inv, omega_p_GHz) transmon parameters."""

    EC_GHz: Optional[float] = Field(None, description="Charging energy E_C/h", gt=0)
    EJ_GHz: Optional[float] = Field(None, description="Josephson energy E_J/h", gt=0)
    hbar_eff_inv: Optional[float] = Field(None, description="Inverse effective Planck constant √(E_J/8E_C)", gt=0)
    omega_p_GHz: Optional[float] = Field(None, description="Plasma frequency ω_p/2π", gt=0)
    ng: float = Field(0.0, description="Offset charge n_g")

    @model_validator(mode="after")
    def check_unit_set(self) -> "TransmonSection":
        absolute = self.EC_GHz is not None or self.EJ_GHz is not None
        rescaled = self.hbar_eff_inv is not None or self.omega_p_GHz is not None
        if absolute and rescaled:
            raise ValueError("transmon: give either EC_GHz/EJ_GHz or hbar_eff_inv/omega_p_GHz, not both")
        if absolute and (self.EC_GHz is None or self.EJ_GHz is None):
            raise ValueError("transmon: EC_GHz and EJ_GHz must be given together")
        if not absolute and self.hbar_eff_inv is None:
            self.hbar_eff_inv = 3.0
        return self

    @property
    def is_absolute(self) -> bool:
        return self.EC_GHz is not None


class DriveSection(Section):
    """Drive amplitude and frequency; one amplitude set and one frequency set."""

    amplitude_GHz: Optional[float] = Field(None, description="ε_d/2π", ge=0)
    photons: Optional[float] = Field(None, description="Resonator photons n̄, ε_d = 2g√n̄", ge=0)
    g_GHz: Optional[float] = Field(None, description="Coupling g/2π used with photons", gt=0)
    eps_tilde: Optional[float] = Field(None, description="Rescaled amplitude ε_d/ω_p", ge=0)
    frequency_GHz: Optional[float] = Field(None, description="ω_d/2π", gt=0)
    omega_tilde: Optional[float] = Field(None, description="Rescaled frequency ω_d/ω_p", gt=0)
    stark_shift_MHz: Optional[float] = Field(
        None, description="Target 0-1 ac-Stark shift; the amplitude is solved for"
    )

    @model_validator(mode="after")
    def check_amplitude_set(self) -> "DriveSection":
        chosen = [
            name
            for name, given in (
                ("amplitude_GHz", self.amplitude_GHz is not None),
                ("photons", self.photons is not None),
                ("eps_tilde", self.eps_tilde is not None),
                ("stark_shift_MHz", self.stark_shift_MHz is not None),
            )
            if given
        ]
        if len(chosen) > 1:
            raise ValueError(f"drive: conflicting amplitude keys {chosen}")
        if self.photons is not None and self.g_GHz is None:
            raise ValueError("drive: photons needs g_GHz")
        return self


class BasisSection(Section):
    cutoff: int = Field(17, description="Charge cutoff N_c (basis size 2N_c+1)", ge=1, le=200)


class FloquetSection(Section):
    n_steps: int = Field(1024, description="Midpoint steps per period", ge=256)
    n_times: int = Field(128, description="Mode samples per period (power of two)", ge=4)
    convergence_check: bool = Field(False, description="Compare against 2·n_steps")
    convergence_tol: float = Field(1e-7, description="Allowed quasienergy drift in units of ω_d", gt=0)

    @model_validator(mode="after")
    def check_grid(self) -> "FloquetSection":
        if self.n_times & (self.n_times - 1):
            raise ValueError(f"floquet.n_times must be a power of two (got {self.n_times})")
        if self.n_steps % self.n_times:
            raise ValueError("floquet.n_steps must be a multiple of floquet.n_times")
        return self


class SweepSection(Section):
    """Drive-amplitude sweep in units of ω_p: explicit list or start/stop/step."""

    eps_tilde: Optional[List[float]] = Field(None, description="Explicit amplitudes")
    eps_tilde_start: Optional[float] = Field(None, ge=0)
    eps_tilde_stop: Optional[float] = Field(None, ge=0)
    eps_tilde_step: Optional[float] = Field(None, gt=0)

    @model_validator(mode="after")
    def check_points(self) -> "SweepSection":
        ranged = (self.eps_tilde_start, self.eps_tilde_stop, self.eps_tilde_step)
        if self.eps_tilde is not None and any(v is not None for v in ranged):
            raise ValueError("sweep: give either eps_tilde or start/stop/step")
        if self.eps_tilde is None:
            if any(v is None for v in ranged):
                raise ValueError("sweep: start, stop and step are required together")
            if self.eps_tilde_stop < self.eps_tilde_start:
                raise ValueError("sweep: eps_tilde_stop must not be below eps_tilde_start")
        if not self.values():
            raise ValueError("sweep: no amplitude points")
        if any(v < 0 for v in self.values()):
            raise ValueError("sweep: amplitudes must be nonnegative")
        return self

    def values(self) -> list[float]:
        if self.eps_tilde is not None:
            return [float(v) for v in self.eps_tilde]
        count = int(np.floor((self.eps_tilde_stop - self.eps_tilde_start) / self.eps_tilde_step + 1e-9)) + 1
        return [float(self.eps_tilde_start + i * self.eps_tilde_step) for i in range(count)]


class BathSection(Section):
    temperature_mK: float = Field(10.0, description="Bath temperature", ge=0)
    omega_c_over_omega_p: float = Field(10.0, description="Ohmic cutoff in units of ω_p", gt=0)
    prefactor: float = Field(1.0, description="J at the undriven 0-1 frequency", gt=0)


class NoiseSection(Section):
    A_e: float = Field(1e-4, description="1/f charge-noise amplitude", ge=0)
    log_factor: float = Field(4.0, description="Logarithmic 1/f integration factor", ge=0)
    dielectric_scale: float = Field(1e-3, description="Dielectric spectral scale (rad/ns)", ge=0)


class ClassicalSection(Section):
    starts: int = Field(40, description="Number of default starts", ge=1)
    n_periods: Optional[int] = Field(None, description="Periods per start (preset default)", ge=100)
    t0_fraction: float = Field(0.125, description="Section phase as a fraction of T̃", ge=0, lt=1)
    steps_per_period: int = Field(512, description="Integrator steps per period", ge=200)
    chaos_threshold: float = Field(0.02, description="λ above which a start is chaotic", gt=0)


class HusimiSection(Section):
    state_index: int = Field(0, description="Mode index after sorting by mean energy", ge=0)
    time_fraction: float = Field(0.125, description="Sample time as a fraction of T", ge=0, lt=1)
    n_phi: int = Field(201, ge=8)
    n_n: int = Field(201, ge=8)
    n_min: float = Field(-4.0)
    n_max: float = Field(4.0)

    @model_validator(mode="after")
    def check_window(self) -> "HusimiSection":
        if self.n_max <= self.n_min:
            raise ValueError("husimi: n_max must exceed n_min")
        return self


class LevelStatsSection(Section):
    ng_samples: Optional[int] = Field(None, description="Offset-charge samples (preset default)", ge=20)
    window_lo: float = Field(1.6, description="Lower mean-energy bound in E_J")
    window_hi: float = Field(2.5, description="Upper mean-energy bound in E_J")

    @model_validator(mode="after")
    def check_window(self) -> "LevelStatsSection":
        if self.window_hi <= self.window_lo:
            raise ValueError("level_stats: window_hi must exceed window_lo")
        return self


class DispersionSection(Section):
    level: int = Field(1, description="Undriven level followed across n_g", ge=0)
    ng_points: Optional[int] = Field(None, description="n_g intervals (preset default)", ge=64)
    n_max: int = Field(10, description="Largest phase-slip order", ge=1)
    eps_tilde: Optional[float] = Field(None, description="Drive amplitude; falls back to drive section", ge=0)
    hbar_eff_inv_scan: Optional[List[float]] = Field(None, description="ħ_eff⁻¹ values for the scaling fit")


class CouplingSection(Section):
    ng_samples: int = Field(50, description="Offset-charge samples in the RMS average", ge=1)
    j_threshold: int = Field(10, description="Threshold index reported as N_ij", ge=0)
    states: List[int] = Field(default_factory=lambda: [0, 1], description="States by mean-energy rank")


class CqedSection(Section):
    omega_a_GHz: float = Field(8.0, description="Resonator frequency", gt=0)
    g_GHz: float = Field(0.25, description="Transmon-resonator coupling", ge=0)
    kappa_MHz: float = Field(1.0, description="Resonator loss rate κ/2π", ge=0)
    dims: Optional[tuple[int, int]] = Field(None, description="(transmon, resonator) dimensions (preset default)")
    amplitudes_eps_tilde: List[float] = Field(default_factory=lambda: [0.0], description="Drive scan")
    nr_cutoff: float = Field(15.0, description="Modes at or above this ⟨⟨N_r⟩⟩ leave the rate equations", gt=0)
    n_times: int = Field(32, description="Joint mode samples per period", ge=4)
    K: int = Field(8, description="Photon-index window of the matrix elements", ge=1)
    non_hermitian: bool = Field(False, description="Add -iκ/2 a†a in the folded undriven spectrum")

    @model_validator(mode="after")
    def check_dims(self) -> "CqedSection":
        if self.dims is not None and (self.dims[0] < 20 or self.dims[1] < 10):
            raise ValueError(f"cqed.dims must be at least (20, 10) (got {self.dims})")
        if not self.amplitudes_eps_tilde:
            raise ValueError("cqed: amplitudes_eps_tilde is empty")
        if self.n_times < 4 * self.K:
            raise ValueError("cqed: n_times must be at least 4K")
        return self


class DipoleSection(Section):
    M: int = Field(25, description="States in the random-matrix comparison", ge=2)


class NcritSection(Section):
    g_GHz: float = Field(0.25, gt=0)
    omega_d_GHz: float = Field(7.5, gt=0)
    n_ch: int = Field(12, ge=1)


class RunConfig(Section):
    """Complete run configuration after YAML parsing."""

    preset: Optional[Preset] = Field(None, description="Preset filling omitted sizes")
    seed: Optional[int] = Field(None, ge=0)
    transmon: TransmonSection = Field(default_factory=TransmonSection)
    drive: DriveSection = Field(default_factory=DriveSection)
    basis: BasisSection = Field(default_factory=BasisSection)
    floquet: FloquetSection = Field(default_factory=FloquetSection)
    sweep: Optional[SweepSection] = None
    bath: BathSection = Field(default_factory=BathSection)
    noise: NoiseSection = Field(default_factory=NoiseSection)
    classical: ClassicalSection = Field(default_factory=ClassicalSection)
    husimi: HusimiSection = Field(default_factory=HusimiSection)
    level_stats: LevelStatsSection = Field(default_factory=LevelStatsSection)
    dispersion: DispersionSection = Field(default_factory=DispersionSection)
    coupling: CouplingSection = Field(default_factory=CouplingSection)
    cqed: CqedSection = Field(default_factory=CqedSection)
    dipole: DipoleSection = Field(default_factory=DipoleSection)
    ncrit: NcritSection = Field(default_factory=NcritSection)

    def resolved(self, preset: Preset, seed: int) -> "RunConfig":
        """Copy with preset sizes and the seed filled wherever the YAML left them out."""
        chosen = self.preset or preset
        values = PRESETS[chosen]
        return self.model_copy(
            update={
                "preset": chosen,
                "seed": self.seed if self.seed is not None else seed,
                "classical": self.classical.model_copy(
                    update={"n_periods": self.classical.n_periods or values["n_periods"]}
                ),
                "level_stats": self.level_stats.model_copy(
                    update={"ng_samples": self.level_stats.ng_samples or values["ng_samples"]}
                ),
                "dispersion": self.dispersion.model_copy(
                    update={"ng_points": self.dispersion.ng_points or values["ng_points"]}
                ),
                "cqed": self.cqed.model_copy(update={"dims": self.cqed.dims or values["cqed_dims"]}),
            }
        )
