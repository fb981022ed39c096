# quasichaos/services/common.py

"""
Service Helpers
Translate the unit-carrying run configuration into kernel parameters
(rad/ns) and wrap unexpected failures.
"""

from __future__ import annotations

import functools
import logging
import math
from typing import Callable, Optional, TypeVar

from quasichaos.core.errors import ConfigError, InternalError, QuasichaosError
from quasichaos.core.models import BathSpec, ChargeBasis, CqedParams, NoiseSpec, TransmonParams
from quasichaos.core.units import ghz_to_angular, mhz_to_angular, mk_to_kelvin
from quasichaos.physics.floquet import amplitude_for_shift, floquet_solve
from quasichaos.physics.model import from_reduced, static_spectrum
from quasichaos.pipeline.sweep import SweepRunner
from quasichaos.schemas.config import DEFAULT_OMEGA_D_GHZ, DEFAULT_OMEGA_TILDE, RunConfig

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable)


def guarded(method: F) -> F:
    """Re-raise anything that is not a domain error as InternalError."""

    @functools.wraps(method)
    def wrapper(*args, **kwargs):
        try:
            return method(*args, **kwargs)
        except QuasichaosError:
            raise
        except Exception as e:
            logger.error(f"Unexpected failure in {method.__qualname__}: {e}", exc_info=True)
            raise InternalError(f"{type(e).__name__}: {e}") from e

    return wrapper  # type: ignore[return-value]


class ServiceBase:
    """Configuration and sweep runner shared by every experiment service."""

    def __init__(self, config: RunConfig, runner: SweepRunner):
        self.config = config
        self.runner = runner
        self._stark_cache: dict[tuple, float] = {}

    # --- Parameters ---

    def omega_p(self) -> float:
        t = self.config.transmon
        if t.is_absolute:
            return math.sqrt(8.0 * ghz_to_angular(t.EJ_GHz) * ghz_to_angular(t.EC_GHz))
        if t.omega_p_GHz is not None:
            return ghz_to_angular(t.omega_p_GHz)
        d = self.config.drive
        if d.frequency_GHz is not None and d.omega_tilde is not None:
            return ghz_to_angular(d.frequency_GHz) / d.omega_tilde
        return ghz_to_angular(DEFAULT_OMEGA_D_GHZ) / DEFAULT_OMEGA_TILDE

    def omega_d(self) -> float:
        d = self.config.drive
        if d.frequency_GHz is not None:
            return ghz_to_angular(d.frequency_GHz)
        return (d.omega_tilde if d.omega_tilde is not None else DEFAULT_OMEGA_TILDE) * self.omega_p()

    def undriven_params(self, ng: Optional[float] = None) -> TransmonParams:
        t = self.config.transmon
        n_g = t.ng if ng is None else ng
        if t.is_absolute:
            return TransmonParams(
                E_C=ghz_to_angular(t.EC_GHz),
                E_J=ghz_to_angular(t.EJ_GHz),
                n_g=n_g,
                omega_d=self.omega_d(),
            )
        omega_p = self.omega_p()
        return from_reduced(t.hbar_eff_inv, omega_p, 0.0, self.omega_d() / omega_p, n_g)

    def eps_from_tilde(self, eps_tilde: float) -> float:
        return eps_tilde * self.omega_p()

    def drive_params(self, ng: Optional[float] = None) -> TransmonParams:
        """Parameters at the configured drive; a Stark-shift target is solved for."""
        params = self.undriven_params(ng)
        d = self.config.drive
        if d.amplitude_GHz is not None:
            return params.with_drive(ghz_to_angular(d.amplitude_GHz))
        if d.photons is not None:
            return params.with_drive(2.0 * ghz_to_angular(d.g_GHz) * math.sqrt(d.photons))
        if d.eps_tilde is not None:
            return params.with_drive(self.eps_from_tilde(d.eps_tilde))
        if d.stark_shift_MHz is not None:
            return params.with_drive(self.stark_matched_amplitude(params))
        return params

    def stark_matched_amplitude(self, params: TransmonParams) -> float:
        key = (params.n_g, params.E_C, params.E_J, params.omega_d)
        if key not in self._stark_cache:
            target = mhz_to_angular(self.config.drive.stark_shift_MHz)
            logger.info(f"Solving for the amplitude with a {self.config.drive.stark_shift_MHz} MHz Stark shift")
            self._stark_cache[key] = amplitude_for_shift(
                params,
                target,
                basis=self.basis(),
                n_steps=self.config.floquet.n_steps,
                n_times=self.config.floquet.n_times,
            )
        return self._stark_cache[key]

    def sweep_amplitudes(self) -> list[float]:
        """Configured sweep in rad/ns; raises if the config has no sweep."""
        if self.config.sweep is None:
            raise ConfigError("this experiment needs a sweep section")
        return [self.eps_from_tilde(v) for v in self.config.sweep.values()]

    def sweep_tilde(self) -> list[float]:
        if self.config.sweep is None:
            raise ConfigError("this experiment needs a sweep section")
        return self.config.sweep.values()

    def basis(self) -> ChargeBasis:
        return ChargeBasis(cutoff=self.config.basis.cutoff)

    def solve(self, params: TransmonParams):
        f = self.config.floquet
        return floquet_solve(
            params,
            self.basis(),
            f.n_steps,
            f.n_times,
            check_convergence=f.convergence_check,
            tolerance=f.convergence_tol,
        )

    def bath(self, params: TransmonParams) -> BathSpec:
        """Ohmic bath normalized at the undriven 0-1 frequency."""
        energies, _ = static_spectrum(params, self.basis(), 2)
        b = self.config.bath
        return BathSpec(
            temperature_K=mk_to_kelvin(b.temperature_mK),
            omega_c=b.omega_c_over_omega_p * self.omega_p(),
            omega_ref=float(energies[1] - energies[0]),
            prefactor=b.prefactor,
        )

    def noise(self, params: TransmonParams) -> NoiseSpec:
        n = self.config.noise
        return NoiseSpec(A_e=n.A_e, log_factor=n.log_factor, dielectric_scale=n.dielectric_scale, bath=self.bath(params))

    def cqed_params(self, eps_tilde: float = 0.0) -> CqedParams:
        c = self.config.cqed
        return CqedParams(
            transmon=self.undriven_params().with_drive(self.eps_from_tilde(eps_tilde)),
            omega_a=ghz_to_angular(c.omega_a_GHz),
            g=ghz_to_angular(c.g_GHz),
            kappa=mhz_to_angular(c.kappa_MHz),
            dims=tuple(c.dims),
        )

    def base_defaults(self) -> dict:
        f = self.config.floquet
        return {
            "omega_p_rad_per_ns": self.omega_p(),
            "omega_d_rad_per_ns": self.omega_d(),
            "charge_cutoff": self.config.basis.cutoff,
            "n_steps": f.n_steps,
            "n_times": f.n_times,
        }

