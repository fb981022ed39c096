# quasichaos/services/dispersion.py

"""
Dispersion Service
Driven and undriven offset-charge bands, phase-slip spectra and the
scaling of the dispersion with ħ_eff⁻¹.
"""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np
import pandas as pd

from quasichaos.core.models import BandCurve, ExperimentResult, TransmonParams
from quasichaos.core.units import angular_to_ghz
from quasichaos.physics.dispersion import (
    BAND_SWEEP_STEP,
    band,
    dispersion_scaling,
    phase_slip_spectrum,
)
from quasichaos.physics.model import from_reduced
from quasichaos.services.common import ServiceBase, guarded

logger = logging.getLogger(__name__)


class DispersionService(ServiceBase):
    """Service for the chaos-assisted band dispersion experiment."""

    def _eps_tilde(self) -> float:
        d = self.config.dispersion
        if d.eps_tilde is not None:
            return d.eps_tilde
        return self.drive_params().eps_d / self.omega_p()

    def _band(self, params: TransmonParams, level: int) -> BandCurve:
        f = self.config.floquet
        return band(
            level,
            params,
            self.config.dispersion.ng_points,
            self.basis(),
            n_steps=f.n_steps,
            n_times=f.n_times,
            map_fn=self.runner.map,
        )

    @staticmethod
    def _fourier_frame(curve: BandCurve, n_max: int) -> tuple[pd.DataFrame, dict]:
        spectrum = phase_slip_spectrum(curve, min(n_max, (len(curve.ng) - 1) // 2))
        frame = spectrum.to_frame()
        magnitudes = dict(zip(frame["n"].astype(int), frame["abs_tn"]))
        ratio = magnitudes.get(5, np.nan) / magnitudes[1] if magnitudes.get(1) else None
        return frame, {"t5_over_t1": ratio}

    @guarded
    def dispersion(self, level: Optional[int] = None) -> ExperimentResult:
        """
        Bands of one level with and without drive, their phase-slip spectra,
        and optionally the dispersion scan over ħ_eff⁻¹.

        Returns:
            ExperimentResult with tables `band`, `fourier`, `band_undriven`,
            `fourier_undriven` and, when scanning, `scaling`
        """
        d = self.config.dispersion
        level = d.level if level is None else level
        eps_tilde = self._eps_tilde()
        undriven = self.undriven_params()
        driven = undriven.with_drive(self.eps_from_tilde(eps_tilde))

        logger.info(f"Band of level {level}: {d.ng_points + 1} n_g points, eps_tilde={eps_tilde}")
        driven_band = self._band(driven, level)
        undriven_band = self._band(undriven, level)
        fourier, driven_ratio = self._fourier_frame(driven_band, d.n_max)
        fourier_undriven, undriven_ratio = self._fourier_frame(undriven_band, d.n_max)

        def band_frame(curve: BandCurve) -> pd.DataFrame:
            frame = curve.to_frame()
            frame["energy"] = angular_to_ghz(frame["energy"].to_numpy())
            return frame.rename(columns={"energy": "energy_GHz"})

        tables = {
            "band": band_frame(driven_band),
            "fourier": fourier,
            "band_undriven": band_frame(undriven_band),
            "fourier_undriven": fourier_undriven,
        }
        summary = {
            "level": level,
            "eps_tilde": eps_tilde,
            "dispersion_GHz": angular_to_ghz(driven_band.dispersion),
            "dispersion_undriven_GHz": angular_to_ghz(undriven_band.dispersion),
            "spikes": int(driven_band.spike.sum()),
            "untracked_points": int((~driven_band.confident).sum()),
            "t5_over_t1": driven_ratio["t5_over_t1"],
            "t5_over_t1_undriven": undriven_ratio["t5_over_t1"],
        }
        if undriven_band.dispersion > 0:
            summary["dispersion_ratio"] = driven_band.dispersion / undriven_band.dispersion

        if d.hbar_eff_inv_scan:
            tables["scaling"], summary["scaling"] = self._scaling(level, eps_tilde, d.hbar_eff_inv_scan)

        warnings = []
        if summary["untracked_points"]:
            warnings.append(f"tracking confidence lost at {summary['untracked_points']} n_g points")
        return ExperimentResult(
            tables=tables,
            summary=summary,
            warnings=warnings,
            defaults={
                **self.base_defaults(),
                "ng_points": d.ng_points,
                "band_sweep_step_over_omega_p": BAND_SWEEP_STEP,
                "n_max": d.n_max,
            },
        )

    def _scaling(self, level: int, eps_tilde: float, scan: list[float]) -> tuple[pd.DataFrame, dict]:
        omega_p = self.omega_p()
        omega_tilde = self.omega_d() / omega_p
        rows = []
        for value in scan:
            undriven = from_reduced(value, omega_p, 0.0, omega_tilde, self.config.transmon.ng)
            driven = undriven.with_drive(eps_tilde * omega_p)
            rows.append(
                {
                    "hbar_eff_inv": value,
                    "dispersion_undriven_GHz": angular_to_ghz(self._band(undriven, level).dispersion),
                    "dispersion_GHz": angular_to_ghz(self._band(driven, level).dispersion),
                }
            )
        table = pd.DataFrame(rows)
        fit = dispersion_scaling(table["dispersion_undriven_GHz"], table["hbar_eff_inv"])
        return table, {"undriven_slope": fit.slope, "undriven_r_squared": fit.r_squared}
