# quasichaos/services/classical.py

"""
Classical Service
Poincaré sections and Lyapunov exponents of the rescaled pendulum.
"""

from __future__ import annotations

import logging

import numpy as np
import pandas as pd

from quasichaos.core.models import ExperimentResult, PhasePoint, ReducedParams
from quasichaos.physics.classical import (
    chaos_band,
    default_starts,
    lyapunov,
    pendulum_energy,
    poincare_section,
    resonance_report,
)
from quasichaos.physics.model import rescale
from quasichaos.services.common import ServiceBase, guarded

logger = logging.getLogger(__name__)


def _section_of(start: PhasePoint, reduced: ReducedParams, n_periods: int, t0_fraction: float, steps: int):
    return poincare_section([start], reduced, n_periods, t0_fraction, steps)


class ClassicalService(ServiceBase):
    """Service for the classical-chaos experiments."""

    def _setup(self) -> tuple[ReducedParams, list[PhasePoint]]:
        reduced = rescale(self.drive_params())
        starts = default_starts(self.config.classical.starts)
        return reduced, starts

    def _starts_frame(self, starts: list[PhasePoint], reduced: ReducedParams) -> pd.DataFrame:
        phi0 = np.array([s.phi for s in starts])
        n0 = np.array([s.n for s in starts])
        return pd.DataFrame(
            {
                "start_id": np.arange(len(starts)),
                "phi0": phi0,
                "n0": n0,
                "energy": pendulum_energy(phi0, n0, reduced),
            }
        )

    def _report_summary(self, reduced: ReducedParams) -> dict:
        report = resonance_report(reduced)
        return {
            "eps_tilde": reduced.eps_tilde,
            "omega_tilde": reduced.omega_tilde,
            "hbar_eff": reduced.hbar_eff,
            "bounded_resonances": report.bounded_orders,
            "unbounded_momenta": list(report.unbounded_momenta) if report.unbounded_momenta else None,
            "bessel_factor": report.bessel_factor,
            "layer_width": report.layer_width.value,
            "layer_width_in_domain": report.layer_width.in_domain,
        }

    @guarded
    def poincare(self) -> ExperimentResult:
        """
        Stroboscopic section of the default starts.

        Returns:
            ExperimentResult with tables `section` and `starts`
        """
        c = self.config.classical
        reduced, starts = self._setup()
        logger.info(f"Poincaré section: {len(starts)} starts x {c.n_periods} periods")
        results, failures = self.runner.sweep(
            lambda s: _section_of(s, reduced, c.n_periods, c.t0_fraction, c.steps_per_period), starts
        )

        frames = []
        for start_id, section in enumerate(results):
            if section is None:
                continue
            frame = section.to_frame()
            frame["start_id"] = start_id
            frames.append(frame)
        section_table = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(
            columns=["start_id", "period_index", "phi", "n"]
        )

        summary = self._report_summary(reduced)
        summary.update({"starts": len(starts), "n_periods": c.n_periods, "points": len(section_table)})
        warnings = [] if summary["layer_width_in_domain"] else ["layer width estimate outside omega_tilde > 1"]
        return ExperimentResult(
            tables={"section": section_table, "starts": self._starts_frame(starts, reduced)},
            summary=summary,
            warnings=warnings,
            failures=failures,
            defaults={"t0_fraction": c.t0_fraction, "steps_per_period": c.steps_per_period, "starts": c.starts},
        )

    @guarded
    def lyapunov(self) -> ExperimentResult:
        """
        Largest Lyapunov exponent per default start.

        Returns:
            ExperimentResult with table `lyapunov`
        """
        c = self.config.classical
        reduced, starts = self._setup()
        rngs = self.runner.rngs(len(starts))
        logger.info(f"Lyapunov exponents: {len(starts)} starts x {c.n_periods} periods")
        results, failures = self.runner.sweep(
            lambda item: lyapunov(item[0], reduced, c.n_periods, c.steps_per_period, item[1]),
            list(zip(starts, rngs)),
        )

        table = self._starts_frame(starts, reduced)
        table["lambda"] = [np.nan if r is None else r for r in results]
        table["chaotic"] = (table["lambda"] > c.chaos_threshold).astype(int)

        valid = table["lambda"].notna()
        band = chaos_band(table.loc[valid, "energy"].to_numpy(), table.loc[valid, "lambda"].to_numpy(), c.chaos_threshold)
        summary = self._report_summary(reduced)
        summary.update(
            {
                "starts": len(starts),
                "n_periods": c.n_periods,
                "chaotic_fraction": float(table.loc[valid, "chaotic"].mean()) if valid.any() else None,
                "chaos_band": list(band) if band else None,
                "max_lambda": float(table["lambda"].max()) if valid.any() else None,
            }
        )
        logger.info(f"Chaotic fraction {summary['chaotic_fraction']}, band {summary['chaos_band']}")
        return ExperimentResult(
            tables={"lyapunov": table},
            summary=summary,
            failures=failures,
            defaults={"chaos_threshold": c.chaos_threshold, "steps_per_period": c.steps_per_period},
        )
