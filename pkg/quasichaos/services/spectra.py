# quasichaos/services/spectra.py

"""
Spectra Service
Floquet amplitude sweeps with tracking, Husimi snapshots of Floquet modes,
and quasienergy level statistics.
"""

from __future__ import annotations

import logging

import numpy as np
import pandas as pd

from quasichaos.core.errors import InvalidParameterError
from quasichaos.core.models import ExperimentResult, FloquetSolution
from quasichaos.core.units import angular_to_ghz, angular_to_mhz
from quasichaos.physics import chaosmetrics
from quasichaos.physics.floquet import (
    TRACKING_THRESHOLD,
    ac_stark_shift,
    ionization_thresholds,
    seed_by_mean_energy,
    track,
)
from quasichaos.physics.model import rescale
from quasichaos.physics.phasespace import mode_husimi
from quasichaos.services.common import ServiceBase, guarded

logger = logging.getLogger(__name__)

TRACKED_LEVELS = 2
SPACING_GRID = np.linspace(0.0, 4.0, 161)


class SpectraService(ServiceBase):
    """Service for Floquet spectra and their statistics."""

    @guarded
    def floquet_sweep(self) -> ExperimentResult:
        """
        Quasienergies along the configured amplitude sweep, tracked from the
        first point, with ionization thresholds and the 0-1 Stark shift.

        Returns:
            ExperimentResult with tables `quasienergies`, `tracking` and `stark`
        """
        eps_tilde = self.sweep_tilde()
        base = self.undriven_params()
        results, failures = self.runner.sweep(
            lambda eps: self.solve(base.with_drive(self.eps_from_tilde(eps))), eps_tilde
        )
        kept = [i for i, r in enumerate(results) if r is not None]
        if not kept:
            raise InvalidParameterError("every sweep point failed")
        if len(kept) < len(results):
            logger.warning(f"Tracking across {len(results) - len(kept)} failed sweep points")
        sweep: list[FloquetSolution] = [results[i] for i in kept]
        eps_kept = [eps_tilde[i] for i in kept]
        if eps_kept[0] != 0.0:
            logger.warning(f"Sweep starts at eps_tilde={eps_kept[0]}; tracking seeds are not undriven states")

        tracking = track(sweep, seed_by_mean_energy(sweep[0], TRACKED_LEVELS))
        thresholds = ionization_thresholds(tracking, eps_kept)
        stark = ac_stark_shift(sweep, eps_kept, tracking)

        rows = []
        for eps, solution in zip(eps_kept, sweep):
            scaled = solution.mean_energy_over_EJ
            for mode in range(solution.n_states):
                rows.append(
                    {
                        "eps_tilde": eps,
                        "mode": mode,
                        "quasienergy_GHz": angular_to_ghz(solution.quasienergies[mode]),
                        "mean_energy_over_EJ": scaled[mode],
                    }
                )
        tracking_rows = [
            {
                "eps_tilde": eps,
                "state": state,
                "mode": int(tracking.indices[s, state]),
                "overlap": float(tracking.overlaps[s, state]),
                "tracked_flag": int(tracking.confident[s, state]),
            }
            for s, eps in enumerate(eps_kept)
            for state in range(TRACKED_LEVELS)
        ]
        stark_table = pd.DataFrame(
            {"eps_tilde": eps_kept, "shift_MHz": angular_to_mhz(stark.shift), "valid": stark.valid.astype(int)}
        )

        summary = {
            "points": len(eps_tilde),
            "ionization_eps_tilde": {"ground": thresholds[0], "first_excited": thresholds[1]},
            "stark_truncated": stark.truncated,
            "hbar_eff_inv": 1.0 / rescale(base).hbar_eff,
        }
        warnings = ["stark curve truncated by tracking loss"] if stark.truncated else []
        return ExperimentResult(
            tables={
                "quasienergies": pd.DataFrame(rows),
                "tracking": pd.DataFrame(tracking_rows),
                "stark": stark_table,
            },
            summary=summary,
            warnings=warnings,
            failures=failures,
            defaults={**self.base_defaults(), "tracking_threshold": TRACKING_THRESHOLD},
        )

    @guarded
    def husimi(self, state_index: int | None = None, time_fraction: float | None = None) -> ExperimentResult:
        """
        Husimi function of one Floquet mode (ranked by mean energy).

        Returns:
            ExperimentResult with table `husimi`
        """
        h = self.config.husimi
        state_index = h.state_index if state_index is None else state_index
        time_fraction = h.time_fraction if time_fraction is None else time_fraction
        params = self.drive_params()
        hbar_eff = rescale(params).hbar_eff
        solution = self.solve(params).sorted_by_mean_energy()
        grid = mode_husimi(solution, state_index, hbar_eff, time_fraction, (h.n_phi, h.n_n), (h.n_min, h.n_max))
        summary = {
            "state_index": state_index,
            "time": grid.time,
            "hbar_eff": hbar_eff,
            "normalization": grid.normalization(),
            "quasienergy_GHz": angular_to_ghz(solution.quasienergies[state_index]),
            "mean_energy_over_EJ": float(solution.mean_energy_over_EJ[state_index]),
        }
        logger.info(f"Husimi grid normalization {summary['normalization']:.6f}")
        return ExperimentResult(
            tables={"husimi": grid.to_frame()},
            summary=summary,
            defaults={**self.base_defaults(), "grid": [h.n_phi, h.n_n], "n_window": [h.n_min, h.n_max]},
        )

    @guarded
    def level_stats(self, ng_samples: int | None = None) -> ExperimentResult:
        """
        Spacing statistics of the chaotic window for the driven and the
        undriven transmon, pooled over offset charge.

        Returns:
            ExperimentResult with tables `spacings` and `integrated`
        """
        ls = self.config.level_stats
        ng_samples = ng_samples or ls.ng_samples
        window = (ls.window_lo, ls.window_hi)
        ng_values = chaosmetrics.ng_grid(ng_samples)
        f = self.config.floquet
        basis = self.basis()

        ensembles = {}
        failures = []
        for regime in ("driven", "undriven"):
            def at(ng, regime=regime):
                params = self.drive_params(ng) if regime == "driven" else self.undriven_params(ng)
                return chaosmetrics.window_spacings(params, window, basis, f.n_steps, f.n_times)

            results, failed = self.runner.sweep(at, list(ng_values))
            failures.extend(failed)
            kept = [i for i, r in enumerate(results) if r is not None]
            ensembles[regime] = chaosmetrics.pool_spacings(ng_values[kept], [results[i] for i in kept], window)
            logger.info(f"{regime}: {ensembles[regime].spacings.size} spacings pooled")

        summary = {"ng_samples": ng_samples, "window": list(window)}
        for regime, ens in ensembles.items():
            entry = {"spacings": int(ens.spacings.size), "mean_spacing": ens.mean}
            if ens.spacings.size >= chaosmetrics.MIN_KS_SAMPLES:
                entry["ks_wigner_dyson"] = chaosmetrics.distribution_distance(ens, "wigner_dyson")
                entry["ks_poisson"] = chaosmetrics.distribution_distance(ens, "poisson")
            else:
                logger.warning(f"{regime}: too few spacings for KS distances ({ens.spacings.size})")
            if ens.spacings.size >= 2:
                entry["gap_ratio"] = chaosmetrics.gap_ratio(ens.spacings)
            summary[regime] = entry
        summary["gap_ratio_references"] = {
            "poisson": chaosmetrics.GAP_RATIO_POISSON,
            "goe": chaosmetrics.GAP_RATIO_GOE,
        }

        spacings = pd.concat(
            [
                pd.DataFrame({"regime": regime, "ng": ens.sample_ng, "spacing": ens.spacings})
                for regime, ens in ensembles.items()
            ],
            ignore_index=True,
        )
        driven = chaosmetrics.integrated_distribution(ensembles["driven"].spacings, SPACING_GRID)
        undriven = chaosmetrics.integrated_distribution(ensembles["undriven"].spacings, SPACING_GRID)
        integrated = pd.DataFrame(
            {
                "spacing": SPACING_GRID,
                "driven": driven["empirical"],
                "undriven": undriven["empirical"],
                "poisson": driven["poisson"],
                "wigner_dyson": driven["wigner_dyson"],
            }
        )
        warnings = [] if all("ks_poisson" in summary[r] for r in ensembles) else ["too few spacings for KS"]
        return ExperimentResult(
            tables={"spacings": spacings, "integrated": integrated},
            summary=summary,
            warnings=warnings,
            failures=failures,
            defaults={**self.base_defaults(), "window": list(window), "ng_grid": "linspace(0, 0.5)"},
        )
