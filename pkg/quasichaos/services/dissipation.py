# quasichaos/services/dissipation.py

"""
Dissipation Service
Floquet-Markov rates, steady states, dephasing and the coupling of low
states to the chaotic subspace.
"""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np
import pandas as pd

from quasichaos.core.errors import ClassificationRefused, InvalidParameterError
from quasichaos.core.models import ExperimentResult, FloquetSolution, TransmonParams
from quasichaos.core.units import angular_to_ghz
from quasichaos.physics import chaosmetrics, dissipation
from quasichaos.physics.dispersion import chaotic_coupling, chaotic_coupling_ensemble
from quasichaos.physics.floquet import seed_by_mean_energy, track
from quasichaos.physics.model import rescale
from quasichaos.services.common import ServiceBase, guarded

logger = logging.getLogger(__name__)

LOW_STATES = 20


class DissipationService(ServiceBase):
    """Service for rate equations, steady states and dephasing."""

    def _solve_sorted(self, params: TransmonParams) -> FloquetSolution:
        return self.solve(params).sorted_by_mean_energy()

    def _rate_setup(self):
        params = self.drive_params()
        solution = self._solve_sorted(params)
        elements = dissipation.matrix_elements(solution)
        rate_matrix = dissipation.rates(elements, self.bath(params))
        return params, solution, rate_matrix

    def _defaults(self, params: TransmonParams) -> dict:
        bath = self.bath(params)
        return {
            **self.base_defaults(),
            "eps_d_rad_per_ns": params.eps_d,
            "K": self.config.floquet.n_times // 4,
            "bath_temperature_K": bath.temperature_K,
            "bath_omega_c_rad_per_ns": bath.omega_c,
            "bath_omega_ref_rad_per_ns": bath.omega_ref,
            "bath_prefactor": bath.prefactor,
            "state_order": "mean_energy",
        }

    @guarded
    def rates(self) -> ExperimentResult:
        """
        Rate matrix split into even-k and odd-k channels, states ranked by
        mean energy. At symmetric offset charge the Floquet parities are added.

        Returns:
            ExperimentResult with table `rates` (and `parity` when defined)
        """
        params, solution, rate_matrix = self._rate_setup()
        table = rate_matrix.to_frame()
        mixing = dissipation.channel_mixing(rate_matrix)
        table["mixing"] = mixing[table["i"].to_numpy(), table["j"].to_numpy()]

        low = min(LOW_STATES, rate_matrix.n_states)
        summary = {
            "eps_tilde": params.eps_d / self.omega_p(),
            "ng": params.n_g,
            "nonzero_rates": len(table),
            "max_mixing_low_states": float(mixing[:low, :low].max()),
            "max_rate": float(rate_matrix.total.max()),
        }
        tables = {"rates": table}
        try:
            labels = chaosmetrics.parity_classify(solution, params.n_g)
            tables["parity"] = pd.DataFrame({"state": np.arange(labels.size), "parity": labels})
            summary["undetermined_parity"] = int(np.sum(labels == 0))
        except ClassificationRefused:
            logger.info(f"Parity not defined at n_g={params.n_g}; skipping parity table")
        return ExperimentResult(tables=tables, summary=summary, defaults=self._defaults(params))

    @guarded
    def steady_state(self) -> ExperimentResult:
        """
        Stationary populations with a Boltzmann fit and the population spread
        across the chaotic window.

        Returns:
            ExperimentResult with table `populations`
        """
        params, solution, rate_matrix = self._rate_setup()
        steady = dissipation.steady_state(rate_matrix)
        scaled = solution.mean_energy_over_EJ
        table = pd.DataFrame(
            {
                "state": np.arange(solution.n_states),
                "mean_energy_over_EJ": scaled,
                "quasienergy_GHz": angular_to_ghz(solution.quasienergies),
                "population": steady.populations,
            }
        )

        lo, hi = self.config.level_stats.window_lo, self.config.level_stats.window_hi
        window = steady.populations[(scaled > lo) & (scaled < hi)]
        window = window[window > 0]
        summary = {
            "eps_tilde": params.eps_d / self.omega_p(),
            "residual": steady.residual,
            "unique": steady.unique,
            "components": len(steady.components),
            "window_population_ratio": float(window.max() / window.min()) if window.size else None,
        }
        try:
            fit = dissipation.boltzmann_fit(solution.mean_energy, steady.populations)
            summary["boltzmann"] = {"beta_ns": fit.beta, "log_residual": fit.log_residual}
        except InvalidParameterError as e:
            logger.warning(f"Boltzmann fit skipped: {e}")
        warnings = [] if steady.unique else ["rate graph disconnected; components weighted equally"]
        return ExperimentResult(
            tables={"populations": table}, summary=summary, warnings=warnings, defaults=self._defaults(params)
        )

    @guarded
    def dephasing(self) -> ExperimentResult:
        """
        Pure dephasing of the tracked 0-1 pair along the amplitude sweep, or
        at the configured drive when there is no sweep.

        Returns:
            ExperimentResult with table `dephasing`
        """
        base = self.undriven_params()
        if self.config.sweep is not None:
            eps_values = self.sweep_amplitudes()
        else:
            eps_values = sorted({0.0, self.drive_params().eps_d})
        if eps_values[0] != 0.0:
            eps_values = [0.0] + list(eps_values)

        results, failures = self.runner.sweep(lambda eps: self.solve(base.with_drive(eps)), eps_values)
        if failures:
            first = failures[0]
            raise InvalidParameterError(f"dephasing sweep point {first.index} failed: {first.message}")
        tracking = track(results, seed_by_mean_energy(results[0], 2))
        noise = self.noise(base)

        rows = []
        for s, (eps, solution) in enumerate(zip(eps_values, results)):
            ground, excited = (int(v) for v in tracking.indices[s])
            confident = bool(tracking.confident[: s + 1].all())
            rate = dissipation.dephasing_rate(
                dissipation.matrix_elements(solution), noise, ground, excited, confident
            )
            rows.append(
                {
                    "eps_tilde": eps / self.omega_p(),
                    "gamma_phi": rate.gamma_phi,
                    "one_over_f": rate.one_over_f,
                    "dielectric": rate.dielectric,
                    "tracked_flag": int(rate.confident),
                }
            )
        table = pd.DataFrame(rows)
        summary = {
            "points": len(rows),
            "gamma_phi_first": rows[0]["gamma_phi"],
            "gamma_phi_last": rows[-1]["gamma_phi"],
            "units": "1/ns",
        }
        n = self.config.noise
        return ExperimentResult(
            tables={"dephasing": table},
            summary=summary,
            warnings=[] if table["tracked_flag"].all() else ["tracking lost along the dephasing sweep"],
            defaults={**self._defaults(base), "A_e": n.A_e, "log_factor": n.log_factor, "dielectric_scale": n.dielectric_scale},
        )

    @guarded
    def chaotic_coupling(self, j_threshold: Optional[int] = None) -> ExperimentResult:
        """
        N_ij curves of the lowest states, root-mean-square over offset charge.

        Returns:
            ExperimentResult with table `coupling`
        """
        cc = self.config.coupling
        j_threshold = cc.j_threshold if j_threshold is None else j_threshold
        ng_values = chaosmetrics.ng_grid(cc.ng_samples) if cc.ng_samples > 1 else np.array([self.config.transmon.ng])

        def at(ng: float):
            solution = self._solve_sorted(self.drive_params(float(ng)))
            elements = dissipation.matrix_elements(solution)
            return [chaotic_coupling(elements, state, j_threshold) for state in cc.states]

        results, failures = self.runner.sweep(at, list(ng_values))
        kept = [r for r in results if r is not None]
        if not kept:
            raise InvalidParameterError("every offset-charge sample failed")

        rows = []
        summary = {"ng_samples": len(kept), "rms_over_ng": True, "j_threshold": j_threshold, "N_ij": {}}
        for position, state in enumerate(cc.states):
            combined = chaotic_coupling_ensemble([curves[position] for curves in kept])
            rows.append(pd.DataFrame({"state": state, "j": np.arange(combined.curve.size), "N_ij": combined.curve}))
            summary["N_ij"][str(state)] = combined.value if j_threshold < combined.curve.size else None
        summary["hbar_eff_inv"] = 1.0 / rescale(self.undriven_params()).hbar_eff
        return ExperimentResult(
            tables={"coupling": pd.concat(rows, ignore_index=True)},
            summary=summary,
            failures=failures,
            defaults={**self.base_defaults(), "k_window": [-1, 0], "average": "rms"},
        )
