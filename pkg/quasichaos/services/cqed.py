# quasichaos/services/cqed.py

"""
cQED Service
Joint transmon-resonator grids and steady states, cavity pulls, folded
undriven spectra, dipole statistics and the critical photon number.
"""

from __future__ import annotations

import logging
from dataclasses import replace
from typing import Optional

import numpy as np
import pandas as pd

from quasichaos.core.models import ChargeBasis, CqedParams, ExperimentResult
from quasichaos.core.units import angular_to_ghz, angular_to_mhz, ghz_to_angular
from quasichaos.physics import cqed
from quasichaos.physics.dissipation import matrix_elements
from quasichaos.physics.floquet import floquet_solve
from quasichaos.services.common import ServiceBase, guarded

logger = logging.getLogger(__name__)


def _grid_point(params: CqedParams, n_steps: int, n_times: int, K: int, nr_cutoff: float) -> dict:
    solution = cqed.cqed_floquet(params, n_steps, n_times)
    points = cqed.grid(solution, params.dims)
    if params.kappa > 0:
        steady = cqed.resonator_rates_and_steady_state(solution, params, nr_cutoff, K, points=points)
        points = cqed.attach_populations(points, steady.steady.populations)
        scan = {
            "Nr_mean": steady.Nr_mean,
            "Nt_mean": steady.Nt_mean,
            "n_occ": steady.n_occ,
            "vacuum_weight": steady.vacuum_weight,
            "unique": steady.steady.unique,
        }
    else:
        scan = {}
    return {"grid": cqed.grid_frame(points), "scan": scan}


def _pull_point(
    params: CqedParams, n_steps: int, n_times: int, K: int, basis: ChargeBasis, single_n_times: int
) -> pd.DataFrame:
    solution = cqed.cqed_floquet(params, n_steps, n_times)
    points = cqed.grid(solution, params.dims)
    elements = cqed.resonator_elements(solution, params, K)
    records = cqed.cavity_pull_spectroscopy(points, elements, params.omega_a)

    # single-transmon reference for the perturbative shift, states ranked by mean energy
    transmon = floquet_solve(params.transmon, basis, n_steps, single_n_times).sorted_by_mean_energy()
    perturbative = cqed.perturbative_pull(matrix_elements(transmon), params.g, params.omega_a)

    rows = []
    for r in records:
        rank = int(round(r.Nt_avg))
        in_range = rank < perturbative.chi.size
        rows.append(
            {
                "state": r.state,
                "Nt_avg": r.Nt_avg,
                "pull_MHz": angular_to_mhz(r.pull),
                "weight": r.weight,
                "purity": r.purity,
                "k": r.k,
                "chi_MHz": angular_to_mhz(perturbative.chi[rank]) if in_range else np.nan,
                "chi_divergent": int(perturbative.divergent[rank]) if in_range else 1,
            }
        )
    return pd.DataFrame(
        rows, columns=["state", "Nt_avg", "pull_MHz", "weight", "purity", "k", "chi_MHz", "chi_divergent"]
    )


class CqedService(ServiceBase):
    """Service for the transmon-resonator experiments."""

    def _cqed_defaults(self) -> dict:
        c = self.config.cqed
        return {
            **self.base_defaults(),
            "dims": list(c.dims),
            "cqed_n_times": c.n_times,
            "K": c.K,
            "nr_cutoff": c.nr_cutoff,
            "vacuum_purity": cqed.VACUUM_PURITY,
            "vacuum_nr_max": cqed.VACUUM_NR_MAX,
        }

    @guarded
    def cqed_grid(self) -> ExperimentResult:
        """
        Time-averaged (N_t, N_r, purity) grid per drive amplitude, with
        steady-state weights when κ > 0.

        Returns:
            ExperimentResult with tables `grid` and `scan`
        """
        c = self.config.cqed
        n_steps = self.config.floquet.n_steps
        amplitudes = list(c.amplitudes_eps_tilde)
        params = [self.cqed_params(eps) for eps in amplitudes]
        results, failures = self.runner.sweep(
            lambda p: _grid_point(p, n_steps, c.n_times, c.K, c.nr_cutoff), params
        )

        grids, scans = [], []
        for eps, result in zip(amplitudes, results):
            if result is None:
                continue
            frame = result["grid"]
            frame.insert(0, "eps_tilde", eps)
            grids.append(frame)
            if result["scan"]:
                scans.append({"eps_tilde": eps, **result["scan"]})
        grid_table = pd.concat(grids, ignore_index=True) if grids else pd.DataFrame()
        scan_table = pd.DataFrame(
            scans, columns=["eps_tilde", "Nr_mean", "Nt_mean", "n_occ", "vacuum_weight", "unique"]
        )
        scan_table["unique"] = scan_table["unique"].astype(int)

        summary = {"amplitudes": len(amplitudes), "dimension": params[0].dimension}
        if not grid_table.empty:
            summary["min_purity"] = float(grid_table["purity"].min())
            summary["max_comm_error"] = float(grid_table["comm_error"].max())
        if scans:
            summary["vacuum_weight"] = {str(s["eps_tilde"]): s["vacuum_weight"] for s in scans}
        warnings = [] if self.config.cqed.kappa_MHz > 0 else ["kappa = 0: no steady state computed"]
        return ExperimentResult(
            tables={"grid": grid_table, "scan": scan_table},
            summary=summary,
            warnings=warnings,
            failures=failures,
            defaults=self._cqed_defaults(),
        )

    @guarded
    def cavity_pull(self) -> ExperimentResult:
        """
        Pulled resonator frequency of vacuum-like modes per drive amplitude,
        next to the perturbative dispersive shift.

        Returns:
            ExperimentResult with table `pull`
        """
        c = self.config.cqed
        f = self.config.floquet
        basis = self.basis()
        amplitudes = list(c.amplitudes_eps_tilde)
        params = [self.cqed_params(eps) for eps in amplitudes]
        results, failures = self.runner.sweep(
            lambda p: _pull_point(p, f.n_steps, c.n_times, c.K, basis, f.n_times), params
        )
        frames = []
        for eps, frame in zip(amplitudes, results):
            if frame is None:
                continue
            frame.insert(0, "eps_tilde", eps)
            frames.append(frame)
        table = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()
        empty = table.empty
        summary = {
            "amplitudes": len(amplitudes),
            "records": len(table),
            "no_vacuum_like_modes": empty,
            "omega_a_GHz": c.omega_a_GHz,
        }
        if not empty:
            summary["max_pull_MHz"] = float(table["pull_MHz"].abs().max())
        return ExperimentResult(
            tables={"pull": table},
            summary=summary,
            warnings=["no vacuum-like modes found"] if empty else [],
            failures=failures,
            defaults={**self._cqed_defaults(), "divergence_tol_rad_per_ns": cqed.DIVERGENCE_TOL},
        )

    @guarded
    def undriven_folded(self) -> ExperimentResult:
        """
        Undriven joint spectrum folded by ω_a, with branch pulls.

        Returns:
            ExperimentResult with table `folded`
        """
        c = self.config.cqed
        params = self.cqed_params(0.0)
        if not c.non_hermitian:
            params = replace(params, kappa=0.0)
        spectrum = cqed.undriven_spectrum_folded(params)
        partners, pulls = cqed.branch_pulls(spectrum, params)
        keep = spectrum.keep
        table = pd.DataFrame(
            {
                "state": np.flatnonzero(keep),
                "folded_GHz": angular_to_ghz(spectrum.folded[keep]),
                "Nr": spectrum.Nr[keep],
                "Nt": spectrum.Nt[keep],
                "linewidth_MHz": angular_to_mhz(-2.0 * spectrum.energies.imag[keep]),
                "partner": partners[keep],
                "pull_MHz": angular_to_mhz(pulls[keep]),
            }
        )
        summary = {"states": int(keep.sum()), "non_hermitian": bool(params.kappa > 0)}
        return ExperimentResult(
            tables={"folded": table},
            summary=summary,
            defaults={**self._cqed_defaults(), "nt_max": cqed.FOLDED_NT_MAX},
        )

    @guarded
    def dipole_stats(self, M: Optional[int] = None) -> ExperimentResult:
        """
        RMS dipole moments of the lowest M states: undriven eigenstates, and
        Floquet states ranked by mean energy along the sweep when configured.

        Returns:
            ExperimentResult with table `dipole`
        """
        M = M or self.config.dipole.M
        undriven = self.undriven_params()
        _, n_matrix = cqed.transmon_eigenbasis(undriven, M)
        entries = [(0.0, cqed.dipole_statistics(n_matrix, M))]

        if self.config.sweep is not None:
            eps_values = [e for e in self.sweep_tilde() if e > 0]

            def at(eps: float):
                solution = self.solve(undriven.with_drive(self.eps_from_tilde(eps))).sorted_by_mean_energy()
                return cqed.dipole_statistics(matrix_elements(solution), M)

            results, failures = self.runner.sweep(at, eps_values) if eps_values else ([], [])
            entries += [(eps, r) for eps, r in zip(eps_values, results) if r is not None]
        else:
            failures = []

        frames = [
            pd.DataFrame(
                {
                    "eps_tilde": eps,
                    "state": np.arange(M),
                    "n_i": stats.per_state,
                    "n_i_offdiag": stats.per_state_offdiag,
                }
            )
            for eps, stats in entries
        ]
        reference = entries[0][1]
        summary = {
            "M": M,
            "rmt_prediction": reference.rmt_prediction,
            "projector_norm_squared": reference.projector_norm_squared,
            "projector_mean": reference.projector_mean,
            "means": {str(eps): {"mean": s.mean, "mean_offdiag": s.mean_offdiag} for eps, s in entries},
            "ground_offdiag": {str(eps): float(s.per_state_offdiag[0]) for eps, s in entries},
        }
        return ExperimentResult(
            tables={"dipole": pd.concat(frames, ignore_index=True)},
            summary=summary,
            failures=failures,
            defaults={**self.base_defaults(), "M": M},
        )

    @guarded
    def ncrit(
        self, g_GHz: Optional[float] = None, omega_d_GHz: Optional[float] = None, n_ch: Optional[int] = None
    ) -> ExperimentResult:
        """
        Closed-form critical photon number.

        Returns:
            ExperimentResult with table `ncrit`
        """
        n = self.config.ncrit
        g_GHz = n.g_GHz if g_GHz is None else g_GHz
        omega_d_GHz = n.omega_d_GHz if omega_d_GHz is None else omega_d_GHz
        n_ch = n.n_ch if n_ch is None else n_ch
        result = cqed.critical_photon_number(ghz_to_angular(g_GHz), ghz_to_angular(omega_d_GHz), n_ch)
        summary = {
            "g_GHz": g_GHz,
            "omega_d_GHz": omega_d_GHz,
            "n_ch": n_ch,
            "g_eff_GHz": angular_to_ghz(result.g_eff),
            "delta_eff_GHz": angular_to_ghz(result.delta_eff),
            "n_crit": result.n_crit,
            "n_crit_shifted": result.n_crit_shifted,
        }
        return ExperimentResult(tables={"ncrit": pd.DataFrame([summary])}, summary=summary)
