# quasichaos/pipeline/run_pipeline.py

"""
Run Pipeline
One experiment end to end: load and resolve the configuration, compute the
result through its service, then stage the tables, the summary and the
manifest. Nothing is written unless the computation succeeded.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional

from quasichaos import __version__
from quasichaos.core.errors import ConfigError
from quasichaos.core.models import ExperimentResult
from quasichaos.physics import dissipation, floquet, phasespace
from quasichaos.pipeline.artifacts import ArtifactWriter, jsonable
from quasichaos.pipeline.config_loader import load_config
from quasichaos.pipeline.sweep import SweepRunner
from quasichaos.schemas.config import Preset, RunConfig
from quasichaos.schemas.manifest import FailedPoint, RunManifest
from quasichaos.services.classical import ClassicalService
from quasichaos.services.common import ServiceBase
from quasichaos.services.cqed import CqedService
from quasichaos.services.dispersion import DispersionService
from quasichaos.services.dissipation import DissipationService
from quasichaos.services.spectra import SpectraService

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Experiment:
    """Registry entry: which service method computes an experiment."""

    service: type[ServiceBase]
    method: str
    options: tuple[str, ...] = field(default_factory=tuple)


EXPERIMENTS: dict[str, Experiment] = {
    "poincare": Experiment(ClassicalService, "poincare"),
    "lyapunov": Experiment(ClassicalService, "lyapunov"),
    "floquet-sweep": Experiment(SpectraService, "floquet_sweep"),
    "husimi": Experiment(SpectraService, "husimi", ("state_index", "time_fraction")),
    "level-stats": Experiment(SpectraService, "level_stats", ("ng_samples",)),
    "rates": Experiment(DissipationService, "rates"),
    "steady-state": Experiment(DissipationService, "steady_state"),
    "dephasing": Experiment(DissipationService, "dephasing"),
    "chaotic-coupling": Experiment(DissipationService, "chaotic_coupling", ("j_threshold",)),
    "dispersion": Experiment(DispersionService, "dispersion", ("level",)),
    "cqed-grid": Experiment(CqedService, "cqed_grid"),
    "cavity-pull": Experiment(CqedService, "cavity_pull"),
    "undriven-folded": Experiment(CqedService, "undriven_folded"),
    "dipole-stats": Experiment(CqedService, "dipole_stats", ("M",)),
    "ncrit": Experiment(CqedService, "ncrit", ("g_GHz", "omega_d_GHz", "n_ch")),
}

TOLERANCES: dict[str, float] = {
    "unitarity": floquet.UNITARITY_TOL,
    "orthonormality": floquet.ORTHONORMALITY_TOL,
    "degeneracy": floquet.DEGENERACY_TOL,
    "propagator_convergence": floquet.CONVERGENCE_TOL,
    "tracking_threshold": floquet.TRACKING_THRESHOLD,
    "fourier_aliasing": dissipation.ALIASING_TOL,
    "stationarity": dissipation.STATIONARITY_TOL,
    "husimi_tail_mass": phasespace.TAIL_TOLERANCE,
}


@dataclass
class RunOutcome:
    """What a completed run produced."""

    manifest_path: Path
    manifest: RunManifest
    result: ExperimentResult


def _banner(title: str) -> None:
    logger.info("=" * 60)
    logger.info(title)
    logger.info("=" * 60)


def compute(
    experiment: str, config: RunConfig, runner: SweepRunner, options: Optional[dict[str, Any]] = None
) -> ExperimentResult:
    """
    Evaluate one experiment without touching the filesystem.

    Raises:
        ConfigError: If the experiment is unknown or an option does not apply to it
    """
    entry = EXPERIMENTS.get(experiment)
    if entry is None:
        raise ConfigError(f"unknown experiment {experiment!r}; choose one of {', '.join(EXPERIMENTS)}")
    kwargs = {k: v for k, v in (options or {}).items() if v is not None}
    unexpected = set(kwargs) - set(entry.options)
    if unexpected:
        raise ConfigError(f"{experiment} does not accept {', '.join(sorted(unexpected))}")
    service = entry.service(config, runner)
    return getattr(service, entry.method)(**kwargs)


def run(
    experiment: str,
    config_path: Optional[Path],
    out: Path,
    workers: int = 1,
    preset: Preset = "paper",
    seed: int = 0,
    options: Optional[dict[str, Any]] = None,
    extra_paths: Optional[dict[str, Path]] = None,
) -> RunOutcome:
    """
    1) Load and resolve the configuration
    2) Compute the experiment
    3) Stage tables and summary, commit them, write the manifest last
    """
    start_time = time.time()
    started_at = datetime.now(timezone.utc).isoformat()

    _banner(f"quasichaos {__version__}: {experiment}")

    logger.info("--- STAGE 1: Configuration ---")
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}; choose one of {', '.join(EXPERIMENTS)}")
    config = load_config(config_path).resolved(preset, seed)
    logger.info(f"Preset {config.preset}, seed {config.seed}, {workers} worker(s)")

    logger.info("--- STAGE 2: Compute ---")
    stage = time.time()
    runner = SweepRunner(workers=workers, seed=config.seed)
    result = compute(experiment, config, runner, options)
    logger.info(f"Computed {len(result.tables)} table(s) in {time.time() - stage:.2f} seconds")
    for warning in result.warnings:
        logger.warning(warning)

    logger.info("--- STAGE 3: Artifacts ---")
    writer = ArtifactWriter(out, experiment, extra_paths)
    try:
        writer.add_tables(result.tables)
        writer.add_summary(result.summary)
        manifest = RunManifest(
            experiment=experiment,
            version=__version__,
            preset=config.preset,
            seed=config.seed,
            workers=workers,
            config=config.model_dump(mode="json"),
            config_path=str(config_path) if config_path else None,
            tolerances=TOLERANCES,
            defaults=jsonable(result.defaults),
            started_at=started_at,
            wall_clock_s=time.time() - start_time,
            outputs=writer.outputs,
            summary_file=writer.summary_file,
            warnings=result.warnings,
            failed_points=[
                FailedPoint(index=f.index, point=f.point, error=f.kind, message=f.message) for f in result.failures
            ],
        )
        manifest_path = writer.commit(manifest)
    except Exception:
        writer.abort()
        raise

    duration = time.time() - start_time
    _banner(f"{experiment} completed in {duration:.2f} seconds ({len(result.failures)} failed point(s))")
    return RunOutcome(manifest_path=manifest_path, manifest=manifest, result=result)
