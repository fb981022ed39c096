# quasichaos/pipeline/cli.py

"""
Command-line entry point: `quasichaos <experiment> [flags]`.

stdout carries only JSON (the summary on success, an error report on
failure); logs go to stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from quasichaos.core.errors import ConfigError, QuasichaosError
from quasichaos.core.settings import get_settings
from quasichaos.pipeline.artifacts import dump_json
from quasichaos.pipeline.run_pipeline import EXPERIMENTS, run
from quasichaos.schemas.manifest import ErrorReport

logger = logging.getLogger(__name__)

HELP = {
    "poincare": "Stroboscopic sections of the classical pendulum",
    "lyapunov": "Largest Lyapunov exponent per start",
    "floquet-sweep": "Quasienergies and mean energies along an amplitude sweep",
    "husimi": "Husimi function of one Floquet mode",
    "level-stats": "Spacing statistics of the chaotic window",
    "rates": "Floquet-Markov rates split by photon-index parity",
    "steady-state": "Stationary populations of the rate equations",
    "dephasing": "Pure dephasing of the tracked 0-1 pair",
    "chaotic-coupling": "Coupling of low states to the chaotic subspace",
    "dispersion": "Offset-charge band and phase-slip spectrum",
    "cqed-grid": "Transmon-resonator excitation grid and steady state",
    "cavity-pull": "Resonator pull of vacuum-like modes",
    "undriven-folded": "Folded undriven transmon-resonator spectrum",
    "dipole-stats": "RMS dipole moments versus the random-matrix value",
    "ncrit": "Closed-form critical photon number",
}


def _common_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", type=Path, default=None, help="YAML run configuration")
    parent.add_argument("--out", type=Path, default=None, help="Output directory, or a .csv path for the primary table")
    parent.add_argument("--workers", type=int, default=None, help="Worker processes (default QUASICHAOS_WORKERS)")
    parent.add_argument("--preset", choices=("paper", "ci"), default=None, help="Sizes for omitted settings")
    parent.add_argument("--seed", type=int, default=None, help="Random seed (default QUASICHAOS_SEED)")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quasichaos", description="Driven-transmon quantum chaos experiments")
    sub = parser.add_subparsers(dest="experiment", required=True, metavar="experiment")
    common = _common_flags()
    commands = {name: sub.add_parser(name, parents=[common], help=HELP[name]) for name in EXPERIMENTS}

    commands["husimi"].add_argument("--state-index", type=int, dest="state_index", default=None)
    commands["husimi"].add_argument("--time-fraction", type=float, dest="time_fraction", default=None)
    commands["level-stats"].add_argument("--ng-samples", type=int, dest="ng_samples", default=None)
    commands["chaotic-coupling"].add_argument("--j-threshold", type=int, dest="j_threshold", default=None)
    commands["dispersion"].add_argument("--level", type=int, default=None)
    commands["dispersion"].add_argument(
        "--out-fourier", type=Path, dest="out_fourier", default=None, help="Path of the phase-slip table"
    )
    commands["dipole-stats"].add_argument("--M", type=int, dest="M", default=None, help="Number of lowest states")
    commands["ncrit"].add_argument("--g", type=float, dest="g_GHz", default=None, help="Coupling g/2π in GHz")
    commands["ncrit"].add_argument("--omega-d", type=float, dest="omega_d_GHz", default=None, help="ω_d/2π in GHz")
    commands["ncrit"].add_argument("--nch", type=int, dest="n_ch", default=None, help="Chaotic subspace size")
    return parser


def _report(error: QuasichaosError, experiment: Optional[str]) -> int:
    report = ErrorReport(error=error.kind, message=str(error), experiment=experiment, exit_code=error.exit_code)
    print(report.model_dump_json())
    return error.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    experiment = args.experiment
    options = {name: getattr(args, name) for name in EXPERIMENTS[experiment].options if hasattr(args, name)}
    extra_paths = {"fourier": args.out_fourier} if getattr(args, "out_fourier", None) else None
    try:
        outcome = run(
            experiment,
            config_path=args.config,
            out=args.out if args.out is not None else settings.output_dir / experiment,
            workers=args.workers if args.workers is not None else settings.workers,
            preset=args.preset or settings.preset,
            seed=args.seed if args.seed is not None else settings.seed,
            options=options,
            extra_paths=extra_paths,
        )
    except QuasichaosError as e:
        logger.error(f"{experiment} failed ({e.kind}): {e}")
        return _report(e, experiment)
    except ValueError as e:
        logger.error(f"{experiment} rejected its inputs: {e}")
        return _report(ConfigError(str(e)), experiment)
    except Exception as e:
        logger.error(f"Unexpected failure in {experiment}: {e}", exc_info=True)
        report = ErrorReport(error="internal", message=f"{type(e).__name__}: {e}", experiment=experiment, exit_code=4)
        print(report.model_dump_json())
        return 4

    print(dump_json(outcome.result.summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
