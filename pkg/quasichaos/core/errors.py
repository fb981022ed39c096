# quasichaos/core/errors.py

"""
Error Types
Exception hierarchy shared by the physics layer, the services and the CLI.
Every error carries the process exit code the CLI reports for it.
"""

from __future__ import annotations


class QuasichaosError(Exception):
    """Base class for all domain errors."""

    exit_code: int = 4
    kind: str = "internal"


class ConfigError(QuasichaosError):
    """Invalid run configuration, step-size violation or resource guard."""

    exit_code = 2
    kind = "config"


class InvalidParameterError(ConfigError, ValueError):
    """Physical parameters or operation inputs outside their domain."""

    kind = "invalid_parameter"


class ClassificationRefused(InvalidParameterError):
    """Parity classification requested away from a symmetric offset charge."""

    kind = "classification_refused"


class ResourceGuardError(ConfigError):
    """Requested Hilbert-space dimension exceeds the dense-matrix budget."""

    kind = "resource_guard"


class AccuracyError(QuasichaosError):
    """A numerical accuracy guard tripped (convergence, unitarity, orthonormality)."""

    exit_code = 3
    kind = "accuracy"


class AliasingError(AccuracyError):
    """Fourier harmonics beyond the retained photon window carry weight."""

    kind = "aliasing"


class NoSolutionError(AccuracyError):
    """A root search found no bracket before tracking was lost."""

    kind = "no_solution"


class InternalError(QuasichaosError):
    """Unexpected failure wrapped by a service."""

    exit_code = 4
    kind = "internal"
