# tests/conftest.py

import pytest

from quasichaos.core.models import ChargeBasis, TransmonParams
from quasichaos.core.units import ghz_to_angular
from quasichaos.physics.floquet import floquet_solve
from quasichaos.physics.model import from_reduced

OMEGA_TILDE = 1.34
OMEGA_P = ghz_to_angular(7.5) / OMEGA_TILDE

# smallest grid the propagator accepts; enough for qualitative checks
FAST = {"n_steps": 256, "n_times": 32}


@pytest.fixture(scope="session")
def omega_p() -> float:
    return OMEGA_P


@pytest.fixture(scope="session")
def transmon() -> TransmonParams:
    """ħ_eff⁻¹ = 3 transmon driven at ω̃_d = 1.34, undriven."""
    return from_reduced(3.0, OMEGA_P, 0.0, OMEGA_TILDE, 0.0)


@pytest.fixture(scope="session")
def basis() -> ChargeBasis:
    return ChargeBasis(cutoff=17)


@pytest.fixture(scope="session")
def small_basis() -> ChargeBasis:
    return ChargeBasis(cutoff=10)


@pytest.fixture(scope="session")
def undriven_solution(transmon, basis):
    return floquet_solve(transmon, basis, **FAST)


@pytest.fixture(scope="session")
def driven_solution(transmon, basis):
    """ε̃_d = 0.2 at n_g = 0."""
    return floquet_solve(transmon.with_drive(0.2 * OMEGA_P), basis, **FAST)


@pytest.fixture(scope="session")
def fast() -> dict:
    return dict(FAST)
