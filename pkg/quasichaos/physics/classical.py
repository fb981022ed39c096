# quasichaos/physics/classical.py

"""
Classical Pendulum
Driven charged pendulum H̃ = (ñ - ñ_g)²/2 - cos φ̃ + ε̃ cos(ω̃ t̃) ñ in rescaled units.

The integrator is a fourth-order symmetric (Yoshida) composition of the exact
flows of the two separable parts: the drift carries the explicit time
dependence and moves φ̃ at fixed ñ, the kick moves ñ at fixed φ̃. All starts of
a batch are integrated together as numpy vectors.
"""

from __future__ import annotations

import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy import special

from quasichaos.core.errors import ConfigError, InvalidParameterError
from quasichaos.core.models import (
    LayerWidth,
    PhasePoint,
    ReducedParams,
    ResonanceReport,
    SectionPoints,
    Trajectory,
)

logger = logging.getLogger(__name__)

DEFAULT_STEPS_PER_PERIOD = 512
MIN_STEPS_PER_PERIOD = 200
CHAOS_THRESHOLD = 0.02

BOUNDED_RESONANCES = {"1:1": (0.65, 1.0), "3:1": (2.0, 3.0), "5:1": (4.0, 5.0)}
UNBOUNDED_RESONANCE_ONSET = 1.5

_CBRT2 = 2.0 ** (1.0 / 3.0)
_W1 = 1.0 / (2.0 - _CBRT2)
_W0 = -_CBRT2 / (2.0 - _CBRT2)
_DRIFT = (0.5 * _W1, 0.5 * (_W0 + _W1), 0.5 * (_W0 + _W1), 0.5 * _W1)
_KICK = (_W1, _W0, _W1)


def wrap_phase(phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Reduce to (-π, π]; returns (wrapped, number of 2π turns removed)."""
    wrapped = math.pi - np.mod(math.pi - phi, 2.0 * math.pi)
    turns = np.rint((phi - wrapped) / (2.0 * math.pi))
    return wrapped, turns


def pendulum_energy(phi, n, reduced: ReducedParams):
    """Undriven energy measured from the well bottom; the separatrix is at 2."""
    return 0.5 * (np.asarray(n) - reduced.ng_tilde) ** 2 + 1.0 - np.cos(phi)


class _Splitting:
    """Fixed-step symplectic stepper for a batch of phase points."""

    def __init__(self, reduced: ReducedParams, dt: float):
        self.ng = reduced.ng_tilde
        self.eps = reduced.eps_tilde
        self.omega = reduced.omega_tilde
        self.dt = dt

    def _drive_shift(self, t: float, h: float) -> float:
        # ∫_t^{t+h} ε̃ cos(ω̃ s) ds
        if self.eps == 0.0:
            return 0.0
        return (
            2.0
            * self.eps
            / self.omega
            * math.cos(self.omega * (t + 0.5 * h))
            * math.sin(0.5 * self.omega * h)
        )

    def step(self, phi, n, t, tangent=None):
        dt = self.dt
        for i in range(4):
            h = _DRIFT[i] * dt
            phi = phi + (n - self.ng) * h + self._drive_shift(t, h)
            if tangent is not None:
                tangent[0] = tangent[0] + tangent[1] * h
            t += h
            if i < 3:
                kick = _KICK[i] * dt
                if tangent is not None:
                    tangent[1] = tangent[1] - kick * np.cos(phi) * tangent[0]
                n = n - kick * np.sin(phi)
        return phi, n


def resolve_dt(reduced: ReducedParams, dt: Optional[float]) -> float:
    period = reduced.period
    if dt is None:
        return period / DEFAULT_STEPS_PER_PERIOD
    if dt == 0 or abs(dt) > period / MIN_STEPS_PER_PERIOD:
        raise ConfigError(
            f"step {dt:.4g} violates |dt| <= T/{MIN_STEPS_PER_PERIOD} = {period / MIN_STEPS_PER_PERIOD:.4g}"
        )
    return dt


def integrate(
    start: PhasePoint,
    reduced: ReducedParams,
    t_span: float,
    dt: Optional[float] = None,
    t_start: float = 0.0,
    sample_every: int = 1,
) -> Trajectory:
    """
    Integrate one start over t_span (negative for backward integration).

    Args:
        start: Initial phase point
        reduced: Rescaled parameters
        t_span: Signed integration time in units of 1/ω_p
        dt: Step size magnitude, default T̃/512
        t_start: Initial time
        sample_every: Record every this many steps

    Returns:
        Trajectory including the start

    Raises:
        ConfigError: If |dt| exceeds T̃/200
    """
    step = abs(resolve_dt(reduced, dt))
    n_steps = int(round(abs(t_span) / step))
    signed = math.copysign(step, t_span) if t_span != 0 else step
    stepper = _Splitting(reduced, signed)

    phi = np.array([start.phi], dtype=float)
    phi, winding = wrap_phase(phi)
    n = np.array([start.n], dtype=float)

    n_samples = n_steps // sample_every + 1
    times = np.empty(n_samples)
    phis = np.empty(n_samples)
    ns = np.empty(n_samples)
    windings = np.empty(n_samples)
    times[0], phis[0], ns[0], windings[0] = t_start, phi[0], n[0], winding[0]

    t = t_start
    for s in range(1, n_steps + 1):
        phi, n = stepper.step(phi, n, t)
        t = t_start + s * signed
        phi, turns = wrap_phase(phi)
        winding = winding + turns
        if s % sample_every == 0:
            k = s // sample_every
            times[k], phis[k], ns[k], windings[k] = t, phi[0], n[0], winding[0]

    return Trajectory(times=times, phi=phis, n=ns, winding=windings)


def default_starts(count: int = 40, n_max: float = 3.0) -> list[PhasePoint]:
    """Half the starts on the ñ = 0 axis, half on the φ̃ = 0 axis."""
    half = count // 2
    phis = np.linspace(-math.pi, math.pi, half + 1)[1:]
    ns = np.linspace(-n_max, n_max, count - half)
    return [PhasePoint(float(p), 0.0) for p in phis] + [PhasePoint(0.0, float(v)) for v in ns]


def poincare_section(
    starts: Sequence[PhasePoint],
    reduced: ReducedParams,
    n_periods: int,
    t0_fraction: float = 0.125,
    steps_per_period: int = DEFAULT_STEPS_PER_PERIOD,
) -> SectionPoints:
    """
    Stroboscopic section: one point per period per start at t0 + kT̃, k = 1..n_periods.

    Raises:
        InvalidParameterError: If n_periods < 100 or no starts are given
        ConfigError: If steps_per_period < 200
    """
    if n_periods < 100:
        raise InvalidParameterError(f"poincare_section needs n_periods >= 100 (got {n_periods})")
    if not starts:
        raise InvalidParameterError("poincare_section needs at least one start")
    period = reduced.period
    dt = resolve_dt(reduced, period / steps_per_period)
    stepper = _Splitting(reduced, dt)
    t0 = t0_fraction * period

    phi, _ = wrap_phase(np.array([p.phi for p in starts], dtype=float))
    n = np.array([p.n for p in starts], dtype=float)
    out_phi = np.empty((len(starts), n_periods))
    out_n = np.empty((len(starts), n_periods))

    for k in range(n_periods):
        base = t0 + k * period
        for s in range(steps_per_period):
            phi, n = stepper.step(phi, n, base + s * dt)
            phi, _ = wrap_phase(phi)
        out_phi[:, k] = phi
        out_n[:, k] = n

    return SectionPoints(starts=list(starts), phi=out_phi, n=out_n, period=period, t0=t0)


def lyapunov_many(
    starts: Sequence[PhasePoint],
    reduced: ReducedParams,
    n_periods: int,
    steps_per_period: int = DEFAULT_STEPS_PER_PERIOD,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """
    Largest Lyapunov exponents by tangent-vector renormalization once per period.

    Args:
        starts: Initial phase points at t = 0
        reduced: Rescaled parameters
        n_periods: Number of drive periods (>= 500)
        steps_per_period: Integrator resolution
        rng: Source of the initial tangent directions

    Returns:
        Exponents per unit rescaled time, one per start
    """
    if n_periods < 500:
        raise InvalidParameterError(f"lyapunov needs n_periods >= 500 (got {n_periods})")
    rng = rng if rng is not None else np.random.default_rng(0)
    period = reduced.period
    dt = resolve_dt(reduced, period / steps_per_period)
    stepper = _Splitting(reduced, dt)

    phi = np.array([p.phi for p in starts], dtype=float)
    n = np.array([p.n for p in starts], dtype=float)
    angle = rng.uniform(0.0, 2.0 * math.pi, size=len(starts))
    tangent = np.vstack([np.cos(angle), np.sin(angle)])
    log_growth = np.zeros(len(starts))

    for k in range(n_periods):
        base = k * period
        for s in range(steps_per_period):
            phi, n = stepper.step(phi, n, base + s * dt, tangent)
        phi, _ = wrap_phase(phi)
        norm = np.hypot(tangent[0], tangent[1])
        log_growth += np.log(norm)
        tangent = tangent / norm

    return log_growth / (n_periods * period)


def lyapunov(
    start: PhasePoint,
    reduced: ReducedParams,
    n_periods: int,
    steps_per_period: int = DEFAULT_STEPS_PER_PERIOD,
    rng: Optional[np.random.Generator] = None,
) -> float:
    return float(lyapunov_many([start], reduced, n_periods, steps_per_period, rng)[0])


def chaos_band(
    energies: np.ndarray, lambdas: np.ndarray, threshold: float = CHAOS_THRESHOLD
) -> Optional[tuple[float, float]]:
    """Energy interval spanned by starts whose exponent exceeds the threshold."""
    chaotic = np.asarray(lambdas) > threshold
    if not chaotic.any():
        return None
    e = np.asarray(energies)[chaotic]
    return float(e.min()), float(e.max())


def chaotic_layer_width(eps_tilde: float, omega_tilde: float) -> LayerWidth:
    """
    Analytic chaotic-layer width W_c/E_J = ε̃ ω̃ sech(πω̃/2).

    The estimate is only meaningful for ω̃ > 1; outside that domain the value
    is still returned with in_domain=False.
    """
    if eps_tilde < 0 or omega_tilde <= 0:
        raise InvalidParameterError("layer width needs eps_tilde >= 0 and omega_tilde > 0")
    in_domain = omega_tilde > 1.0
    if not in_domain:
        logger.warning(f"Layer-width estimate used outside its validity domain (omega_tilde={omega_tilde})")
    value = eps_tilde * omega_tilde / math.cosh(0.5 * math.pi * omega_tilde)
    return LayerWidth(value=value, in_domain=in_domain)


def resonance_report(reduced: ReducedParams) -> ResonanceReport:
    """Bounded/unbounded resonance predictions, J₀(ε̃/ω̃) and the layer width."""
    omega = reduced.omega_tilde
    bounded = [name for name, (lo, hi) in BOUNDED_RESONANCES.items() if lo <= omega <= hi]
    unbounded = None
    if omega >= UNBOUNDED_RESONANCE_ONSET:
        unbounded = (reduced.ng_tilde - omega, reduced.ng_tilde + omega)
    return ResonanceReport(
        omega_tilde=omega,
        bounded_orders=bounded,
        unbounded_momenta=unbounded,
        bessel_factor=float(special.j0(reduced.eps_tilde / omega)),
        layer_width=chaotic_layer_width(reduced.eps_tilde, omega),
    )
