# quasichaos/core/units.py
# Conversions at the config/CLI boundary. Kernels work in rad/ns (ħ = 1, time in ns).

from __future__ import annotations

import math

TWO_PI = 2.0 * math.pi


def ghz_to_angular(value_ghz: float) -> float:
    return TWO_PI * value_ghz


def mhz_to_angular(value_mhz: float) -> float:
    return TWO_PI * 1e-3 * value_mhz


def angular_to_ghz(value: float) -> float:
    return value / TWO_PI


def angular_to_mhz(value: float) -> float:
    return 1e3 * value / TWO_PI


def mk_to_kelvin(value_mk: float) -> float:
    return 1e-3 * value_mk
