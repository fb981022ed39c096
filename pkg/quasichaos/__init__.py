"""Quantum chaos of driven transmons: classical and Floquet dynamics, dissipation and cQED."""

__version__ = "0.1.0"
