"""Quantum harmonic Otto cycle toolkit (hbar = k_B = m = 1)."""

__version__ = "0.1.0"
