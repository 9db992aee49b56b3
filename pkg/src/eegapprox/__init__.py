"""Approximate Welch band-power features and power/performance/accuracy sweeps."""

__version__ = "0.1.0"
