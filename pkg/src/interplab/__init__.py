"""Kernel interpolation with bi-level spectra: estimators, risks, bounds and sweeps."""

__version__ = "0.1.0"
