"""Correlated (2+1)-photon generation in a double-Lambda active-Raman-gain medium."""

__version__ = "0.1.0"

from .model import CompositeDetunings, ModelParams, derive_ds, paper_defaults, validate

__all__ = ["CompositeDetunings", "ModelParams", "derive_ds", "paper_defaults", "validate",
           "__version__"]
