"""Adaptive sampling of nonlinear dynamic systems for surrogate-model datasets."""

__version__ = "0.1.0"
