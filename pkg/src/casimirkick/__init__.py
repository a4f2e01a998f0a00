"""Kinetic-energy signatures of cavity-generated photons on electrons crossing the cavity."""

from .analytic import (
    bogoliubov,
    kick_coefficients,
    mean_kinetic_shift,
    mean_photons,
    resonant_shift,
    small_squeeze_limit,
    variance_shift_paper,
)
from .params import CODATA, CavityConfig, DimensionlessGroups, ElectronConfig, PhysicalConstants, reduce
from .propagator import CANONICAL, GaussianMoments, ModelFlags, kinetic_moments, propagate

__version__ = "0.1.0"

__all__ = [
    "CANONICAL",
    "CODATA",
    "CavityConfig",
    "DimensionlessGroups",
    "ElectronConfig",
    "GaussianMoments",
    "ModelFlags",
    "PhysicalConstants",
    "bogoliubov",
    "kick_coefficients",
    "kinetic_moments",
    "mean_kinetic_shift",
    "mean_photons",
    "propagate",
    "reduce",
    "resonant_shift",
    "small_squeeze_limit",
    "variance_shift_paper",
]
