"""Spectral simulation of the quantum Rabi model with an A^2 term."""

__version__ = "0.1.0"

from .fockspace import HermitianOperator, Truncation, TruncationInadequate, UnitaryOperator
from .model import HbImage, ModelParams, RScheme, hb_map
from .spectra import Spectrum, SusyClass, SusyReport, classify_susy, converge, solve

__all__ = [
    "__version__",
    "HermitianOperator",
    "UnitaryOperator",
    "Truncation",
    "TruncationInadequate",
    "ModelParams",
    "HbImage",
    "RScheme",
    "hb_map",
    "Spectrum",
    "SusyClass",
    "SusyReport",
    "classify_susy",
    "converge",
    "solve",
]
