"""Exact symbolic workbench for split Lie 2-algebroids and their doubles."""

from .gradedpoly import Chart, Poly
from .structures import Lie2Structure, MorphismData
from .multivectors import MCElement

__all__ = ["Chart", "Poly", "Lie2Structure", "MorphismData", "MCElement"]
__version__ = "0.1.0"
