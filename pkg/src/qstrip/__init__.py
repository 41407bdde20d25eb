"""Quantum curves, wave-function series, quivers and DT invariants for strip geometries."""

from .errors import QStripError
from .geometry import StripGeometry
from .quantization import Basepoint
from .series import Direction, QLaurent, XSeries

__version__ = "0.1.0"

__all__ = ["Basepoint", "Direction", "QLaurent", "QStripError", "StripGeometry", "XSeries", "__version__"]
