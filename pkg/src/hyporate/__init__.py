"""Hypocoercive decay-rate certification for linear kinetic relaxation models."""

from .errors import HyporateError
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["HyporateError", "BACKEND", "__version__"]
