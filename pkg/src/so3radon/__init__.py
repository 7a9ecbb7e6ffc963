"""Radon transform on the rotation group SO(3) and its inversion."""

from . import harmonics, radon, rotations, sampling, sphere3

__version__ = "0.1.0"

__all__ = ["harmonics", "radon", "rotations", "sampling", "sphere3", "__version__"]
