"""medianwalk: exact cube-complex median geometry and a random-walk lab."""

__version__ = "0.1.0"

from .complexes import FiniteMedianComplex, Halfspace, Wall, build_complex
from .families import generate_family

__all__ = [
    "FiniteMedianComplex",
    "Halfspace",
    "Wall",
    "build_complex",
    "generate_family",
    "__version__",
]
