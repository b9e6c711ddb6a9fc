"""Level sets of band extrema for periodic discrete Schrodinger operators on Z^2."""

__version__ = "0.1.0"

from .algebra import LaurentPoly2, UniPolyLambda
from .floquet import Period, Potential, build_numeric, build_symbolic, charpoly
from .polytope import LatticePolygon, bounds_report, mixed_volume, newton_polytope

__all__ = [
    "LaurentPoly2",
    "UniPolyLambda",
    "Period",
    "Potential",
    "build_numeric",
    "build_symbolic",
    "charpoly",
    "LatticePolygon",
    "bounds_report",
    "mixed_volume",
    "newton_polytope",
]
