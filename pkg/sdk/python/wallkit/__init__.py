"""Exact integral-lattice toolkit for wall divisors and monodromy checks on hyper-Kähler lattices."""
from .errors import WallkitError
from .isometries import Isometry, eichler_reduce, is_isometry, mapping_isometry, orbit_equivalent
from .lattice import IntegralLattice, LatticeVector, Sublattice, make_lattice, standard_lattice
from .walls import bm_wall, mz_wall, yoshioka_wall

__version__ = "0.1.0"

__all__ = [
    "IntegralLattice",
    "Isometry",
    "LatticeVector",
    "Sublattice",
    "WallkitError",
    "bm_wall",
    "eichler_reduce",
    "is_isometry",
    "make_lattice",
    "mapping_isometry",
    "mz_wall",
    "orbit_equivalent",
    "standard_lattice",
    "yoshioka_wall",
]
