"""Maximin distance designs from interleaved lattices."""

from .design import (Design, brute_force_separation, centered_design, corner_design, rho_formula,
                     rho_formula_centered, weighted_distance)
from .errors import ConditioningError, InvalidInputError, ResourceLimitError, UnsupportedDimensionError
from .evaluation import GpConfig, PerturbationScheme, compare_designs, gp_imspe, maximin_lhd
from .gf2 import Code, codewords, enumerate_subspaces, feasible_code, halve_code, member, rref
from .lattice import Lattice, point_count, point_count_bounds, points_in_box, standard_lattices
from .search import SearchOutcome, SearchRequest, algorithm1, algorithm2, algorithm3, best_lattice_for, search

__version__ = "0.1.0"
