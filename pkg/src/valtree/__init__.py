"""Exact computations with centered valuations on k[[x, y]]."""

from .arith import (INF, BiPoly, BranchParam, ParseError, ValtreeError, parse_branch,
                    parse_poly, substitute_order, intersection_number)
from .skp import SKP, NU_M, make_skp, eval_skp, skp_of_branch, wedge, compare, invariants
from .dualgraph import (DualGraph, blowup_at, minimal_desing_from_branches,
                        minimal_desing_from_equising, equising_from_branches, vertex_to_skp)
from .treemeasure import (AtomicMeasure, IdealSpec, parse_ideal, tree_transform, laplacian,
                          potential_of_measure, zariski_factor, inner_product,
                          mixed_multiplicity, integral_closure_member)

__version__ = "0.1.0"

__all__ = [
    "INF",
    "BiPoly",
    "BranchParam",
    "ParseError",
    "ValtreeError",
    "parse_branch",
    "parse_poly",
    "substitute_order",
    "intersection_number",
    "SKP",
    "NU_M",
    "make_skp",
    "eval_skp",
    "skp_of_branch",
    "wedge",
    "compare",
    "invariants",
    "DualGraph",
    "blowup_at",
    "minimal_desing_from_branches",
    "minimal_desing_from_equising",
    "equising_from_branches",
    "vertex_to_skp",
    "AtomicMeasure",
    "IdealSpec",
    "parse_ideal",
    "tree_transform",
    "laplacian",
    "potential_of_measure",
    "zariski_factor",
    "inner_product",
    "mixed_multiplicity",
    "integral_closure_member",
]
