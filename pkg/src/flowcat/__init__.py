"""Flow paths and flow categories of acyclic partial matchings on regular CW complexes."""

from .cw import FacePoset, from_simplicial_complex, parse_simplicial, torus_fixture, validate_regular
from .morse import (DiscreteMorseFunction, PartialMatching, faithful_function, greedy_matching,
                    is_acyclic, is_discrete_morse, is_faithful, matching_from_function)
from .flowpaths import FlowPath, enumerate_flow_paths, flow_poset, reduce, subpath_leq
from .category import build_flow_category
from .homology import poset_homology

__all__ = [
    "FacePoset", "from_simplicial_complex", "parse_simplicial", "torus_fixture", "validate_regular",
    "DiscreteMorseFunction", "PartialMatching", "faithful_function", "greedy_matching",
    "is_acyclic", "is_discrete_morse", "is_faithful", "matching_from_function",
    "FlowPath", "enumerate_flow_paths", "flow_poset", "reduce", "subpath_leq",
    "build_flow_category", "poset_homology",
]

__version__ = "0.1.0"
