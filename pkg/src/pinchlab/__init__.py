"""Pinch constructions, finite duality and game arguments for finite relational structures."""

from .constructions import (
    INF,
    b_left,
    b_right,
    diameter,
    direct_product,
    disjoint_union,
    dist,
    girth,
    incidence,
    n_link,
    n_pinch,
    pinch_collapse_hom,
    pinch_projection_hom,
    quotient,
)
from .solver import SearchConfig, csp_member, enumerate_homs, find_hom, find_surjective_hom, is_hom_independent
from .structures import Homomorphism, RelStructure, Signature, is_homomorphism, validate

__version__ = "0.1.0"

__all__ = [
    "INF",
    "Homomorphism",
    "RelStructure",
    "SearchConfig",
    "Signature",
    "b_left",
    "b_right",
    "csp_member",
    "diameter",
    "direct_product",
    "disjoint_union",
    "dist",
    "enumerate_homs",
    "find_hom",
    "find_surjective_hom",
    "girth",
    "incidence",
    "is_hom_independent",
    "is_homomorphism",
    "n_link",
    "n_pinch",
    "pinch_collapse_hom",
    "pinch_projection_hom",
    "quotient",
    "validate",
]
