"""Topology of plane curve singularities from their resolution graphs."""
from curvetop.graph import DualGraph, classify, validate
from curvetop.lattice import intersection_matrix, multiplicity_vector
from curvetop.pi1 import abelianization, presentation
from curvetop.resolution import parse_branches, resolve

__all__ = [
    "DualGraph", "abelianization", "classify", "intersection_matrix",
    "multiplicity_vector", "parse_branches", "presentation", "resolve", "validate",
]
__version__ = "0.1.0"
