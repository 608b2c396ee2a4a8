"""Momentum polytopes, singular fibers and Lax-matrix checks for compactified
trigonometric Ruijsenaars-Schneider systems."""

from .farey import FareyInterval, IntervalType, classify_intervals, farey_neighbours, farey_sequence
from .polytope import PolytopeModel, build_h_representation, symbolic_vertices
from .rational import AffineForm, evaluate, interpolate_affine, is_integer_multiple

__version__ = "0.1.0"

__all__ = [
    "AffineForm",
    "FareyInterval",
    "IntervalType",
    "PolytopeModel",
    "build_h_representation",
    "classify_intervals",
    "evaluate",
    "farey_neighbours",
    "farey_sequence",
    "interpolate_affine",
    "is_integer_multiple",
    "symbolic_vertices",
]
