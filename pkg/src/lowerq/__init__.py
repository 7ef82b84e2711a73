"""Numerical lower bounds for moduli of ring surface families on Riemannian manifolds."""

from .errors import ModulusError
from .manifold import (MetricField, NormalNeighborhood, GeodesicRing, build_normal_neighborhood,
                       euclidean, geodesic_distance, geodesic_shoot, poincare_ball, ring,
                       round_sphere)
from .modulus import ExponentSet, WeightField, lower_bound_integral, surface_family_modulus
from .quadrature import ShellGrid, shell_grid

__all__ = [
    "ModulusError", "MetricField", "NormalNeighborhood", "GeodesicRing",
    "build_normal_neighborhood", "euclidean", "geodesic_distance", "geodesic_shoot",
    "poincare_ball", "ring", "round_sphere", "ExponentSet", "WeightField",
    "lower_bound_integral", "surface_family_modulus", "ShellGrid", "shell_grid",
]
