"""Computational verification toolkit for symplectic groups as universal completions of amalgams.

Exact GF(p) linear algebra, the incidence geometries of subspaces with small
radical, their fundamental groups, the Sp(V) action, and universal
completions of amalgams checked by coset enumeration.
"""

__version__ = "0.1.0"

from .builders import GammaSpec, PiSpec, build_gamma, build_pi, residue_iso_phi
from .geometry import IncidenceGeometry, check_geometry
from .homotopy import certify_trivial, pi1_presentation
from .linalg import PrimeField, Subspace
from .symplectic import SympSpace

__all__ = [
    "GammaSpec", "IncidenceGeometry", "PiSpec", "PrimeField", "Subspace", "SympSpace", "build_gamma",
    "build_pi", "certify_trivial", "check_geometry", "pi1_presentation", "residue_iso_phi",
]
