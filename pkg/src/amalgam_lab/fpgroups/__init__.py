"""Finitely presented groups: presentations, coset enumeration, Tietze moves, abelianization."""

from .cayley import (CayleyGraph, cayley_graph, certify_presentation, factorize, presentation_from_cayley,
                     presentation_from_group, presentation_from_table)
from .coset import CosetTable, group_order, subgroup_index, todd_coxeter, verify_table
from .presentation import (Presentation, canonical_cyclic, commutator, concat, cyclic_reduce, evaluate,
                           exponent_sums, free_reduce, invert, power)
from .snf import AbelianInvariants, abelian_invariants, abelianization, smith_diagonal
from .tietze import collapse_short_relators, tietze_simplify

__all__ = [
    "AbelianInvariants", "CayleyGraph", "CosetTable", "Presentation", "abelian_invariants", "abelianization",
    "canonical_cyclic", "cayley_graph", "certify_presentation", "collapse_short_relators", "commutator",
    "concat", "cyclic_reduce", "evaluate", "exponent_sums", "factorize", "free_reduce", "group_order", "invert",
    "power", "presentation_from_cayley", "presentation_from_group", "presentation_from_table", "smith_diagonal",
    "subgroup_index", "tietze_simplify", "todd_coxeter", "verify_table",
]
