"""Finite groups, their subgroup lattices, and homomorphisms."""
from .core import (CLASS_BOUND, LATTICE_BOUND, FiniteGroup, GroupError, SizeGuardError, Subgroup,
                   abelian_invariants, abelianization, commutator_set, commutator_subgroup,
                   commutator_width, direct_product, generate, is_nilpotent, is_perfect,
                   lower_central_series, normal_closure, normal_subgroups, quotient, subset_product)
from .homs import (GroupHom, HomError, abelianization_invariants, extend_from_generators,
                   hom_to_center_exists, is_decomposable, nilpotent_center_hom)

__all__ = [
    "CLASS_BOUND", "LATTICE_BOUND", "FiniteGroup", "GroupError", "GroupHom", "HomError",
    "SizeGuardError", "Subgroup", "abelian_invariants", "abelianization",
    "abelianization_invariants", "commutator_set", "commutator_subgroup", "commutator_width",
    "direct_product", "extend_from_generators", "generate", "hom_to_center_exists",
    "is_decomposable", "is_nilpotent", "is_perfect", "lower_central_series", "nilpotent_center_hom",
    "normal_closure", "normal_subgroups", "quotient", "subset_product",
]
