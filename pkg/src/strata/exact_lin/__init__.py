"""Exact linear algebra over Z and Q and finitely generated abelian groups."""

from .groups import (BiProduct, FGAbGroup, GroupHom, IllDefinedHom, PairingVerdict, RingMismatch,
                     Subquotients, direct_sum, group_from_presentation, hom_subquotients,
                     pairing_check)
from .matrix import DimensionMismatch, IntMatrix
from .normal_form import (QQ, ZZ, SNFDecomposition, lattice_basis, nullspace, rank,
                          rank_normal_form, smith_normal_form, solve)

__all__ = [
    "QQ", "ZZ", "BiProduct", "DimensionMismatch", "FGAbGroup", "GroupHom", "IllDefinedHom",
    "IntMatrix", "PairingVerdict", "RingMismatch", "SNFDecomposition", "Subquotients",
    "direct_sum", "group_from_presentation", "hom_subquotients", "lattice_basis", "nullspace",
    "pairing_check", "rank", "rank_normal_form", "smith_normal_form", "solve",
]
