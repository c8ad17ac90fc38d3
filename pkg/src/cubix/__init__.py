"""Exact homological algebra for presimplicial and pseudocubical objects.

Smith normal form over the integers, chain complexes of finitely presented
abelian groups, finite presimplicial and pseudocubical sets, the cubical
normalization, idempotent splitting in the free preadditive category on
finite sets, and derived functors from simplicial and cubical resolutions.
"""

from .chains import AugmentedComplex, ChainComplex, PresentedGroup, TensorFunctor, homology
from .exactla import FgAbGroup, cokernel_invariants, kernel_basis, snf, solve
from .shapes import (
    AugmentedShape,
    FinPresimplicialSet,
    FinPseudocubicalSet,
    builtin_model,
    cech_presimplicial,
    cech_pseudocubical,
)

__all__ = [
    "AugmentedComplex",
    "AugmentedShape",
    "ChainComplex",
    "FgAbGroup",
    "FinPresimplicialSet",
    "FinPseudocubicalSet",
    "PresentedGroup",
    "TensorFunctor",
    "builtin_model",
    "cech_presimplicial",
    "cech_pseudocubical",
    "cokernel_invariants",
    "homology",
    "kernel_basis",
    "snf",
    "solve",
]
