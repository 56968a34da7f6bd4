"""dklie: exact computations in infinitesimal braid Lie algebras.

Subpackages by layer: exactla (sparse rational linear algebra), freelie
(Lyndon bases and shuffles), dk (the braid Lie algebras and their
functoriality), complexes (bar and Chevalley-Eilenberg complexes), operadkit
(operad instances, homotopy variants, Gerstenhaber structure), grt
(condition systems, deformation complex, cohomology tests), cli.
"""

__version__ = "0.1.0"

from .exactla import rat, rat_str, SparseMatrix, kernel_basis, rank
from .freelie import lyndon_words, lyndon_basis, witt_dimension
from .dk import (FinSet, SetMap, dk_basis, direct_image, inverse_image,
                 partial_pullback, check_commutation)
from .complexes import (bar_complex, ce_complex, homology_ranks,
                        antisymmetrize)
from .grt import (grt_basis, condition_system, cohomology_class_test,
                  deformation_space, deformation_differential, solver_report)

__all__ = [
    "__version__",
    "rat", "rat_str", "SparseMatrix", "kernel_basis", "rank",
    "lyndon_words", "lyndon_basis", "witt_dimension",
    "FinSet", "SetMap", "dk_basis", "direct_image", "inverse_image",
    "partial_pullback", "check_commutation",
    "bar_complex", "ce_complex", "homology_ranks", "antisymmetrize",
    "grt_basis", "condition_system", "cohomology_class_test",
    "deformation_space", "deformation_differential", "solver_report",
]
