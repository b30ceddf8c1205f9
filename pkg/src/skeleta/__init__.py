"""skeleta: exact computations on 1-skeleta.

Graphs carrying an axial function, a connection, and the derived positive
compatibility scalars, together with their holonomy, combinatorial Morse
theory, equivariant cohomology, and the constructive cross-section pipeline
that decides whether a generating family exists.  All arithmetic is exact
over the rationals.
"""

from .polynomial import Polynomial, Vector, FactoredFraction, divide_by_linear
from .residues import (
    EdgeForm,
    XiBasis,
    elementary_symmetric,
    power_reduce,
    res_xi,
    residue_at_infinity,
    rho_project,
)
from .skeleton import (
    Graph,
    InferenceResult,
    Skeleton,
    SkeletonError,
    Subskeleton,
    infer_connection,
    validate,
)

__all__ = [
    "Polynomial", "Vector", "FactoredFraction", "divide_by_linear",
    "XiBasis", "EdgeForm", "rho_project", "residue_at_infinity", "res_xi",
    "elementary_symmetric", "power_reduce",
    "Graph", "Skeleton", "Subskeleton", "SkeletonError",
    "validate", "infer_connection", "InferenceResult",
]
