"""Krylov solvers for symmetric, possibly singular, linear systems.

The centerpiece is :func:`minares_solve`, which minimizes ``||A r_k||`` over
the Lanczos Krylov subspaces with one operator product per iteration.
"""

from .baselines import lsmr_solve, minres_solve
from .cdfamily import car_solve, cg_solve, cr_solve
from .errors import (ContractViolation, DegenerateInputError, DimensionError, MatrixMarketError,
                     NoNullvectorError, NumericalBreakdown, ZeroRHSError)
from .lanczos import LanczosState, lanczos_init, lanczos_step
from .minares import minares_solve
from .operator import (CountingOperator, SparseSymmetric, SymmetricOperator, augmented, diagonal,
                       from_dense, from_sparse, identity, max_entry_scale, shifted)
from .report import SolveReport, Status, StoppingCriteria
from .spectral import EigenResult, SingularTriplet, inverse_iteration, nullvector, singular_triplet

__all__ = [
    "minares_solve", "car_solve", "cg_solve", "cr_solve", "minres_solve", "lsmr_solve",
    "SymmetricOperator", "CountingOperator", "SparseSymmetric", "identity", "diagonal",
    "from_dense", "from_sparse", "shifted", "augmented", "max_entry_scale",
    "LanczosState", "lanczos_init", "lanczos_step",
    "StoppingCriteria", "SolveReport", "Status",
    "nullvector", "inverse_iteration", "singular_triplet", "EigenResult", "SingularTriplet",
    "DimensionError", "DegenerateInputError", "ZeroRHSError", "ContractViolation",
    "NumericalBreakdown", "NoNullvectorError", "MatrixMarketError",
]
