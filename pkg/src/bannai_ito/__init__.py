"""Bannai-Ito algebras from Casimir operators of osp(1,2) tensor products.

Exact rational layer: :mod:`linalg`, :mod:`osp`, :mod:`tensor`,
:mod:`relations`.  Floating-point spectral layer: :mod:`spectral`,
:mod:`connection`.
"""

from .connection import (
    BasisCache,
    ConnectionMatrix,
    SwapStep,
    act_in_basis,
    adjacent_path,
    block_overlap,
    check_three_term,
    compose_path,
    direct_overlap,
)
from .linalg import SparseRatMatrix, bracket, format_rational, kron, parse_rational
from .osp import GeneratorSet, ModuleSpec, build_site, casimir_single, coproduct, verify_osp_relations, weight_coeff
from .relations import RelationReport, b3_embedding_check, bi_residual, commutes_trivially, verify_all
from .spectral import (
    ChainAlgebra,
    DegeneracyError,
    EigenBasis,
    GaugeError,
    ShapeError,
    TridiagonalAction,
    joint_eigenbasis,
    normalized_block,
    tridiagonal_action,
)
from .tensor import (
    LeveledOperator,
    TensorSpace,
    all_subsets,
    level_dimension,
    op_algebra,
    subset_casimir,
    subset_elements,
    subset_generators,
    subset_mask,
)

__version__ = "0.1.0"
