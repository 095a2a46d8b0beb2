"""
Tensor core module.

Dense tensor storage and the multilinear operations every other module consumes.

Usage:
    from modules.tensor_core import DenseTensor, BlockVector, contract_full

    A = DenseTensor.from_flat((2, 2, 2), range(1, 9))
    x = BlockVector.of([1, 0], [1, 0], [0, 1])
    value = contract_full(A, x)
"""

from modules.tensor_core.dense_tensor import BlockVector, DenseTensor
from modules.tensor_core.operations import (
    assemble,
    contract_full,
    contract_mode,
    diag_tensor,
    extract_diag,
    fold,
    inner,
    khatri_rao_all,
    mode_contractions,
    multilinear_multiply,
    norm,
    unfold,
)
from modules.tensor_core.text_format import (
    format_matrix,
    format_tensor,
    parse_matrices,
    parse_tensor,
    read_matrices,
    read_tensor,
    write_matrices,
    write_tensor,
)

__all__ = [
    'DenseTensor',
    'BlockVector',
    'inner',
    'norm',
    'contract_full',
    'contract_mode',
    'multilinear_multiply',
    'diag_tensor',
    'extract_diag',
    'assemble',
    'unfold',
    'fold',
    'khatri_rao_all',
    'mode_contractions',
    'format_tensor',
    'parse_tensor',
    'format_matrix',
    'parse_matrices',
    'read_tensor',
    'write_tensor',
    'read_matrices',
    'write_matrices',
]
