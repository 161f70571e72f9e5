"""Normalized Walsh-Hadamard transform.

The transform runs sequential radix-16 butterfly stages: each stage
multiplies groups of 16 strided lanes by the 16-point Hadamard block,
so a length-d input takes ceil(log2(d)/4) passes over the data instead
of log2(d).  Work per stage stays linear in d and the blocks are tiny
constants, which keeps the O(d log d) butterfly structure while doing
the arithmetic inside matmul instead of one numpy op per radix-2 level.
The d**-0.5 normalization is folded into the first stage, so the
transform is orthonormal: it preserves Euclidean norms and is its own
inverse.  ``naive_hadamard`` builds the same operator as an explicit
matrix by doubling blocks and is kept as an independent slow oracle.
"""

from __future__ import annotations

import numpy as np

from .errors import NonPowerOfTwo
from .core import is_power_of_two

MAX_RADIX = 16

# unnormalized Hadamard blocks for radix 2, 4, 8, 16
_BLOCKS: dict[int, np.ndarray] = {}
_block = np.array([[1.0]])
while _block.shape[0] < MAX_RADIX:
    _block = np.block([[_block, _block], [_block, -_block]])
    _BLOCKS[_block.shape[0]] = _block
del _block


def fwht_inplace(vec: np.ndarray) -> np.ndarray:
    """Transform ``vec`` along its last axis, in place.

    Accepts a single vector or any batch shaped (..., d).  The array
    must be float64 and d a power of two.  Returns the same array for
    chaining.
    """
    vec = np.asarray(vec)
    if vec.dtype != np.float64:
        raise TypeError(f"transform operates on float64 arrays, got {vec.dtype}")
    d = vec.shape[-1]
    if not is_power_of_two(d):
        raise NonPowerOfTwo(f"transform length must be a power of two, got {d}")
    if d == 1:
        return vec
    work = np.ascontiguousarray(vec)
    flat = work.reshape(-1, d)
    m = flat.shape[0]
    src, dst = flat, np.empty_like(flat)
    lanes = 1
    while lanes < d:
        radix = min(MAX_RADIX, d // lanes)
        block = _BLOCKS[radix]
        if lanes == 1:
            block = block * (1.0 / np.sqrt(d))
            np.matmul(src.reshape(-1, radix), block, out=dst.reshape(-1, radix))
        else:
            # lanes consecutive values share a butterfly index; batch the
            # block product over the leading groups
            groups = d // (lanes * radix)
            np.matmul(
                block,
                src.reshape(m * groups, radix, lanes),
                out=dst.reshape(m * groups, radix, lanes),
            )
        src, dst = dst, src
        lanes *= radix
    if src is not flat:
        flat[...] = src
    if work is not vec:
        # input was not contiguous; keep the in-place contract
        vec[...] = work
    return vec


def hadamard_matrix(d: int) -> np.ndarray:
    """Dense orthonormal Hadamard matrix, built by block doubling."""
    if not is_power_of_two(d):
        raise NonPowerOfTwo(f"matrix size must be a power of two, got {d}")
    h = np.array([[1.0]])
    while h.shape[0] < d:
        h = np.block([[h, h], [h, -h]])
    return h / np.sqrt(d)


def naive_hadamard(vec: np.ndarray) -> np.ndarray:
    """O(d^2) reference: multiply by the explicit matrix."""
    vec = np.asarray(vec, dtype=np.float64)
    return vec @ hadamard_matrix(vec.shape[-1]).T
