"""Exact modular matrix products on int64 numpy arrays.

A product of two 31-bit residues already needs 62 bits, so a straight int64
matmul would overflow while accumulating.  We split the right operand into
16-bit halves: with ``B = B_hi * 2^16 + B_lo`` both partial products
``A @ B_lo`` and ``A @ B_hi`` stay below 2^63 for reduction lengths up to
2^15, and the halves are recombined modulo q.  Longer reductions are folded
in 2^15-deep blocks.

The modulus argument may be a scalar, a per-row column vector, or a per-column
row vector; broadcasting then yields the mixed-moduli product where each
output line reduces under its own prime.
"""

from __future__ import annotations

import numpy as np

_K_BLOCK = 1 << 15
_LO_MASK = (1 << 16) - 1


def _as_int64(x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.int64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    return arr


def matmul_mod(a, b, q) -> np.ndarray:
    """``(a @ b) mod q`` with exact integer arithmetic throughout.

    ``q`` broadcasts against the (M, N) result: pass a scalar for a uniform
    modulus, shape (M, 1) for per-row moduli, or (1, N) for per-column.
    """
    a = _as_int64(a)
    b = _as_int64(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch: {a.shape} @ {b.shape}")
    q = np.asarray(q, dtype=np.int64)
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for k0 in range(0, a.shape[1], _K_BLOCK):
        ab = a[:, k0 : k0 + _K_BLOCK]
        bb = b[k0 : k0 + _K_BLOCK, :]
        lo = ab @ (bb & _LO_MASK)
        hi = ab @ (bb >> 16)
        out = (out + lo % q + ((hi % q) << 16)) % q
    return out


def elementwise_mod(a, b, q, op: str = "mul") -> np.ndarray:
    """Element-wise modular product/sum of int64 arrays (entries < 2^31)."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    q = np.asarray(q, dtype=np.int64)
    if op == "mul":
        return (a * b) % q
    if op == "add":
        return (a + b) % q
    if op == "sub":
        return (a - b) % q
    raise ValueError(f"unknown element-wise op {op!r}")
