"""Approximate RNS base conversion in direct-sum and matrix forms.

Converting residues from a source base P = {p_0..p_{a-1}} to a target base
Q = {q_0..q_{L-1}} evaluates, per coefficient n and target modulus q_i,

    out[i][n] = sum_j ( [x[j][n] * Phat_j^-1]_{p_j} * Phat_j )  mod q_i

with ``Pstar = prod p_j`` and ``Phat_j = Pstar / p_j``.  The result equals
the exact CRT value v plus ``e * Pstar`` for a single integer ``0 <= e < a``
(no correction term is applied; that would be a different algorithm).

The matrix form factors the same sum into a scale step (element-wise, scalar
path) followed by a mixed-moduli matrix product whose left operand holds
``[Phat_j]_{q_i}`` -- each output row reduces under its own modulus.  Because
reduction mod q_i commutes with the summation, the matrix form is bit-exact
equal to the direct form even though it never leaves word-sized arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .modarith import Modulus, make_modulus, mod_inv


@dataclass(eq=False)
class BaseConvPlan:
    """Precomputed tables for one (P, Q) base pair.

    ``Phat_mod_Q[i][j] = [Phat_j]_{q_i}`` (L x alpha), ``inv_Phat[j]`` the
    inverse of ``[Phat_j]_{p_j}``, and ``Pstar_mod_q[i] = [Pstar]_{q_i}``.
    Immutable after construction and safe to share.
    """

    P: tuple[Modulus, ...]
    Q: tuple[Modulus, ...]
    alpha: int
    Pstar: int
    Phat: tuple[int, ...]
    inv_Phat: np.ndarray
    Phat_mod_Q: np.ndarray
    Pstar_mod_q: np.ndarray


def build_baseconv_plan(p_moduli, q_moduli) -> BaseConvPlan:
    """Build conversion tables; the big products use arbitrary precision and
    are reduced per modulus at the end.

    Source and target primes must be distinct across both bases.
    """
    src = [m if isinstance(m, Modulus) else make_modulus(m) for m in p_moduli]
    dst = [m if isinstance(m, Modulus) else make_modulus(m) for m in q_moduli]
    if not src or not dst:
        raise ValueError("both moduli lists must be non-empty")
    all_q = [m.q for m in src] + [m.q for m in dst]
    if len(set(all_q)) != len(all_q):
        raise ValueError("moduli must be distinct across the source and target bases")

    pstar = 1
    for m in src:
        pstar *= m.q
    phat = tuple(pstar // m.q for m in src)
    inv_phat = np.array(
        [mod_inv(ph % m.q, m) for ph, m in zip(phat, src)], dtype=np.int64
    )
    phat_mod_q = np.array(
        [[ph % mq.q for ph in phat] for mq in dst], dtype=np.int64
    )
    pstar_mod_q = np.array([pstar % mq.q for mq in dst], dtype=np.int64)
    return BaseConvPlan(
        P=tuple(src), Q=tuple(dst), alpha=len(src), Pstar=pstar, Phat=phat,
        inv_Phat=inv_phat, Phat_mod_Q=phat_mod_q, Pstar_mod_q=pstar_mod_q,
    )


def _check_input(a, plan: BaseConvPlan) -> np.ndarray:
    arr = np.asarray(a, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[0] != plan.alpha:
        raise ValueError(
            f"expected a {plan.alpha} x N residue matrix, got shape {arr.shape}"
        )
    for j, m in enumerate(plan.P):
        if (arr[j] < 0).any() or (arr[j] >= m.q).any():
            raise ValueError(f"row {j} holds out-of-range residues for modulus {m.q}")
    return arr


def scale_step(a, plan: BaseConvPlan) -> np.ndarray:
    """Element-wise ``y[j][n] = [x[j][n] * Phat_j^-1]_{p_j}`` (scalar path)."""
    arr = _check_input(a, plan)
    p_col = np.array([m.q for m in plan.P], dtype=np.int64)[:, None]
    return (arr * plan.inv_Phat[:, None]) % p_col


def baseconv_direct(a, plan: BaseConvPlan) -> np.ndarray:
    """Literal per-coefficient evaluation of the conversion sum -- the oracle.

    Uses arbitrary-precision intermediates (Python ints), so the huge
    ``Phat_j`` factors are carried exactly before the final mod q_i.
    """
    y = scale_step(a, plan)
    n_coeff = y.shape[1]
    out = np.empty((len(plan.Q), n_coeff), dtype=np.int64)
    # One big-int sum per coefficient; identical for every target modulus.
    sums = [0] * n_coeff
    for j in range(plan.alpha):
        ph = plan.Phat[j]
        row = y[j]
        for n in range(n_coeff):
            sums[n] += int(row[n]) * ph
    for i, mq in enumerate(plan.Q):
        out[i] = np.array([s % mq.q for s in sums], dtype=np.int64)
    return out


def baseconv_matrix(a, plan: BaseConvPlan, executor=None) -> np.ndarray:
    """Scale step plus mixed-moduli matrix product; bit-exact equal to
    :func:`baseconv_direct`.

    ``executor`` is any matmul backend with a
    ``matmul(A, B, assignment) -> array`` method (the plain multiplier or the
    systolic simulator); ``None`` uses the in-process exact multiplier.
    """
    y = scale_step(a, plan)
    q_col = np.array([m.q for m in plan.Q], dtype=np.int64)[:, None]
    if executor is None:
        from .modmat import matmul_mod

        return matmul_mod(plan.Phat_mod_Q, y, q_col)
    from .systolic import ModulusAssignment

    assignment = ModulusAssignment.per_row(plan.Q)
    return executor.matmul(plan.Phat_mod_Q, y, assignment)


def crt_reconstruct(a, plan: BaseConvPlan) -> list[int]:
    """Exact CRT value of each coefficient column, in ``[0, Pstar)``.

    Test support for the approximation property: the converted output must
    equal ``(v + e * Pstar) mod q_i`` with one ``0 <= e < alpha`` shared by
    all target moduli of a coefficient.
    """
    arr = _check_input(a, plan)
    vals = []
    for n in range(arr.shape[1]):
        v = 0
        for j, m in enumerate(plan.P):
            v += (int(arr[j][n]) * mod_inv(plan.Phat[j] % m.q, m) % m.q) * plan.Phat[j]
        vals.append(v % plan.Pstar)
    return vals
