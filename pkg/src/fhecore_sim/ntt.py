"""Number theoretic transforms: direct oracles and the 4-step matrix form.

Conventions
-----------
Cyclic mode computes ``ahat[k] = sum_j a[j] * omega^(jk) mod q`` for a
primitive N-th root ``omega``.  Negacyclic mode (the ring ``x^N + 1``)
computes ``ahat[k] = sum_j a[j] * psi^(j*(2k+1))`` for a primitive 2N-th root
``psi`` with ``psi^2 = omega`` -- the usual merged-twiddle form, so no
separate pre/post scaling pass is needed on the fast path.

The 4-step decomposition splits input index ``j = j1*N2 + j2`` and output
index ``k = k1 + k2*N1`` and evaluates

    Ahat = ((Y x W1)^T o W2) x W3   (mod q),   Y[j2][j1] = a[j1*N2 + j2]

where ``o`` is the element-wise product and ``Ahat[k1][k2] = ahat[k1+k2*N1]``.
The stage matrices are

    cyclic:      W1[j1][k1] = w_{N1}^(j1*k1)          (N1 x N1)
                 W2[k1][j2] = w_N^(k1*j2)             (N1 x N2)
                 W3[j2][k2] = w_{N2}^(j2*k2)          (N2 x N2)
    negacyclic:  W1[j1][k1] = psi_{2N1}^(2*j1*k1+j1)  with psi_{2N1} = psi^N2
                 W2[k1][j2] = psi_{2N}^(2*k1*j2+j2)
                 W3[j2][k2] = w_{N2}^(j2*k2)          with w_{N2} = psi^(2*N1)

This is the one assignment of the published three-matrix pipeline whose
shapes type-check for every N1 x N2 factorization and whose output comes out
in natural order; it is validated against the direct transform at plan-build
time.  The inverse runs the mirrored pipeline with inverted twiddle bases and
the 1/N factor merged into its last stage matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .modarith import Modulus, mod_inv, mod_mul, mod_pow, find_root_of_unity
from .modmat import matmul_mod

_DIRECT_BATCH = 256
_BUILD_CHECK_LIMIT = 4096  # full direct-oracle validation above this is O(N^2)-infeasible

MODES = ("cyclic", "negacyclic")


def _check_root(omega: int, n: int, m: Modulus) -> None:
    if n < 1 or pow(omega, n, m.q) != 1 or (n > 1 and pow(omega, n // 2, m.q) == 1):
        raise ValueError(f"invalid root: {omega} does not have order {n} mod {m.q}")


def pow_table(base: int, length: int, m: Modulus) -> np.ndarray:
    """[base^0, base^1, ..., base^(length-1)] mod q as an int64 array."""
    out = np.empty(length, dtype=np.int64)
    acc = 1
    for i in range(length):
        out[i] = acc
        acc = mod_mul(acc, base, m)
    return out


def ntt_direct(a, m: Modulus, omega: int) -> np.ndarray:
    """Ground-truth forward transform by direct O(N^2) summation of the
    defining sum; every faster path is checked against this."""
    vec = np.asarray(a, dtype=np.int64)
    n = vec.shape[0]
    _check_root(omega, n, m)
    table = pow_table(omega, n, m)
    idx = np.arange(n, dtype=np.int64)
    out = np.empty(n, dtype=np.int64)
    for k0 in range(0, n, _DIRECT_BATCH):
        ks = np.arange(k0, min(k0 + _DIRECT_BATCH, n), dtype=np.int64)
        rows = table[(ks[:, None] * idx[None, :]) % n]
        out[k0 : k0 + len(ks)] = ((vec[None, :] * rows) % m.q).sum(axis=1) % m.q
    return out


def intt_direct(ahat, m: Modulus, omega: int) -> np.ndarray:
    """Inverse of :func:`ntt_direct`: direct summation with omega^-1 followed
    by the 1/N scale."""
    vec = np.asarray(ahat, dtype=np.int64)
    n = vec.shape[0]
    _check_root(omega, n, m)
    raw = ntt_direct(vec, m, mod_inv(omega, m))
    return (raw * mod_inv(n % m.q, m)) % m.q


def negacyclic_ntt_ref(a, m: Modulus, psi: int) -> np.ndarray:
    """Reference negacyclic forward transform: psi-prescale then cyclic NTT."""
    vec = np.asarray(a, dtype=np.int64)
    n = vec.shape[0]
    _check_root(psi, 2 * n, m)
    scaled = (vec * pow_table(psi, n, m)) % m.q
    return ntt_direct(scaled, m, mod_mul(psi, psi, m))


def negacyclic_intt_ref(ahat, m: Modulus, psi: int) -> np.ndarray:
    """Reference negacyclic inverse: cyclic inverse then psi^-1 post-scale."""
    vec = np.asarray(ahat, dtype=np.int64)
    n = vec.shape[0]
    _check_root(psi, 2 * n, m)
    raw = intt_direct(vec, m, mod_mul(psi, psi, m))
    return (raw * pow_table(mod_inv(psi, m), n, m)) % m.q


def negacyclic_convolve_ref(a, b, m: Modulus) -> list[int]:
    """Schoolbook product in Z_q[x]/(x^N + 1): wrapped terms are negated."""
    av = [int(x) for x in a]
    bv = [int(x) for x in b]
    if len(av) != len(bv):
        raise ValueError(f"length mismatch: {len(av)} vs {len(bv)}")
    n, q = len(av), m.q
    out = [0] * n
    for i, ai in enumerate(av):
        if ai == 0:
            continue
        for j, bj in enumerate(bv):
            k = i + j
            term = ai * bj
            if k < n:
                out[k] = (out[k] + term) % q
            else:
                out[k - n] = (out[k - n] - term) % q
    return out


@dataclass(eq=False)
class NttPlan:
    """Precomputed stage matrices for one (N, N1, N2, q, mode) combination.

    Rebuilding a plan from the same parameters reproduces identical matrices;
    plans are immutable after construction and freely shareable.
    """

    N: int
    N1: int
    N2: int
    m: Modulus
    mode: str
    omega_N: int
    psi: int | None
    W1: np.ndarray
    W2: np.ndarray
    W3: np.ndarray
    W1i: np.ndarray = field(repr=False)
    W2i: np.ndarray = field(repr=False)
    W3i: np.ndarray = field(repr=False)

    def reference_forward(self, a) -> np.ndarray:
        if self.mode == "cyclic":
            return ntt_direct(a, self.m, self.omega_N)
        return negacyclic_ntt_ref(a, self.m, self.psi)


def _outer_mod(rows: np.ndarray, cols: np.ndarray, period: int) -> np.ndarray:
    return (rows[:, None] * cols[None, :]) % period


@lru_cache(maxsize=64)
def _build_plan_cached(n: int, n1: int, n2: int, m: Modulus, mode: str) -> NttPlan:
    q = m.q
    j1 = np.arange(n1, dtype=np.int64)
    k1 = np.arange(n1, dtype=np.int64)
    j2 = np.arange(n2, dtype=np.int64)
    k2 = np.arange(n2, dtype=np.int64)
    n_inv = mod_inv(n % q, m)

    if mode == "cyclic":
        omega = find_root_of_unity(n, m)
        psi = None
        t_n = pow_table(omega, n, m)
        t_n1 = pow_table(mod_pow(omega, n2, m), n1, m)
        t_n2 = pow_table(mod_pow(omega, n1, m), n2, m)
        w1 = t_n1[_outer_mod(j1, k1, n1)]
        w2 = t_n[_outer_mod(k1, j2, n)]
        w3 = t_n2[_outer_mod(j2, k2, n2)]
        omega_inv = mod_inv(omega, m)
        ti_n = pow_table(omega_inv, n, m)
        ti_n1 = pow_table(mod_pow(omega_inv, n2, m), n1, m)
        ti_n2 = pow_table(mod_pow(omega_inv, n1, m), n2, m)
        w3i = ti_n2[_outer_mod(k2, j2, n2)]
        w2i = ti_n[_outer_mod(k1, j2, n)]
        w1i = (ti_n1[_outer_mod(k1, j1, n1)] * n_inv) % q
    else:
        psi = find_root_of_unity(2 * n, m)
        omega = mod_mul(psi, psi, m)
        t_psi = pow_table(psi, 2 * n, m)
        t_psi1 = pow_table(mod_pow(psi, n2, m), 2 * n1, m)  # psi^N2: order 2*N1
        t_n2 = pow_table(mod_pow(psi, 2 * n1, m), n2, m)  # psi^(2*N1): order N2
        w1 = t_psi1[_outer_mod(j1, 2 * k1 + 1, 2 * n1)]
        w2 = t_psi[_outer_mod(2 * k1 + 1, j2, 2 * n)]
        w3 = t_n2[_outer_mod(j2, k2, n2)]
        psi_inv = mod_inv(psi, m)
        ti_psi = pow_table(psi_inv, 2 * n, m)
        ti_psi1 = pow_table(mod_pow(psi_inv, n2, m), 2 * n1, m)
        ti_n2 = pow_table(mod_pow(psi_inv, 2 * n1, m), n2, m)
        w3i = ti_n2[_outer_mod(k2, j2, n2)]
        w2i = ti_psi[_outer_mod(2 * k1 + 1, j2, 2 * n)]
        w1i = (ti_psi1[_outer_mod(2 * k1 + 1, j1, 2 * n1)] * n_inv) % q

    plan = NttPlan(
        N=n, N1=n1, N2=n2, m=m, mode=mode, omega_N=omega, psi=psi,
        W1=w1, W2=w2, W3=w3, W1i=w1i, W2i=w2i, W3i=w3i,
    )
    _validate_plan(plan)
    return plan


def build_ntt_plan(n: int, n1: int, n2: int, m: Modulus, mode: str = "negacyclic") -> NttPlan:
    """Build (or fetch from cache) a validated 4-step plan.

    Requires ``N = N1*N2`` with N a power of two, and q = 1 mod N (cyclic)
    or q = 1 mod 2N (negacyclic) so the needed root of unity exists.
    """
    if mode not in MODES:
        raise ValueError(f"unknown transform mode {mode!r}")
    if n < 2 or (n & (n - 1)) != 0:
        raise ValueError(f"ring dimension {n} is not a power of two >= 2")
    if n1 < 1 or n2 < 1 or n1 * n2 != n:
        raise ValueError(f"dimensions do not factorize: {n1} * {n2} != {n}")
    order = 2 * n if mode == "negacyclic" else n
    if (m.q - 1) % order != 0:
        raise ValueError(
            f"modulus not NTT-friendly: {m.q} != 1 mod {order} ({mode} at N={n})"
        )
    return _build_plan_cached(n, n1, n2, m, mode)


def _validate_plan(plan: NttPlan) -> None:
    seed = ((plan.N * 1000003 + plan.N1) * 1000003 + plan.N2) * 1000003 + plan.m.q
    rng = np.random.Generator(np.random.PCG64(seed))
    vec = rng.integers(0, plan.m.q, size=plan.N, dtype=np.int64)
    fwd = ntt_4step(vec, plan)
    if plan.N <= _BUILD_CHECK_LIMIT:
        expect = plan.reference_forward(vec)
        if not np.array_equal(fwd, expect):
            raise AssertionError(
                f"plan self-check failed against direct transform "
                f"(N={plan.N}, N1={plan.N1}, N2={plan.N2}, q={plan.m.q}, {plan.mode})"
            )
    else:
        # Direct oracle is quadratic; use O(N)-checkable vectors instead.
        for pos in (0, 1):
            delta = np.zeros(plan.N, dtype=np.int64)
            delta[pos] = 1
            got = ntt_4step(delta, plan)
            if plan.mode == "cyclic":
                expect = pow_table(plan.omega_N, plan.N, plan.m) if pos else np.ones(plan.N, dtype=np.int64)
            else:
                t = pow_table(plan.psi, 2 * plan.N, plan.m)
                ks = np.arange(plan.N, dtype=np.int64)
                expect = t[(pos * (2 * ks + 1)) % (2 * plan.N)]
            if not np.array_equal(got, expect):
                raise AssertionError(
                    f"plan self-check failed on delta[{pos}] "
                    f"(N={plan.N}, q={plan.m.q}, {plan.mode})"
                )
    if not np.array_equal(intt_4step(fwd, plan), vec):
        raise AssertionError(
            f"plan round-trip self-check failed (N={plan.N}, q={plan.m.q}, {plan.mode})"
        )


def _stage_matmul(a: np.ndarray, b: np.ndarray, plan: NttPlan, backend) -> np.ndarray:
    if backend is None:
        return matmul_mod(a, b, plan.m.q)
    return backend.matmul(a, b, plan.m)


def ntt_4step(a, plan: NttPlan, backend=None) -> np.ndarray:
    """Forward transform through the three-matrix pipeline.

    The two matrix products run on ``backend`` (``None`` means the in-process
    exact multiplier; pass a systolic backend to execute them on the
    simulated array).  The element-wise W2 stage always runs on the scalar
    path, mirroring the hardware split of labor.
    """
    vec = np.asarray(a, dtype=np.int64)
    if vec.shape != (plan.N,):
        raise ValueError(f"length mismatch: expected {plan.N}, got {vec.shape}")
    y = vec.reshape(plan.N1, plan.N2).T
    s1 = _stage_matmul(y, plan.W1, plan, backend)
    s2 = (s1.T * plan.W2) % plan.m.q
    ahat = _stage_matmul(s2, plan.W3, plan, backend)
    return ahat.T.reshape(-1)


def intt_4step(ahat, plan: NttPlan, backend=None) -> np.ndarray:
    """Inverse transform; bit-exact inverse of :func:`ntt_4step`."""
    vec = np.asarray(ahat, dtype=np.int64)
    if vec.shape != (plan.N,):
        raise ValueError(f"length mismatch: expected {plan.N}, got {vec.shape}")
    z = vec.reshape(plan.N2, plan.N1).T
    u1 = _stage_matmul(z, plan.W3i, plan, backend)
    u2 = (u1 * plan.W2i) % plan.m.q
    u3 = _stage_matmul(u2.T, plan.W1i, plan, backend)
    return u3.T.reshape(-1)
