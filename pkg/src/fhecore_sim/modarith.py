"""Exact modular arithmetic over word-sized NTT-friendly primes.

Every value is a canonical residue in ``[0, q)``.  Reduction goes through a
Barrett pipeline: for a modulus ``q < 2^31`` we precompute
``mu = floor(2^62 / q)`` and reduce any ``x < 2^62`` with one wide multiply,
one shift, and at most one correction subtraction.  The ``2^62`` domain is
wide enough for the accumulate form ``R + a*b`` with ``R < q`` and
``a, b < 2^31``, which is what the processing elements of the systolic model
execute every cycle -- including the mixed-base case where the streamed
operand is a residue of a *different* (possibly larger) 31-bit prime.
"""

from __future__ import annotations

from dataclasses import dataclass

MAX_MODULUS_BITS = 31
BARRETT_SHIFT = 62
BARRETT_INPUT_BOUND = 1 << BARRETT_SHIFT

# Deterministic Miller-Rabin witness set, sufficient for all n < 3.3 * 10^24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test for n < 2^64."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True, slots=True)
class Modulus:
    """A 31-bit-or-smaller odd prime with its precomputed Barrett constant.

    ``mu`` is a deterministic function of ``q``; rebuilding the modulus from
    the same ``q`` always reproduces it.
    """

    q: int
    mu: int
    k: int  # bit length of q

    def __repr__(self) -> str:
        return f"Modulus({self.q})"


def make_modulus(q: int) -> Modulus:
    """Validate ``q`` and build a :class:`Modulus` with its Barrett constant.

    Rejects composite, even, and too-wide values with ``ValueError``.
    """
    if not isinstance(q, int):
        raise ValueError(f"unsupported modulus: {q!r} is not an integer")
    if q <= 2 or q % 2 == 0:
        raise ValueError(f"unsupported modulus: {q} (must be an odd prime > 2)")
    if q >= (1 << MAX_MODULUS_BITS):
        raise ValueError(
            f"unsupported modulus: {q} (must fit in {MAX_MODULUS_BITS} bits)"
        )
    if not is_prime(q):
        raise ValueError(f"unsupported modulus: {q} is composite")
    return Modulus(q=q, mu=BARRETT_INPUT_BOUND // q, k=q.bit_length())


def barrett_reduce(x: int, m: Modulus) -> int:
    """Reduce ``x`` modulo ``m.q`` without a divide by q.

    Contract domain: ``0 <= x < 2^62``.  With ``mu = floor(2^62/q)`` the
    quotient estimate ``(x*mu) >> 62`` is off by at most one, so a single
    conditional subtraction lands in ``[0, q)``.
    """
    if x < 0 or x >= BARRETT_INPUT_BOUND:
        raise ValueError(f"barrett_reduce input out of range: {x}")
    r = x - ((x * m.mu) >> BARRETT_SHIFT) * m.q
    if r >= m.q:
        r -= m.q
    return r


def mod_add(a: int, b: int, m: Modulus) -> int:
    """(a + b) mod q for canonical residues a, b."""
    return barrett_reduce(a + b, m)


def mod_sub(a: int, b: int, m: Modulus) -> int:
    """(a - b) mod q for canonical residues a, b."""
    return barrett_reduce(a - b + m.q, m)


def mod_mul(a: int, b: int, m: Modulus) -> int:
    """(a * b) mod q for canonical residues a, b."""
    return barrett_reduce(a * b, m)


def mod_pow(a: int, e: int, m: Modulus) -> int:
    """a^e mod q by square-and-multiply; e must be non-negative."""
    if e < 0:
        raise ValueError("negative exponent; use mod_inv first")
    result = 1
    base = a % m.q
    while e > 0:
        if e & 1:
            result = mod_mul(result, base, m)
        base = mod_mul(base, base, m)
        e >>= 1
    return result


def mod_inv(a: int, m: Modulus) -> int:
    """Multiplicative inverse of ``a`` modulo q via extended Euclid."""
    if a % m.q == 0:
        raise ValueError(f"no inverse: {a} mod {m.q}")
    old_r, r = a % m.q, m.q
    old_s, s = 1, 0
    while r != 0:
        quot = old_r // r
        old_r, r = r, old_r - quot * r
        old_s, s = s, old_s - quot * s
    if old_r != 1:
        raise ValueError(f"no inverse: gcd({a}, {m.q}) = {old_r}")
    return old_s % m.q


def find_root_of_unity(n: int, m: Modulus) -> int:
    """Smallest element of multiplicative order exactly ``n`` modulo q.

    ``n`` must be a power of two dividing q-1.  The scan from 2 upward is
    deterministic, so repeated calls with the same (n, q) agree.
    """
    if n <= 0 or (n & (n - 1)) != 0:
        raise ValueError(f"order {n} is not a power of two")
    if (m.q - 1) % n != 0:
        raise ValueError(
            f"modulus not NTT-friendly for this order: {n} does not divide {m.q - 1}"
        )
    if n == 1:
        return 1
    half = n // 2
    for cand in range(2, m.q):
        if pow(cand, n, m.q) == 1 and pow(cand, half, m.q) != 1:
            return cand
    raise ValueError(f"no element of order {n} modulo {m.q}")  # unreachable for prime q


def generate_ntt_primes(bits: int, count: int, ring_dim: int) -> list[Modulus]:
    """Smallest ``count`` primes of the given bit width with q = 1 mod 2N.

    Deterministic: candidates are scanned upward from ``2^(bits-1)``.  Such
    primes admit a primitive 2N-th root of unity, i.e. they support the
    negacyclic transform at ring dimension N (and a fortiori the cyclic one).
    """
    if not 3 <= bits <= MAX_MODULUS_BITS:
        raise ValueError(f"prime width {bits} out of range [3, {MAX_MODULUS_BITS}]")
    if ring_dim <= 0 or (ring_dim & (ring_dim - 1)) != 0:
        raise ValueError(f"ring dimension {ring_dim} is not a power of two")
    step = 2 * ring_dim
    lo, hi = 1 << (bits - 1), 1 << bits
    start = ((lo - 1) // step + 1) * step + 1
    found: list[Modulus] = []
    q = start
    while q < hi and len(found) < count:
        if is_prime(q):
            found.append(make_modulus(q))
        q += step
    if len(found) < count:
        raise ValueError(
            f"only {len(found)} of {count} NTT-friendly primes exist at "
            f"{bits} bits for ring dimension {ring_dim}"
        )
    return found
