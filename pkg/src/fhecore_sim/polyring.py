"""RNS polynomial container, element-wise kernels, and the automorphism map.

Element-wise modular arithmetic and the rotation automorphism are the kernels
that stay off the matrix unit: the former is slot-parallel scalar work, the
latter is address generation plus a load/store rearrangement.

The automorphism with rotation index r acts on slot indices through

    pi_r(x) = ([5^r * (2x + 1)]_{2N} - 1) / 2

which is a bijection on [0, N).  In the evaluation domain applying the map is
the pure gather ``out[x] = in[pi_r(x)]``; in the coefficient domain it is the
ring substitution x -> x^(5^r) over x^N + 1, i.e. a scatter
``out[(j * 5^r) mod N] = +/- in[j]`` whose sign flips when the product index
wraps past N.  The two views agree: transforming after the coefficient-domain
move equals gathering after the transform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .modarith import Modulus

DOMAIN_COEFF = "coefficient"
DOMAIN_EVAL = "evaluation"


@dataclass(eq=False)
class RnsPoly:
    """N-coefficient polynomial as a limbs x N residue matrix."""

    moduli: tuple[Modulus, ...]
    residues: np.ndarray
    domain: str = DOMAIN_COEFF

    def __post_init__(self):
        self.residues = np.asarray(self.residues, dtype=np.int64)
        if self.residues.ndim != 2 or self.residues.shape[0] != len(self.moduli):
            raise ValueError(
                f"residue matrix shape {self.residues.shape} does not match "
                f"{len(self.moduli)} limbs"
            )
        if self.domain not in (DOMAIN_COEFF, DOMAIN_EVAL):
            raise ValueError(f"unknown domain {self.domain!r}")
        for i, m in enumerate(self.moduli):
            row = self.residues[i]
            if (row < 0).any() or (row >= m.q).any():
                raise ValueError(f"limb {i} holds out-of-range residues for q={m.q}")

    @property
    def n(self) -> int:
        return self.residues.shape[1]

    @property
    def limbs(self) -> int:
        return len(self.moduli)

    def copy_with(self, residues: np.ndarray, domain: str | None = None) -> "RnsPoly":
        return RnsPoly(self.moduli, residues, domain or self.domain)

    @classmethod
    def random(cls, moduli, n: int, rng, domain: str = DOMAIN_COEFF) -> "RnsPoly":
        mods = tuple(moduli)
        rows = [rng.integers(0, m.q, size=n, dtype=np.int64) for m in mods]
        return cls(mods, np.stack(rows), domain)


def _check_compatible(a: RnsPoly, b: RnsPoly) -> None:
    if a.moduli != b.moduli:
        raise ValueError("limb moduli mismatch")
    if a.n != b.n:
        raise ValueError(f"ring dimension mismatch: {a.n} vs {b.n}")
    if a.domain != b.domain:
        raise ValueError(f"domain mismatch: {a.domain} vs {b.domain}")


def _q_column(p: RnsPoly) -> np.ndarray:
    return np.array([m.q for m in p.moduli], dtype=np.int64)[:, None]


def elementwise_mod_mul(a: RnsPoly, b: RnsPoly) -> RnsPoly:
    """Per-limb, per-slot modular product."""
    _check_compatible(a, b)
    return a.copy_with((a.residues * b.residues) % _q_column(a))


def elementwise_mod_add(a: RnsPoly, b: RnsPoly) -> RnsPoly:
    """Per-limb, per-slot modular sum."""
    _check_compatible(a, b)
    return a.copy_with((a.residues + b.residues) % _q_column(a))


def elementwise_mod_sub(a: RnsPoly, b: RnsPoly) -> RnsPoly:
    """Per-limb, per-slot modular difference."""
    _check_compatible(a, b)
    return a.copy_with((a.residues - b.residues) % _q_column(a))


@dataclass(eq=False)
class AutomorphismMap:
    """Index map of the rotation automorphism for one (N, r).

    ``perm[x] = pi_r(x)`` on slot indices; ``coeff_dest[j] = (j*t) mod N``
    and ``sign[j]`` describe the coefficient-domain scatter, where
    ``t = 5^r mod 2N``.
    """

    n: int
    r: int
    t: int
    perm: np.ndarray
    coeff_dest: np.ndarray
    sign: np.ndarray

    def is_bijection(self) -> bool:
        return len(np.unique(self.perm)) == self.n


def automorphism_map(r: int, n: int) -> AutomorphismMap:
    """Build the permutation and wrap signs for rotation index ``r``.

    ``r`` may be any integer; negative values use the inverse of 5 mod 2N.
    """
    if n < 1 or (n & (n - 1)) != 0:
        raise ValueError(f"ring dimension {n} is not a power of two")
    two_n = 2 * n
    t = pow(5, r, two_n)
    x = np.arange(n, dtype=np.int64)
    perm = ((t * (2 * x + 1)) % two_n - 1) // 2
    prod = (x * t) % two_n
    coeff_dest = prod % n
    sign = np.where(prod < n, 1, -1).astype(np.int64)
    return AutomorphismMap(n=n, r=r, t=t, perm=perm, coeff_dest=coeff_dest, sign=sign)


def apply_automorphism(p: RnsPoly, amap: AutomorphismMap, direction: str = "forward") -> RnsPoly:
    """Rearrange a polynomial under the automorphism.

    Evaluation domain: pure permutation (forward gathers through ``perm``).
    Coefficient domain: permutation with negacyclic sign flips on wrapped
    moves.  ``direction='inverse'`` applies the exact inverse rearrangement;
    the two directions undo each other in either domain.
    """
    if p.n != amap.n:
        raise ValueError(f"ring dimension mismatch: poly {p.n} vs map {amap.n}")
    if direction not in ("forward", "inverse"):
        raise ValueError(f"unknown direction {direction!r}")
    q_col = _q_column(p)
    if p.domain == DOMAIN_EVAL:
        if direction == "forward":
            out = p.residues[:, amap.perm]
        else:
            out = np.empty_like(p.residues)
            out[:, amap.perm] = p.residues
        return p.copy_with(out)
    signed = (p.residues * amap.sign) % q_col
    if direction == "forward":
        out = np.empty_like(p.residues)
        out[:, amap.coeff_dest] = signed
    else:
        gathered = p.residues[:, amap.coeff_dest]
        out = (gathered * amap.sign) % q_col
    return p.copy_with(out)
