"""Mutually unbiased bases for N = 2 and odd primes N."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DimensionMismatch, InvalidParameters, UnsupportedDimension
from .statecore import Basis, Unitary

MAX_PRIME = 61


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n**0.5) + 1))


@dataclass(frozen=True)
class MubFamily:
    dim: int
    bases: tuple[Basis, ...]

    def __post_init__(self):
        bases = tuple(self.bases)
        if any(b.dim != self.dim for b in bases):
            raise DimensionMismatch("all bases in a family must share the family dimension")
        object.__setattr__(self, "bases", bases)

    def __len__(self):
        return len(self.bases)

    def __getitem__(self, i) -> Basis:
        return self.bases[i]

    def transformed(self, u: Unitary) -> "MubFamily":
        return MubFamily(self.dim, tuple(Basis.from_columns(u.matrix @ b.matrix) for b in self.bases))


def _quadratic_basis(n: int, a: int, omega: complex) -> np.ndarray:
    # column m has components omega^(a j^2 + m j) / sqrt(n); exponents reduced mod n
    j = np.arange(n)
    m = np.arange(n)
    expo = (a * j[:, None] ** 2 + m[None, :] * j[:, None]) % n
    return omega**expo / np.sqrt(n)


def mub_family(n: int) -> MubFamily:
    """Complete set of N + 1 MUBs.

    Odd prime N: computational basis plus the N quadratic-phase bases
    omega^(a j^2 + m j)/sqrt(N), a = 0..N-1. N = 2: the Z, X and Y
    eigenbases.
    """
    n = int(n)
    if n == 2:
        s = 1 / np.sqrt(2)
        cols = [
            np.eye(2),
            np.array([[s, s], [s, -s]]),
            np.array([[s, s], [1j * s, -1j * s]]),
        ]
        return MubFamily(2, tuple(Basis.from_columns(c) for c in cols))
    if n % 2 == 0 or not is_prime(n) or n > MAX_PRIME:
        raise UnsupportedDimension(f"MUB construction supports N = 2 and odd primes <= {MAX_PRIME}, got {n}")
    omega = np.exp(2j * np.pi / n)
    bases = [Basis.computational(n)]
    bases += [Basis.from_columns(_quadratic_basis(n, a, omega)) for a in range(n)]
    return MubFamily(n, tuple(bases))


def pair_deviation(b1: Basis, b2: Basis) -> float:
    if b1.dim != b2.dim:
        raise DimensionMismatch("bases have different dimensions")
    overlaps = np.abs(b1.matrix.conj().T @ b2.matrix) ** 2
    return float(np.max(np.abs(overlaps - 1.0 / b1.dim)))


def verify_unbiased(family: MubFamily) -> float:
    """Worst |<b_i|b'_j>|^2 - 1/N| over all cross-basis pairs."""
    if len(family) < 2:
        raise InvalidParameters("need at least two bases")
    return max(pair_deviation(b1, b2) for b1, b2 in combinations(family.bases, 2))
