"""State substrate: pure states, bases, unitaries, density operators, Haar
sampling and the distinguishability kernel.

Every object here is immutable after construction. Coefficient arrays are
stored read-only so that states can be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DimensionTooLarge,
    DimensionZero,
    NotBasis,
    NotDensityOperator,
    NotUnitary,
    ZeroVector,
)

TOL_ALG = 1e-12
TOL_ITER = 1e-8
MAX_DIM = 64


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def _check_dim(n: int) -> int:
    n = int(n)
    if n < 1:
        raise DimensionZero("dimension must be at least 1")
    if n > MAX_DIM:
        raise DimensionTooLarge(f"dimension {n} exceeds supported maximum {MAX_DIM}")
    return n


def canonical_phase(c: np.ndarray, tol: float = TOL_ALG) -> np.ndarray:
    """Rotate ``c`` so that its first significant amplitude is real and >= 0."""
    c = np.asarray(c, dtype=complex)
    idx = np.flatnonzero(np.abs(c) > tol)
    if idx.size == 0:
        return c.copy()
    lead = c[idx[0]]
    out = c * (abs(lead) / lead)
    out[idx[0]] = abs(lead)
    return out


# ---------------------------------------------------------------------------
# Random source
# ---------------------------------------------------------------------------


class RandomSource:
    """Seeded, reproducible generator.

    Child streams for parallel sweeps are derived with :meth:`spawn`:
    child ``i`` of a source with seed ``s`` uses the numpy ``SeedSequence``
    with entropy ``s`` and spawn key ``(i,)``. The same (seed, index) pair
    always yields the same stream regardless of scheduling.
    """

    def __init__(self, seed: int = 0, _key: tuple[int, ...] = ()):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = seed
        self._key = tuple(_key)
        self._gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=self._key)))

    def spawn(self, index: int) -> "RandomSource":
        return RandomSource(self.seed, self._key + (int(index),))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def normal(self, size=None):
        return self._gen.standard_normal(size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._gen.uniform(low, high, size)

    def complex_normal(self, size) -> np.ndarray:
        return (self._gen.standard_normal(size) + 1j * self._gen.standard_normal(size)) / np.sqrt(2)

    def __repr__(self):
        return f"RandomSource(seed={self.seed}, key={self._key})"


def as_rng(rng: RandomSource | int | None) -> RandomSource:
    if isinstance(rng, RandomSource):
        return rng
    return RandomSource(0 if rng is None else rng)


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector with canonical global phase."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen(self.coeffs))

    @property
    def dim(self) -> int:
        return self.coeffs.shape[0]

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.coeffs) ** 2

    def projector(self) -> np.ndarray:
        return np.outer(self.coeffs, self.coeffs.conj())

    def inner(self, other: "PureState") -> complex:
        """<self|other>."""
        _same_dim(self.dim, other.dim)
        return complex(np.vdot(self.coeffs, other.coeffs))

    def allclose(self, other: "PureState", tol: float = TOL_ALG) -> bool:
        return self.dim == other.dim and bool(np.max(np.abs(self.coeffs - other.coeffs)) <= tol)

    def __repr__(self):
        return f"PureState({np.array2string(self.coeffs, precision=6)})"


@dataclass(frozen=True, eq=False)
class Basis:
    """Ordered orthonormal basis; ``matrix`` holds the vectors as columns."""

    vectors: tuple[PureState, ...]

    def __post_init__(self):
        vecs = tuple(self.vectors)
        object.__setattr__(self, "vectors", vecs)
        if not vecs:
            raise DimensionZero("a basis needs at least one vector")
        n = vecs[0].dim
        if len(vecs) != n or any(v.dim != n for v in vecs):
            raise NotBasis(f"a basis of dimension {n} needs exactly {n} vectors of that dimension")
        m = np.column_stack([v.coeffs for v in vecs])
        dev = np.max(np.abs(m.conj().T @ m - np.eye(n)))
        if dev > 1e3 * TOL_ALG:
            raise NotBasis(f"vectors are not orthonormal (max deviation {dev:.3e})")
        object.__setattr__(self, "_matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def __getitem__(self, k) -> PureState:
        return self.vectors[k]

    @classmethod
    def from_columns(cls, m: np.ndarray) -> "Basis":
        m = np.asarray(m, dtype=complex)
        return cls(tuple(make_state(m[:, k]) for k in range(m.shape[1])))

    @classmethod
    def computational(cls, n: int) -> "Basis":
        return cls.from_columns(np.eye(_check_dim(n)))


@dataclass(frozen=True, eq=False)
class Unitary:
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise NotUnitary("unitary must be a non-empty square matrix")
        dev = unitarity_deviation(m)
        if dev > 1e3 * TOL_ALG:
            raise NotUnitary(f"U^dagger U deviates from I by {dev:.3e}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, psi: PureState) -> PureState:
        _same_dim(self.dim, psi.dim)
        return make_state(self.matrix @ psi.coeffs)

    def __matmul__(self, other: "Unitary") -> "Unitary":
        return Unitary(self.matrix @ other.matrix)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise NotDensityOperator("density operator must be a non-empty square matrix")
        if np.max(np.abs(m - m.conj().T)) > TOL_ALG:
            raise NotDensityOperator("matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > TOL_ALG:
            raise NotDensityOperator("trace differs from 1")
        if np.min(np.linalg.eigvalsh(m)) < -TOL_ALG:
            raise NotDensityOperator("matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def pure(cls, psi: PureState) -> "DensityOperator":
        return cls(psi.projector())

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityOperator":
        n = _check_dim(n)
        return cls(np.eye(n) / n)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def _same_dim(a: int, b: int) -> None:
    if a != b:
        raise DimensionMismatch(f"dimension mismatch: {a} vs {b}")


def unitarity_deviation(m: np.ndarray) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def make_state(coeffs: Iterable[complex] | np.ndarray) -> PureState:
    """Normalize and phase-canonicalize an amplitude vector."""
    c = np.asarray(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs, dtype=complex).ravel()
    if c.size == 0:
        raise DimensionZero("state needs at least one amplitude")
    _check_dim(c.size)
    if np.all(np.abs(c) <= TOL_ALG):
        raise ZeroVector("all amplitudes vanish")
    c = c / np.linalg.norm(c)
    return PureState(canonical_phase(c))


def basis_state(n: int, k: int) -> PureState:
    e = np.zeros(_check_dim(n), dtype=complex)
    e[k] = 1.0
    return PureState(e)


def kernel(x: PureState, y: PureState) -> float:
    """Distinguishability 1 - |<x|y>|^2.

    Evaluated as the squared norm of the component of ``y`` orthogonal to
    ``x``; this equals 1 - |<x|y>|^2 for unit vectors but keeps relative
    accuracy when the kernel is tiny.
    """
    _same_dim(x.dim, y.dim)
    ov = np.vdot(x.coeffs, y.coeffs)
    resid = y.coeffs - ov * x.coeffs
    k = float(np.vdot(resid, resid).real)
    return min(max(k, 0.0), 1.0)


def kernel_matrix(states: Sequence[PureState]) -> np.ndarray:
    m = np.column_stack([s.coeffs for s in states])
    return 1.0 - np.abs(m.conj().T @ m) ** 2


def mixed_kernel(rho: DensityOperator, z: PureState) -> float:
    """1 - <z|rho|z>; reduces to :func:`kernel` for rank-one ``rho``."""
    if not isinstance(rho, DensityOperator):
        rho = DensityOperator(rho)
    _same_dim(rho.dim, z.dim)
    val = 1.0 - float(np.vdot(z.coeffs, rho.matrix @ z.coeffs).real)
    return min(max(val, 0.0), 1.0)


def affinities(psi: PureState, basis: Basis) -> np.ndarray:
    """Outcome probabilities p_k = 1 - K(psi, b_k)."""
    _same_dim(psi.dim, basis.dim)
    return np.abs(basis.matrix.conj().T @ psi.coeffs) ** 2


def haar_random_state(n: int, rng: RandomSource) -> PureState:
    n = _check_dim(n)
    rng = as_rng(rng)
    z = rng.complex_normal(n)
    while np.linalg.norm(z) <= TOL_ALG:  # pragma: no cover - measure zero
        z = rng.complex_normal(n)
    return make_state(z)


def haar_random_unitary_matrix(n: int, rng: RandomSource) -> np.ndarray:
    n = _check_dim(n)
    rng = as_rng(rng)
    z = rng.complex_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_random_unitary(n: int, rng: RandomSource) -> Unitary:
    """Haar unitary from QR of a Ginibre matrix with diagonal phase fix."""
    return Unitary(haar_random_unitary_matrix(n, rng))


def random_interior_state(n: int, rng: RandomSource, floor: float = 1e-4) -> PureState:
    """Haar state conditioned on every probability exceeding ``floor``."""
    while True:
        psi = haar_random_state(n, rng)
        if np.min(psi.probabilities) >= floor:
            return psi


def shannon_entropy(p: np.ndarray) -> float:
    """Entropy in bits; zero-probability outcomes contribute nothing."""
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))
