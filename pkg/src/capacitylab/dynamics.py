"""Cyclic dynamics: the order-N shift, its Fourier eigenbasis, band-limited
interpolation to continuous time, generator extraction, the real-field
obstruction at N = 2 and discrete Bargmann holonomy.

Units: hbar = 1. An evolution family with period T has energies
E_k = 2*pi*k/T (k = 0..N-1) on the Fourier vectors f_k, so that one
discrete step takes time T/N.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionTooSmall, InvalidPermutation, InvalidParameters, OrthogonalLink
from .statecore import (
    TOL_ALG,
    Basis,
    PureState,
    Unitary,
    basis_state,
    kernel,
    make_state,
)


@dataclass(frozen=True)
class CyclicGenerator:
    dim: int
    matrix: Unitary

    def power(self, k: int) -> np.ndarray:
        return np.linalg.matrix_power(self.matrix.matrix, k)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.matrix.matrix)


@dataclass(frozen=True)
class EvolutionFamily:
    dim: int
    eigenvectors: Basis
    eigenphases: np.ndarray  # 2*pi*k/N per discrete step
    period: float

    @property
    def energies(self) -> np.ndarray:
        return self.eigenphases * self.dim / self.period


@dataclass(frozen=True)
class Hamiltonian:
    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if np.max(np.abs(m - m.conj().T)) > TOL_ALG:
            raise InvalidParameters("Hamiltonian must be Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def propagator(self, t: float) -> np.ndarray:
        """exp(-i H t) via the spectral decomposition."""
        w, v = np.linalg.eigh(self.matrix)
        return (v * np.exp(-1j * w * t)) @ v.conj().T


def _omega(n: int) -> complex:
    return np.exp(2j * np.pi / n)


def shift_matrix(n: int) -> np.ndarray:
    """P e_k = e_{k+1 mod n}."""
    return np.roll(np.eye(n, dtype=complex), 1, axis=0)


def cyclic_generator(n: int) -> CyclicGenerator:
    if n < 2:
        raise DimensionTooSmall("cyclic generator needs N >= 2")
    return CyclicGenerator(n, Unitary(shift_matrix(n)))


def fourier_matrix(n: int) -> np.ndarray:
    """Columns f_k = N^{-1/2} sum_j omega^{jk} e_j."""
    j = np.arange(n)
    return _omega(n) ** np.outer(j, j) / np.sqrt(n)


def fourier_eigenbasis(n: int) -> Basis:
    """Eigenbasis of the shift; P f_k = omega^{-k} f_k."""
    if n < 2:
        raise DimensionTooSmall("Fourier eigenbasis needs N >= 2")
    return Basis.from_columns(fourier_matrix(n))


def order_deviations(gen: CyclicGenerator) -> list[float]:
    """max |P^k - I| for k = 1..N; only the last should vanish."""
    n = gen.dim
    eye = np.eye(n)
    out = []
    pk = eye.astype(complex)
    for _ in range(n):
        pk = pk @ gen.matrix.matrix
        out.append(float(np.max(np.abs(pk - eye))))
    return out


def has_nonreal_eigenvalue(n: int, threshold: float = 0.1) -> bool:
    return bool(np.any(np.abs(cyclic_generator(n).eigenvalues().imag) > threshold))


# ---------------------------------------------------------------------------
# Permutations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitEigenvector:
    orbit: tuple[int, ...]
    eigenvalue: complex
    vector: PureState
    kernel_row: np.ndarray  # K(b_i, f) for every basis index i


@dataclass(frozen=True)
class PermutationProfile:
    cycles: tuple[tuple[int, ...], ...]
    eigenvectors: tuple[OrbitEigenvector, ...]
    uniform: bool
    orbit_values: dict = field(default_factory=dict)  # cycle length -> in-orbit K


def permutation_cycles(sigma) -> tuple[tuple[int, ...], ...]:
    sigma = list(sigma)
    n = len(sigma)
    if sorted(sigma) != list(range(n)):
        raise InvalidPermutation(f"{sigma} is not a permutation of 0..{n - 1}")
    seen, cycles = set(), []
    for start in range(n):
        if start in seen:
            continue
        cyc, i = [], start
        while i not in seen:
            seen.add(i)
            cyc.append(i)
            i = sigma[i]
        cycles.append(tuple(cyc))
    return tuple(cycles)


def permutation_matrix(sigma) -> np.ndarray:
    """Matrix sending e_i to e_sigma(i)."""
    n = len(sigma)
    m = np.zeros((n, n), dtype=complex)
    m[list(sigma), range(n)] = 1.0
    return m


def permutation_eigen_analysis(sigma, tol: float = TOL_ALG) -> PermutationProfile:
    """Kernel profile of the orbit-Fourier eigenvectors of a permutation.

    Each n-cycle (i_0 -> i_1 -> ...) contributes n eigenvectors
    f = n^{-1/2} sum_m omega_n^{-mk} e_{i_m}. The profile is uniform, i.e.
    K(b_i, f) is the same for every i and every f, exactly when sigma is a
    single N-cycle.
    """
    cycles = permutation_cycles(sigma)
    n = len(sigma)
    pm = permutation_matrix(sigma)
    eig = []
    for cyc in cycles:
        length = len(cyc)
        w = np.exp(2j * np.pi / length)
        for k in range(length):
            v = np.zeros(n, dtype=complex)
            v[list(cyc)] = w ** (-k * np.arange(length)) / np.sqrt(length)
            lam = w**k
            if np.max(np.abs(pm @ v - lam * v)) > 1e3 * tol:
                raise AssertionError("orbit vector is not an eigenvector")  # pragma: no cover
            f = make_state(v)
            row = np.array([kernel(basis_state(n, i), f) for i in range(n)])
            eig.append(OrbitEigenvector(tuple(cyc), complex(lam), f, row))
    allk = np.concatenate([e.kernel_row for e in eig])
    uniform = bool(np.max(allk) - np.min(allk) <= tol)
    orbit_values = {len(c): 1.0 - 1.0 / len(c) for c in cycles}
    return PermutationProfile(cycles, tuple(eig), uniform, orbit_values)


def single_cycle(sigma) -> bool:
    return len(permutation_cycles(sigma)) == 1


def uniformity_dichotomy(n: int) -> tuple[int, int]:
    """Exhaustive check over S_n: returns (permutations checked, mismatches)
    where a mismatch is a permutation whose uniformity flag disagrees with
    being a single n-cycle."""
    bad = 0
    count = 0
    for sigma in itertools.permutations(range(n)):
        count += 1
        if permutation_eigen_analysis(sigma).uniform != single_cycle(sigma):
            bad += 1
    return count, bad


# ---------------------------------------------------------------------------
# Continuous time
# ---------------------------------------------------------------------------


def interpolate_evolution(gen: CyclicGenerator, period: float | None = None) -> EvolutionFamily:
    """Band-limited one-parameter family through the powers of ``gen``."""
    n = gen.dim
    period = float(n if period is None else period)
    if period <= 0:
        raise InvalidParameters("period must be positive")
    return EvolutionFamily(n, fourier_eigenbasis(n), 2 * np.pi * np.arange(n) / n, period)


def evaluate(family: EvolutionFamily, t: float) -> Unitary:
    v = family.eigenvectors.matrix
    phases = np.exp(-1j * family.energies * t)
    return Unitary((v * phases) @ v.conj().T)


def hamiltonian_from_cycle(family: EvolutionFamily) -> Hamiltonian:
    v = family.eigenvectors.matrix
    h = (v * family.energies) @ v.conj().T
    return Hamiltonian(family.dim, (h + h.conj().T) / 2)


def group_law_deviation(family: EvolutionFamily, t: float, s: float) -> float:
    lhs = evaluate(family, t).matrix @ evaluate(family, s).matrix
    return float(np.max(np.abs(lhs - evaluate(family, t + s).matrix)))


# ---------------------------------------------------------------------------
# N = 2 obstruction
# ---------------------------------------------------------------------------

SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])


@dataclass(frozen=True)
class ObstructionScan:
    resolution: int
    candidates: int
    clusters: tuple[tuple[float, float], ...]
    cluster_sizes: tuple[int, ...]

    @property
    def n_clusters(self) -> int:
        return len(self.clusters)

    def matrices(self) -> list[np.ndarray]:
        return [np.array([[a, b], [b, a]]) for a, b in self.clusters]


def n2_obstruction_scan(resolution: int = 100) -> ObstructionScan:
    """Scan real matrices ((a, b), (b, a)) on a (resolution+1)^2 grid over
    [-1, 1]^2 for orthogonality (a^2 + b^2 = 1, ab = 0); merge hits closer
    than 2/resolution."""
    if resolution < 100:
        raise InvalidParameters("resolution must be at least 100")
    g = np.linspace(-1.0, 1.0, resolution + 1)
    a, b = np.meshgrid(g, g, indexing="ij")
    tol = 0.5 * (2.0 / resolution)
    hit = (np.abs(a**2 + b**2 - 1) <= tol) & (np.abs(a * b) <= tol)
    pts = np.column_stack([a[hit], b[hit]])
    clusters: list[list[np.ndarray]] = []
    radius = 2.0 / resolution
    for p in pts:
        for c in clusters:
            if min(np.linalg.norm(p - q) for q in c) <= radius + 1e-15:
                c.append(p)
                break
        else:
            clusters.append([p])
    centers = tuple(tuple(float(x) for x in np.mean(c, axis=0)) for c in clusters)
    return ObstructionScan(resolution, len(pts), centers, tuple(len(c) for c in clusters))


@dataclass(frozen=True)
class ComplexFamilyCheck:
    thetas: np.ndarray
    max_unitarity_dev: float
    max_commutator: float
    max_step: float  # largest jump between neighbouring family members
    nontrivial: int  # members that are not +-I or +-S up to a global phase


def complex_swap_family(samples: int = 64) -> ComplexFamilyCheck:
    """U(theta) = exp(i theta S) = cos(theta) I + i sin(theta) S."""
    thetas = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    eye = np.eye(2)
    unit, comm, nontriv = 0.0, 0.0, 0
    mats = []
    for th in thetas:
        u = np.cos(th) * eye + 1j * np.sin(th) * SWAP
        mats.append(u)
        unit = max(unit, float(np.max(np.abs(u.conj().T @ u - eye))))
        comm = max(comm, float(np.max(np.abs(u @ SWAP - SWAP @ u))))
        # up to global phase, +-I and +-S are the only real orthogonal solutions
        trivial = any(
            abs(abs(np.vdot(m.ravel(), u.ravel())) / 2 - 1) < 1e-9 for m in (eye, SWAP)
        )
        nontriv += not trivial
    step = max(float(np.max(np.abs(mats[i + 1] - mats[i]))) for i in range(len(mats) - 1))
    return ComplexFamilyCheck(thetas, unit, comm, step, nontriv)


# ---------------------------------------------------------------------------
# Holonomy
# ---------------------------------------------------------------------------


def bargmann_holonomy(loop) -> float:
    """arg prod <psi_i|psi_{i+1}> around a closed loop, in (-pi, pi]."""
    loop = list(loop)
    if len(loop) < 2:
        raise InvalidParameters("loop needs at least two states")
    if kernel(loop[0], loop[-1]) > TOL_ALG:
        raise InvalidParameters("loop is not closed")
    prod = 1.0 + 0.0j
    for x, y in zip(loop[:-1], loop[1:]):
        ov = x.inner(y)
        if abs(ov) <= TOL_ALG:
            raise OrthogonalLink("consecutive states are orthogonal")
        prod *= ov
    # the closing link <last|first> restores gauge invariance when last != first as vectors
    prod *= loop[-1].inner(loop[0]) / abs(loop[-1].inner(loop[0]))
    phase = float(np.angle(prod))
    return np.pi if phase <= -np.pi else phase
