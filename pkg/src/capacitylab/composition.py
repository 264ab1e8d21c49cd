"""Composite systems: tensor products, the kernel composition law, local
tomography over R vs C, CHSH, measurement as correlation, no-cloning and
entropic uncertainty.

Joint index convention: k = a * N_B + b (numpy ``kron`` order).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .dynamics import cyclic_generator
from .errors import DimensionMismatch, DimensionTooLarge, InvalidParameters, NotUnbiased, OutOfRange
from .mub import pair_deviation
from .statecore import (
    TOL_ALG,
    Basis,
    PureState,
    RandomSource,
    Unitary,
    affinities,
    as_rng,
    basis_state,
    haar_random_state,
    kernel,
    make_state,
    shannon_entropy,
)


@dataclass(frozen=True)
class CompositeState:
    dims: tuple[int, int]
    joint: PureState

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if dims[0] * dims[1] != self.joint.dim:
            raise DimensionMismatch(f"joint dimension {self.joint.dim} != {dims[0]}*{dims[1]}")
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.joint.dim

    def coefficient_matrix(self) -> np.ndarray:
        return self.joint.coeffs.reshape(self.dims)

    def schmidt_coefficients(self) -> np.ndarray:
        return np.linalg.svd(self.coefficient_matrix(), compute_uv=False)

    def schmidt_rank(self, tol: float = 1e-9) -> int:
        return int(np.sum(self.schmidt_coefficients() > tol))


def tensor_state(x: PureState, y: PureState) -> CompositeState:
    return CompositeState((x.dim, y.dim), make_state(np.kron(x.coeffs, y.coeffs)))


def bell_state() -> CompositeState:
    return CompositeState((2, 2), make_state([1, 0, 0, 1]))


def kernel_compose(ka: float, kb: float) -> float:
    """1 - (1 - kA)(1 - kB)."""
    for k in (ka, kb):
        if not 0.0 <= k <= 1.0:
            raise OutOfRange(f"kernel value {k} outside [0, 1]")
    # hi + lo (1 - hi): algebraically equal, exact at 0 and 1, symmetric
    hi, lo = (ka, kb) if ka >= kb else (kb, ka)
    return hi + lo * (1.0 - hi)


@dataclass(frozen=True)
class CompositionReport:
    samples: int
    max_symmetry_dev: float
    max_associativity_dev: float
    max_boundary_dev: float
    max_product_dev: float  # candidate vs joint-kernel oracle on product states
    candidate_max_product_dev: float  # the deliberately wrong f = max
    candidate_rejected: bool

    @property
    def passed(self) -> bool:
        worst = max(self.max_symmetry_dev, self.max_associativity_dev, self.max_boundary_dev, self.max_product_dev)
        return worst <= 1e-12 and self.candidate_rejected


def product_kernel_deviation(f, pairs_rng: RandomSource, samples: int, dims=(2, 3)) -> float:
    """max |K(x (x) u, y (x) v) - f(K(x,y), K(u,v))| over random quadruples."""
    na, nb = dims
    worst = 0.0
    for _ in range(samples):
        x, y = haar_random_state(na, pairs_rng), haar_random_state(na, pairs_rng)
        u, v = haar_random_state(nb, pairs_rng), haar_random_state(nb, pairs_rng)
        joint = kernel(tensor_state(x, u).joint, tensor_state(y, v).joint)
        worst = max(worst, abs(joint - f(kernel(x, y), kernel(u, v))))
    return worst


def composition_law_tests(samples: int, rng: RandomSource | int | None = None) -> CompositionReport:
    if samples < 100:
        raise InvalidParameters("need at least 100 samples")
    rng = as_rng(rng)
    t = rng.uniform(size=(samples, 3))
    f = np.vectorize(kernel_compose)
    sym = float(np.max(np.abs(f(t[:, 0], t[:, 1]) - f(t[:, 1], t[:, 0]))))
    assoc = float(np.max(np.abs(f(f(t[:, 0], t[:, 1]), t[:, 2]) - f(t[:, 0], f(t[:, 1], t[:, 2])))))
    y = t[:, 0]
    boundary = max(
        float(np.max(np.abs(f(0.0, y) - y))),
        float(np.max(np.abs(f(y, 0.0) - y))),
        float(np.max(np.abs(f(1.0, y) - 1.0))),
        float(np.max(np.abs(f(y, 1.0) - 1.0))),
    )
    prod_dev = product_kernel_deviation(kernel_compose, rng.spawn(0), samples)
    cand_dev = product_kernel_deviation(max, rng.spawn(0), samples)
    return CompositionReport(samples, sym, assoc, boundary, prod_dev, cand_dev, cand_dev > 1e-6)


# ---------------------------------------------------------------------------
# Local tomography
# ---------------------------------------------------------------------------


def hermitian_basis(n: int) -> list[np.ndarray]:
    """n^2 operators spanning the real space of n x n Hermitian matrices."""
    ops = []
    for j in range(n):
        for k in range(n):
            m = np.zeros((n, n), dtype=complex)
            if j == k:
                m[j, j] = 1
            elif j < k:
                m[j, k] = m[k, j] = 1
            else:
                m[j, k], m[k, j] = 1j, -1j
            ops.append(m)
    return ops


def symmetric_basis(n: int) -> list[np.ndarray]:
    """n(n+1)/2 operators spanning the real symmetric matrices."""
    ops = []
    for j in range(n):
        for k in range(j, n):
            m = np.zeros((n, n))
            m[j, k] = m[k, j] = 1
            ops.append(m)
    return ops


def _real_vec(m: np.ndarray) -> np.ndarray:
    return np.concatenate([m.real.ravel(), m.imag.ravel()])


def local_tomography_rank(na: int, nb: int, field: str = "complex") -> tuple[int, int]:
    """(rank of the span of local product operators, dimension of the joint
    observable space) as real vector spaces."""
    if not (2 <= na <= 4 and 2 <= nb <= 4):
        raise DimensionTooLarge("local tomography check supports 2 <= N_A, N_B <= 4")
    if field == "complex":
        ba, bb = hermitian_basis(na), hermitian_basis(nb)
        full = (na * nb) ** 2
    elif field == "real":
        ba, bb = symmetric_basis(na), symmetric_basis(nb)
        n = na * nb
        full = n * (n + 1) // 2
    else:
        raise InvalidParameters(f"field must be 'real' or 'complex', got {field!r}")
    rows = np.array([_real_vec(np.kron(a, b)) for a, b in product(ba, bb)])
    sv = np.linalg.svd(rows, compute_uv=False)
    return int(np.sum(sv > 1e-9)), full


# ---------------------------------------------------------------------------
# CHSH
# ---------------------------------------------------------------------------


def rotated_basis(theta: float) -> Basis:
    """Real equatorial basis (cos t, sin t), (-sin t, cos t)."""
    c, s = np.cos(theta), np.sin(theta)
    return Basis.from_columns(np.array([[c, -s], [s, c]]))


def correlator(state: CompositeState, a: float, b: float) -> float:
    """E(a, b) = sum over outcome pairs of (+-1)(+-1) times the joint affinity."""
    joint = Basis.from_columns(np.kron(rotated_basis(a).matrix, rotated_basis(b).matrix))
    p = affinities(state.joint, joint)
    return float(p @ np.array([1, -1, -1, 1]))


def chsh_value(state: CompositeState, angles) -> float:
    """E(a,b) + E(a,b') + E(a',b) - E(a',b') with angles = (a, a', b, b')."""
    if state.dims != (2, 2):
        raise DimensionMismatch("CHSH needs a 2 x 2 composite state")
    a, a2, b, b2 = angles
    return (
        correlator(state, a, b)
        + correlator(state, a, b2)
        + correlator(state, a2, b)
        - correlator(state, a2, b2)
    )


TSIRELSON_ANGLES = (0.0, np.pi / 4, np.pi / 8, -np.pi / 8)


def chsh_deterministic(table) -> int:
    """CHSH combination for fixed outcomes (A, A', B, B') in {+1, -1}."""
    a, a2, b, b2 = table
    return a * b + a * b2 + a2 * b - a2 * b2


def chsh_grid_max(state: CompositeState, points_per_angle: int = 10) -> float:
    """max |S| over a points^4 angle grid on [0, pi)."""
    g = np.linspace(0.0, np.pi, points_per_angle, endpoint=False)
    # E(a,b) on the grid, then combine
    e = np.array([[correlator(state, x, y) for y in g] for x in g])
    s = e[:, None, :, None] + e[:, None, None, :] + e[None, :, :, None] - e[None, :, None, :]
    return float(np.max(np.abs(s)))


# ---------------------------------------------------------------------------
# Measurement
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MeasurementModel:
    dim: int
    interaction: Unitary

    def calibration_deviation(self) -> float:
        n = self.dim
        worst = 0.0
        for k in range(n):
            before = np.kron(basis_state(n, k).coeffs, basis_state(n, 0).coeffs)
            after = np.kron(basis_state(n, k).coeffs, basis_state(n, k).coeffs)
            worst = max(worst, float(np.max(np.abs(self.interaction.matrix @ before - after))))
        return worst


def controlled_shift(n: int) -> Unitary:
    """|s_k> |a_j> -> |s_k> |a_{j+k mod N}>."""
    p = cyclic_generator(n).matrix.matrix if n >= 2 else np.eye(1, dtype=complex)
    m = np.zeros((n * n, n * n), dtype=complex)
    for k in range(n):
        m[k * n : (k + 1) * n, k * n : (k + 1) * n] = np.linalg.matrix_power(p, k)
    return Unitary(m)


def measurement_model(n: int) -> MeasurementModel:
    return MeasurementModel(n, controlled_shift(n))


def measurement_interaction(psi: PureState, n: int | None = None) -> tuple[CompositeState, np.ndarray]:
    """Couple ``psi`` to an apparatus in the ready state a_0; return the
    joint state sum_k c_k s_k (x) a_k and the affinity to each branch."""
    n = psi.dim if n is None else n
    if psi.dim != n:
        raise DimensionMismatch("state dimension differs from N")
    model = measurement_model(n)
    ready = np.kron(psi.coeffs, basis_state(n, 0).coeffs)
    joint = CompositeState((n, n), make_state(model.interaction.matrix @ ready))
    branches = [tensor_state(basis_state(n, k), basis_state(n, k)).joint for k in range(n)]
    aff = np.array([1.0 - kernel(joint.joint, b) for b in branches])
    return joint, aff


def no_cloning_gap(s: complex) -> float:
    """|s - s^2|: how far a cloner would have to break overlap preservation."""
    if abs(s) > 1 + TOL_ALG:
        raise InvalidParameters("overlap magnitude exceeds 1")
    return float(abs(s - s * s))


# ---------------------------------------------------------------------------
# Entropic uncertainty
# ---------------------------------------------------------------------------


def entropic_uncertainty_check(psi: PureState, b1: Basis, b2: Basis, tol: float = 1e-9) -> tuple[float, float]:
    """(H(B) + H(B'), log2 N) for a mutually unbiased pair."""
    if pair_deviation(b1, b2) > tol:
        raise NotUnbiased("bases are not mutually unbiased")
    total = shannon_entropy(affinities(psi, b1)) + shannon_entropy(affinities(psi, b2))
    return total, float(np.log2(psi.dim))


@dataclass(frozen=True)
class DilutionRecord:
    n_system: int
    n_env: int
    n_eff: int
    delta_phi: float
    delta_phi_degrees: float
    nontrivial_dynamics: bool


def capacity_dilution(n_system: int, n_env: int) -> DilutionRecord:
    if n_system < 1 or n_env < 1:
        raise InvalidParameters("capacities must be at least 1")
    n = n_system * n_env
    dphi = 2 * np.pi / n
    return DilutionRecord(n_system, n_env, n, dphi, float(np.degrees(dphi)), n >= 3)
