"""Fubini-Study and Fisher-Rao metrics and the checks that single out the
quadratic probability rule p_k = |c_k|^2.

A trial rule is the power family p_k proportional to x_k^(alpha/2), with
x_k = |c_k|^2. Only alpha = 2 makes the Fisher-Rao metric a constant
multiple of the Fubini-Study metric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundarySingularity, DimensionMismatch, InvalidParameters
from .statecore import (
    TOL_ALG,
    PureState,
    RandomSource,
    as_rng,
    haar_random_unitary_matrix,
    kernel,
    make_state,
    random_interior_state,
)

INTERIOR_FLOOR = 1e-4


@dataclass(frozen=True)
class TangentVector:
    """Tangent vector at ``base``; components are projected onto the gauge
    slice Re<psi|dpsi> = 0 at construction."""

    base: PureState
    components: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.components, dtype=complex).ravel()
        if d.shape[0] != self.base.dim:
            raise DimensionMismatch("tangent components and base state differ in dimension")
        c = self.base.coeffs
        d = d - np.vdot(c, d).real * c
        d.setflags(write=False)
        object.__setattr__(self, "components", d)

    @property
    def dim(self) -> int:
        return self.base.dim

    def radial(self) -> "RadialDirection":
        c = self.base.coeffs
        return RadialDirection(self.base.probabilities, 2 * np.real(np.conj(c) * self.components))

    def transported(self, u: np.ndarray) -> "TangentVector":
        return TangentVector(PureState(u @ self.base.coeffs), u @ self.components)


@dataclass(frozen=True)
class RadialDirection:
    """Probability-changing direction: dx_k with sum dx_k = 0."""

    x: np.ndarray
    dx: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        dx = np.asarray(self.dx, dtype=float)
        if x.shape != dx.shape:
            raise DimensionMismatch("x and dx differ in length")
        if abs(dx.sum()) > 1e3 * TOL_ALG:
            raise InvalidParameters("radial components must sum to zero")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "dx", dx)


def fs_metric(v: TangentVector) -> float:
    """<dpsi|dpsi> - |<psi|dpsi>|^2."""
    d = v.components
    return max(float(np.vdot(d, d).real - abs(np.vdot(v.base.coeffs, d)) ** 2), 0.0)


def fs_radial(r: RadialDirection) -> float:
    """Fubini-Study restricted to a radial direction: sum dx^2 / (4x)."""
    moving = r.dx != 0
    if np.any(r.x[moving] <= TOL_ALG):
        raise BoundarySingularity("radial direction moves a vanishing component")
    return float(np.sum(r.dx[moving] ** 2 / (4 * r.x[moving])))


def fr_metric(p, dp) -> float:
    """Fisher-Rao sum dp_k^2 / p_k."""
    p = np.asarray(p, dtype=float)
    dp = np.asarray(dp, dtype=float)
    if p.shape != dp.shape:
        raise DimensionMismatch("p and dp differ in length")
    if abs(dp.sum()) > 1e3 * TOL_ALG:
        raise InvalidParameters("dp must sum to zero")
    moving = dp != 0
    if np.any(p[moving] <= TOL_ALG):
        raise BoundarySingularity("Fisher-Rao metric diverges at the simplex boundary")
    return float(np.sum(dp[moving] ** 2 / p[moving]))


def power_rule(x: np.ndarray, dx: np.ndarray, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """p = x^(alpha/2) / Z and its exact directional derivative along dx."""
    b = alpha / 2
    w = x**b
    dw = b * x ** (b - 1) * dx
    z = w.sum()
    dz = dw.sum()
    return w / z, dw / z - w * dz / z**2


def fr_fs_ratio(x: np.ndarray, dx: np.ndarray, alpha: float) -> float:
    p, dp = power_rule(x, dx, alpha)
    return fr_metric(p, dp) / fs_radial(RadialDirection(x, dx))


def random_radial(x: np.ndarray, rng: RandomSource) -> np.ndarray:
    dx = rng.normal(x.shape[0])
    dx -= dx.mean()
    return dx / np.linalg.norm(dx)


def born_exponent_residual(alpha: float, n: int, samples: int, rng: RandomSource | int | None = None) -> float:
    """Coefficient of variation of g_FR / g_FS over random interior states and
    radial directions. Zero exactly when the ratio is state independent."""
    if n < 3 or samples < 10:
        raise InvalidParameters("need N >= 3 and at least 10 samples")
    if alpha <= 0:
        raise InvalidParameters("alpha must be positive")
    rng = as_rng(rng)
    ratios = np.empty(samples)
    for i in range(samples):
        x = random_interior_state(n, rng, INTERIOR_FLOOR).probabilities
        ratios[i] = fr_fs_ratio(x, random_radial(x, rng), alpha)
    return float(np.std(ratios) / np.mean(ratios))


def alpha_sweep(n: int, samples: int, rng, alphas=(0.5, 1.0, 1.5, 2.0, 2.5, 3.0)) -> dict[float, float]:
    rng = as_rng(rng)
    return {a: born_exponent_residual(a, n, samples, rng.spawn(i)) for i, a in enumerate(alphas)}


def n2_normalization_gap(alpha: float) -> float:
    """|f(1/2) + f(1/2) - 1| for f(x) = x^(alpha/2)."""
    if alpha <= 0:
        raise InvalidParameters("alpha must be positive")
    if alpha == 2:
        return 0.0
    return abs(2.0 ** (1 - alpha / 2) - 1.0)


def power_family_exponent_mismatch(alpha: float) -> float:
    """x * [f'(x)]^2 / f(x) is constant for f = x^(alpha/2) only when the
    exponent alpha/2 - 1 vanishes; returns |alpha/2 - 1|."""
    return abs(alpha / 2 - 1)


@dataclass(frozen=True)
class OdeSolution:
    x: np.ndarray
    f: np.ndarray
    c: float
    max_deviation: float


def _rk4_profile(c: float, x: np.ndarray) -> np.ndarray:
    sc = np.sqrt(c)

    def rhs(xx, ff):
        return sc * np.sqrt(max(ff, 0.0) / xx)

    f = np.empty_like(x)
    f[0] = c * x[0]
    for i in range(len(x) - 1):
        h = x[i + 1] - x[i]
        xi, fi = x[i], f[i]
        k1 = rhs(xi, fi)
        k2 = rhs(xi + h / 2, fi + h * k1 / 2)
        k3 = rhs(xi + h / 2, fi + h * k2 / 2)
        k4 = rhs(xi + h, fi + h * k3)
        f[i + 1] = fi + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
    return f


def solve_compatibility_ode(grid: int = 10_000, eps: float = 1e-6, c0: float = 0.5) -> OdeSolution:
    """Integrate f' = sqrt(c) sqrt(f/x) on [eps, 1] from f(eps) = c eps with
    classical RK4, then calibrate c by secant iteration so that f(1) = 1."""
    if grid < 1000:
        raise InvalidParameters("grid must have at least 1000 points")
    x = np.linspace(eps, 1.0, grid)

    def miss(c):
        return _rk4_profile(c, x)[-1] - 1.0

    c_prev, c = c0, 2 * c0
    m_prev, m = miss(c_prev), miss(c)
    for _ in range(50):
        if m == m_prev:
            break
        c_prev, c = c, c - m * (c - c_prev) / (m - m_prev)
        m_prev, m = m, miss(c)
        if abs(m) < 1e-15:
            break
    f = _rk4_profile(c, x)
    return OdeSolution(x, f, float(c), float(np.max(np.abs(f - x))))


def ode_uniqueness_check(grid: int = 10_000, eps: float = 1e-6) -> float:
    return solve_compatibility_ode(grid, eps).max_deviation


def second_order_remainder(psi: PureState, dpsi: np.ndarray, h: float) -> float:
    """|K(psi, normalize(psi + h dpsi)) - h^2 g_FS(dpsi)|."""
    v = TangentVector(psi, dpsi)
    moved = make_state(psi.coeffs + h * v.components)
    return abs(kernel(psi, moved) - h * h * fs_metric(v))


def random_tangent(psi: PureState, rng: RandomSource) -> np.ndarray:
    d = TangentVector(psi, rng.complex_normal(psi.dim)).components
    return d / np.linalg.norm(d)


@dataclass(frozen=True)
class ExpansionCheck:
    n: int
    samples: int
    worst_ratio: float  # max over samples of C(h_small) / C(h_large)
    constants: np.ndarray  # shape (samples, 2): remainder / h^3 at each h
    passed: bool


def metric_expansion_check(n: int, samples: int, rng, hs=(1e-3, 1e-4), slack: float = 1e-9) -> ExpansionCheck:
    """Third-order remainder test: C(h) = remainder / h^3 must not grow as h
    shrinks, so one constant bounds the remainder at every tested h."""
    rng = as_rng(rng)
    consts = np.empty((samples, len(hs)))
    for i in range(samples):
        psi = make_state(rng.complex_normal(n))
        d = random_tangent(psi, rng)
        for j, h in enumerate(hs):
            consts[i, j] = second_order_remainder(psi, d, h) / h**3
    big = consts[:, 0]
    ok = np.all(consts[:, 1:] <= 1.1 * big[:, None] + slack)
    ratio = float(np.max(consts[:, -1] / np.maximum(big, slack)))
    return ExpansionCheck(n, samples, ratio, consts, bool(ok))


def dynamics_distortion(alpha: float, n: int, steps: int, rng, tangent: np.ndarray | None = None) -> float:
    """Spread (max - min) of g_FR(alpha) / g_FS along the orbit of a random
    interior state under a random one-parameter unitary group.

    At each orbit point the transported tangent vector is reduced to its
    radial part, where both metrics are diagonal in dx_k; points where the
    radial part vanishes carry no ratio and are skipped.
    """
    if n < 3 or steps < 10:
        raise InvalidParameters("need N >= 3 and at least 10 steps")
    rng = as_rng(rng)
    psi = random_interior_state(n, rng, INTERIOR_FLOOR)
    d = random_tangent(psi, rng) if tangent is None else np.asarray(tangent, dtype=complex)
    if np.linalg.norm(d) <= TOL_ALG:
        return 0.0
    u = haar_random_unitary_matrix(n, rng)
    energies = rng.normal(n)
    ts = np.linspace(0.0, 1.0, steps)
    ratios = []
    for t in ts:
        ut = (u * np.exp(-1j * energies * t)) @ u.conj().T
        v = TangentVector(psi, d).transported(ut)
        r = v.radial()
        if np.min(r.x) < INTERIOR_FLOOR or np.linalg.norm(r.dx) < 1e-6:
            continue
        ratios.append(fr_fs_ratio(r.x, r.dx, alpha))
    if not ratios:
        return 0.0
    return float(np.max(ratios) - np.min(ratios))
