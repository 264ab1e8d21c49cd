"""Finite-N floors: phase granularity, operational indistinguishability,
two-basis state reconstruction, entropy floor and Zeno floor.

Two-basis reconstruction is phase retrieval. The data (2N probabilities,
2N - 2 independent) match the number of real state parameters, so the
solution set is finite but need not be a single point. The reconstruction
therefore returns every data-consistent candidate it finds and the audits
count ambiguous cases instead of assuming uniqueness.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .errors import InfeasibleData, InvalidParameters, NotUnbiased
from .mub import mub_family, pair_deviation
from .statecore import (
    TOL_ALG,
    Basis,
    PureState,
    affinities,
    as_rng,
    haar_random_state,
    kernel,
    make_state,
    shannon_entropy,
)

RECON_TOL = 1e-9
AUDIT_TOL = 1e-6
AGREEMENT_TOL = 1e-10
PHASE_GRID = 16  # minimum starts per free phase
GRID_BUDGET = 2**14  # total grid points; densifies the grid when few phases are free
MAX_REFINEMENTS = 48


@dataclass(frozen=True)
class GranularityRecord:
    N: int
    delta_theta: float
    min_time_step: float
    energy_ceiling: float


def granularity(n: int, period: float = 1.0) -> GranularityRecord:
    if n < 1 or period <= 0:
        raise InvalidParameters("need N >= 1 and T > 0")
    return GranularityRecord(n, 2 * math.pi / n, period / n, n * 2 * math.pi / period)


# ---------------------------------------------------------------------------
# Indistinguishability
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IndistinguishabilityResult:
    n: int
    eps: float
    trials: int
    max_kernel: float
    bound: float
    kernel_violations: int
    overlap_violations: int

    @property
    def passed(self) -> bool:
        return self.kernel_violations == 0 and self.overlap_violations == 0


def indistinguishability_bound_check(psi: PureState, eps: float, trials: int, rng) -> IndistinguishabilityResult:
    """Perturb each amplitude by at most ``eps`` (eps < 1/N), renormalize and
    check K <= 2/N and |<psi|psi'>| >= 1 - sum |c_k - c'_k|^2."""
    n = psi.dim
    if not 0 <= eps < 1 / n:
        raise InvalidParameters("perturbation scale must satisfy 0 <= eps < 1/N")
    rng = as_rng(rng)
    c = psi.coeffs
    worst, kv, ov = 0.0, 0, 0
    for _ in range(trials):
        radius = eps * rng.uniform(size=n)
        phase = np.exp(2j * np.pi * rng.uniform(size=n))
        c2 = c + radius * phase
        c2 = c2 / np.linalg.norm(c2)
        k = kernel(psi, PureState(c2))
        worst = max(worst, k)
        kv += k > 2 / n
        ov += abs(np.vdot(c, c2)) < 1 - np.sum(np.abs(c - c2) ** 2) - TOL_ALG
    return IndistinguishabilityResult(n, eps, trials, worst, 2 / n, int(kv), int(ov))


# ---------------------------------------------------------------------------
# Two-basis reconstruction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Reconstruction:
    state: PureState
    residual: float
    candidates: tuple[PureState, ...]  # all distinct data-consistent states found

    @property
    def ambiguous(self) -> bool:
        return len(self.candidates) > 1


def _check_probabilities(p, n):
    p = np.asarray(p, dtype=float)
    if p.shape != (n,) or np.any(p < -TOL_ALG) or abs(p.sum() - 1) > 1e-9:
        raise InvalidParameters("probability vector must have length N, be non-negative and sum to 1")
    return np.clip(p, 0.0, None)


def _grid_local_minima(values: np.ndarray) -> np.ndarray:
    """Flat indices of points no larger than any torus neighbour."""
    mask = np.ones(values.shape, dtype=bool)
    for ax in range(values.ndim):
        for shift in (1, -1):
            mask &= values <= np.roll(values, shift, axis=ax)
    return np.flatnonzero(mask)


def reconstruct_from_two_bases(pB, pB2, B: Basis, B2: Basis) -> Reconstruction:
    """Recover a state from its outcome probabilities in two unbiased bases.

    Moduli come from ``pB``; the free relative phases minimize the squared
    misfit to ``pB2``. Starts are the local minima of the misfit on a
    phase grid (at least 16 points per phase), each refined by least squares.
    """
    n = B.dim
    if B2.dim != n:
        raise InvalidParameters("bases differ in dimension")
    if pair_deviation(B, B2) > 1e-9:
        raise NotUnbiased("reconstruction requires mutually unbiased bases")
    pB = _check_probabilities(pB, n)
    pB2 = _check_probabilities(pB2, n)
    r = np.sqrt(pB)
    support = np.flatnonzero(r > 1e-12)
    t = B2.matrix.conj().T @ B.matrix[:, support]
    rs = r[support]
    free = len(support) - 1

    def amplitudes(phases):
        return rs * np.exp(1j * np.concatenate([[0.0], phases]))

    def misfit(phases):
        return np.abs(t @ amplitudes(phases)) ** 2 - pB2

    def to_state(phases):
        c = np.zeros(n, dtype=complex)
        c[support] = amplitudes(phases)
        return make_state(B.matrix @ c)

    if free == 0:
        res = float(np.sum(misfit(np.zeros(0)) ** 2))
        if res >= RECON_TOL:
            raise InfeasibleData(f"no phase assignment fits the data (residual {res:.3e})", res)
        s = to_state(np.zeros(0))
        return Reconstruction(s, res, (s,))

    per = max(PHASE_GRID, int(GRID_BUDGET ** (1 / free) + 1e-9))
    g = 2 * np.pi * np.arange(per) / per
    mesh = np.stack(np.meshgrid(*([g] * free), indexing="ij"), axis=-1).reshape(-1, free)
    amps = rs[None, :] * np.exp(1j * np.concatenate([np.zeros((len(mesh), 1)), mesh], axis=1))
    vals = np.sum((np.abs(amps @ t.T) ** 2 - pB2) ** 2, axis=1)
    starts = _grid_local_minima(vals.reshape([per] * free))
    starts = starts[np.argsort(vals[starts])][:MAX_REFINEMENTS]

    found: list[tuple[float, PureState]] = []
    best = (np.inf, None)
    for idx in starts:
        sol = least_squares(misfit, mesh[idx], xtol=1e-15, ftol=1e-15, gtol=1e-15, method="lm")
        res = float(np.sum(sol.fun**2))
        state = to_state(sol.x)
        if res < best[0]:
            best = (res, state)
        if res < RECON_TOL and not any(kernel(state, s) < AUDIT_TOL for _, s in found):
            found.append((res, state))
    if not found:
        raise InfeasibleData(f"no phase assignment fits the data (best residual {best[0]:.3e})", best[0])
    found.sort(key=lambda item: item[0])
    return Reconstruction(found[0][1], found[0][0], tuple(s for _, s in found))


def standard_pair(n: int) -> tuple[Basis, Basis]:
    fam = mub_family(n)
    return fam[0], fam[1]


@dataclass
class ReconstructionSweep:
    n: int
    trials: int
    fidelity_threshold: float
    successes: int = 0
    ambiguous: int = 0
    infeasible: int = 0
    min_fidelity: float = 1.0
    flagged: list = field(default_factory=list)

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials

    def to_dict(self) -> dict:
        return asdict(self)


def _state_data(psi: PureState) -> dict:
    return {"re": [float(x) for x in psi.coeffs.real], "im": [float(x) for x in psi.coeffs.imag]}


def reconstruction_sweep(n: int, trials: int, rng, fidelity_threshold: float = 1 - 1e-8) -> ReconstructionSweep:
    """Reconstruct Haar states from exact two-basis data; every case that is
    infeasible, ambiguous or below threshold is logged with its state."""
    rng = as_rng(rng)
    B, B2 = standard_pair(n)
    out = ReconstructionSweep(n, trials, fidelity_threshold)
    for i in range(trials):
        psi = haar_random_state(n, rng)
        try:
            rec = reconstruct_from_two_bases(affinities(psi, B), affinities(psi, B2), B, B2)
        except InfeasibleData as exc:
            out.infeasible += 1
            out.flagged.append({"trial": i, "reason": "infeasible", "residual": exc.residual, "state": _state_data(psi)})
            continue
        fid = 1.0 - kernel(psi, rec.state)
        out.min_fidelity = min(out.min_fidelity, fid)
        ok = fid > fidelity_threshold
        out.successes += ok
        out.ambiguous += rec.ambiguous
        if rec.ambiguous or not ok:
            out.flagged.append(
                {
                    "trial": i,
                    "reason": "ambiguous" if rec.ambiguous else "low_fidelity",
                    "fidelity": fid,
                    "candidates": len(rec.candidates),
                    "state": _state_data(psi),
                }
            )
    return out


# ---------------------------------------------------------------------------
# Sufficiency audit
# ---------------------------------------------------------------------------


@dataclass
class AuditSummary:
    n: int
    trials: int
    random_pairs_agreeing: int = 0
    random_pair_counterexamples: int = 0
    matched_pair_counterexamples: int = 0
    states_with_ambiguous_data: int = 0
    counterexamples: list = field(default_factory=list)

    @property
    def counterexample_count(self) -> int:
        return self.random_pair_counterexamples + self.matched_pair_counterexamples

    def to_dict(self) -> dict:
        d = asdict(self)
        d["counterexample_count"] = self.counterexample_count
        return d


def data_agree(x: PureState, y: PureState, B: Basis, B2: Basis, tol: float = AGREEMENT_TOL) -> bool:
    return bool(
        np.max(np.abs(affinities(x, B) - affinities(y, B))) <= tol
        and np.max(np.abs(affinities(x, B2) - affinities(y, B2))) <= tol
    )


def two_basis_sufficiency_audit(n: int, trials: int, rng, matched: bool = True) -> AuditSummary:
    """Does agreement in two fixed MUBs force K(x, y) < AUDIT_TOL?

    Random pairs essentially never agree, so a second pass (``matched``)
    builds pairs that do agree: every other candidate returned by the
    reconstruction of x. Each disagreement is recorded in trial order.
    """
    if n not in (2, 3, 5):
        raise InvalidParameters("audit supports N in {2, 3, 5}")
    rng = as_rng(rng)
    B, B2 = standard_pair(n)
    out = AuditSummary(n, trials)
    for i in range(trials):
        x = haar_random_state(n, rng)
        y = haar_random_state(n, rng)
        if data_agree(x, y, B, B2):
            out.random_pairs_agreeing += 1
            if kernel(x, y) >= AUDIT_TOL:
                out.random_pair_counterexamples += 1
                out.counterexamples.append({"trial": i, "kind": "random", "kernel": kernel(x, y), "x": _state_data(x), "y": _state_data(y)})
        if not matched:
            continue
        try:
            rec = reconstruct_from_two_bases(affinities(x, B), affinities(x, B2), B, B2)
        except InfeasibleData:  # pragma: no cover - exact data always fits
            continue
        hits = [c for c in rec.candidates if kernel(x, c) >= AUDIT_TOL and data_agree(x, c, B, B2, 1e-8)]
        if hits:
            out.states_with_ambiguous_data += 1
        for c in hits:
            out.matched_pair_counterexamples += 1
            out.counterexamples.append({"trial": i, "kind": "matched", "kernel": kernel(x, c), "x": _state_data(x), "y": _state_data(c)})
    out.counterexamples.sort(key=lambda d: (d["trial"], d["kind"]))
    return out


@dataclass(frozen=True)
class QubitAmbiguityScan:
    resolution: float
    states_scanned: int
    ambiguous_pairs: int
    example: tuple | None  # ((theta, phi), (theta, phi')) of one ambiguous pair


def qubit_ambiguity_scan(resolution: float = 1e-3) -> QubitAmbiguityScan:
    """Exhaustive Bloch-sphere grid search for distinct qubit states with the
    same probabilities in the Z and X eigenbases.

    The azimuth grid is symmetric under phi -> 2 pi - phi so mirror images
    are sampled exactly. Z data fixes theta, so candidates are compared
    within each theta row after sorting by the X data.
    """
    B, B2 = standard_pair(2)
    thetas = np.linspace(0.0, np.pi, int(round(np.pi / resolution)) + 1)
    phis = 2 * np.pi * np.arange(int(round(2 * np.pi / resolution))) / int(round(2 * np.pi / resolution))
    m2 = B2.matrix.conj().T
    scanned = pairs = 0
    example = None
    for th in thetas:
        c = np.stack([np.full(phis.shape, np.cos(th / 2), dtype=complex), np.exp(1j * phis) * np.sin(th / 2)])
        x_data = (np.abs(m2 @ c) ** 2)[0]
        scanned += len(phis)
        order = np.argsort(x_data, kind="stable")
        close = np.flatnonzero(np.diff(x_data[order]) <= AGREEMENT_TOL)
        for i in close:
            a, b = order[i], order[i + 1]
            if 1 - abs(np.vdot(c[:, a], c[:, b])) ** 2 >= AUDIT_TOL:
                pairs += 1
                if example is None:
                    example = ((float(th), float(phis[a])), (float(th), float(phis[b])))
    return QubitAmbiguityScan(resolution, scanned, pairs, example)


# ---------------------------------------------------------------------------
# Entropy and Zeno floors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EntropyFloor:
    n: int
    floor: float  # log2(N) / N
    operational_minimum: float  # H(1 - 1/N, 1/N)

    @property
    def ratio(self) -> float:
        return self.operational_minimum / self.floor


def entropy_floor_check(n: int) -> EntropyFloor:
    if n < 2:
        raise InvalidParameters("need N >= 2")
    return EntropyFloor(n, math.log2(n) / n, shannon_entropy([1 - 1 / n, 1 / n]))


def zeno_flip_probability(n: int, energy_spread: float, period: float = 1.0) -> float:
    """1 - survival of (e_0 + e_{N-1})/sqrt(2) after one step T/N under
    H = diag(linspace(0, dE, N))."""
    if n < 3:
        raise InvalidParameters("need N >= 3")
    if energy_spread < 0 or period <= 0:
        raise InvalidParameters("need dE >= 0 and T > 0")
    energies = np.linspace(0.0, energy_spread, n)
    psi = np.zeros(n, dtype=complex)
    psi[0] = psi[-1] = 1 / np.sqrt(2)
    # 1 - |sum p_k e^{-i E_k dt}|^2 written as a sum of sin^2 terms to avoid cancellation
    p = np.abs(psi) ** 2
    half = (energies[:, None] - energies[None, :]) * (period / n) / 2
    return float(2 * np.sum(p[:, None] * p[None, :] * np.sin(half) ** 2))


@dataclass(frozen=True)
class ZenoScaling:
    ns: tuple[int, ...]
    flips: tuple[float, ...]
    exponent: float


def zeno_floor_sim(energy_spread: float = 1.0, period: float = 1.0, ns=(8, 16, 32, 64)) -> ZenoScaling:
    """Log-log slope of the per-step flip probability against N."""
    flips = [zeno_flip_probability(n, energy_spread, period) for n in ns]
    if min(flips) <= 0:
        return ZenoScaling(tuple(ns), tuple(flips), float("nan"))
    slope = np.polyfit(np.log(ns), np.log(flips), 1)[0]
    return ZenoScaling(tuple(ns), tuple(flips), float(slope))
