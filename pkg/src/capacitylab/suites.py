"""Verification suites. Each suite appends CheckReports to a Recorder.

Random checks draw from ``RandomSource(seed).spawn(k)`` with a fixed,
per-check index ``k`` so results do not depend on execution order.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.linalg import expm

from . import capacity, composition, dynamics, geometry, mub, sampling
from .errors import UnknownSuite
from .reports import APPROX, GE, LE, Recorder, RunManifest
from .statecore import (
    Basis,
    DensityOperator,
    RandomSource,
    affinities,
    haar_random_state,
    haar_random_unitary,
    kernel,
    make_state,
    mixed_kernel,
)

SUITES = ("kernel", "dynamics", "mub", "born", "capacity", "compose", "sampling")


def _root(manifest: RunManifest, suite_index: int) -> RandomSource:
    return RandomSource(manifest.seed).spawn(suite_index)


def suite_kernel(manifest: RunManifest, rec: Recorder) -> None:
    root = _root(manifest, 0)
    samples = manifest.samples or 100
    dims = (manifest.n,) if manifest.n else (2, 3, 5)
    for i, n in enumerate(dims):
        rng = root.spawn(i)
        axiom, inv, aff, mixed = 0.0, 0.0, 0.0, 0.0
        for _ in range(samples):
            x, y = haar_random_state(n, rng), haar_random_state(n, rng)
            u = haar_random_unitary(n, rng)
            k = kernel(x, y)
            axiom = max(axiom, kernel(x, x), abs(k - kernel(y, x)), max(-k, k - 1, 0.0))
            inv = max(inv, abs(kernel(u.apply(x), u.apply(y)) - k))
            basis = Basis.from_columns(u.matrix)
            aff = max(aff, abs(affinities(x, basis).sum() - 1))
            mixed = max(mixed, abs(mixed_kernel(DensityOperator.pure(x), y) - k))
        p = {"n": n, "samples": samples}
        rec.add("kernel.axioms", p, axiom, 0.0, LE, 1e-12)
        rec.add("kernel.unitary_invariance", p, inv, 0.0, LE, 1e-12)
        rec.add("kernel.affinity_normalization", p, aff, 0.0, LE, 1e-12)
        rec.add("kernel.mixed_pure_consistency", p, mixed, 0.0, LE, 1e-12)
    rec.add("kernel.maximally_mixed", {"n": 4}, mixed_kernel(DensityOperator.maximally_mixed(4), make_state([1, 2, 3, 4])), 0.75, APPROX, 1e-12)
    q = affinities(make_state([1, 1, 1]), Basis.computational(3))
    rec.add("kernel.qutrit_affinities", {"n": 3}, float(np.max(np.abs(q - 1 / 3))), 0.0, LE, 1e-12)


def suite_dynamics(manifest: RunManifest, rec: Recorder) -> None:
    root = _root(manifest, 1)
    top = manifest.n or 12
    order_fail = 0
    roots_dev = 0.0
    for n in range(2, top + 1):
        dev = dynamics.order_deviations(dynamics.cyclic_generator(n))
        order_fail += dev[-1] > 1e-12 or any(d <= 0.5 for d in dev[:-1])
        ev = np.sort_complex(np.round(dynamics.cyclic_generator(n).eigenvalues(), 14))
        expected = np.exp(2j * np.pi * np.arange(n) / n)
        roots_dev = max(roots_dev, max(min(abs(e - ev)) for e in expected))
    rec.add("dynamics.order", {"n_max": top}, order_fail, 0, LE)
    rec.add("dynamics.eigenvalues_roots_of_unity", {"n_max": top}, roots_dev, 0.0, LE, 1e-12)
    obstruction = sum(dynamics.has_nonreal_eigenvalue(n) != (n >= 3) for n in range(2, top + 1))
    rec.add("dynamics.spectral_reality_obstruction", {"n_max": top}, obstruction, 0, LE)

    fourier_dev = 0.0
    for n in range(2, top + 1):
        f = dynamics.fourier_eigenbasis(n)
        kb = np.array([[kernel(e, fk) for fk in f] for e in Basis.computational(n)])
        fourier_dev = max(fourier_dev, float(np.max(np.abs(kb - (1 - 1 / n)))))
    rec.add("dynamics.fourier_kernel_uniform", {"n_max": top}, fourier_dev, 0.0, LE, 1e-12)

    mism = sum(dynamics.uniformity_dichotomy(n)[1] for n in range(1, 6))
    rec.add("dynamics.cycle_uniformity_dichotomy", {"n_max": 5}, mism, 0, LE)

    rng = root.spawn(0)
    samples = manifest.samples or 50
    for n in (3, 5):
        fam = dynamics.interpolate_evolution(dynamics.cyclic_generator(n))
        t_period = fam.period
        group = max(dynamics.group_law_deviation(fam, *rng.uniform(0, t_period, 2)) for _ in range(samples))
        recur = float(np.max(np.abs(dynamics.evaluate(fam, t_period).matrix - np.eye(n))))
        step = float(np.max(np.abs(dynamics.evaluate(fam, t_period / n).matrix - dynamics.shift_matrix(n))))
        h = dynamics.hamiltonian_from_cycle(fam)
        gen = max(
            float(np.max(np.abs(expm(-1j * h.matrix * t) - dynamics.evaluate(fam, t).matrix)))
            for t in np.linspace(0, t_period, 20)
        )
        preserve = 0.0
        for _ in range(samples):
            u = dynamics.evaluate(fam, rng.uniform(0, t_period))
            x, y = haar_random_state(n, rng), haar_random_state(n, rng)
            preserve = max(preserve, abs(kernel(u.apply(x), u.apply(y)) - kernel(x, y)))
        p = {"n": n, "period": t_period}
        rec.add("dynamics.group_law", p, group, 0.0, LE, 1e-10)
        rec.add("dynamics.recurrence", p, recur, 0.0, LE, 1e-10)
        rec.add("dynamics.single_step_is_shift", p, step, 0.0, LE, 1e-12)
        rec.add("dynamics.hamiltonian_generates_family", p, gen, 0.0, LE, 1e-8)
        rec.add("dynamics.kernel_preserved_along_orbit", p, preserve, 0.0, LE, 1e-10)

    scan = dynamics.n2_obstruction_scan(100)
    rec.add("dynamics.n2_real_solutions", {"resolution": 100}, scan.n_clusters, 4, APPROX, 0)
    fine = dynamics.n2_obstruction_scan(400)
    rec.add("dynamics.n2_no_continuous_family", {"resolution": 400}, max(fine.cluster_sizes), 1, LE)
    cf = dynamics.complex_swap_family()
    rec.add("dynamics.complex_family_unitary", {}, max(cf.max_unitarity_dev, cf.max_commutator), 0.0, LE, 1e-12)
    rec.add("dynamics.complex_family_nontrivial", {}, cf.nontrivial, 1, GE)

    psi = haar_random_state(3, rng)
    loop = [psi, haar_random_state(3, rng), haar_random_state(3, rng), psi]
    rotated = [loop[0], make_state(np.exp(0.7j) * loop[1].coeffs), loop[2], loop[3]]
    gauge = abs(dynamics.bargmann_holonomy(loop) - dynamics.bargmann_holonomy(rotated))
    rec.add("dynamics.holonomy_gauge_invariance", {"n": 3}, gauge, 0.0, LE, 1e-12)


def suite_mub(manifest: RunManifest, rec: Recorder) -> None:
    dims = (manifest.n,) if manifest.n else (2, 3, 5, 7, 11, 13)
    for n in dims:
        fam = mub.mub_family(n)
        rec.add("mub.count", {"n": n}, len(fam), n + 1, APPROX, 0)
        rec.add("mub.unbiased", {"n": n}, mub.verify_unbiased(fam), 0.0, LE, 1e-12)


def suite_born(manifest: RunManifest, rec: Recorder) -> None:
    root = _root(manifest, 3)
    samples = manifest.samples or 200
    n0 = manifest.n or 3
    rec.add("born.residual_alpha2", {"alpha": 2.0, "n": n0, "samples": samples},
            geometry.born_exponent_residual(2.0, n0, samples, root.spawn(0)), 0.0, LE, 1e-10)
    alphas = (manifest.alpha,) if manifest.alpha is not None and manifest.alpha != 2 else (1.0, 3.0, 4.0)
    for i, a in enumerate(alphas):
        rec.add("born.residual_other_alpha", {"alpha": a, "n": n0, "samples": samples},
                geometry.born_exponent_residual(a, n0, samples, root.spawn(1 + i)), 1e-3, GE)
    for j, n in enumerate((3, 4, 5)):
        sweep = geometry.alpha_sweep(n, samples, root.spawn(10 + j))
        rec.add("born.alpha_grid_argmin", {"n": n, "samples": samples}, min(sweep, key=sweep.get), 2.0, APPROX, 0)

    ode = geometry.solve_compatibility_ode(10_000, 1e-6)
    rec.add("born.ode_uniqueness", {"grid": 10_000, "eps": 1e-6}, ode.max_deviation, 0.0, LE, 1e-6)
    rec.add("born.n2_gap_alpha2", {"alpha": 2.0}, geometry.n2_normalization_gap(2.0), 0.0, APPROX, 0)
    rec.add("born.n2_gap_alpha1", {"alpha": 1.0}, geometry.n2_normalization_gap(1.0), math.sqrt(2) - 1, APPROX, 1e-12)
    rec.add("born.power_family_exponent", {"alpha": 2.0}, geometry.power_family_exponent_mismatch(2.0), 0.0, APPROX, 0)

    for j, n in enumerate((2, 3, 5)):
        chk = geometry.metric_expansion_check(n, 100, root.spawn(20 + j))
        rec.add("born.metric_expansion_third_order", {"n": n, "samples": 100}, int(not chk.passed), 0, LE)

    radial = 0.0
    rng = root.spawn(30)
    for _ in range(100):
        psi = geometry.random_interior_state(4, rng, geometry.INTERIOR_FLOOR)
        d = geometry.random_tangent(psi, rng)
        c = psi.coeffs
        # zero the phase part: dpsi_k = c_k * real_k keeps phases fixed
        real = np.real(np.conj(c) * d) / np.abs(c) ** 2
        v = geometry.TangentVector(psi, c * real)
        radial = max(radial, abs(geometry.fs_metric(v) - geometry.fs_radial(v.radial())))
    rec.add("born.radial_restriction_identity", {"n": 4, "samples": 100}, radial, 0.0, LE, 1e-10)

    spread2 = max(geometry.dynamics_distortion(2.0, 3, 50, root.spawn(40 + t)) for t in range(20))
    rec.add("born.dynamics_distortion_alpha2", {"n": 3, "steps": 50, "trials": 20}, spread2, 0.0, LE, 1e-9)
    hits = sum(geometry.dynamics_distortion(3.0, 3, 50, root.spawn(80 + t)) > 1e-4 for t in range(20))
    rec.add("born.dynamics_distortion_alpha3", {"n": 3, "steps": 50, "trials": 20}, hits / 20, 0.9, GE)


def suite_capacity(manifest: RunManifest, rec: Recorder) -> None:
    rows = {r.N: r for r in capacity.deficit_table((2, 4, 8, 16))}
    expected = {2: (1.0, 1, 2), 4: (2.0, 3, 4), 8: (3.0, 7, 6), 16: (4.0, 15, 8)}
    dev = max(
        max(abs(rows[n].available - a), abs(rows[n].kolmogorov_at_M2 - k), abs(rows[n].combinatorial_at_M3 - c))
        for n, (a, k, c) in expected.items()
    )
    rec.add("capacity.table_rows", {"ns": [2, 4, 8, 16]}, dev, 0.0, LE, 1e-12)
    feasible = [n for n, r in rows.items() if r.feasible_flag]
    rec.add("capacity.sole_feasible_row", {"ns": [2, 4, 8, 16]}, int(feasible != [2]), 0, LE)

    b = capacity.bit_budget(3, 3)
    rec.add("capacity.qutrit_combinatorial", {"n": 3, "m": 3}, b.combinatorial_bits, 2 * math.log2(3), APPROX, 1e-12)
    mism = 0
    for n, m in itertools.product(range(2, 8), range(2, 6)):
        if n ** (m - 1) <= 10**5:
            mism += capacity.assignment_count(n, m) != capacity.enumerate_assignments(n, m)
    rec.add("capacity.enumeration_agreement", {"n_max": 7, "m_max": 5}, mism, 0, LE)
    m = manifest.m or 3
    margins = [capacity.determinism_infeasible(n, m).margin for n in range(3, 65)]
    rec.add("capacity.margin_monotone", {"m": m}, int(not all(np.diff(margins) > 0)), 0, LE)
    ratios = [capacity.entrenchment_ratio(n) for n in range(3, 65)]
    rec.add("capacity.entrenchment_growth", {"n_max": 64}, int(not all(np.diff(ratios) > 0)), 0, LE)


def suite_compose(manifest: RunManifest, rec: Recorder) -> None:
    root = _root(manifest, 5)
    samples = manifest.samples or 1000
    law = composition.composition_law_tests(samples, root.spawn(0))
    p = {"samples": samples}
    rec.add("compose.symmetry", p, law.max_symmetry_dev, 0.0, LE, 1e-12)
    rec.add("compose.associativity", p, law.max_associativity_dev, 0.0, LE, 1e-12)
    rec.add("compose.boundary", p, law.max_boundary_dev, 0.0, LE, 1e-12)
    rec.add("compose.wrong_candidate_rejected", p, law.candidate_max_product_dev, 1e-6, GE)
    for j, dims in enumerate(((2, 2), (2, 3), (3, 3))):
        dev = composition.product_kernel_deviation(composition.kernel_compose, root.spawn(1 + j), samples, dims)
        rec.add("compose.product_factorization", {"dims": list(dims), "samples": samples}, dev, 0.0, LE, 1e-12)

    for na, nb in ((2, 2), (2, 3), (3, 3)):
        rank, full = composition.local_tomography_rank(na, nb, "complex")
        rec.add("compose.tomography_complex_full", {"dims": [na, nb]}, rank, full, APPROX, 0)
        rank, full = composition.local_tomography_rank(na, nb, "real")
        rec.add("compose.tomography_real_deficient", {"dims": [na, nb]}, rank, full - 1, LE)
    rank, _ = composition.local_tomography_rank(2, 2, "real")
    rec.add("compose.tomography_real_2x2_rank", {"dims": [2, 2]}, rank, 9, APPROX, 0)

    bell = composition.bell_state()
    rec.add("compose.chsh_tsirelson_point", {}, composition.chsh_value(bell, composition.TSIRELSON_ANGLES), 2 * math.sqrt(2), APPROX, 1e-10)
    rng = root.spawn(10)
    worst = 0.0
    for _ in range(manifest.samples or 10_000):
        st = composition.CompositeState((2, 2), haar_random_state(4, rng))
        worst = max(worst, abs(composition.chsh_value(st, rng.uniform(-np.pi, np.pi, 4))))
    rec.add("compose.chsh_random_ceiling", {"samples": manifest.samples or 10_000}, worst, 2 * math.sqrt(2), LE, 1e-9)
    prod = composition.tensor_state(make_state([1, 0]), make_state([1, 0]))
    rec.add("compose.chsh_product_grid", {"points_per_angle": 10}, composition.chsh_grid_max(prod, 10), 2.0, LE, 1e-9)
    det = max(abs(composition.chsh_deterministic(t)) for t in itertools.product((1, -1), repeat=4))
    rec.add("compose.chsh_deterministic", {}, det, 2, LE)

    rng = root.spawn(11)
    meas = 0.0
    for n in (2, 3, 5):
        for _ in range(100):
            psi = haar_random_state(n, rng)
            _, aff = composition.measurement_interaction(psi, n)
            meas = max(meas, float(np.max(np.abs(aff - psi.probabilities))))
    rec.add("compose.measurement_branch_affinities", {"ns": [2, 3, 5], "samples": 100}, meas, 0.0, LE, 1e-12)
    cal = max(composition.measurement_model(n).calibration_deviation() for n in (2, 3, 5))
    rec.add("compose.measurement_calibration", {"ns": [2, 3, 5]}, cal, 0.0, LE, 1e-12)

    rng = root.spawn(12)
    for n in (2, 3, 5):
        fam = mub.mub_family(n)
        b1, b2 = fam[0], fam[1]
        low = min(
            composition.entropic_uncertainty_check(haar_random_state(n, rng), b1, b2)[0] for _ in range(1000)
        )
        rec.add("compose.entropic_uncertainty", {"n": n, "samples": 1000}, low, math.log2(n), GE, 1e-9)
        tight = composition.entropic_uncertainty_check(b1[0], b1, b2)[0]
        rec.add("compose.entropic_basis_state_tight", {"n": n}, tight, math.log2(n), APPROX, 1e-12)

    d = composition.capacity_dilution(2, 5)
    rec.add("compose.dilution_phase_resolution", {"n_s": 2, "n_e": 5}, d.delta_phi_degrees, 36.0, APPROX, 1e-9)
    rec.add("compose.dilution_qubit_static", {"n_s": 2, "n_e": 1}, int(composition.capacity_dilution(2, 1).nontrivial_dynamics), 0, LE)
    rec.add("compose.no_cloning_gap", {"s": 0.5}, composition.no_cloning_gap(0.5), 0.25, APPROX, 1e-15)


def suite_sampling(manifest: RunManifest, rec: Recorder) -> None:
    root = _root(manifest, 6)
    trials = manifest.samples or 1000
    for j, n in enumerate((3, 4, 8)):
        rng = root.spawn(j)
        res = sampling.indistinguishability_bound_check(haar_random_state(n, rng), 1 / (n + 1), trials, rng)
        p = {"n": n, "eps": 1 / (n + 1), "trials": trials}
        rec.add("sampling.indistinguishability_bound", p, res.max_kernel, 2 / n, LE)
        rec.add("sampling.overlap_lower_bound", p, res.overlap_violations, 0, LE)

    z = sampling.zeno_floor_sim(1.0, 1.0, (8, 16, 32, 64))
    rec.add("sampling.zeno_exponent", {"ns": [8, 16, 32, 64]}, z.exponent, -2.0, APPROX, 0.1)
    worst = max(sampling.entropy_floor_check(n).ratio for n in range(2, 65))
    rec.add("sampling.entropy_floor_factor", {"n_min": 2, "n_max": 64}, worst, 4.0, LE)
    rec.add("sampling.granularity", {"n": 10}, math.degrees(sampling.granularity(10).delta_theta), 36.0, APPROX, 1e-9)

    sweep = sampling.reconstruction_sweep(3, trials, root.spawn(10))
    p = {"n": 3, "trials": trials, "fidelity": "1-1e-8"}
    rec.add("sampling.reconstruction_success_rate", p, sweep.success_rate, 0.99, GE)
    logged = all("state" in f for f in sweep.flagged)
    rec.add("sampling.reconstruction_flags_logged", p, int(not logged), 0, LE)

    audit = sampling.two_basis_sufficiency_audit(3, trials, root.spawn(11))
    p = {"n": 3, "trials": trials}
    rec.add("sampling.audit_counterexamples_random", p, audit.random_pair_counterexamples, 0, LE)
    rec.add("sampling.audit_counterexamples_matched", p, audit.matched_pair_counterexamples, 0, LE)


SUITE_FUNCS = {
    "kernel": suite_kernel,
    "dynamics": suite_dynamics,
    "mub": suite_mub,
    "born": suite_born,
    "capacity": suite_capacity,
    "compose": suite_compose,
    "sampling": suite_sampling,
}


def run_checks(suite: str, manifest: RunManifest, extra_checks=()) -> list:
    """Run one suite (or ``all``) and return its reports.

    ``extra_checks`` are callables ``(manifest, recorder) -> None`` appended
    after the suite; tests use them to inject failures.
    """
    if suite == "all":
        names = SUITES
    elif suite in SUITE_FUNCS:
        names = (suite,)
    else:
        raise UnknownSuite(suite)
    rec = Recorder(timing=manifest.timing)
    for name in names:
        with rec.timed() as t:
            start = len(rec.reports)
            SUITE_FUNCS[name](manifest, rec)
        if manifest.timing and len(rec.reports) > start:
            # suite wall time is spread evenly over its checks
            per = t["ms"] // (len(rec.reports) - start)
            rec.reports[start:] = [
                type(r)(r.check_name, r.params, r.value, r.bound, r.comparator, r.tolerance, r.passed, per)
                for r in rec.reports[start:]
            ]
    for check in extra_checks:
        check(manifest, rec)
    return rec.reports
