import math

import numpy as np
import pytest

from capacitylab import sampling as smp
from capacitylab.errors import InfeasibleData, InvalidParameters, NotUnbiased
from capacitylab.statecore import Basis, RandomSource, affinities, haar_random_state, kernel, make_state, shannon_entropy


def test_granularity():
    g = smp.granularity(3)
    assert g.delta_theta == 2 * math.pi / 3
    assert abs(math.degrees(smp.granularity(10).delta_theta) - 36) < 1e-12
    for n in (1, 5, 17, 64):
        g = smp.granularity(n, 2.5)
        assert abs(g.delta_theta * n - 2 * math.pi) < 1e-12
        assert smp.granularity(2 * n).delta_theta == g.delta_theta / 2
        assert g.min_time_step == 2.5 / n


def test_indistinguishability_zero_eps():
    r = smp.indistinguishability_bound_check(make_state([1, 1, 1, 1]), 0.0, 10, RandomSource(0))
    assert r.max_kernel < 1e-12


@pytest.mark.parametrize("n", [3, 4, 8])
def test_indistinguishability_bound(n):
    rng = RandomSource(n)
    psi = haar_random_state(n, rng)
    r = smp.indistinguishability_bound_check(psi, 0.99 / n, 1000, rng)
    assert r.passed and r.max_kernel <= 2 / n


def test_indistinguishability_example():
    r = smp.indistinguishability_bound_check(haar_random_state(4, RandomSource(1)), 1 / 8, 1000, RandomSource(2))
    assert r.max_kernel <= 0.5 and r.overlap_violations == 0
    with pytest.raises(InvalidParameters):
        smp.indistinguishability_bound_check(make_state([1, 0]), 0.6, 1, RandomSource(0))


def test_reconstruct_basis_state():
    B, B2 = smp.standard_pair(3)
    b0 = B[0]
    rec = smp.reconstruct_from_two_bases(affinities(b0, B), affinities(b0, B2), B, B2)
    assert kernel(rec.state, b0) < 1e-12 and rec.residual < 1e-12


@pytest.mark.parametrize("n,trials", [(3, 60), (5, 40)])
def test_reconstruction_candidates_fit_and_contain_truth(n, trials):
    B, B2 = smp.standard_pair(n)
    rng = RandomSource(20 + n)
    recovered = 0
    for _ in range(trials):
        psi = haar_random_state(n, rng)
        pB, pB2 = affinities(psi, B), affinities(psi, B2)
        rec = smp.reconstruct_from_two_bases(pB, pB2, B, B2)
        for c in rec.candidates:
            assert np.max(np.abs(affinities(c, B) - pB)) < 1e-12
            assert np.sum((affinities(c, B2) - pB2) ** 2) < smp.RECON_TOL
        recovered += min(kernel(psi, c) for c in rec.candidates) < 1e-8
    # multi-start is a heuristic: nearly coincident roots can share one basin
    assert recovered >= 0.9 * trials


def test_reconstruction_infeasible_data():
    B, B2 = smp.standard_pair(3)
    # point mass in both unbiased bases is impossible
    with pytest.raises(InfeasibleData) as exc:
        smp.reconstruct_from_two_bases([1, 0, 0], [1, 0, 0], B, B2)
    assert exc.value.residual > 1e-3


def test_reconstruction_requires_unbiased():
    b = Basis.computational(3)
    with pytest.raises(NotUnbiased):
        smp.reconstruct_from_two_bases([1, 0, 0], [1, 0, 0], b, b)


def test_qubit_mirror_ambiguity_oracle():
    # Z and X data depend on theta and cos(phi) only
    B, B2 = smp.standard_pair(2)
    th, ph = 1.1, 0.7
    x = make_state([math.cos(th / 2), np.exp(1j * ph) * math.sin(th / 2)])
    y = make_state([math.cos(th / 2), np.exp(-1j * ph) * math.sin(th / 2)])
    assert smp.data_agree(x, y, B, B2)
    assert kernel(x, y) > 0.1


def test_qubit_scan_finds_mirror_pairs():
    scan = smp.qubit_ambiguity_scan(1e-2)
    assert scan.ambiguous_pairs > 0
    (t1, p1), (t2, p2) = scan.example
    assert t1 == t2
    assert abs(math.cos(p1) - math.cos(p2)) < 1e-9


def test_sweep_flags_every_failure():
    sw = smp.reconstruction_sweep(3, 30, RandomSource(0))
    failed = sw.trials - sw.successes
    flagged_failures = [f for f in sw.flagged if f["reason"] == "infeasible" or f.get("fidelity", 0) <= sw.fidelity_threshold]
    assert len(flagged_failures) == failed
    for f in sw.flagged:
        assert len(f["state"]["re"]) == 3


def test_audit_identical_states_agree():
    B, B2 = smp.standard_pair(3)
    x = haar_random_state(3, RandomSource(3))
    assert smp.data_agree(x, x, B, B2) and kernel(x, x) < 1e-12


def test_audit_is_deterministic_and_sorted():
    a = smp.two_basis_sufficiency_audit(3, 40, RandomSource(4))
    b = smp.two_basis_sufficiency_audit(3, 40, RandomSource(4))
    assert a.to_dict() == b.to_dict()
    trials = [c["trial"] for c in a.counterexamples]
    assert trials == sorted(trials)
    assert a.counterexample_count == len(a.counterexamples)
    for c in a.counterexamples:
        assert c["kernel"] >= smp.AUDIT_TOL


def test_audit_random_pairs_do_not_agree():
    a = smp.two_basis_sufficiency_audit(3, 2000, RandomSource(5), matched=False)
    assert a.random_pairs_agreeing == 0 and a.counterexample_count == 0


def test_entropy_floor():
    e = smp.entropy_floor_check(4)
    assert e.floor == 0.5
    assert abs(e.operational_minimum - shannon_entropy([0.75, 0.25])) < 1e-15
    assert abs(e.operational_minimum - 0.8112781244591328) < 1e-12
    floors = [smp.entropy_floor_check(n).floor for n in range(3, 65)]
    assert all(b < a for a, b in zip(floors, floors[1:]))
    assert all(smp.entropy_floor_check(n).ratio <= 4 for n in range(2, 65))
    assert shannon_entropy([1, 0, 0]) == 0


def test_zeno_scaling():
    z = smp.zeno_floor_sim()
    assert z.ns == (8, 16, 32, 64)
    assert -2.1 <= z.exponent <= -1.9
    assert smp.zeno_flip_probability(16, 0.0) == 0


def test_zeno_oracle_small_angle():
    # flip = sin^2(dE dt / 2) for a two-level superposition
    n, de = 32, 1.0
    assert abs(smp.zeno_flip_probability(n, de) - math.sin(de / n / 2) ** 2) < 1e-15
