import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capacitylab import geometry as geo
from capacitylab.errors import BoundarySingularity
from capacitylab.statecore import RandomSource, haar_random_state, haar_random_unitary_matrix, make_state, random_interior_state


def test_fs_metric_transverse_and_phase():
    psi = make_state([1, 0, 0])
    assert abs(geo.fs_metric(geo.TangentVector(psi, np.array([0, 1, 0]))) - 1) < 1e-12
    phi = make_state([1, 2j, 3])
    assert geo.fs_metric(geo.TangentVector(phi, 1j * phi.coeffs)) < 1e-12


def test_tangent_gauge_projection():
    rng = RandomSource(0)
    psi = haar_random_state(4, rng)
    v = geo.TangentVector(psi, rng.complex_normal(4))
    assert abs(np.vdot(psi.coeffs, v.components).real) < 1e-12


@pytest.mark.parametrize("h", [1e-2, 1e-3, 1e-4])
def test_fs_finite_difference(h):
    rng = RandomSource(1)
    for _ in range(20):
        psi = haar_random_state(3, rng)
        d = geo.random_tangent(psi, rng)
        g = geo.fs_metric(geo.TangentVector(psi, d))
        moved = make_state(psi.coeffs + h * d)
        from capacitylab.statecore import kernel

        assert abs(kernel(psi, moved) / h**2 - g) < 10 * h


def test_fr_metric_examples():
    p = np.full(3, 1 / 3)
    assert geo.fr_metric(p, np.zeros(3)) == 0
    d = 1e-2
    assert abs(geo.fr_metric(p, [d, -d, 0]) - 6 * d * d) < 1e-15
    with pytest.raises(BoundarySingularity):
        geo.fr_metric([0, 0.5, 0.5], [0.1, -0.1, 0])


def test_radial_restriction_identity():
    rng = RandomSource(2)
    for _ in range(100):
        psi = random_interior_state(4, rng)
        c = np.abs(psi.coeffs)
        state = make_state(c)
        dx = geo.random_radial(state.probabilities, rng)
        # real amplitudes: dpsi_k = dx_k / (2 c_k) is purely radial
        v = geo.TangentVector(state, dx / (2 * state.coeffs.real))
        assert np.allclose(v.radial().dx, dx, atol=1e-12)
        assert abs(geo.fs_metric(v) - geo.fs_radial(v.radial())) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32))
def test_fs_unitary_invariance(n, seed):
    rng = RandomSource(seed)
    psi = haar_random_state(n, rng)
    v = geo.TangentVector(psi, rng.complex_normal(n))
    u = haar_random_unitary_matrix(n, rng)
    assert abs(geo.fs_metric(v.transported(u)) - geo.fs_metric(v)) < 1e-12


def test_born_residual_selects_two():
    assert geo.born_exponent_residual(2.0, 3, 200, RandomSource(0)) < 1e-10
    for a in (1.0, 3.0, 4.0):
        assert geo.born_exponent_residual(a, 3, 200, RandomSource(0)) > 1e-3


@pytest.mark.parametrize("n", [3, 4, 5])
def test_alpha_sweep_minimum(n):
    sweep = geo.alpha_sweep(n, 200, RandomSource(n))
    assert min(sweep, key=sweep.get) == 2.0


def test_ode_identity():
    sol = geo.solve_compatibility_ode(10_000, 1e-6)
    assert sol.max_deviation < 1e-6
    assert abs(sol.f[-1] - 1) < 1e-12
    assert abs(sol.c - 1) < 1e-6
    # closed form 2 sqrt(f) = 2 sqrt(c) sqrt(x) with f(eps) = c eps gives f = c x
    assert np.max(np.abs(sol.f - sol.c * sol.x)) < 1e-6


def test_n2_normalization_gap():
    assert geo.n2_normalization_gap(2) == 0
    assert abs(geo.n2_normalization_gap(1) - (math.sqrt(2) - 1)) < 1e-12
    assert abs(geo.n2_normalization_gap(4) - 0.5) < 1e-15


def test_power_family_exponent():
    assert geo.power_family_exponent_mismatch(2) == 0
    assert all(geo.power_family_exponent_mismatch(a) > 0 for a in (0.5, 1, 3, 4))


@pytest.mark.parametrize("n", [2, 3, 5])
def test_metric_expansion(n):
    chk = geo.metric_expansion_check(n, 100, RandomSource(n))
    assert chk.passed
    assert np.all(chk.constants[:, 0] < 10)


def test_dynamics_distortion():
    assert geo.dynamics_distortion(2.0, 3, 50, RandomSource(0)) < 1e-9
    hits = sum(geo.dynamics_distortion(3.0, 3, 50, RandomSource(s)) > 1e-4 for s in range(50))
    assert hits >= 45
    assert geo.dynamics_distortion(3.0, 3, 50, RandomSource(0), tangent=np.zeros(3)) == 0
