import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from capacitylab import composition as comp
from capacitylab.errors import DimensionMismatch, DimensionTooLarge, NotUnbiased, OutOfRange
from capacitylab.mub import mub_family
from capacitylab.statecore import Basis, RandomSource, basis_state, haar_random_state, kernel, make_state


def test_tensor_basis_product():
    s = comp.tensor_state(basis_state(2, 0), basis_state(2, 1))
    assert np.array_equal(s.joint.coeffs, basis_state(4, 1).coeffs)
    assert comp.tensor_state(basis_state(3, 0), basis_state(5, 0)).dim == 15


def test_bell_is_entangled():
    assert comp.bell_state().schmidt_rank() == 2
    assert np.allclose(comp.bell_state().schmidt_coefficients(), 1 / math.sqrt(2))
    rng = RandomSource(0)
    assert comp.tensor_state(haar_random_state(2, rng), haar_random_state(2, rng)).schmidt_rank() == 1


def test_kernel_compose_examples():
    for y in (0.0, 0.3, 1.0):
        assert comp.kernel_compose(0, y) == y
    assert comp.kernel_compose(1, 0.3) == 1
    with pytest.raises(OutOfRange):
        comp.kernel_compose(1.2, 0)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_kernel_compose_algebra(x, y, z):
    f = comp.kernel_compose
    assert abs(f(x, y) - f(y, x)) < 1e-12
    assert abs(f(f(x, y), z) - f(x, f(y, z))) < 1e-12
    assert 0 <= f(x, y) <= 1


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 3)])
def test_product_factorization(dims):
    assert comp.product_kernel_deviation(comp.kernel_compose, RandomSource(1), 300, dims) < 1e-12


def test_product_factorization_explicit():
    # oracle: |<x|y>|^2 |<u|v>|^2 built directly
    rng = RandomSource(2)
    for _ in range(100):
        x, y, u, v = (haar_random_state(2, rng) for _ in range(4))
        joint = 1 - abs(np.vdot(np.kron(x.coeffs, u.coeffs), np.kron(y.coeffs, v.coeffs))) ** 2
        assert abs(joint - comp.kernel_compose(kernel(x, y), kernel(u, v))) < 1e-12


def test_composition_law_rejects_max():
    rep = comp.composition_law_tests(1000, RandomSource(3))
    assert rep.passed
    assert rep.candidate_rejected and rep.candidate_max_product_dev > 0.01


@pytest.mark.parametrize(
    "na,nb,field,expected",
    [(2, 2, "complex", (16, 16)), (2, 2, "real", (9, 10)), (2, 3, "complex", (36, 36)), (3, 3, "complex", (81, 81))],
)
def test_local_tomography(na, nb, field, expected):
    assert comp.local_tomography_rank(na, nb, field) == expected


@pytest.mark.parametrize("na,nb", list(itertools.product(range(2, 5), repeat=2)))
def test_tomography_dichotomy(na, nb):
    r, full = comp.local_tomography_rank(na, nb, "complex")
    assert r == full
    r, full = comp.local_tomography_rank(na, nb, "real")
    assert r == na * (na + 1) // 2 * nb * (nb + 1) // 2 < full


def test_tomography_bounds():
    with pytest.raises(DimensionTooLarge):
        comp.local_tomography_rank(5, 2)


def test_chsh_tsirelson_point():
    assert abs(comp.chsh_value(comp.bell_state(), comp.TSIRELSON_ANGLES) - 2 * math.sqrt(2)) < 1e-10


def test_bell_correlator_closed_form():
    # for (e00 + e11)/sqrt2 with real rotations E(a, b) = cos 2(a - b)
    for a, b in [(0, 0), (0.3, -0.2), (1.0, 0.4)]:
        assert abs(comp.correlator(comp.bell_state(), a, b) - math.cos(2 * (a - b))) < 1e-12


def test_chsh_random_sweep_ceiling():
    rng = RandomSource(4)
    worst = 0.0
    for _ in range(2000):
        s = comp.CompositeState((2, 2), haar_random_state(4, rng))
        worst = max(worst, abs(comp.chsh_value(s, rng.uniform(0, np.pi, 4))))
    assert worst <= 2 * math.sqrt(2) + 1e-9


def test_chsh_product_grid():
    s = comp.tensor_state(basis_state(2, 0), basis_state(2, 0))
    assert comp.chsh_grid_max(s, 10) <= 2 + 1e-9


def test_chsh_deterministic():
    vals = [comp.chsh_deterministic(t) for t in itertools.product((1, -1), repeat=4)]
    assert max(abs(v) for v in vals) == 2


def test_chsh_dimension():
    with pytest.raises(DimensionMismatch):
        comp.chsh_value(comp.tensor_state(basis_state(3, 0), basis_state(2, 0)), comp.TSIRELSON_ANGLES)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_measurement_affinities(n):
    assert comp.measurement_model(n).calibration_deviation() < 1e-12
    rng = RandomSource(n)
    for _ in range(100):
        psi = haar_random_state(n, rng)
        _, aff = comp.measurement_interaction(psi, n)
        assert np.max(np.abs(aff - psi.probabilities)) < 1e-12
        assert abs(aff.sum() - 1) < 1e-12


def test_measurement_examples():
    _, aff = comp.measurement_interaction(basis_state(3, 2))
    assert np.allclose(aff, [0, 0, 1], atol=1e-12)
    _, aff = comp.measurement_interaction(make_state([1, 1, 1]))
    assert np.allclose(aff, 1 / 3, atol=1e-12)


def test_no_cloning_gap():
    assert comp.no_cloning_gap(0) == 0
    assert comp.no_cloning_gap(1) == 0
    assert comp.no_cloning_gap(0.5) == 0.25


@pytest.mark.parametrize("n", [2, 3, 5])
def test_entropic_uncertainty(n):
    fam = mub_family(n)
    b1, b2 = fam[0], fam[1]
    total, bound = comp.entropic_uncertainty_check(b1[0], b1, b2)
    assert abs(total - bound) < 1e-12
    rng = RandomSource(10 + n)
    worst = min(comp.entropic_uncertainty_check(haar_random_state(n, rng), b1, b2)[0] for _ in range(300))
    assert worst >= math.log2(n) - 1e-9


def test_entropic_requires_unbiased():
    b = Basis.computational(3)
    with pytest.raises(NotUnbiased):
        comp.entropic_uncertainty_check(basis_state(3, 0), b, b)


def test_capacity_dilution():
    d = comp.capacity_dilution(2, 1)
    assert d.n_eff == 2 and not d.nontrivial_dynamics
    d = comp.capacity_dilution(2, 5)
    assert d.n_eff == 10 and abs(d.delta_phi_degrees - 36) < 1e-12
    assert comp.capacity_dilution(2, 2).nontrivial_dynamics
