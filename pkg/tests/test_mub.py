import numpy as np
import pytest

from capacitylab.errors import UnsupportedDimension
from capacitylab.mub import MubFamily, mub_family, verify_unbiased
from capacitylab.statecore import Basis, RandomSource, haar_random_unitary


def test_qubit_family():
    fam = mub_family(2)
    assert len(fam) == 3
    # direct overlap oracle
    for i in range(3):
        for j in range(i + 1, 3):
            ov = np.abs(fam[i].matrix.conj().T @ fam[j].matrix) ** 2
            assert np.allclose(ov, 0.5, atol=1e-12)


def test_qutrit_has_four():
    assert len(mub_family(3)) == 4


@pytest.mark.parametrize("n", [4, 6, 9, 15, 67])
def test_unsupported(n):
    with pytest.raises(UnsupportedDimension):
        mub_family(n)


@pytest.mark.parametrize("n", [3, 5, 7, 11, 13, 17, 19, 23, 29, 31])
def test_prime_families(n):
    fam = mub_family(n)
    assert len(fam) == n + 1
    for b in fam:
        assert np.max(np.abs(b.matrix.conj().T @ b.matrix - np.eye(n))) < 1e-12
    assert verify_unbiased(fam) < 1e-12


def test_duplicate_bases_detected():
    b = Basis.computational(5)
    assert abs(verify_unbiased(MubFamily(5, (b, b))) - (1 - 1 / 5)) < 1e-15


def test_unitary_covariance():
    fam = mub_family(7)
    u = haar_random_unitary(7, RandomSource(1))
    assert verify_unbiased(fam.transformed(u)) < 1e-12
