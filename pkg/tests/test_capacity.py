import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from capacitylab import capacity as cap
from capacitylab.errors import InvalidParameters, Overflow


def test_qutrit_budget():
    b = cap.bit_budget(3, 3)
    assert abs(b.combinatorial_bits - 2 * math.log2(3)) < 1e-12
    assert b.combinatorial_bits > b.available_bits
    assert round(b.combinatorial_bits, 2) == 3.17 and round(b.available_bits, 2) == 1.58


def test_small_budgets():
    assert cap.bit_budget(4, 2).kolmogorov_bits == 3
    assert cap.bit_budget(4, 2).available_bits == 2
    b = cap.bit_budget(2, 2)
    assert b.kolmogorov_bits == 1 and b.available_bits == 1
    with pytest.raises(InvalidParameters):
        cap.bit_budget(1, 3)


def test_table_rows():
    rows = cap.deficit_table()
    assert [(r.N, r.available, r.kolmogorov_at_M2, r.combinatorial_at_M3) for r in rows] == [
        (2, 1.0, 1, 2.0),
        (4, 2.0, 3, 4.0),
        (8, 3.0, 7, 6.0),
        (16, 4.0, 15, 8.0),
    ]
    assert [r.feasible_flag for r in rows] == [True, False, False, False]


def test_table_csv():
    text = cap.deficit_table_csv(cap.deficit_table())
    assert text.splitlines() == [
        "N,available,kolm_M2,comb_M3,feasible",
        "2,1.0,1,2.0,true",
        "4,2.0,3,4.0,false",
        "8,3.0,7,6.0,false",
        "16,4.0,15,8.0,false",
    ]


def test_feasibility_examples():
    f = cap.determinism_infeasible(3, 3)
    assert f.infeasible and abs(f.margin - math.log2(3)) < 1e-12
    f = cap.determinism_infeasible(2, 2, "kolmogorov")
    assert not f.infeasible and f.margin == 0
    f = cap.determinism_infeasible(4, 2, "kolmogorov")
    assert f.infeasible and f.margin == 1


def test_assignment_count():
    assert cap.assignment_count(3, 3) == 9
    assert cap.assignment_count(2, 2) == 2
    with pytest.raises(Overflow):
        cap.assignment_count(10, 25)


@given(st.integers(2, 12), st.integers(2, 6))
def test_enumeration_agreement(n, m):
    if n ** (m - 1) > 10**5:
        return
    assert cap.enumerate_assignments(n, m) == cap.assignment_count(n, m)
    assert cap.assignment_count(n, m) == len(list(itertools.product(range(n), repeat=m - 1)))


@pytest.mark.parametrize("m", [3, 4, 7])
def test_margin_monotone(m):
    margins = [cap.determinism_infeasible(n, m).margin for n in range(3, 65)]
    assert all(b > a for a, b in zip(margins, margins[1:]))


def test_entrenchment_grows():
    ratios = [cap.entrenchment_ratio(n) for n in range(3, 65)]
    assert all(b > a for a, b in zip(ratios, ratios[1:]))


def test_ks_bits_is_accounting():
    assert cap.ks_bits(18, 4).infeasible
    assert not cap.ks_bits(1, 2).infeasible
