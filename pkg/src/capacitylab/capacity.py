"""Bit budgets for deterministic outcome assignments.

A capacity-N system stores log2(N) bits. Pre-assigning outcomes across M
mutually unbiased contexts needs (M-1) log2(N) bits by counting
assignments, or (M-1)(N-1) bits by the incompressibility argument.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import InvalidParameters, Overflow

REAL_SLACK = 1e-9
ENUMERATION_LIMIT = 10**6
TABLE_HEADER = ("N", "available", "kolm_M2", "comb_M3", "feasible")


@dataclass(frozen=True)
class BitBudget:
    N: int
    M: int
    available_bits: float
    combinatorial_bits: float
    kolmogorov_bits: int


@dataclass(frozen=True)
class DeficitRow:
    N: int
    available: float
    kolmogorov_at_M2: int
    combinatorial_at_M3: float
    feasible_flag: bool


@dataclass(frozen=True)
class Feasibility:
    infeasible: bool
    margin: float  # required - available, bits


def _check(n: int, m: int) -> None:
    if n < 2 or m < 2:
        raise InvalidParameters(f"need N >= 2 and M >= 2, got N={n}, M={m}")


def bit_budget(n: int, m: int) -> BitBudget:
    _check(n, m)
    avail = math.log2(n)
    return BitBudget(n, m, avail, (m - 1) * avail, (m - 1) * (n - 1))


def _log2_exact(n: int) -> Fraction | None:
    # log2 N is rational only for powers of two
    if n & (n - 1) == 0:
        return Fraction(n.bit_length() - 1)
    return None


def determinism_infeasible(n: int, m: int, bound: str = "combinatorial") -> Feasibility:
    """True iff the required bits exceed log2 N; margin = required - available."""
    b = bit_budget(n, m)
    if bound == "kolmogorov":
        exact = _log2_exact(n)
        if exact is not None:
            diff = Fraction(b.kolmogorov_bits) - exact
            return Feasibility(diff > 0, float(diff))
        diff = b.kolmogorov_bits - b.available_bits
        return Feasibility(diff > 0, diff)
    if bound == "combinatorial":
        diff = b.combinatorial_bits - b.available_bits
        return Feasibility(diff > REAL_SLACK, diff)
    raise InvalidParameters(f"unknown bound {bound!r}")


def deficit_table(ns: Iterable[int] = (2, 4, 8, 16)) -> list[DeficitRow]:
    """Rows of available bits, Kolmogorov bound at M=2 and counting bound at
    M=3. ``feasible_flag`` marks rows where the M=2 assignment fits."""
    rows = []
    for n in ns:
        b2 = bit_budget(n, 2)
        b3 = bit_budget(n, 3)
        feasible = not determinism_infeasible(n, 2, "kolmogorov").infeasible
        rows.append(DeficitRow(n, b2.available_bits, b2.kolmogorov_bits, b3.combinatorial_bits, feasible))
    return rows


def _fmt(x: float) -> str:
    return f"{x:.1f}" if float(x).is_integer() else f"{x:.6f}"


def deficit_table_csv(rows: list[DeficitRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_HEADER)
    for r in rows:
        w.writerow([r.N, _fmt(r.available), r.kolmogorov_at_M2, _fmt(r.combinatorial_at_M3), str(r.feasible_flag).lower()])
    return buf.getvalue()


def assignment_count(n: int, m: int) -> int:
    """N^(M-1) outcome pre-assignments for the M-1 non-reference bases."""
    _check(n, m)
    count = n ** (m - 1)
    if count >= 2**63:
        raise Overflow(f"{n}^{m - 1} does not fit in a signed 64-bit integer")
    return count


def enumerate_assignments(n: int, m: int) -> int:
    """Brute-force count of maps from the M-1 extra bases to N outcomes."""
    _check(n, m)
    if n ** (m - 1) > ENUMERATION_LIMIT:
        raise InvalidParameters("enumeration limited to 10^6 assignments")
    return sum(1 for _ in itertools.product(range(n), repeat=m - 1))


def ks_bits(projectors: int, n: int) -> Feasibility:
    """One bit per projector of a Kochen-Specker set versus log2 N capacity."""
    if projectors < 1 or n < 2:
        raise InvalidParameters("need at least one projector and N >= 2")
    diff = projectors - math.log2(n)
    return Feasibility(diff > REAL_SLACK, diff)


def entrenchment_ratio(n: int) -> float:
    """Kolmogorov bits over available bits with all N + 1 MUBs in play."""
    b = bit_budget(n, n + 1)
    return b.kolmogorov_bits / b.available_bits
