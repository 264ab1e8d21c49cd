"""Command line entry point.

    capacitylab verify <suite> [--n N] [--m M] [--samples S] [--seed K]
                               [--alpha A] [--out PATH] [--format json|csv]
    capacitylab capacity table [--out PATH]
    capacitylab walkthrough [--out PATH]

Exit status: 0 all checks pass, 1 some check failed, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import capacity, dynamics, mub
from .errors import UnknownSuite
from .reports import RunManifest, reports_to_csv, reports_to_json
from .statecore import Basis, affinities, make_state
from .suites import SUITES, run_checks

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def run_suite(suite: str, manifest: RunManifest, extra_checks=()) -> int:
    """Run ``suite``, write its reports per ``manifest``; return exit status."""
    try:
        reports = run_checks(suite, manifest, extra_checks)
    except UnknownSuite:
        print(f"unknown suite {suite!r}; choose from {', '.join(SUITES + ('all',))}", file=sys.stderr)
        return EXIT_USAGE
    text = reports_to_csv(reports) if manifest.format == "csv" else reports_to_json(reports)
    try:
        _write(text, manifest.out)
    except OSError as exc:
        print(f"cannot write report: {exc}", file=sys.stderr)
        return EXIT_USAGE
    failed = [r for r in reports if not r.passed]
    for r in failed:
        print(f"FAIL {r.check_name} {json.dumps(r.params, sort_keys=True)}: value={r.value!r} {r.comparator} {r.bound!r}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def qutrit_walkthrough() -> tuple[str, dict]:
    """The N = 3 worked example as text and a JSON-ready record."""
    fam = mub.mub_family(3)
    budget = capacity.bit_budget(3, 3)
    aff = affinities(make_state([1, 1, 1]), Basis.computational(3))
    ev = dynamics.cyclic_generator(3).eigenvalues()
    ev = sorted(ev, key=lambda z: np.angle(z) % (2 * np.pi))
    record = {
        "n": 3,
        "mub_count": len(fam),
        "mub_max_deviation": mub.verify_unbiased(fam),
        "available_bits": budget.available_bits,
        "required_bits_m3": budget.combinatorial_bits,
        "deficit_bits": budget.combinatorial_bits - budget.available_bits,
        "equal_superposition_affinities": [float(p) for p in aff],
        "cyclic_eigenvalues": [[float(z.real), float(z.imag)] for z in ev],
    }
    lines = [
        "Qutrit (N = 3)",
        f"  mutually unbiased bases: {record['mub_count']}",
        f"  capacity: {budget.combinatorial_bits:.2f} > {budget.available_bits:.2f} bits"
        " (three contexts need 2*log2(3), the system holds log2(3))",
        "  equal superposition affinities: (" + ", ".join(f"{p:.6f}" for p in aff) + ")",
        "  cyclic shift eigenvalues: "
        + ", ".join(f"exp(2 pi i*{k}/3)" for k in range(3))
        + " = "
        + ", ".join(f"{z.real:+.4f}{z.imag:+.4f}i" for z in ev),
    ]
    return "\n".join(lines) + "\n", record


def _cmd_verify(args) -> int:
    if args.inject_failure:
        extra = [lambda man, rec: rec.add("injected.failure", {}, 1.0, 0.0, "≤", 0.0)]
    else:
        extra = []
    manifest = RunManifest(
        seed=args.seed,
        suites=(args.suite,),
        out=args.out,
        format=args.format,
        n=args.n,
        m=args.m,
        samples=args.samples,
        alpha=args.alpha,
        timing=args.timing,
    )
    return run_suite(args.suite, manifest, extra)


def _cmd_capacity(args) -> int:
    ns = args.ns or [2, 4, 8, 16]
    if any(n < 2 for n in ns):
        print("all N must be >= 2", file=sys.stderr)
        return EXIT_USAGE
    try:
        _write(capacity.deficit_table_csv(capacity.deficit_table(ns)), args.out)
    except OSError as exc:
        print(f"cannot write table: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def _cmd_walkthrough(args) -> int:
    text, record = qutrit_walkthrough()
    sys.stdout.write(text)
    if args.out:
        try:
            Path(args.out).write_text(json.dumps(record, indent=2) + "\n", encoding="utf-8")
        except OSError as exc:
            print(f"cannot write report: {exc}", file=sys.stderr)
            return EXIT_USAGE
    ok = record["mub_count"] == 4 and math.isclose(record["deficit_bits"], math.log2(3), abs_tol=1e-12)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="capacitylab", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=SUITES + ("all",))
    v.add_argument("--n", type=int)
    v.add_argument("--m", type=int)
    v.add_argument("--samples", type=int)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--alpha", type=float)
    v.add_argument("--out")
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.add_argument("--timing", action="store_true", help="record wall-clock runtime_ms (output no longer byte-stable)")
    v.add_argument("--inject-failure", action="store_true", help=argparse.SUPPRESS)
    v.set_defaults(func=_cmd_verify)

    c = sub.add_parser("capacity", help="bit-budget table")
    c.add_argument("what", choices=("table",))
    c.add_argument("--ns", type=int, nargs="+")
    c.add_argument("--out")
    c.set_defaults(func=_cmd_capacity)

    w = sub.add_parser("walkthrough", help="qutrit worked example")
    w.add_argument("--out")
    w.set_defaults(func=_cmd_walkthrough)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
