"""Command-line front end: suite sweeps over parameter grids with
deterministic JSON-lines and CSV reports.

Exit codes: 0 all hard assertions pass, 1 theorem-level violation,
2 undecided interval verdicts remain at maximum precision, 3 usage or
parse errors.  Reports are byte-deterministic for a fixed configuration:
rows are sorted, JSON keys are sorted, and randomized batteries run from
fixed seeds.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .cyclicbar import connes_factor_bar, connes_factor_small, ty_agreement_check
from .errors import CuspkError, TheoremViolation
from .polytopelab import (DEFAULT_PRECISION, FAILS_CANDIDATE, HOLDS,
                          MAX_PRECISION, UNDECIDED, run_conjecture_checks)
from .semigroup import (Params, TruncationSet, divide_set, ell, is_member,
                        truncation_S)
from .simplicialx import (DEFAULT_BUDGET, conjecture_b_homology_check,
                          fixed_point_check)
from .wittlab import (GhostWittElement, ghost, relative_k_group, unghost,
                      witt_F, witt_V, witt_mul)

SCHEMA = "cuspk.report/1"
SUITES = ("semigroup", "witt", "kgroups", "prop51", "conjB", "conjC", "all")
DEFAULT_PAIRS = ((2, 3), (2, 5), (3, 4), (3, 5))
ROW_FIELDS = ("suite", "a", "b", "m", "p", "q", "statement", "result")


@dataclass(frozen=True)
class SuiteConfig:
    pairs: tuple
    m_max: int | None
    primes: tuple
    r_max: int
    precision_bits: int
    budget: int
    out: str
    jobs: int


def _row(suite, statement, result, a=None, b=None, m=None, p=None, q=None,
         details=None):
    return {"schema": SCHEMA, "suite": suite, "a": a, "b": b, "m": m, "p": p,
            "q": q, "statement": statement, "result": result,
            "details": details or {}}


def _row_key(row):
    def k(v):
        return (v is None, v)

    return (row["suite"], k(row["a"]), k(row["b"]), k(row["m"]), k(row["p"]),
            k(row["q"]), row["statement"])


# ---------------------------------------------------------------------------
# suite cells; each returns a list of rows and never raises


def _cell_semigroup(a, b, m_max, r_max):
    pr = Params(a, b)
    rows = []
    for m in range(1, m_max + 1):
        interior = sum(1 for i in range(1, m // a + 1)
                       for j in range(1, m // b + 1) if a * i + b * j == m)
        member = any((m - a * i) % b == 0 for i in range(m // a + 1))
        rows.append(_row("semigroup", "interior-count",
                         "pass" if ell(pr, m) == interior else "fail",
                         a=a, b=b, m=m))
        rows.append(_row("semigroup", "membership",
                         "pass" if is_member(pr, m) == member else "fail",
                         a=a, b=b, m=m))
    for r in range(r_max + 1):
        S = truncation_S(pr, r)
        want = {
            "card-S": ((a + 1) * (b + 1)) // 2 - 1 + r * a * b,
            "card-S-div-a": (r + 1) * b,
            "card-S-div-b": (r + 1) * a,
            "card-S-div-ab": r + 1,
        }
        got = {
            "card-S": len(S),
            "card-S-div-a": len(divide_set(S, a)),
            "card-S-div-b": len(divide_set(S, b)),
            "card-S-div-ab": len(divide_set(S, a * b)),
        }
        for stmt in want:
            rows.append(_row("semigroup", stmt,
                             "pass" if got[stmt] == want[stmt] else "fail",
                             a=a, b=b, q=r,
                             details={"expected": want[stmt], "got": got[stmt]}))
    return rows


def _divisors_set(n):
    return TruncationSet(d for d in range(1, n + 1) if n % d == 0)


def _witt_scale(k, x):
    return unghost(x.S, {n: k * v for n, v in ghost(x).items()})


def _rand_elt(rng, S):
    return GhostWittElement.of(S, {n: rng.randint(-3, 3) for n in S})


def _cell_ghost_identities(cases):
    rng = random.Random(20240811)
    S = _divisors_set(24)
    half = {n: divide_set(S, n) for n in (2, 3, 4, 6, 8, 12, 24)}
    failures = {key: 0 for key in
                ("frobenius-composition", "verschiebung-composition",
                 "frobenius-verschiebung", "coprime-commutation",
                 "projection-formula")}
    pairs = [(2, 3), (2, 2), (3, 4), (2, 12), (4, 6), (2, 4)]
    for _ in range(cases):
        for nm in pairs:
            n, m = nm
            x = _rand_elt(rng, S)
            if witt_F(half[n], m, witt_F(S, n, x)) != witt_F(S, n * m, x):
                failures["frobenius-composition"] += 1
            y = _rand_elt(rng, half[n * m])
            lhs = witt_V(S, n, witt_V(half[n], m, y))
            if lhs != witt_V(S, n * m, y):
                failures["verschiebung-composition"] += 1
        n = rng.choice([2, 3, 4, 6, 8, 12])
        y = _rand_elt(rng, half[n])
        if witt_F(S, n, witt_V(S, n, y)) != _witt_scale(n, y):
            failures["frobenius-verschiebung"] += 1
        z = _rand_elt(rng, half[3])
        one_way = witt_F(S, 2, witt_V(S, 3, z))
        other = witt_V(half[2], 3, witt_F(half[3], 2, z))
        if one_way != other:
            failures["coprime-commutation"] += 1
        n = rng.choice([2, 3, 4, 6])
        x, y = _rand_elt(rng, S), _rand_elt(rng, half[n])
        if witt_mul(x, witt_V(S, n, y)) != witt_V(S, n, witt_mul(witt_F(S, n, x), y)):
            failures["projection-formula"] += 1
    return [_row("witt", stmt, "pass" if bad == 0 else "fail",
                 details={"cases": cases, "failures": bad})
            for stmt, bad in sorted(failures.items())]


def _cell_kgroups(a, b, prime, r_max):
    rows = []
    for r in range(r_max + 1):
        q = 2 * r
        try:
            res = relative_k_group(Params(a, b), prime, q)
        except (TheoremViolation, CuspkError) as exc:
            rows.append(_row("kgroups", "k-group", "fail", a=a, b=b, p=prime,
                             q=q, details={"error": str(exc)}))
            continue
        factors = ",".join(str(v) for v in res.invariant_factors) or "0"
        rows.append(_row("kgroups", "k-group", factors, a=a, b=b, p=prime, q=q,
                         details={"length": res.length,
                                  "expected_length": res.expected_length,
                                  "perfect_field_only": res.perfect_field_only}))
    return rows


def _cell_prop51(a, b, m):
    pr = Params(a, b)
    rows = []
    try:
        agreed = ty_agreement_check(pr, m)
        rows.append(_row("prop51", "triple-agreement", "pass", a=a, b=b, m=m,
                         details={"homology": str(agreed)}))
    except TheoremViolation as exc:
        rows.append(_row("prop51", "triple-agreement", "fail", a=a, b=b, m=m,
                         details={"error": str(exc)}))
    if m % a and m % b:
        try:
            factors = {"bar": connes_factor_bar(pr, m),
                       "small": connes_factor_small(pr, m)}
            rows.append(_row("prop51", "connes-factor", "pass", a=a, b=b, m=m,
                             details=factors))
        except TheoremViolation as exc:
            rows.append(_row("prop51", "connes-factor", "fail", a=a, b=b, m=m,
                             details={"error": str(exc)}))
    return rows


def _cell_conjb(a, b, m, budget):
    pr = Params(a, b)
    rows = []
    try:
        rep = conjecture_b_homology_check(pr, m, budget)
        rows.append(_row("conjB", "homology-evidence",
                         "agree" if rep.agree else "MISMATCH", a=a, b=b, m=m,
                         details={"x": str(rep.x_summary),
                                  "y": str(rep.y_summary)}))
    except TheoremViolation as exc:
        rows.append(_row("conjB", "homology-evidence", "fail", a=a, b=b, m=m,
                         details={"error": str(exc)}))
    for s in range(1, m + 1):
        if m % s:
            continue
        try:
            fixed_point_check(pr, m, s, budget)
            rows.append(_row("conjB", f"fixed-points/s={s}", "pass",
                             a=a, b=b, m=m))
        except TheoremViolation as exc:
            rows.append(_row("conjB", f"fixed-points/s={s}", "fail",
                             a=a, b=b, m=m, details={"error": str(exc)}))
    return rows


def _cell_conjc(a, b, m, precision):
    pr = Params(a, b)
    regime = "theorem" if ell(pr, m) <= 1 else "open"
    rows = []
    for stmt, verdict in sorted(run_conjecture_checks(pr, m, precision,
                                                      cap=MAX_PRECISION).items()):
        details = {"precision_bits": verdict.precision_bits, "regime": regime}
        if verdict.status != HOLDS:
            details["witness"] = verdict.witness
        rows.append(_row("conjC", stmt, verdict.status, a=a, b=b, m=m,
                         details=details))
    return rows


_CELLS = {
    "semigroup": _cell_semigroup,
    "ghost": _cell_ghost_identities,
    "kgroups": _cell_kgroups,
    "prop51": _cell_prop51,
    "conjb": _cell_conjb,
    "conjc": _cell_conjc,
}


def _run_cell(task):
    name, kwargs = task
    return _CELLS[name](**kwargs)


def _build_tasks(suite, cfg: SuiteConfig):
    tasks = []
    if suite in ("semigroup", "all"):
        for a, b in cfg.pairs:
            tasks.append(("semigroup", {"a": a, "b": b,
                                        "m_max": cfg.m_max or 5 * a * b,
                                        "r_max": cfg.r_max}))
    if suite in ("witt", "all"):
        tasks.append(("ghost", {"cases": 40}))
    if suite in ("kgroups", "all"):
        for a, b in cfg.pairs:
            for prime in cfg.primes:
                tasks.append(("kgroups", {"a": a, "b": b, "prime": prime,
                                          "r_max": cfg.r_max}))
    if suite in ("prop51", "all"):
        for a, b in cfg.pairs:
            for m in range(1, (cfg.m_max or 12) + 1):
                tasks.append(("prop51", {"a": a, "b": b, "m": m}))
    if suite in ("conjB", "all"):
        for a, b in cfg.pairs:
            for m in range(1, (cfg.m_max or 12) + 1):
                tasks.append(("conjb", {"a": a, "b": b, "m": m,
                                        "budget": cfg.budget}))
    if suite in ("conjC", "all"):
        for a, b in cfg.pairs:
            for m in range(1, (cfg.m_max or 2 * a * b) + 1):
                tasks.append(("conjc", {"a": a, "b": b, "m": m,
                                        "precision": cfg.precision_bits}))
    return tasks


def _write_reports(rows, out_dir, prefix="report"):
    os.makedirs(out_dir, exist_ok=True)
    jsonl = os.path.join(out_dir, f"{prefix}.jsonl")
    with open(jsonl, "w", encoding="utf-8", newline="") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True, separators=(",", ":")))
            fh.write("\n")
    digest = os.path.join(out_dir, f"{prefix}.csv")
    with open(digest, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ROW_FIELDS)
        for row in rows:
            writer.writerow(["" if row[f] is None else row[f]
                             for f in ROW_FIELDS])
    return jsonl, digest


def _aggregate_exit(rows):
    hard_fail = any(r["result"] == "fail" for r in rows)
    theorem_candidate = any(
        r["result"] == FAILS_CANDIDATE
        and r["details"].get("regime") == "theorem" for r in rows)
    if hard_fail or theorem_candidate:
        return 1
    if any(r["result"] == UNDECIDED for r in rows):
        return 2
    return 0


def cmd_verify(suite, cfg: SuiteConfig) -> int:
    tasks = _build_tasks(suite, cfg)
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            batches = list(pool.map(_run_cell, tasks))
    else:
        batches = [_run_cell(t) for t in tasks]
    rows = sorted((r for batch in batches for r in batch), key=_row_key)
    jsonl, digest = _write_reports(rows, cfg.out)
    for row in rows:
        if row["result"] == "MISMATCH":
            print(f"FINDING: homology mismatch at (a,b,m)="
                  f"({row['a']},{row['b']},{row['m']}): {row['details']}")
        elif row["result"] == FAILS_CANDIDATE:
            print(f"CANDIDATE: {row['statement']} at (a,b,m)="
                  f"({row['a']},{row['b']},{row['m']}): see {jsonl}")
    code = _aggregate_exit(rows)
    counts = {}
    for row in rows:
        bucket = {"fail": "fail", "MISMATCH": "mismatch",
                  UNDECIDED: "undecided",
                  FAILS_CANDIDATE: "candidate"}.get(row["result"], "ok")
        counts[bucket] = counts.get(bucket, 0) + 1
    summary = ", ".join(f"{k}={v}" for k, v in sorted(counts.items()))
    print(f"{suite}: {len(rows)} rows ({summary}) -> {jsonl}, {digest}")
    return code


def cmd_report(inputs, out_dir) -> int:
    merged = {}
    conflicts = []
    for path in inputs:
        try:
            fh = open(path, encoding="utf-8")
        except OSError as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            return 3
        with fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    row = json.loads(line)
                except json.JSONDecodeError as exc:
                    print(f"{path}:{lineno}: {exc}", file=sys.stderr)
                    return 3
                if not isinstance(row, dict) or any(
                        f not in row for f in ROW_FIELDS):
                    print(f"{path}:{lineno}: not a report row",
                          file=sys.stderr)
                    return 3
                key = _row_key(row)
                prev = merged.get(key)
                if prev is None:
                    merged[key] = row
                elif prev["result"] != row["result"]:
                    conflicts.append((row, prev["result"], row["result"]))
    rows = sorted(merged.values(), key=_row_key)
    jsonl, digest = _write_reports(rows, out_dir, prefix="merged")
    for row, first, second in conflicts:
        where = ",".join(f"{f}={row[f]}" for f in ("a", "b", "m", "p", "q")
                         if row.get(f) is not None)
        print(f"CONFLICT: {row['suite']}/{row['statement']} ({where}): "
              f"{first} vs {second}", file=sys.stderr)
    print(f"merged {len(rows)} rows -> {jsonl}, {digest}")
    return 1 if conflicts else 0


class _Parser(argparse.ArgumentParser):
    # usage errors exit 3 rather than argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(3)


def _build_parser() -> _Parser:
    parser = _Parser(prog="cuspk")
    sub = parser.add_subparsers(dest="command", required=True)
    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument("suite", choices=SUITES)
    ver.add_argument("--a", type=int, default=None)
    ver.add_argument("--b", type=int, default=None)
    ver.add_argument("--m-max", type=int, default=None)
    ver.add_argument("--p", type=int, action="append", default=None,
                     help="prime, repeatable; default 2 3 5 7")
    ver.add_argument("--r-max", type=int, default=3)
    ver.add_argument("--q-max", type=int, default=None,
                     help="cap on the K-group degree; overrides --r-max")
    ver.add_argument("--precision", type=int, default=DEFAULT_PRECISION)
    ver.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    ver.add_argument("--out", default=".")
    ver.add_argument("--jobs", type=int,
                     default=int(os.environ.get("CUSPK_JOBS", "1")))
    rep = sub.add_parser("report", help="merge verification reports")
    rep.add_argument("inputs", nargs="+")
    rep.add_argument("--out", default=".")
    return parser


def _config_from_args(parser, args) -> SuiteConfig:
    if (args.a is None) != (args.b is None):
        parser.error("--a and --b must be given together")
    if args.a is not None:
        try:
            Params(args.a, args.b)
        except ValueError as exc:
            parser.error(str(exc))
        pairs = ((args.a, args.b),)
    else:
        pairs = DEFAULT_PAIRS
    r_max = args.r_max
    if args.q_max is not None:
        if args.q_max < 0:
            parser.error("--q-max must be non-negative")
        r_max = args.q_max // 2
    if args.precision < 8:
        parser.error("--precision must be at least 8 bits")
    if args.budget < 2:
        parser.error("--budget must be positive")
    if args.jobs < 1:
        parser.error("--jobs must be at least 1")
    primes = tuple(args.p) if args.p else (2, 3, 5, 7)
    return SuiteConfig(pairs=pairs, m_max=args.m_max, primes=primes,
                       r_max=r_max, precision_bits=args.precision,
                       budget=args.budget, out=args.out, jobs=args.jobs)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        cfg = _config_from_args(parser, args)
        return cmd_verify(args.suite, cfg)
    return cmd_report(args.inputs, args.out)


if __name__ == "__main__":
    sys.exit(main())
