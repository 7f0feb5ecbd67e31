"""Command-line interface: ``parakeet {prove,instantiate,replay,bench}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .clausify import ClausifyError
from .parser import ParseError, parse_file
from .pipeline import (
    BENCH_COLUMNS,
    RunOptions,
    RunReport,
    bench_row,
    prove_problem,
    run_instantiate,
    run_replay,
    summarize,
)
from .kernel import format_proof
from .prover import ArityClash, ProverLimits

EXIT = {"refutation": 0, "saturated": 1, "resource-out": 2}
INPUT_ERROR = 3
INPUT_ERRORS = (ParseError, ClausifyError, ArityClash, OSError, UnicodeDecodeError)
PROBLEM_SUFFIXES = (".p", ".tptp")


def _seed() -> int | None:
    raw = os.environ.get("PARAKEET_SEED")
    return int(raw) if raw not in (None, "") else None


def options_from(args) -> RunOptions:
    limits = ProverLimits(args.limit_clauses, args.limit_seconds, False, _seed())
    undefined = None if args.undefined is None else args.undefined == "on"
    return RunOptions(limits, args.lambda_mode, args.ext, undefined)


def _stats_line(stats) -> str:
    return f"generated: {stats.generated}  kept: {stats.kept}  elapsed: {stats.elapsed:.3f}s"


def cmd_prove(args) -> int:
    problem = parse_file(args.file)
    att = prove_problem(problem, options_from(args))
    if args.format == "json":
        report = RunReport(problem.name, att.status, stats=att.stats, ext_used=att.ext_used)
        if att.proof is not None:
            report.proof_text = format_proof(att.proof)
        print(json.dumps(report.to_json(), indent=2))
    else:
        print(f"outcome: {att.status}")
        print(_stats_line(att.stats))
        if att.ext_used:
            print("ext: injected")
        if att.proof is not None:
            print(format_proof(att.proof))
    return EXIT[att.status]


def _print_suggestions(report: RunReport) -> None:
    if report.outcome != "refutation":
        return
    if report.suggestions:
        for line in report.suggestions:
            print(line)
    else:
        print("no instantiations")
    for err in report.errors:
        print(f"warning: {err}")
    if report.steps_before is not None and report.steps_after is not None:
        verdict = "checks" if report.transform_ok else "FAILS the checker"
        free = "no Subst steps" if report.subst_free else "contains Subst steps"
        print(f"steps: {report.steps_before} -> {report.steps_after} (transformed proof {verdict}, {free})")


def cmd_instantiate(args) -> int:
    problem = parse_file(args.file)
    report, _ = run_instantiate(problem, options_from(args), with_proof=args.proof)
    if args.format == "json":
        print(json.dumps(report.to_json(), indent=2))
    else:
        print(f"outcome: {report.outcome}")
        print(_stats_line(report.stats))
        if args.proof and report.proof_text:
            print(report.proof_text)
        _print_suggestions(report)
    return EXIT[report.outcome]


def cmd_replay(args) -> int:
    problem = parse_file(args.file)
    report = run_replay(problem, options_from(args), with_proof=args.proof)
    if args.format == "json":
        print(json.dumps(report.to_json(), indent=2))
        return EXIT[report.outcome]
    print(f"outcome: {report.outcome}")
    if args.proof and report.proof_text:
        print(report.proof_text)
    _print_suggestions(report)
    if report.replay_outcome is None:
        for err in report.errors:
            if err.startswith("replay"):
                print(err)
        return EXIT[report.outcome]
    o, r = report.stats, report.replay_stats
    rows = [
        ("", "original", "replay"),
        ("outcome", report.outcome, report.replay_outcome),
        ("generated", str(o.generated), str(r.generated)),
        ("kept", str(o.kept), str(r.kept)),
        ("elapsed (s)", f"{o.elapsed:.4f}", f"{r.elapsed:.4f}"),
        ("ext", "yes" if report.ext_used else "no", "yes" if report.replay_ext_used else "no"),
    ]
    print(_table(rows))
    if report.replay_outcome != "refutation":
        print("replay failed")
    return EXIT[report.outcome]


def _table(rows) -> str:
    widths = [max(len(str(r[i])) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for r in rows:
        cells = [str(c).ljust(w) if i == 0 else str(c).rjust(w) for i, (c, w) in enumerate(zip(r, widths))]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)


def _bench_one(path: str, opts: RunOptions) -> dict:
    name = Path(path).name
    try:
        problem = parse_file(path)
        report = run_replay(problem, opts)
    except INPUT_ERRORS as exc:
        return bench_row(name, None, f"{type(exc).__name__}: {exc}")
    return bench_row(name, report)


def bench_files(directory) -> list[str]:
    d = Path(directory)
    if not d.is_dir():
        raise NotADirectoryError(f"not a directory: {directory}")
    return sorted(str(p) for p in d.iterdir() if p.suffix in PROBLEM_SUFFIXES)


def run_bench(directory, opts: RunOptions, jobs: int = 1) -> list[dict]:
    files = bench_files(directory)
    if jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_bench_one, files, [opts] * len(files)))
    return [_bench_one(f, opts) for f in files]


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def cmd_bench(args) -> int:
    try:
        rows = run_bench(args.dir, options_from(args), args.jobs)
    except NotADirectoryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    summary = summarize(rows)
    if args.csv:
        Path(args.csv).write_text(rows_to_csv(rows), encoding="utf-8")
    if args.format == "csv":
        sys.stdout.write(rows_to_csv(rows))
    elif args.format == "json":
        print(json.dumps({"rows": rows, "summary": summary}, indent=2))
    else:
        cols = ["problem", "outcome", "generated", "replay_outcome", "replay_generated", "steps_before", "steps_after", "subst_free", "error"]
        table = [cols] + [[str(r[c]) for c in cols] for r in rows]
        print(_table(table))
        print()
        for k, v in summary.items():
            print(f"{k}: {v}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--limit-clauses", type=int, default=20000, help="maximum generated clauses")
    common.add_argument("--limit-seconds", type=float, default=10.0, help="search time limit")
    common.add_argument("--lambda", dest="lambda_mode", choices=["lifting", "combinators"], default=None)
    common.add_argument("--ext", choices=["auto", "on", "off"], default=None)
    common.add_argument("--undefined", choices=["on", "off"], default=None)
    common.add_argument("--format", choices=["text", "csv", "json"], default="text")

    ap = argparse.ArgumentParser(prog="parakeet", description="Prove problems and suggest fact instantiations.")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("prove", parents=[common], help="search for a refutation and print the proof")
    p.add_argument("file")
    p.set_defaults(func=cmd_prove)
    p = sub.add_parser("instantiate", parents=[common], help="print instantiation suggestions")
    p.add_argument("file")
    p.add_argument("--proof", action="store_true", help="also print the proof")
    p.set_defaults(func=cmd_instantiate)
    p = sub.add_parser("replay", parents=[common], help="re-prove from the instantiated facts")
    p.add_argument("file")
    p.add_argument("--proof", action="store_true", help="also print the original proof")
    p.set_defaults(func=cmd_replay)
    p = sub.add_parser("bench", parents=[common], help="run the whole pipeline over a directory")
    p.add_argument("dir")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--csv", help="also write the per-problem CSV here")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
