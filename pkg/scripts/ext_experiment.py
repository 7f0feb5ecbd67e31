"""Compare search with and without the extensionality axiom.

    python scripts/ext_experiment.py [--limit-clauses 10000]

For each problem file the original problem and its instantiated replay are
searched with and without ``ext``; the table shows outcome and generated
clause counts.
"""

import argparse
from pathlib import Path

from parakeet.parser import parse_file
from parakeet.pipeline import RunOptions, attempt, instantiate_problem, run_instantiate
from parakeet.prover import ProverLimits

ROOT = Path(__file__).resolve().parent.parent
DEFAULT = ["surj_ext.p", "surj_ext_instantiated.p", "needs_ext.p", "surj_lambda.p"]


def cell(att):
    return f"{att.status} ({att.stats.generated})"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("files", nargs="*")
    ap.add_argument("--limit-clauses", type=int, default=10000)
    ap.add_argument("--limit-seconds", type=float, default=30.0)
    args = ap.parse_args()
    files = args.files or [str(ROOT / "corpus" / f) for f in DEFAULT]
    limits = ProverLimits(args.limit_clauses, args.limit_seconds)

    header = ("problem", "original", "original+ext", "replay", "replay+ext")
    rows = [header]
    for path in files:
        problem = parse_file(path)
        mode = problem.options.lambda_mode
        plain = attempt(problem, limits, False, mode)
        ext = attempt(problem, limits, True, mode)
        row = [problem.name, cell(plain), cell(ext), "-", "-"]
        report, att = run_instantiate(problem, RunOptions(limits=limits, ext="auto"))
        if att.proof is not None:
            replay = instantiate_problem(problem, report.instantiations)
            row[3] = cell(attempt(replay, limits, False, mode))
            row[4] = cell(attempt(replay, limits, True, mode))
        rows.append(row)
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    for r in rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)))


if __name__ == "__main__":
    main()
