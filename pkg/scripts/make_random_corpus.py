"""Write random Horn-like problems in TPTP CNF syntax.

    python scripts/make_random_corpus.py OUTDIR [--count 100] [--seed 0] [--provable]

Problems use the predicates p, q, r, the function f and the constant c.
With ``--provable`` only problems the prover refutes are kept.
"""

import argparse
import random
from pathlib import Path

from parakeet.parser import parse_problem
from parakeet.pipeline import RunOptions, prove_problem
from parakeet.prover import ProverLimits


def term(rng, vs):
    t = rng.choice(list(vs) + ["c"])
    return f"f({t})" if rng.random() < 0.4 else t


def atom(rng, vs):
    return f"{rng.choice('pqr')}({term(rng, vs)})"


def problem(rng) -> str:
    lines = []
    for i in range(rng.randint(2, 6)):
        vs = ["X"] if rng.random() < 0.7 else ["X", "Y"]
        lits = [f"~{atom(rng, vs)}" for _ in range(rng.randint(0, 2))] + [atom(rng, vs)]
        if rng.random() < 0.2:
            lits.append(f"{term(rng, vs)} = {term(rng, vs)}")
        lines.append(f"cnf(h{i}, axiom, {' | '.join(lits)}).")
    lines.append(f"cnf(goal, negated_conjecture, ~{atom(rng, [])}).")
    return "\n".join(lines) + "\n"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("outdir")
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--provable", action="store_true")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    opts = RunOptions(ProverLimits(2000, 2))
    written = tries = 0
    while written < args.count and tries < 50 * args.count:
        tries += 1
        text = problem(rng)
        if args.provable and prove_problem(parse_problem(text), opts).proof is None:
            continue
        (out / f"random_{written:03d}.p").write_text(text, encoding="utf-8")
        written += 1
    print(f"wrote {written} problems to {out} ({tries} tried)")


if __name__ == "__main__":
    main()
