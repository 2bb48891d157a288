"""Run every verification experiment and write JSON reports plus a CSV summary.

    python scripts/run_experiments.py [--trials 100000] [--pairs 10000] [--out results/]

Bound and triangle runs use ``--trials``; Theorem 1 and sandwich runs use
``--pairs``.  Exit status is 1 if any report records a violation.
"""

import argparse
import sys
from pathlib import Path

from hyperfid import experiments
from hyperfid.metrics import MetricKind
from hyperfid.sampling import SamplerSpec


def plan(trials, pairs, seed):
    for dim in (2, 3, 4):
        yield f"bound_dim{dim}", lambda d=dim: experiments.run_bound_experiment(d, trials, SamplerSpec("hs", d, seed))
    for kind in MetricKind:
        for dim in (2, 3, 4):
            yield f"triangle_{kind.value}_dim{dim}", lambda k=kind, d=dim: experiments.run_triangle_experiment(
                k, d, trials, SamplerSpec("hs", d, seed)
            )
    yield "theorem1", lambda: experiments.run_theorem1_check(pairs, SamplerSpec("hs", 2, seed))
    for measure, dims in (("hs", (2, 3, 4)), ("haar-pure", (2, 3, 4)), ("bloch-uniform", (2,))):
        for dim in dims:
            yield f"sandwich_{measure}_dim{dim}", lambda m=measure, d=dim: experiments.run_sandwich_check(
                d, pairs, SamplerSpec(m, d, seed)
            )
    yield "limits", lambda: experiments.run_limit_scaling_check(pairs=min(pairs, 1000), seed=seed)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=experiments.DEFAULT_TRIALS)
    parser.add_argument("--pairs", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--out", type=Path, default=Path("results"))
    args = parser.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    reports = []
    for name, run in plan(args.trials, args.pairs, args.seed):
        report = run()
        (args.out / f"{name}.json").write_text(report.to_json())
        print(report.summary(), flush=True)
        reports.append(report)
    (args.out / "summary.csv").write_text(experiments.reports_to_csv(reports))
    return 0 if all(r.passed for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
