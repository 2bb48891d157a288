"""Command-line front end.

    hyperfid fidelity STATE_A STATE_B [--format table|json|csv]
    hyperfid verify {bound,triangle,theorem1,sandwich,limits} [flags]

Exit status: 0 when every check passes, 1 when an experiment records a
violation, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import experiments, fidelity, hyperbolic, metrics, states
from .errors import HyperfidError
from .metrics import MetricKind
from .sampling import Measure, SamplerSpec

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2
PURE_NORM = 1 - hyperbolic.SINGULARITY_MARGIN


@dataclass
class CliConfig:
    subcommand: str
    inputs: tuple = ()
    experiment: str | None = None
    dim: int = 2
    trials: int = experiments.DEFAULT_TRIALS
    seed: int = 42
    measure: str = "hs"
    tolerance: float = experiments.DEFAULT_TOL
    format: str = "table"
    out: Path | None = None
    metric: str = MetricKind.A_ANGLE.value
    eps: tuple = (0.1, 0.05, 0.025)
    workers: int = 1
    timing: bool = False

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> CliConfig:
        return cls(
            subcommand=ns.command,
            inputs=tuple(getattr(ns, "states", ()) or ()),
            experiment=getattr(ns, "experiment", None),
            dim=ns.dim,
            trials=ns.trials,
            seed=ns.seed,
            measure=ns.measure,
            tolerance=ns.tolerance,
            format=ns.format,
            out=ns.out,
            metric=getattr(ns, "metric", MetricKind.A_ANGLE.value),
            eps=tuple(getattr(ns, "eps", (0.1, 0.05, 0.025))),
            workers=getattr(ns, "workers", 1),
            timing=getattr(ns, "timing", False),
        )


def _positive_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _eps_list(text):
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--dim", type=int, default=2)
    shared.add_argument("--trials", type=_positive_int, default=experiments.DEFAULT_TRIALS)
    shared.add_argument("--seed", type=_positive_int, default=42)
    shared.add_argument("--measure", choices=[m.value for m in Measure], default=Measure.HILBERT_SCHMIDT.value)
    shared.add_argument("--tolerance", type=float, default=experiments.DEFAULT_TOL)
    shared.add_argument("--format", choices=("table", "json", "csv"), default="table")
    shared.add_argument("--out", type=Path, default=None, help="write the report here")

    parser = argparse.ArgumentParser(prog="hyperfid", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    fid = sub.add_parser("fidelity", parents=[shared], help="fidelities and distances between two state files")
    fid.add_argument("states", nargs=2, metavar="STATE")

    ver = sub.add_parser("verify", parents=[shared], help="run a named randomized experiment")
    ver.add_argument("experiment", choices=experiments.EXPERIMENTS)
    ver.add_argument("--metric", choices=[k.value for k in MetricKind], default=MetricKind.A_ANGLE.value)
    ver.add_argument("--eps", type=_eps_list, default=(0.1, 0.05, 0.025), help="descending eps ladder for 'limits'")
    ver.add_argument("--workers", type=int, default=1)
    ver.add_argument("--timing", action="store_true", help="include wall-clock time in the JSON report")
    return parser


# --- fidelity -------------------------------------------------------------------


def fidelity_quantities(r1: states.DensityMatrix, r2: states.DensityMatrix) -> dict:
    """Everything ``hyperfid fidelity`` reports, as an ordered dict."""
    fb = metrics.pair_fidelity(MetricKind.BURES_ANGLE, r1, r2)
    fa = metrics.pair_fidelity(MetricKind.A_ANGLE, r1, r2)
    out = {
        "dim": r1.dim,
        "bures_fidelity": fb,
        "a_fidelity": fa,
        "alt_a_fidelity": fidelity.alt_a_fidelity(r1, r2),
        "trace_distance": fidelity.trace_distance(r1, r2),
    }
    for kind in MetricKind:
        out[kind.value.replace("-", "_")] = metrics.distance_from_fidelity(kind, fb if kind.uses_bures else fa)

    if r1.dim == 2:
        u, v = states.bloch_from_density(r1), states.bloch_from_density(r2)
        if max(u.norm, v.norm) <= PURE_NORM:
            tri = hyperbolic.triangle_of(u, v)
            out.update(
                phi_u=float(tri.phi_u),
                phi_v=float(tri.phi_v),
                phi_w=float(tri.phi_w),
                cos2_half_defect=tri.cos2_half_defect,
            )
    return out


def _render_quantities(values: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(values, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(values), lineterminator="\n")
        writer.writeheader()
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in values.items()})
        return buf.getvalue()
    width = max(len(k) for k in values)
    lines = [f"{k:<{width}}  {v:.12g}" if isinstance(v, float) else f"{k:<{width}}  {v}" for k, v in values.items()]
    return "\n".join(lines) + "\n"


def cmd_fidelity(cfg: CliConfig, stdout) -> int:
    r1, r2 = (states.load_state(p) for p in cfg.inputs)
    if r1.dim != r2.dim:
        print(f"error: DimMismatch: {cfg.inputs[0]} has dim {r1.dim}, {cfg.inputs[1]} has dim {r2.dim}", file=sys.stderr)
        return EXIT_USAGE
    text = _render_quantities(fidelity_quantities(r1, r2), cfg.format)
    if cfg.out is not None:
        cfg.out.write_text(text)
    stdout.write(text)
    return EXIT_OK


# --- verify ---------------------------------------------------------------------


def run_experiment(cfg: CliConfig) -> experiments.ExperimentReport:
    name = cfg.experiment
    if name == "limits":
        return experiments.run_limit_scaling_check(cfg.eps, cfg.trials, cfg.seed, cfg.tolerance)
    spec = SamplerSpec(Measure(cfg.measure), 2 if name == "theorem1" else cfg.dim, cfg.seed)
    kw = dict(trials=cfg.trials, spec=spec, tol=cfg.tolerance, workers=cfg.workers)
    if name == "bound":
        return experiments.run_bound_experiment(cfg.dim, **kw)
    if name == "triangle":
        return experiments.run_triangle_experiment(MetricKind(cfg.metric), cfg.dim, **kw)
    if name == "theorem1":
        return experiments.run_theorem1_check(**kw)
    if name == "sandwich":
        return experiments.run_sandwich_check(cfg.dim, **kw)
    raise ValueError(f"unknown experiment {name!r}")


def cmd_verify(cfg: CliConfig, stdout) -> int:
    report = run_experiment(cfg)
    if cfg.format == "csv":
        text = experiments.reports_to_csv([report])
    else:
        text = report.to_json(include_timing=cfg.timing)
    if cfg.out is not None:
        cfg.out.write_text(text)
    if cfg.format == "table":
        stdout.write(report.summary() + "\n")
    else:
        stdout.write(text)
    return EXIT_OK if report.passed else EXIT_VIOLATION


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    cfg = CliConfig.from_args(ns)
    try:
        if cfg.subcommand == "fidelity":
            return cmd_fidelity(cfg, stdout)
        return cmd_verify(cfg, stdout)
    except HyperfidError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
