"""Seeded randomized verification runs with machine-readable reports.

Each experiment evaluates one margin per trial (positive means the claimed
inequality or identity holds) and aggregates the margins with order-free
reductions, so the report is the same for any chunking or worker count.
Trial ``t`` of a pair experiment uses states ``2t`` and ``2t + 1`` of the
sampler stream; triple experiments use ``3t``, ``3t + 1``, ``3t + 2``.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial

import numpy as np

from . import fidelity, hyperbolic, metrics, states
from .errors import HyperfidError, InvalidSpec
from .metrics import MetricKind
from .sampling import Measure, SamplerSpec, bloch_ball_points, sample_states

DEFAULT_TOL = 1e-9
DEFAULT_TRIALS = 100_000
CHUNK = 4096
OPEN_BALL = 1 - hyperbolic.SINGULARITY_MARGIN
THEOREM1_MAX_NORM = 1 - 1e-6
MIN_FIDELITY_ORDER = 3.5

CSV_COLUMNS = ("name", "dim", "measure", "trials", "seed", "tol", "violations", "marginal", "min_margin", "elapsed_s")


class ExperimentError(HyperfidError, RuntimeError):
    def __init__(self, trial: int, cause: Exception):
        self.trial = trial
        super().__init__(f"trial {trial}: {type(cause).__name__}: {cause}")


@dataclass
class VariantReport:
    evaluated: int
    violations: int
    marginal: int
    min_margin: float | None
    worst_trial: int | None
    skipped: int = 0


@dataclass
class ExperimentReport:
    experiment_name: str
    dim: int
    trials: int
    seed: int
    measure: str
    tol: float
    violations: int
    marginal: int
    min_margin: float | None
    worst_case: dict | None = None
    variants: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    elapsed: float = field(default=0.0, compare=False)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self, include_timing: bool = False) -> dict:
        doc = _jsonable(asdict(self))
        if not include_timing:
            del doc["elapsed"]
        return doc

    def to_json(self, include_timing: bool = False) -> str:
        """Deterministic JSON; wall-clock time only when asked for."""
        return json.dumps(self.to_dict(include_timing), indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> ExperimentReport:
        doc = dict(doc)
        doc["variants"] = {k: VariantReport(**v) for k, v in doc.get("variants", {}).items()}
        return cls(**doc)

    def csv_row(self) -> dict:
        return {
            "name": self.experiment_name,
            "dim": self.dim,
            "measure": self.measure,
            "trials": self.trials,
            "seed": self.seed,
            "tol": repr(self.tol),
            "violations": self.violations,
            "marginal": self.marginal,
            "min_margin": "" if self.min_margin is None else repr(self.min_margin),
            "elapsed_s": f"{self.elapsed:.3f}",
        }

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        margin = "n/a" if self.min_margin is None else f"{self.min_margin:.3e}"
        return (
            f"{status} {self.experiment_name} dim={self.dim} measure={self.measure} trials={self.trials} "
            f"seed={self.seed} violations={self.violations} marginal={self.marginal} min_margin={margin}"
        )


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.csv_row())
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _matrix_doc(m) -> list:
    m = np.asarray(m)
    return np.stack([m.real, m.imag], axis=-1).tolist()


def _summarize(margins: np.ndarray, tol: float) -> VariantReport:
    valid = ~np.isnan(margins)
    evaluated = int(valid.sum())
    if evaluated == 0:
        return VariantReport(0, 0, 0, None, None, skipped=len(margins))
    filled = np.where(valid, margins, np.inf)
    worst = int(np.argmin(filled))
    return VariantReport(
        evaluated=evaluated,
        violations=int(np.sum(filled < -tol)),
        marginal=int(np.sum((filled >= -tol) & (filled < 0))),
        min_margin=float(filled[worst]),
        worst_trial=worst,
        skipped=len(margins) - evaluated,
    )


def _chunks(trials: int):
    return [np.arange(lo, min(lo + CHUNK, trials)) for lo in range(0, trials, CHUNK)]


def _evaluate(chunk_fn, trials: int, workers: int) -> dict:
    """Run ``chunk_fn`` over all trial indices and concatenate its outputs."""
    parts = _chunks(trials)
    if workers > 1 and len(parts) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(chunk_fn, parts))
    else:
        results = [chunk_fn(p) for p in parts]
    if not results:
        return {}
    return {k: np.concatenate([r[k] for r in results]) for k in results[0]}


def _safe(chunk_fn, idx):
    try:
        return chunk_fn(idx)
    except HyperfidError as exc:
        # locate the offending trial by re-running one at a time
        for t in idx:
            try:
                chunk_fn(np.array([t]))
            except HyperfidError as single:
                raise ExperimentError(int(t), single) from single
        raise ExperimentError(int(idx[0]), exc) from exc


def _resolve_spec(dim: int, spec: SamplerSpec | None) -> SamplerSpec:
    if spec is None:
        return SamplerSpec(Measure.HILBERT_SCHMIDT, dim)
    if spec.dim != dim:
        raise InvalidSpec(f"sampler dim {spec.dim} does not match experiment dim {dim}")
    return spec


def _pair_states(spec, idx):
    return sample_states(spec, 2 * idx), sample_states(spec, 2 * idx + 1)


def _triple_states(spec, idx):
    return tuple(sample_states(spec, 3 * idx + k) for k in range(3))


def _build_report(name, spec, trials, tol, margins, primary, states_fn, started, details=None):
    variants = {k: _summarize(v, tol) for k, v in margins.items()}
    head = variants[primary]
    worst_case = None
    if head.worst_trial is not None:
        t = head.worst_trial
        worst_case = {
            "trial": t,
            "variant": primary,
            "margin": head.min_margin,
            "states": [_matrix_doc(s[0]) for s in states_fn(np.array([t]))],
        }
    return ExperimentReport(
        experiment_name=name,
        dim=spec.dim,
        trials=trials,
        seed=spec.seed,
        measure=spec.measure.value,
        tol=tol,
        violations=head.violations,
        marginal=head.marginal,
        min_margin=head.min_margin,
        worst_case=worst_case,
        variants=variants if len(variants) > 1 else {},
        details=details or {},
        elapsed=time.perf_counter() - started,
    )


# --- upper bound F_B <= cos^2(delta/2) ------------------------------------


def bound_margins(a, b) -> dict:
    """``cos^2(delta/2) - F_B`` by the triangle route and by the closed form.

    The triangle route uses generalized Bloch norms and the angle between
    the vectors; it is undefined (NaN) when either state is pure.  The
    closed form uses the matrix Bures fidelity and the two norms.
    """
    fb = np.atleast_1d(fidelity.bures_fidelity(a, b))
    ma, mb = states.bloch_coords(a), states.bloch_coords(b)
    nu = np.minimum(np.linalg.norm(ma, axis=-1), 1.0)
    nv = np.minimum(np.linalg.norm(mb, axis=-1), 1.0)
    dot = np.sum(ma * mb, axis=-1)

    geometric = np.full(fb.shape, np.nan)
    open_ = (nu <= OPEN_BALL) & (nv <= OPEN_BALL)
    if open_.any():
        c = hyperbolic.cos_half_defect_from_invariants(nu[open_], nv[open_], dot[open_])
        geometric[open_] = c**2 - fb[open_]

    closed = np.full(fb.shape, np.nan)
    pos = fb > 0
    if pos.any():
        closed[pos] = np.atleast_1d(hyperbolic.closed_form_cos2_half_defect(fb[pos], nu[pos], nv[pos])) - fb[pos]
    return {"geometric": geometric, "closed-form": closed}


def _bound_chunk(spec, idx):
    return bound_margins(*_pair_states(spec, idx))


def _equality_cases() -> dict:
    """Qubit configurations where the bound is attained."""
    u = np.array([0.3, -0.4, 0.5])
    same = states.qubit_from_bloch(u)
    fb_same = fidelity.bures_fidelity(same, same)
    nu = float(np.linalg.norm(u))
    p = states.qubit_from_bloch([0.0, 0.0, 1.0])
    q = states.qubit_from_bloch([0.6, 0.0, 0.8])
    fb_pure = fidelity.bures_fidelity(p, q)
    return {
        "u_equals_v": hyperbolic.closed_form_cos2_half_defect(fb_same, nu, nu) - fb_same,
        "u_equals_v_geometric": float(hyperbolic.triangle_of(u, u).cos2_half_defect) - fb_same,
        "both_pure": hyperbolic.closed_form_cos2_half_defect(fb_pure, 1.0, 1.0) - fb_pure,
    }


def run_bound_experiment(
    dim: int, trials: int = DEFAULT_TRIALS, spec: SamplerSpec | None = None, tol: float = DEFAULT_TOL, workers: int = 1
) -> ExperimentReport:
    """Check ``F_B <= cos^2(delta/2)`` on random pairs.

    Violations are counted on the closed-form variant; the triangle-route
    variant is reported alongside, with pure draws counted as skipped.
    """
    started = time.perf_counter()
    spec = _resolve_spec(dim, spec)
    margins = _evaluate(partial(_safe, partial(_bound_chunk, spec)), trials, workers)
    if not margins:
        margins = {"geometric": np.empty(0), "closed-form": np.empty(0)}
    details = {"equality_cases": _equality_cases()} if dim == 2 else {}
    return _build_report("bound", spec, trials, tol, margins, "closed-form", partial(_pair_states, spec), started, details)


# --- triangle inequality ------------------------------------------------------


def triangle_margins(kind, x, y, z) -> np.ndarray:
    return metrics.triangle_slack(*metrics.triple_distances(kind, x, y, z))[0]


def _triangle_chunk(kind, spec, idx):
    return {"slack": np.atleast_1d(triangle_margins(kind, *_triple_states(spec, idx)))}


def run_triangle_experiment(
    kind: MetricKind,
    dim: int,
    trials: int = DEFAULT_TRIALS,
    spec: SamplerSpec | None = None,
    tol: float = DEFAULT_TOL,
    workers: int = 1,
) -> ExperimentReport:
    """Minimum triangle-inequality slack over all labelings of random triples."""
    started = time.perf_counter()
    kind = MetricKind(kind)
    spec = _resolve_spec(dim, spec)
    margins = _evaluate(partial(_safe, partial(_triangle_chunk, kind, spec)), trials, workers) or {"slack": np.empty(0)}
    return _build_report(
        f"triangle/{kind.value}", spec, trials, tol, margins, "slack", partial(_triple_states, spec), started,
        {"metric": kind.value},
    )


# --- Theorem 1: F_A = F_B cos^2(delta/2) ----------------------------------------


def _theorem1_states(spec, idx):
    """Qubit pairs with Bloch norms capped at 1 - 1e-6 (longer vectors are shrunk)."""
    out = []
    for rho in _pair_states(spec, idx):
        n = states.bloch_coords(rho)
        norm = np.linalg.norm(n, axis=-1, keepdims=True)
        n = np.where(norm > THEOREM1_MAX_NORM, n * (THEOREM1_MAX_NORM / np.maximum(norm, 1e-300)), n)
        out.append(states.density_from_coords(n, 2))
    return tuple(out)


def theorem1_margins(a, b) -> np.ndarray:
    """``-|F_A(matrix) - F_B cos^2(delta/2) (triangle)|``."""
    ma, mb = states.bloch_coords(a), states.bloch_coords(b)
    geometric = hyperbolic.geometric_a_fidelity_from_invariants(
        np.linalg.norm(ma, axis=-1), np.linalg.norm(mb, axis=-1), np.sum(ma * mb, axis=-1)
    )
    return -np.abs(np.atleast_1d(fidelity.a_fidelity(a, b)) - geometric)


def _theorem1_chunk(spec, idx):
    return {"sampled": theorem1_margins(*_theorem1_states(spec, idx))}


def _theorem1_fixed_cases() -> dict:
    cases = {
        "worked_pair": ([0.6, 0.0, 0.0], [0.0, 0.6, 0.0]),
        "collinear_pair": ([0.1, 0.2, -0.3], [-0.2, -0.4, 0.6]),
    }
    out = {}
    for name, (u, v) in cases.items():
        r1, r2 = states.qubit_from_bloch(u), states.qubit_from_bloch(v)
        out[name] = {
            "u": u,
            "v": v,
            "a_fidelity_matrix": fidelity.a_fidelity(r1, r2),
            "a_fidelity_geometric": hyperbolic.geometric_a_fidelity(u, v),
            "bures_fidelity_matrix": fidelity.bures_fidelity(r1, r2),
            "bures_fidelity_geometric": hyperbolic.geometric_bures(u, v),
        }
    return out


def run_theorem1_check(
    trials: int = 10_000, spec: SamplerSpec | None = None, tol: float = DEFAULT_TOL, workers: int = 1
) -> ExperimentReport:
    started = time.perf_counter()
    spec = _resolve_spec(2, spec)
    margins = _evaluate(partial(_safe, partial(_theorem1_chunk, spec)), trials, workers) or {"sampled": np.empty(0)}
    fixed = _theorem1_fixed_cases()
    report = _build_report(
        "theorem1", spec, trials, tol, margins, "sampled", partial(_theorem1_states, spec), started,
        {"fixed_cases": fixed, "max_norm": THEOREM1_MAX_NORM},
    )
    fixed_bad = sum(
        abs(c["a_fidelity_matrix"] - c["a_fidelity_geometric"]) > tol for c in fixed.values()
    ) + int(abs(fixed["collinear_pair"]["a_fidelity_matrix"] - fixed["collinear_pair"]["bures_fidelity_matrix"]) > tol)
    report.violations += fixed_bad
    report.details["fixed_case_violations"] = fixed_bad
    return report


# --- F_B^2 <= F_A <= F_B -------------------------------------------------------


def sandwich_margins(a, b) -> np.ndarray:
    fb = np.atleast_1d(fidelity.bures_fidelity(a, b))
    fa = np.atleast_1d(fidelity.a_fidelity(a, b))
    return np.minimum(fa - fb**2, fb - fa)


def _sandwich_chunk(spec, idx):
    return {"sandwich": sandwich_margins(*_pair_states(spec, idx))}


def run_sandwich_check(
    dim: int, trials: int = 10_000, spec: SamplerSpec | None = None, tol: float = DEFAULT_TOL, workers: int = 1
) -> ExperimentReport:
    started = time.perf_counter()
    spec = _resolve_spec(dim, spec)
    margins = _evaluate(partial(_safe, partial(_sandwich_chunk, spec)), trials, workers) or {"sandwich": np.empty(0)}
    return _build_report("sandwich", spec, trials, tol, margins, "sandwich", partial(_pair_states, spec), started)


# --- small Bloch ball limits -----------------------------------------------------


def limit_errors(u, v, eps: float) -> dict:
    """Deviations of both fidelities and all six distances from their small-ball limits."""
    delta = np.linalg.norm(u - v, axis=-1)
    r1 = states.density_from_coords(eps * u, 2)
    r2 = states.density_from_coords(eps * v, 2)
    fb = np.atleast_1d(metrics.pair_fidelity(MetricKind.BURES_ANGLE, r1, r2))
    fa = np.atleast_1d(metrics.pair_fidelity(MetricKind.A_ANGLE, r1, r2))
    limit_f = 1.0 - 0.25 * (eps * delta) ** 2
    out = {"bures-fidelity": np.abs(fb - limit_f), "a-fidelity": np.abs(fa - limit_f)}
    for kind in MetricKind:
        f = fb if kind.uses_bures else fa
        out[kind.value] = np.abs(metrics.distance_from_fidelity(kind, f) - 0.5 * eps * delta)
    return out


def run_limit_scaling_check(
    eps_ladder=(0.1, 0.05, 0.025), pairs: int = 1000, seed: int = 42, tol: float = DEFAULT_TOL
) -> ExperimentReport:
    """Convergence of fidelities and distances to their small-ball limits.

    Directions ``u``, ``v`` are uniform in the unit ball.  For each rung the
    largest error over all pairs is recorded; the fidelity convergence order
    between consecutive rungs must be at least 3.5, and each distance's
    largest deviation must strictly decrease down the ladder.  The margin
    is the smallest ``order - 3.5``.
    """
    started = time.perf_counter()
    ladder = [float(e) for e in eps_ladder]
    if len(ladder) < 2 or any(not 0 < e <= 0.5 for e in ladder) or any(a <= b for a, b in zip(ladder, ladder[1:])):
        raise InvalidSpec("eps ladder needs at least two strictly descending values in (0, 0.5]")
    idx = np.arange(pairs)
    u = bloch_ball_points(seed, 2 * idx)
    v = bloch_ball_points(seed, 2 * idx + 1)
    # coincident directions: every deviation must vanish
    u = np.vstack([u, [[0.3, 0.2, -0.1]]])
    v = np.vstack([v, [[0.3, 0.2, -0.1]]])

    per_rung = [limit_errors(u, v, e) for e in ladder]
    quantities = list(per_rung[0])
    worst = {q: [float(np.max(r[q][:-1])) if pairs else 0.0 for r in per_rung] for q in quantities}
    coincident = {q: [float(r[q][-1]) for r in per_rung] for q in quantities}

    orders = {}
    for q in ("bures-fidelity", "a-fidelity"):
        errs = worst[q]
        orders[q] = [
            float(np.log(errs[k] / errs[k + 1]) / np.log(ladder[k] / ladder[k + 1])) if errs[k + 1] > 0 else None
            for k in range(len(ladder) - 1)
        ]
    monotone = {
        kind.value: all(a > b for a, b in zip(worst[kind.value], worst[kind.value][1:])) for kind in MetricKind
    }

    checks = [o for q in orders.values() for o in q]
    violations = sum(o is None or o < MIN_FIDELITY_ORDER for o in checks)
    violations += sum(not ok for ok in monotone.values())
    violations += sum(any(e > tol for e in errs) for errs in coincident.values())
    finite = [o for o in checks if o is not None]
    min_margin = min(o - MIN_FIDELITY_ORDER for o in finite) if finite else None

    spec = SamplerSpec(Measure.BLOCH_UNIFORM, 2, seed)
    return ExperimentReport(
        experiment_name="limits",
        dim=2,
        trials=pairs,
        seed=seed,
        measure=spec.measure.value,
        tol=tol,
        violations=violations,
        marginal=0,
        min_margin=min_margin,
        details={
            "eps_ladder": ladder,
            "max_error": worst,
            "fidelity_order": orders,
            "distance_monotone": monotone,
            "coincident_error": coincident,
        },
        elapsed=time.perf_counter() - started,
    )


EXPERIMENTS = ("bound", "triangle", "theorem1", "sandwich", "limits")
