"""Distances derived from the Bures fidelity and the A-fidelity."""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field

import numpy as np

from . import fidelity, linalg
from .errors import DimMismatch, DomainError
from .states import qubit_from_bloch

M2_DISTANCE = 1e-6
M2_FROBENIUS = 1e-4
M3_TOL = 1e-12


class MetricKind(str, enum.Enum):
    BURES_ANGLE = "bures-angle"
    BURES_METRIC = "bures-metric"
    GOLD_METRIC = "gold-metric"
    A_ANGLE = "a-angle"
    A_METRIC = "a-metric"
    AC_METRIC = "ac-metric"

    @property
    def uses_bures(self) -> bool:
        return self in (MetricKind.BURES_ANGLE, MetricKind.BURES_METRIC, MetricKind.GOLD_METRIC)

    @property
    def shape(self) -> str:
        """``"angle"``, ``"metric"`` or ``"gold"``: the function applied to F."""
        return {
            MetricKind.BURES_ANGLE: "angle",
            MetricKind.A_ANGLE: "angle",
            MetricKind.BURES_METRIC: "metric",
            MetricKind.A_METRIC: "metric",
            MetricKind.GOLD_METRIC: "gold",
            MetricKind.AC_METRIC: "gold",
        }[self]


def distance_from_fidelity(kind: MetricKind, fid):
    """``arccos sqrt F``, ``sqrt(2 - 2 sqrt F)`` or ``sqrt(1 - F)``."""
    kind = MetricKind(kind)
    f = np.asarray(fid, dtype=float)
    if np.any(f < 0) or np.any(f > 1) or np.any(np.isnan(f)):
        raise DomainError("fidelity outside [0, 1]")
    root = np.sqrt(f)
    if kind.shape == "angle":
        d = np.arccos(np.minimum(root, 1.0))
    elif kind.shape == "metric":
        d = np.sqrt(np.maximum(2.0 - 2.0 * root, 0.0))
    else:
        d = np.sqrt(1.0 - f)
    return float(d) if d.ndim == 0 else d


def _compare(a, b):
    """Per pair: ``(a > b lexicographically, a == b entrywise)``."""
    fa = np.stack([a.real, a.imag], axis=-1).reshape(*a.shape[:-2], -1)
    fb = np.stack([b.real, b.imag], axis=-1).reshape(*b.shape[:-2], -1)
    differ = fa != fb
    first = np.argmax(differ, axis=-1)
    pick = lambda f: np.take_along_axis(f, first[..., None], axis=-1)[..., 0]  # noqa: E731
    same = ~differ.any(axis=-1)
    return (pick(fa) > pick(fb)) & ~same, same


def _canonical_order(a, b, *extra):
    """Order every pair so ``a <= b``; returns the reordered arrays and the equality mask.

    Both fidelities are symmetric in exact arithmetic but not in floating
    point; evaluating every pair in a fixed order makes ``d(x, y)`` and
    ``d(y, x)`` bitwise equal.
    """
    swap, same = _compare(a, b)
    swap = swap[..., None, None]
    out = [np.where(swap, b, a), np.where(swap, a, b)]
    for p, q in extra:
        out += [np.where(swap, q, p), np.where(swap, p, q)]
    return out, same


def pair_fidelity(kind: MetricKind, r1, r2):
    """Fidelity underlying ``kind``, symmetric and exactly 1 on identical inputs."""
    a, b = linalg.as_matrix(r1), linalg.as_matrix(r2)
    if a.shape[-1] != b.shape[-1]:
        raise DimMismatch(a.shape[-1], b.shape[-1])
    (a, b), same = _canonical_order(a, b)
    fn = fidelity.bures_fidelity if MetricKind(kind).uses_bures else fidelity.a_fidelity
    f = np.where(same, 1.0, fn(a, b))
    return float(f) if f.ndim == 0 else f


def distance(kind: MetricKind, r1, r2):
    """Distance of the given kind between two states (or stacks of states)."""
    return distance_from_fidelity(kind, pair_fidelity(kind, r1, r2))


def triangle_slack(dxy, dxz, dyz):
    """Smallest triangle-inequality slack over the three labelings, and its argmin.

    Labeling 0 tests ``d(x,y) <= d(x,z) + d(y,z)``, 1 tests ``d(x,z)``
    and 2 tests ``d(y,z)`` as the long side.
    """
    slacks = np.stack(
        [dxz + dyz - dxy, dxy + dyz - dxz, dxy + dxz - dyz],
        axis=-1,
    )
    return slacks.min(axis=-1), slacks.argmin(axis=-1)


def triple_distances(kind: MetricKind, x, y, z):
    """``d(x,y), d(x,z), d(y,z)`` for stacks, bitwise equal to :func:`distance`.

    For the A-family each square root is computed once and shared.
    """
    kind = MetricKind(kind)
    if kind.uses_bures:
        return distance(kind, x, y), distance(kind, x, z), distance(kind, y, z)
    mats = [linalg.as_matrix(s) for s in (x, y, z)]
    roots = [linalg.psd_sqrt(m) for m in mats]
    out = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        (_, _, ri, rj), same = _canonical_order(mats[i], mats[j], (roots[i], roots[j]))
        f = np.where(same, 1.0, fidelity.a_fidelity_from_roots(ri, rj))
        out.append(distance_from_fidelity(kind, f))
    return tuple(out)


@dataclass
class AxiomReport:
    kind: str
    triples: int
    tol: float
    m1_violations: int = 0
    m2_violations: int = 0
    m3_violations: int = 0
    m4_violations: int = 0
    m4_marginal: int = 0
    min_slack: float | None = None
    worst_triple: int | None = None
    worst_labeling: int | None = None
    worst_case: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not (self.m1_violations or self.m2_violations or self.m3_violations or self.m4_violations)

    def to_dict(self) -> dict:
        return asdict(self)


def _as_triples(triples) -> np.ndarray:
    if isinstance(triples, np.ndarray):
        arr = linalg.as_matrix(triples)
    else:
        arr = np.array([[np.asarray(s, dtype=complex) for s in t] for t in triples])
    if arr.ndim != 4 or arr.shape[1] != 3:
        raise ValueError(f"expected triples of shape (T, 3, N, N), got {arr.shape}")
    return arr


def check_metric_axioms(kind: MetricKind, triples, tol: float = 1e-9) -> AxiomReport:
    """Count metric-axiom failures over a batch of state triples.

    M4 is checked under all three labelings and failures are slack below
    ``-tol``.  M2 is tested as a calibrated implication: a distance under
    1e-6 must come with a Frobenius distance under 1e-4, and ``d(x, x)``
    must itself be under 1e-6.
    """
    kind = MetricKind(kind)
    arr = _as_triples(triples)
    x, y, z = arr[:, 0], arr[:, 1], arr[:, 2]
    report = AxiomReport(kind.value, len(arr), tol)
    if len(arr) == 0:
        return report

    pairs = [(x, y), (x, z), (y, z)]
    forward = [distance(kind, p, q) for p, q in pairs]
    backward = [distance(kind, q, p) for p, q in pairs]
    selfd = [distance(kind, s, s) for s in (x, y, z)]

    bad_m1 = np.zeros(len(arr), dtype=bool)
    bad_m2 = np.zeros(len(arr), dtype=bool)
    bad_m3 = np.zeros(len(arr), dtype=bool)
    for (p, q), d, db in zip(pairs, forward, backward):
        bad_m1 |= d < 0
        close = d < M2_DISTANCE
        bad_m2 |= close & (linalg.frobenius_norm(p - q) >= M2_FROBENIUS)
        bad_m3 |= np.abs(d - db) > M3_TOL
    for d in selfd:
        bad_m2 |= d >= M2_DISTANCE

    slack, labeling = triangle_slack(*forward)
    report.m1_violations = int(bad_m1.sum())
    report.m2_violations = int(bad_m2.sum())
    report.m3_violations = int(bad_m3.sum())
    report.m4_violations = int(np.sum(slack < -tol))
    report.m4_marginal = int(np.sum((slack >= -tol) & (slack < 0)))
    worst = int(np.argmin(slack))
    report.min_slack = float(slack[worst])
    report.worst_triple = worst
    report.worst_labeling = int(labeling[worst])
    if report.m4_violations:
        m = arr[worst]
        report.worst_case = np.stack([m.real, m.imag], axis=-1).tolist()
    return report


def small_ball_limit_error(kind: MetricKind, u, v, eps: float) -> float:
    """``|d(rho(eps u), rho(eps v)) - eps |u - v| / 2|`` for qubit Bloch vectors."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if not 0 <= eps <= 1:
        raise DomainError(f"eps must lie in [0, 1], got {eps!r}")
    d = distance(kind, qubit_from_bloch(eps * u), qubit_from_bloch(eps * v))
    return abs(d - 0.5 * eps * float(np.linalg.norm(u - v)))
