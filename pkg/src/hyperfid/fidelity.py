"""Matrix-form fidelities and distances.

All functions take :class:`~hyperfid.states.DensityMatrix` values or raw
arrays; stacks ``(..., N, N)`` are evaluated pairwise and return arrays.
Inputs given as raw arrays are assumed to be valid states.
"""

from __future__ import annotations

import numpy as np

from . import linalg
from .errors import ConsistencyError, DimMismatch, DomainError

CLAMP_TOL = 1e-9
G_TOL = 1e-12


def _pair(r1, r2):
    a, b = linalg.as_matrix(r1), linalg.as_matrix(r2)
    if a.shape[-1] != b.shape[-1]:
        raise DimMismatch(a.shape[-1], b.shape[-1])
    return a, b


def _scalar(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def clamp_unit(x, what: str = "fidelity"):
    """Clip into [0, 1], refusing to move a value by more than 1e-9."""
    x = np.asarray(x, dtype=float)
    excess = np.maximum(x - 1.0, -x)
    if np.any(excess > CLAMP_TOL) or np.any(np.isnan(x)):
        raise ConsistencyError(f"{what} outside [0, 1] beyond round-off: worst excess {np.nanmax(excess):.3e}")
    return np.clip(x, 0.0, 1.0)


def _hermitize(m):
    return 0.5 * (m + linalg.adjoint(m))


def bures_fidelity(r1, r2):
    """``[Tr sqrt(sqrt(r1) r2 sqrt(r1))]^2``."""
    a, b = _pair(r1, r2)
    s = linalg.psd_sqrt(a)
    inner = _hermitize(s @ b @ s)
    return _scalar(clamp_unit(linalg.sqrt_trace(inner) ** 2, "Bures fidelity"))


def a_fidelity(r1, r2):
    """``[Tr(sqrt(r1) sqrt(r2))]^2``, the A-fidelity (quantum affinity)."""
    a, b = _pair(r1, r2)
    return _scalar(a_fidelity_from_roots(linalg.psd_sqrt(a), linalg.psd_sqrt(b)))


def a_fidelity_from_roots(s1, s2):
    """A-fidelity from precomputed square roots (stack-aware, no scalar unwrapping)."""
    overlap = np.einsum("...jk,...kj->...", s1, s2).real
    return clamp_unit(overlap**2, "A-fidelity")


def trace_distance(r1, r2):
    a, b = _pair(r1, r2)
    return _scalar(0.5 * linalg.trace_norm_hermitian(_hermitize(a - b)))


def overlap_g(r1, r2):
    """``(N Tr(r1 r2) - 1) / (N - 1)``; the inner product of generalized Bloch vectors."""
    a, b = _pair(r1, r2)
    n = a.shape[-1]
    if n < 2:
        raise DomainError("overlap_g needs N >= 2")
    tr = np.einsum("...jk,...kj->...", a, b).real
    return _scalar((n * tr - 1.0) / (n - 1.0))


def _bloch_form(g11, g22, g12):
    g11, g22, g12 = (np.asarray(x, dtype=float) for x in (g11, g22, g12))
    slack = np.minimum(1.0 - g11, 1.0 - g22)
    if np.any(slack < -G_TOL):
        raise DomainError(f"self-overlap exceeds 1 by {-np.min(slack):.3e}; input is not a state")
    ca = 1.0 + np.sqrt(np.clip(1.0 - g11, 0.0, None))
    cb = 1.0 + np.sqrt(np.clip(1.0 - g22, 0.0, None))
    return (ca * cb + g12) ** 2 / (4.0 * ca * cb)


def alt_a_fidelity(r1, r2):
    """Alternative N-level A-fidelity built from the overlaps ``g``.

    Evaluates ``[(1+a)(1+b) + g12]^2 / (4 (1+a)(1+b))`` with
    ``a = sqrt(1 - g11)``, ``b = sqrt(1 - g22)``.  Coincides with
    :func:`a_fidelity` for qubits.
    """
    a, b = _pair(r1, r2)
    value = _bloch_form(overlap_g(a, a), overlap_g(b, b), overlap_g(a, b))
    return _scalar(clamp_unit(value, "alternative A-fidelity"))
