"""Dense complex linear algebra for small Hermitian matrices.

Every function accepts a single ``(n, n)`` matrix or a stack ``(..., n, n)``
and operates matrix-wise, so experiments can push 10^5 states through one
call.  The eigensolver is a cyclic complex Jacobi iteration; per-matrix
results do not depend on what else is in the stack.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ConvergenceError, DimMismatch, NotHermitian, NotPSD

HERMITIAN_TOL = 1e-9
NEGATIVE_EIG_TOL = 1e-10
JACOBI_TOL = 1e-13
MAX_SWEEPS = 100
# off-diagonal entries this small relative to the matrix norm are not rotated
_NEGLIGIBLE = 1e-30

# eigenvalues below this multiple of eps * n * max|eig| are indistinguishable
# from Jacobi round-off and are zeroed before square roots
_ROUNDOFF_FACTOR = 8.0

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
PAULI.setflags(write=False)


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues and the matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues[..., None, :]) @ adjoint(v)


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a complex128 array with square trailing axes."""
    a = np.asarray(m, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2] or a.shape[-1] < 1:
        raise ValueError(f"expected square matrix (or stack of them), got shape {a.shape}")
    return a


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def adjoint(m) -> np.ndarray:
    return np.conj(np.swapaxes(np.asarray(m), -1, -2))


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[-1] != b.shape[-1]:
        raise DimMismatch(a.shape[-1], b.shape[-1])
    return a @ b


def trace(m):
    """Sum of diagonal entries (complex); vectorised over stacks."""
    return np.trace(as_matrix(m), axis1=-2, axis2=-1)


def frobenius_norm(m):
    return np.sqrt(np.sum(np.abs(np.asarray(m)) ** 2, axis=(-2, -1)))


def max_asymmetry(m):
    """Largest entry of ``|m - m^H|`` per matrix."""
    m = as_matrix(m)
    return np.max(np.abs(m - adjoint(m)), axis=(-2, -1))


def check_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = as_matrix(m)
    asym = max_asymmetry(m)
    worst = float(np.max(asym))
    if not worst <= tol:
        raise NotHermitian(worst)
    return m


def _jacobi(a: np.ndarray, tol: float, max_sweeps: int):
    """Cyclic Jacobi on a stack ``(B, n, n)`` of Hermitian matrices.

    Each matrix converges when its off-diagonal Frobenius norm drops below
    ``tol`` times its full Frobenius norm; it then receives one more sweep
    and is frozen.  Frozen matrices see identity rotations, which leave
    them bitwise unchanged.
    """
    a = a.copy()
    nb, n, _ = a.shape
    v = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy()
    if n == 1:
        return a[:, :, 0].real.copy(), v

    offmask = ~np.eye(n, dtype=bool)
    scale = frobenius_norm(a)
    pairs = list(combinations(range(n), 2))
    active = np.ones(nb, dtype=bool)
    polished = np.zeros(nb, dtype=bool)

    for sweep in range(max_sweeps + 1):
        off = np.sqrt(np.sum(np.abs(a) ** 2 * offmask, axis=(1, 2)))
        converged = off <= tol * scale
        active &= ~(converged & polished)
        polished |= converged
        if not active.any():
            break
        if sweep == max_sweeps:
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps "
                f"(worst relative off-diagonal norm {np.max(off[active] / scale[active]):.3e})"
            )
        for p, q in pairs:
            apq = a[:, p, q]
            r = np.abs(apq)
            use = active & (r > _NEGLIGIBLE * scale)
            if not use.any():
                continue
            r_safe = np.where(use, r, 1.0)
            theta = (a[:, q, q].real - a[:, p, p].real) / (2.0 * r_safe)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            t = np.where(use, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            phase = np.where(use, (apq.real - 1j * apq.imag) / r_safe, 1.0)

            w = np.empty((nb, 2, 2), dtype=complex)
            w[:, 0, 0] = c
            w[:, 1, 0] = -s * phase
            w[:, 0, 1] = s
            w[:, 1, 1] = c * phase

            idx = [p, q]
            a[:, :, idx] = a[:, :, idx] @ w
            a[:, idx, :] = adjoint(w) @ a[:, idx, :]
            v[:, :, idx] = v[:, :, idx] @ w
            a[use, p, q] = 0.0
            a[use, q, p] = 0.0

    evals = np.diagonal(a, axis1=1, axis2=2).real.copy()
    order = np.argsort(evals, axis=1, kind="stable")
    evals = np.take_along_axis(evals, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    return evals, v


def hermitian_eig(m, tol: float = JACOBI_TOL, max_sweeps: int = MAX_SWEEPS) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix (or stack) by cyclic Jacobi.

    Raises
    ------
    NotHermitian
        If any entry of ``m - m^H`` exceeds 1e-9 in magnitude.
    ConvergenceError
        If a matrix is not diagonalised within ``max_sweeps`` sweeps.
    """
    m = check_hermitian(m)
    # symmetrise so round-off asymmetry does not leak into the rotations
    m = 0.5 * (m + adjoint(m))
    batch_shape, n = m.shape[:-2], m.shape[-1]
    evals, evecs = _jacobi(m.reshape(-1, n, n), tol, max_sweeps)
    return EigenDecomposition(evals.reshape(*batch_shape, n), evecs.reshape(*batch_shape, n, n))


def _roundoff_floor(evals: np.ndarray) -> np.ndarray:
    n = evals.shape[-1]
    top = np.max(np.abs(evals), axis=-1, keepdims=True)
    return _ROUNDOFF_FACTOR * n * np.finfo(float).eps * top


def psd_eigenvalues(evals: np.ndarray) -> np.ndarray:
    """Clamp eigenvalues of a PSD matrix for square-rooting.

    Values below -1e-10 raise :class:`NotPSD`.  Values in ``[-1e-10, 0]``
    and positive values at the round-off floor are set to zero.
    """
    evals = np.asarray(evals, dtype=float)
    lowest = float(np.min(evals)) if evals.size else 0.0
    if lowest < -NEGATIVE_EIG_TOL:
        raise NotPSD(lowest)
    return np.where(evals <= _roundoff_floor(evals), 0.0, evals)


def psd_sqrt(m) -> np.ndarray:
    """Hermitian positive square root of a PSD matrix (or stack)."""
    dec = hermitian_eig(m)
    roots = np.sqrt(psd_eigenvalues(dec.eigenvalues))
    v = dec.eigenvectors
    s = (v * roots[..., None, :]) @ adjoint(v)
    return 0.5 * (s + adjoint(s))


def sqrt_trace(m):
    """``Tr sqrt(m)`` for PSD ``m``, from its clamped eigenvalues."""
    evals = psd_eigenvalues(hermitian_eig(m).eigenvalues)
    return np.sum(np.sqrt(evals), axis=-1)


def trace_norm_hermitian(m):
    """Sum of absolute eigenvalues of a Hermitian matrix (or stack)."""
    return np.sum(np.abs(hermitian_eig(m).eigenvalues), axis=-1)


def dot_sigma(n) -> np.ndarray:
    """``sigma . n`` for a real 3-vector ``n`` (or a stack of them)."""
    n = np.asarray(n, dtype=float)
    return np.tensordot(n, PAULI, axes=([-1], [0]))
