"""Density matrices, generalized Bloch vectors and SU(N) generator bases.

A qunit state is written as ``(1/N) [1 + sqrt(N(N-1)/2) lambda . m]`` with
generalized Gell-Mann generators normalised to ``Tr(l_a l_b) = 2 delta_ab``;
under this convention ``|m| <= 1`` for every state and ``|m| = 1`` exactly
for pure states.  For N = 2 the generators are the Pauli matrices and the
map reduces to ``(1 + sigma . n) / 2``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import linalg
from .errors import DimMismatch, InvalidDensityMatrix, InvalidDim, NormExceeded, NotPSD, StateFileError

TRACE_TOL = 1e-9
NORM_TOL = 1e-12


def validate_density(m) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity of a matrix or stack.

    Returns the matrix as a complex array.  Raises
    :class:`InvalidDensityMatrix` whose ``check`` attribute is one of
    ``"shape"``, ``"hermitian"``, ``"trace"`` or ``"positive"``.
    """
    try:
        m = linalg.as_matrix(m)
    except ValueError as exc:
        raise InvalidDensityMatrix("shape", str(exc)) from None
    if not np.all(np.isfinite(m)):
        raise InvalidDensityMatrix("shape", "non-finite entries")
    asym = float(np.max(linalg.max_asymmetry(m)))
    if asym > linalg.HERMITIAN_TOL:
        raise InvalidDensityMatrix("hermitian", f"max |m - m^H| = {asym:.3e}")
    tr_err = float(np.max(np.abs(linalg.trace(m) - 1.0)))
    if tr_err > TRACE_TOL:
        raise InvalidDensityMatrix("trace", f"|Tr m - 1| = {tr_err:.3e}")
    low = float(np.min(linalg.hermitian_eig(m).eigenvalues))
    if low < -linalg.NEGATIVE_EIG_TOL:
        raise InvalidDensityMatrix("positive", f"min eigenvalue = {low:.3e}")
    return m


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated N x N density matrix.  The stored array is read-only."""

    matrix: np.ndarray

    def __post_init__(self):
        m = validate_density(self.matrix)
        if m.ndim != 2:
            raise InvalidDensityMatrix("shape", f"expected a single matrix, got shape {m.shape}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


def bloch_length(dim: int) -> int:
    return dim * dim - 1


@dataclass(frozen=True, eq=False)
class BlochVector:
    """Real Bloch coordinates of an N-level state (length N^2 - 1)."""

    coords: np.ndarray
    dim: int = 2

    def __post_init__(self):
        c = np.array(self.coords, dtype=float)
        if self.dim < 2:
            raise InvalidDim(f"dimension must be >= 2, got {self.dim}")
        if c.shape != (bloch_length(self.dim),):
            raise ValueError(f"dim {self.dim} needs {bloch_length(self.dim)} coordinates, got shape {c.shape}")
        norm = float(np.linalg.norm(c))
        if norm > 1 + NORM_TOL:
            raise NormExceeded(norm, 1 + NORM_TOL)
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))

    def __array__(self, dtype=None, copy=None):
        return self.coords if dtype is None else self.coords.astype(dtype)

    def __repr__(self):
        return f"BlochVector({self.coords.tolist()!r}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class GeneratorBasis:
    dim: int
    generators: np.ndarray

    def __len__(self):
        return len(self.generators)


@lru_cache(maxsize=None)
def generator_basis(n: int) -> GeneratorBasis:
    """Generalized Gell-Mann matrices for SU(n).

    Ordering: symmetric ``E_jk + E_kj`` for ``j < k`` lexicographically,
    then antisymmetric ``-i E_jk + i E_kj`` in the same order, then the
    ``n - 1`` diagonal ones.  For n = 2 this gives sigma_x, sigma_y, sigma_z.
    """
    if int(n) != n or n < 2:
        raise InvalidDim(f"SU(N) generators need N >= 2, got {n}")
    n = int(n)
    pairs = [(j, k) for j in range(n) for k in range(j + 1, n)]
    gens = []
    for j, k in pairs:
        g = np.zeros((n, n), dtype=complex)
        g[j, k] = g[k, j] = 1
        gens.append(g)
    for j, k in pairs:
        g = np.zeros((n, n), dtype=complex)
        g[j, k] = -1j
        g[k, j] = 1j
        gens.append(g)
    for l in range(1, n):
        diag = np.zeros(n)
        diag[:l] = 1
        diag[l] = -l
        gens.append(np.diag(np.sqrt(2.0 / (l * (l + 1))) * diag).astype(complex))
    arr = np.array(gens)
    arr.setflags(write=False)
    return GeneratorBasis(n, arr)


def _basis_for(dim: int, basis: GeneratorBasis | None) -> GeneratorBasis:
    if basis is None:
        return generator_basis(dim)
    if basis.dim != dim:
        raise DimMismatch(basis.dim, dim)
    return basis


def _bloch_scale(dim: int) -> float:
    return np.sqrt(dim * (dim - 1) / 2.0)


def bloch_coords(matrices, basis: GeneratorBasis | None = None) -> np.ndarray:
    """Bloch coordinates ``m_a = sqrt(N / (2(N-1))) Tr(rho l_a)`` of a matrix stack."""
    m = linalg.as_matrix(matrices)
    dim = m.shape[-1]
    gens = _basis_for(dim, basis).generators
    # Tr(rho l_a) = sum_jk rho_jk (l_a)_kj
    overlaps = np.einsum("...jk,akj->...a", m, gens).real
    return overlaps * np.sqrt(dim / (2.0 * (dim - 1)))


def density_from_coords(coords, dim: int, basis: GeneratorBasis | None = None) -> np.ndarray:
    """Unvalidated forward map from Bloch coordinates to matrices (stack-aware)."""
    c = np.asarray(coords, dtype=float)
    gens = _basis_for(dim, basis).generators
    eye = np.eye(dim, dtype=complex)
    return (eye + _bloch_scale(dim) * np.tensordot(c, gens, axes=([-1], [0]))) / dim


def qubit_from_bloch(n) -> DensityMatrix:
    """``(1 + sigma . n) / 2`` for a 3-component Bloch vector."""
    if not isinstance(n, BlochVector):
        n = BlochVector(n, 2)
    if n.dim != 2:
        raise DimMismatch(n.dim, 2)
    return DensityMatrix(0.5 * (np.eye(2) + linalg.dot_sigma(n.coords)))


def qunit_from_bloch(m, basis: GeneratorBasis | None = None) -> DensityMatrix:
    """Density matrix of a qunit from its generalized Bloch vector.

    For N > 2 the unit ball contains points that are not states; those are
    rejected with :class:`NotPSD` rather than projected.
    """
    if not isinstance(m, BlochVector):
        raise TypeError("qunit_from_bloch needs a BlochVector (it carries the dimension)")
    rho = density_from_coords(m.coords, m.dim, basis)
    low = float(np.min(linalg.hermitian_eig(rho).eigenvalues))
    if low < -linalg.NEGATIVE_EIG_TOL:
        raise NotPSD(low)
    return DensityMatrix(rho)


def bloch_from_density(rho: DensityMatrix, basis: GeneratorBasis | None = None) -> BlochVector:
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    return BlochVector(bloch_coords(rho.matrix, basis), rho.dim)


def purity(rho) -> float:
    m = np.asarray(rho)
    return float(np.real(np.einsum("jk,kj->", m, m)))


def maximally_mixed(dim: int) -> DensityMatrix:
    return DensityMatrix(np.eye(dim) / dim)


def pure_state(psi) -> DensityMatrix:
    """Projector onto the normalised vector ``psi``."""
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return DensityMatrix(np.outer(psi, psi.conj()))


# --- state files --------------------------------------------------------


def parse_state(doc) -> DensityMatrix:
    """Build a state from a decoded state-file document.

    Accepted forms: ``{"dim": N, "matrix": [[[re, im], ...], ...]}`` or
    ``{"dim": N, "bloch": [x1, ...]}``, with exactly one of the two keys.
    """
    if not isinstance(doc, dict):
        raise StateFileError("state document must be a JSON object")
    keys = {"matrix", "bloch"} & doc.keys()
    if len(keys) != 1:
        raise StateFileError('state document needs exactly one of "matrix" or "bloch"')
    dim = doc.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 2:
        raise StateFileError(f'"dim" must be an integer >= 2, got {dim!r}')

    try:
        if "bloch" in doc:
            coords = np.asarray(doc["bloch"], dtype=float)
            if coords.shape != (bloch_length(dim),):
                raise StateFileError(f'"bloch" for dim {dim} needs {bloch_length(dim)} numbers, got shape {coords.shape}')
            vec = BlochVector(coords, dim)
            return qubit_from_bloch(vec) if dim == 2 else qunit_from_bloch(vec)

        entries = np.asarray(doc["matrix"], dtype=float)
        if entries.shape != (dim, dim, 2):
            raise StateFileError(f'"matrix" for dim {dim} must have shape ({dim}, {dim}, 2), got {entries.shape}')
        return DensityMatrix(entries[..., 0] + 1j * entries[..., 1])
    except (InvalidDensityMatrix, NormExceeded, NotPSD) as exc:
        raise StateFileError(str(exc)) from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, StateFileError):
            raise
        raise StateFileError(f"malformed state document: {exc}") from exc


def load_state(path) -> DensityMatrix:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise StateFileError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{path}: invalid JSON ({exc})") from exc
    return parse_state(doc)


def state_document(rho: DensityMatrix, form: str = "matrix") -> dict:
    """Inverse of :func:`parse_state`."""
    if form == "bloch":
        return {"dim": rho.dim, "bloch": bloch_coords(rho.matrix).tolist()}
    if form == "matrix":
        m = rho.matrix
        return {"dim": rho.dim, "matrix": np.stack([m.real, m.imag], axis=-1).tolist()}
    raise ValueError(f"unknown state form {form!r}")
