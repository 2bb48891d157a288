"""Hyperbolic-triangle picture of qubit fidelities.

A Bloch vector ``n`` is read as a relativistic velocity with rapidity
``phi = atanh|n|``.  Two states ``u``, ``v`` span a hyperbolic triangle
with sides ``phi_u``, ``phi_v`` and ``phi_w`` (``w`` the Einstein sum); the
Bures fidelity is ``cosh^2(phi_w/2) / (cosh phi_u cosh phi_v)`` and the
A-fidelity is that times ``cos^2(delta/2)``, ``delta`` the triangle defect.

Rapidities diverge at ``|n| = 1``, so the geometric routes reject
``|n| > 1 - 1e-12``.  The ``closed_form_*`` functions depend only on
``|u|``, ``|v|`` and ``u . v`` and remain finite on pure states.

The array-level helpers (``*_from_invariants``) take norms and dot
products, which makes them valid for generalized Bloch vectors of any
length as well; only for qubits do they coincide with the matrix
fidelities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimMismatch, DomainError, PureStateSingularity
from .states import BlochVector

SINGULARITY_MARGIN = 1e-12
ANGLE_TOL = 1e-12
TRIANGLE_TOL = 1e-12


class Rapidity(float):
    """A non-negative finite hyperbolic angle."""

    def __new__(cls, value):
        value = float(value)
        if not np.isfinite(value) or value < 0:
            raise ValueError(f"rapidity must be finite and >= 0, got {value!r}")
        return super().__new__(cls, value)


def _coords(x) -> tuple[np.ndarray, int | None]:
    if isinstance(x, BlochVector):
        return x.coords, x.dim
    return np.asarray(x, dtype=float), None


def invariants(u, v):
    """Return ``(|u|, |v|, u . v)`` for two Bloch vectors of equal dimension."""
    cu, du = _coords(u)
    cv, dv = _coords(v)
    if du is not None and dv is not None and du != dv:
        raise DimMismatch(du, dv)
    if cu.shape[-1] != cv.shape[-1]:
        raise DimMismatch(cu.shape[-1], cv.shape[-1])
    return np.linalg.norm(cu, axis=-1), np.linalg.norm(cv, axis=-1), np.sum(cu * cv, axis=-1)


def _check_open_ball(*norms):
    for nrm in norms:
        worst = np.max(nrm)
        if worst > 1 - SINGULARITY_MARGIN:
            raise PureStateSingularity(float(worst))


def _one_minus_sq(x):
    """``sqrt(1 - x^2)`` without cancellation near x = 1."""
    x = np.asarray(x, dtype=float)
    return np.sqrt(np.clip((1.0 - x) * (1.0 + x), 0.0, None))


def _lorentz_factor(x):
    return 1.0 / _one_minus_sq(x)


def _cos_angle(nu, nv, dot):
    """``u_hat . v_hat`` with the convention 1 when either vector is zero."""
    nu, nv, dot = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (nu, nv, dot)))
    degenerate = (nu == 0) | (nv == 0)
    denom = np.where(degenerate, 1.0, nu * nv)
    c = np.where(degenerate, 1.0, dot / denom)
    if np.any(np.abs(c) > 1 + ANGLE_TOL):
        raise DomainError(f"|u_hat . v_hat| = {np.max(np.abs(c))!r} exceeds 1")
    return np.clip(c, -1.0, 1.0)


def rapidity_of(n) -> Rapidity:
    norm = float(np.linalg.norm(_coords(n)[0]))
    _check_open_ball(norm)
    return Rapidity(np.arctanh(norm))


def cosine_law_cosh_w(phi_u, phi_v, cos_angle):
    """``cosh phi_u cosh phi_v (1 + cos_angle tanh phi_u tanh phi_v)``."""
    cos_angle = np.asarray(cos_angle, dtype=float)
    if np.any(np.abs(cos_angle) > 1 + ANGLE_TOL):
        raise DomainError(f"cos_angle {cos_angle!r} outside [-1, 1]")
    cos_angle = np.clip(cos_angle, -1.0, 1.0)
    pu, pv = np.asarray(phi_u, dtype=float), np.asarray(phi_v, dtype=float)
    value = np.cosh(pu) * np.cosh(pv) * (1.0 + cos_angle * np.tanh(pu) * np.tanh(pv))
    return np.maximum(value, 1.0) if value.ndim else float(max(value, 1.0))


def cos_half_defect_from_sides(phi_u, phi_v, phi_w):
    """``(1 + cosh u + cosh v + cosh w) / (4 cosh(u/2) cosh(v/2) cosh(w/2))``."""
    cu, cv, cw = np.cosh(phi_u), np.cosh(phi_v), np.cosh(phi_w)
    return _cos_half_from_cosh(cu, cv, cw)


def _cos_half_from_cosh(cu, cv, cw):
    half = lambda c: np.sqrt(0.5 * (1.0 + c))  # noqa: E731
    return (1.0 + cu + cv + cw) / (4.0 * half(cu) * half(cv) * half(cw))


def _cosh_sides(nu, nv, dot):
    cu, cv = _lorentz_factor(nu), _lorentz_factor(nv)
    cw = np.maximum(cu * cv * (1.0 + _cos_angle(nu, nv, dot) * nu * nv), 1.0)
    return cu, cv, cw


def cos_half_defect_from_invariants(nu, nv, dot):
    """Triangle route to ``cos(delta/2)`` for open-ball vectors (array-aware)."""
    _check_open_ball(nu, nv)
    return np.minimum(_cos_half_from_cosh(*_cosh_sides(nu, nv, dot)), 1.0)


def geometric_bures_from_invariants(nu, nv, dot):
    _check_open_ball(nu, nv)
    cu, cv, cw = _cosh_sides(nu, nv, dot)
    return 0.5 * (1.0 + cw) / (cu * cv)


def geometric_a_fidelity_from_invariants(nu, nv, dot):
    return geometric_bures_from_invariants(nu, nv, dot) * cos_half_defect_from_invariants(nu, nv, dot) ** 2


@dataclass(frozen=True)
class HyperbolicTriangle:
    """Sides (as rapidities) and half-defect cosine of the fidelity triangle."""

    phi_u: Rapidity
    phi_v: Rapidity
    phi_w: Rapidity
    cos_half_defect: float

    def __post_init__(self):
        for name in ("phi_u", "phi_v", "phi_w"):
            object.__setattr__(self, name, Rapidity(getattr(self, name)))
        if self.phi_w > self.phi_u + self.phi_v + TRIANGLE_TOL:
            raise ValueError("side lengths violate the triangle inequality")
        if not 0 < self.cos_half_defect <= 1:
            raise ValueError(f"cos(delta/2) = {self.cos_half_defect!r} outside (0, 1]")
        expected = float(cos_half_defect_from_sides(self.phi_u, self.phi_v, self.phi_w))
        if abs(min(expected, 1.0) - self.cos_half_defect) > TRIANGLE_TOL:
            raise ValueError("cos(delta/2) inconsistent with the side lengths")

    @property
    def cos2_half_defect(self) -> float:
        return self.cos_half_defect**2

    @property
    def defect(self) -> float:
        return 2.0 * float(np.arccos(self.cos_half_defect))


def triangle_of(u, v) -> HyperbolicTriangle:
    nu, nv, dot = invariants(u, v)
    _check_open_ball(nu, nv)
    cu, cv, cw = _cosh_sides(nu, nv, dot)
    cos_half = float(np.minimum(_cos_half_from_cosh(cu, cv, cw), 1.0))
    return HyperbolicTriangle(np.arctanh(nu), np.arctanh(nv), np.arccosh(cw), cos_half)


def einstein_add(u, v) -> BlochVector:
    """Einstein velocity sum ``u (+) v`` (not commutative)."""
    cu, du = _coords(u)
    cv, dv = _coords(v)
    nu, nv, dot = invariants(u, v)
    _check_open_ball(nu, nv)
    gamma = float(_lorentz_factor(nu))
    w = (cu + cv / gamma + gamma / (1.0 + gamma) * dot * cu) / (1.0 + dot)
    return BlochVector(w, du or dv or 2)


def geometric_bures(u, v) -> float:
    return float(geometric_bures_from_invariants(*invariants(u, v)))


def geometric_a_fidelity(u, v) -> float:
    return float(geometric_a_fidelity_from_invariants(*invariants(u, v)))


def _check_norms(*norms):
    for x in norms:
        x = np.asarray(x, dtype=float)
        if np.any(x < 0) or np.any(x > 1 + ANGLE_TOL):
            raise DomainError(f"Bloch norm {x!r} outside [0, 1]")


def closed_form_bures(abs_u, abs_v, dot_uv):
    """``(1 + u.v + sqrt(1-|u|^2) sqrt(1-|v|^2)) / 2``; valid on pure states."""
    _check_norms(abs_u, abs_v)
    dot_uv = np.asarray(dot_uv, dtype=float)
    if np.any(np.abs(dot_uv) > np.asarray(abs_u) * np.asarray(abs_v) + ANGLE_TOL):
        raise DomainError("|u . v| exceeds |u| |v|")
    value = 0.5 * (1.0 + dot_uv + _one_minus_sq(abs_u) * _one_minus_sq(abs_v))
    return float(value) if value.ndim == 0 else value


def closed_form_cos2_half_defect(fid_b, abs_u, abs_v):
    """``cos^2(delta/2)`` from the Bures fidelity and the two Bloch norms.

    ``[2F + su + sv]^2 / (4 (1 + su)(1 + sv) F)`` with ``s = sqrt(1 - |n|^2)``.
    """
    _check_norms(abs_u, abs_v)
    fid_b = np.asarray(fid_b, dtype=float)
    if np.any(fid_b <= 0):
        raise DomainError("Bures fidelity must be positive")
    if np.any(fid_b > 1 + 1e-9):
        raise DomainError(f"Bures fidelity {np.max(fid_b)!r} exceeds 1")
    su, sv = _one_minus_sq(abs_u), _one_minus_sq(abs_v)
    value = (2.0 * fid_b + su + sv) ** 2 / (4.0 * (1.0 + su) * (1.0 + sv) * fid_b)
    return float(value) if value.ndim == 0 else value


def defect_quadratic_f(x, abs_u, abs_v):
    """The quadratic whose sign on [0, 1] decides ``F_B <= cos^2(delta/2)``.

    With ``a = sqrt(1 - |u|^2)`` and ``b = sqrt(1 - |v|^2)``:
    ``4[(1+a)(1+b) - 1] x^2 - 4(a+b) x - (a+b)^2``.
    """
    _check_norms(abs_u, abs_v)
    a, b = _one_minus_sq(abs_u), _one_minus_sq(abs_v)
    x = np.asarray(x, dtype=float)
    value = 4.0 * ((1.0 + a) * (1.0 + b) - 1.0) * x**2 - 4.0 * (a + b) * x - (a + b) ** 2
    return float(value) if value.ndim == 0 else value


def bures_range(abs_u, abs_v):
    """Attainable ``(min, max)`` of F_B at fixed Bloch norms."""
    _check_norms(abs_u, abs_v)
    prod = np.asarray(abs_u) * np.asarray(abs_v)
    ss = _one_minus_sq(abs_u) * _one_minus_sq(abs_v)
    return 0.5 * (1.0 - prod + ss), 0.5 * (1.0 + prod + ss)


def qubit_sqrt(n) -> np.ndarray:
    """Closed-form ``sqrt(rho(n))`` through the rapidity of ``n``."""
    coords = _coords(n)[0]
    phi = float(rapidity_of(coords))
    norm = float(np.linalg.norm(coords))
    direction = coords / norm if norm > 0 else np.zeros(3)
    pref = np.cosh(phi / 2) / np.sqrt(2 * np.cosh(phi))
    return pref * (np.eye(2) + linalg.dot_sigma(direction) * np.tanh(phi / 2))


def trace_sqrt_product(u, v) -> float:
    """``Tr(sqrt(rho_u) sqrt(rho_v))`` in rapidity form."""
    nu, nv, dot = invariants(u, v)
    _check_open_ball(nu, nv)
    pu, pv = np.arctanh(nu), np.arctanh(nv)
    cos_angle = _cos_angle(nu, nv, dot)
    pref = np.cosh(pu / 2) * np.cosh(pv / 2) / np.sqrt(np.cosh(pu) * np.cosh(pv))
    return float(pref * (1.0 + cos_angle * np.tanh(pu / 2) * np.tanh(pv / 2)))
