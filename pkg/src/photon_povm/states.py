"""Gaussian photon states, generic momentum-space states and their symmetries.

Conventions (units hbar = 1, p0 = |p0|):

* A physical state is a pair of transverse components ``psi^i(p)``, i = 1, 2,
  on the intrinsic frame, square integrable with measure ``d^3p/|p|``.
* Its *spin amplitude* ``phi(p) = V sum_i psi^i(p) e_i(p) / sqrt(|p|)`` is a
  C^3-valued function normalised with the flat measure ``d^3p``; position
  space wavefunctions are its plain Fourier transform.
* Extended states are C^3-valued functions ``f(p)`` (spin basis, measure
  ``d^3p/|p|``) which need not be transverse.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import geometry as geo
from .errors import InvalidParam, VanishingProjection

EPS_PROJ = 1e-12
_NORM_TOL = 1e-12

Vec3 = np.ndarray


def _as_vec3(v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise InvalidParam(f"{name} must be a finite 3-vector")
    return v


def _unit(v, name: str) -> np.ndarray:
    v = _as_vec3(v, name)
    n = np.linalg.norm(v)
    if n == 0:
        raise InvalidParam(f"{name} must be nonzero")
    return v / n


def _check_width(a: float) -> float:
    a = float(a)
    if not np.isfinite(a) or a <= 0:
        raise InvalidParam(f"width parameter must be positive, got {a!r}")
    return a


def _coeffs(values, size: int, name: str) -> np.ndarray:
    c = np.asarray(values, dtype=complex).reshape(-1)
    if c.shape != (size,):
        raise InvalidParam(f"{name} must have {size} complex entries")
    if abs(np.vdot(c, c).real - 1.0) > _NORM_TOL:
        raise InvalidParam(f"{name} must be normalised, |{name}|^2 = {np.vdot(c, c).real!r}")
    return c


GAMMA_PLUS = np.array([1.0, 1.0j]) / np.sqrt(2.0)
GAMMA_MINUS = np.array([1.0, -1.0j]) / np.sqrt(2.0)


@dataclass(frozen=True)
class GaussianPolState:
    """Gaussian envelope times a constant polarisation vector on the frame."""

    a: float
    gamma: Sequence[complex] = (1.0, 0.0)
    p0: float = 1.0
    x0: Sequence[float] = (0.0, 0.0, 0.0)
    m: Sequence[float] = (1.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "a", _check_width(self.a))
        object.__setattr__(self, "gamma", _coeffs(self.gamma, 2, "gamma"))
        object.__setattr__(self, "x0", _as_vec3(self.x0, "x0"))
        object.__setattr__(self, "m", _unit(self.m, "m"))
        if not self.p0 > 0:
            raise InvalidParam("p0 must be positive")


@dataclass(frozen=True)
class GaussianSpinState:
    """Gaussian envelope times a constant spin vector ``h`` in the extended space."""

    a: float
    h: Sequence[complex] = (1.0, 0.0, 0.0)
    p0: float = 1.0
    x0: Sequence[float] = (0.0, 0.0, 0.0)
    m: Sequence[float] = (1.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "a", _check_width(self.a))
        object.__setattr__(self, "h", _coeffs(self.h, 3, "h"))
        object.__setattr__(self, "x0", _as_vec3(self.x0, "x0"))
        object.__setattr__(self, "m", _unit(self.m, "m"))
        if not self.p0 > 0:
            raise InvalidParam("p0 must be positive")


def gaussian_envelope(p: np.ndarray, a: float, center: np.ndarray, p0: float = 1.0) -> np.ndarray:
    """``exp(-|p - c|^2/(8 a p0^2)) / (4 pi a p0^2)^(3/4)``; its square is the weight g."""
    d2 = np.sum((p - center) ** 2, axis=-1)
    return np.exp(-d2 / (8 * a * p0**2)) / (4 * np.pi * a * p0**2) ** 0.75


@dataclass(frozen=True)
class PhotonState:
    """A physical single-photon state given by callables on momentum stacks.

    ``reduced(p)`` returns ``psi^i(p)/sqrt(|p|)`` with shape ``(N, 2)``;
    ``reduced_gradient(p)`` (optional) returns its gradient, shape ``(N, 3, 2)``
    with the derivative index first. ``center`` and ``a`` locate the momentum
    support for quadrature. ``frame_dependent`` is False when the spin
    amplitude does not depend on the frame's reference vector ``m``.
    """

    reduced: Callable[[np.ndarray], np.ndarray]
    m: np.ndarray
    a: float
    center: np.ndarray
    p0: float = 1.0
    reduced_gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    norm_sq: float = 1.0
    label: str = ""
    frame_dependent: bool = True

    def components(self, p: np.ndarray) -> np.ndarray:
        """Transverse components ``psi^i(p)`` (measure ``d^3p/|p|``)."""
        r = np.linalg.norm(p, axis=-1)
        return self.reduced(p) * np.sqrt(r)[..., None]

    def spin_amplitude(self, p: np.ndarray) -> np.ndarray:
        """``phi(p) = V (c1 e1 + c2 e2)`` with ``c = reduced(p)``, shape ``(N, 3)``."""
        fr = geo.intrinsic_frame(p, self.m)
        c = self.reduced(p)
        vec = c[..., 0, None] * fr.e1 + c[..., 1, None] * fr.e2
        return vec @ geo.V_MATRIX.T

    def spin_amplitude_gradient(self, p: np.ndarray) -> np.ndarray:
        """``d phi / d p_j`` with shape ``(N, 3[j], 3[s])``."""
        if self.reduced_gradient is None:
            raise InvalidParam("state has no analytic gradient")
        fr = geo.intrinsic_frame(p, self.m)
        de = geo.frame_gradient(p, self.m)  # (N, k, j, c)
        c = self.reduced(p)
        dc = self.reduced_gradient(p)  # (N, j, i)
        vec = (dc[..., 0, None] * fr.e1[..., None, :] + dc[..., 1, None] * fr.e2[..., None, :]
               + c[..., None, 0, None] * de[..., 0, :, :] + c[..., None, 1, None] * de[..., 1, :, :])
        return vec @ geo.V_MATRIX.T


def make_pol_state(params: GaussianPolState) -> PhotonState:
    """Physical state of a :class:`GaussianPolState`; unit norm by construction."""
    a, p0 = params.a, params.p0
    center = np.array([0.0, 0.0, p0])
    gamma = params.gamma
    x0 = params.x0

    def scalar(p):
        return gaussian_envelope(p, a, center, p0) * np.exp(-1j * (p @ x0))

    def reduced(p):
        return scalar(p)[..., None] * gamma

    def reduced_gradient(p):
        s = scalar(p)
        d = -(p - center) / (4 * a * p0**2) - 1j * x0
        return (d * s[..., None])[..., :, None] * gamma

    return PhotonState(reduced, params.m, a, center, p0, reduced_gradient, 1.0,
                       label=f"pol gamma={np.round(gamma, 6).tolist()}")


def project_spin_state(params: GaussianSpinState, eps_proj: float = EPS_PROJ) -> tuple[PhotonState, float]:
    """Project a Gaussian spin state onto the physical space and normalise it.

    Returns the physical state and ``K = sqrt(h^dagger K(a) h)``; raises
    :class:`VanishingProjection` when ``K^2 <= eps_proj``.
    """
    from .closedform import k_matrix

    a, p0 = params.a, params.p0
    h = params.h
    k2 = float(np.vdot(h, k_matrix(a) @ h).real)
    if k2 <= eps_proj:
        raise VanishingProjection(k2, eps_proj)
    k = np.sqrt(k2)
    center = np.array([0.0, 0.0, p0])
    w = geo.V_MATRIX.conj().T @ h  # Cartesian image of h
    x0 = params.x0
    m = params.m

    def scalar(p):
        return gaussian_envelope(p, a, center, p0) * np.exp(-1j * (p @ x0)) / k

    def reduced(p):
        fr = geo.intrinsic_frame(p, m)
        s = scalar(p)
        return np.stack([fr.e1 @ w, fr.e2 @ w], axis=-1) * s[..., None]

    def reduced_gradient(p):
        fr = geo.intrinsic_frame(p, m)
        de = geo.frame_gradient(p, m)
        s = scalar(p)
        d = -(p - center) / (4 * a * p0**2) - 1j * x0
        proj = np.stack([fr.e1 @ w, fr.e2 @ w], axis=-1)  # (N, 2)
        dproj = np.stack([de[..., 0, :, :] @ w, de[..., 1, :, :] @ w], axis=-1)  # (N, j, 2)
        return (d[..., :, None] * proj[..., None, :] + dproj) * s[..., None, None]

    # V pi(p) V^dagger h does not depend on m
    state = PhotonState(reduced, m, a, center, p0, reduced_gradient, 1.0,
                        label=f"spin h={np.round(h, 6).tolist()}", frame_dependent=False)
    return state, float(k)


@dataclass(frozen=True)
class ExtendedState:
    """C^3-valued amplitude ``f(p)`` in the spin basis (measure ``d^3p/|p|``)."""

    amplitude: Callable[[np.ndarray], np.ndarray]
    a: float
    center: np.ndarray
    p0: float = 1.0

    def spin_amplitude(self, p: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(p, axis=-1)
        return self.amplitude(p) / np.sqrt(r)[..., None]


def spin_extended_state(params: GaussianSpinState) -> ExtendedState:
    """Unprojected extended amplitude ``sqrt(|p|) G(p) exp(-i p.x0) h``."""
    a, p0, h, x0 = params.a, params.p0, params.h, params.x0
    center = np.array([0.0, 0.0, p0])

    def amp(p):
        r = np.linalg.norm(p, axis=-1)
        s = np.sqrt(r) * gaussian_envelope(p, a, center, p0) * np.exp(-1j * (p @ x0))
        return s[..., None] * h

    return ExtendedState(amp, a, center, p0)


def embed_photon_state(state: PhotonState) -> ExtendedState:
    """Transverse embedding ``p -> V (psi^1 e1 + psi^2 e2)``."""

    def amp(p):
        r = np.linalg.norm(p, axis=-1)
        return state.spin_amplitude(p) * np.sqrt(r)[..., None]

    return ExtendedState(amp, state.a, state.center, state.p0)


def project_extended(ext: ExtendedState, m=(1.0, 0.0, 0.0)) -> PhotonState:
    """Physical part ``psi^i = e_i . V^dagger f`` of an extended state (not normalised)."""
    m = _unit(m, "m")
    vdag = geo.V_MATRIX.conj().T

    def reduced(p):
        fr = geo.intrinsic_frame(p, m)
        cart = ext.spin_amplitude(p) @ vdag.T
        return np.stack([np.sum(fr.e1 * cart, axis=-1), np.sum(fr.e2 * cart, axis=-1)], axis=-1)

    return PhotonState(reduced, m, ext.a, ext.center, ext.p0, None, float("nan"), label="projected")


def apply_rototranslation(state: ExtendedState, a_vec=(0.0, 0.0, 0.0), rotation=None) -> ExtendedState:
    """``(U f)(p) = exp(-i a.p) D(R) f(R^-1 p)`` with ``D(R) = V R V^dagger``."""
    a_vec = _as_vec3(a_vec, "a_vec")
    rot = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
    if not (np.allclose(rot @ rot.T, np.eye(3), atol=1e-12) and np.linalg.det(rot) > 0):
        raise InvalidParam("rotation must be proper orthogonal")
    d = geo.V_MATRIX @ rot @ geo.V_MATRIX.conj().T

    def amp(p):
        f = state.amplitude(p @ rot)  # R^-1 p = R^T p, row-vector form p @ R
        return np.exp(-1j * (p @ a_vec))[..., None] * (f @ d.T)

    return ExtendedState(amp, state.a, rot @ state.center, state.p0)
