"""Independent numerical oracle: Gaussian-weighted integrals over momentum space.

Nodes live in spherical coordinates about the origin. Radii cover
``|r - p0| <= w sqrt(a) p0`` with Gauss-Legendre nodes (in ``sqrt(r)`` when
the window reaches the origin, where amplitudes go like ``sqrt(r)``). On each shell only the
cap where the Gaussian exceeds ``exp(-T)`` is sampled: a Gauss-Legendre
window in the polar angle (weight ``sin theta``) and, per shell, an azimuth
window that is either the full circle (offset trapezoid) or a Gauss-Legendre
arc. The polar axis is the Gaussian centre by default. For states whose
frame depends on the reference vector ``m`` it is put along ``m`` whenever
the rays ``p || +/-m`` carry weight: the frame jumps across those rays, and
with this choice the jump falls on a coordinate line instead of inside a cell.
Nodes with zero weight (window edges on the poles) are discarded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import InvalidParam, ToleranceNotMet
from .states import PhotonState


@dataclass(frozen=True)
class QuadratureSpec:
    radial_nodes: int = 48
    theta_nodes: int = 48
    phi_nodes: int = 48
    radial_halfwidth: float = 12.0
    angular_cutoff: float = 30.0
    target_rel_tol: float = 1e-9

    def __post_init__(self):
        if min(self.radial_nodes, self.theta_nodes, self.phi_nodes) < 4:
            raise InvalidParam("node counts must be at least 4")
        if self.radial_halfwidth <= 0 or self.angular_cutoff <= 0 or self.target_rel_tol <= 0:
            raise InvalidParam("halfwidth, cutoff and tolerance must be positive")

    def refined(self) -> "QuadratureSpec":
        """Every node count multiplied by 1.5 (rounded up)."""
        up = lambda n: int(math.ceil(1.5 * n))
        return replace(self, radial_nodes=up(self.radial_nodes),
                       theta_nodes=up(self.theta_nodes), phi_nodes=up(self.phi_nodes))

    @property
    def size(self) -> int:
        return self.radial_nodes * self.theta_nodes * self.phi_nodes


DEFAULT_SPEC = QuadratureSpec()


def _frame_to(center: np.ndarray) -> np.ndarray:
    """Rotation taking +z to the direction of ``center``."""
    c = center / np.linalg.norm(center)
    z = np.array([0.0, 0.0, 1.0])
    v = np.cross(z, c)
    s = np.linalg.norm(v)
    if s < 1e-15:
        return np.eye(3) if c[2] > 0 else np.diag([1.0, -1.0, -1.0])
    k = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]]) / s
    return np.eye(3) + s * k + (1 - c[2]) * (k @ k)


@lru_cache(maxsize=32)
def _grid_cached(a: float, center: tuple, spec: QuadratureSpec, polar: Optional[tuple]):
    center = np.asarray(center)
    p0 = float(np.linalg.norm(center))
    if p0 <= 0:
        raise InvalidParam("Gaussian centre must be nonzero")
    axis = center / p0 if polar is None else np.asarray(polar)
    rot = _frame_to(axis)
    c_loc = rot.T @ (center / p0)  # centre direction in grid coordinates
    theta_c = math.acos(max(-1.0, min(1.0, c_loc[2])))
    phi_c = math.atan2(c_loc[1], c_loc[0])
    sin_c = math.sin(theta_c)

    sa = math.sqrt(a) * p0
    r0 = max(0.0, p0 - spec.radial_halfwidth * sa)
    r1 = p0 + spec.radial_halfwidth * sa
    xr, wr = leggauss(spec.radial_nodes)
    if r0 > 0:
        r = r0 + (xr + 1) * (r1 - r0) / 2
        wr = wr * (r1 - r0) / 2
    else:
        # r = s^2 keeps amplitudes carrying sqrt(r) smooth at the origin
        s1 = math.sqrt(r1)
        s = (xr + 1) * s1 / 2
        r = s * s
        wr = wr * s1 / 2 * 2 * s
    # angular radius of the cap |p - c|^2 <= 4 a p0^2 T on each shell
    cos_cap = (r * r + p0 * p0 - 4 * a * p0 * p0 * spec.angular_cutoff) / (2 * r * p0)
    cap = np.arccos(np.clip(cos_cap, -1.0, 1.0))
    t_lo = np.maximum(0.0, theta_c - cap)
    t_hi = np.minimum(np.pi, theta_c + cap)
    xt, wt = leggauss(spec.theta_nodes)
    theta = t_lo[:, None] + (xt[None, :] + 1) * (t_hi - t_lo)[:, None] / 2
    w_theta = wt[None, :] * (t_hi - t_lo)[:, None] / 2 * np.sin(theta)

    # azimuth half-width per shell: the widest the cap reaches, so each shell
    # integrates over a (theta, phi) rectangle whose edges see negligible weight
    if sin_c < 1e-12:
        half_r = np.full(r.shape, np.pi)
    else:
        reach = np.sin(np.minimum(cap, np.pi / 2)) / sin_c
        half_r = np.where((cap >= theta_c) | (cap >= np.pi - theta_c) | (reach >= 1.0),
                          np.pi, np.arcsin(np.clip(reach, 0.0, 1.0)))
    half = np.broadcast_to(half_r[:, None], theta.shape)
    n_phi = spec.phi_nodes
    xp, wp = leggauss(n_phi)
    full = half >= np.pi - 1e-12
    trap = (np.arange(n_phi) + 0.5) * 2 * np.pi / n_phi
    phi = np.where(full[..., None], trap, phi_c + half[..., None] * xp)
    w_phi = np.where(full[..., None], 2 * np.pi / n_phi, half[..., None] * wp)

    st, ct = np.sin(theta)[..., None], np.cos(theta)[..., None]
    rr = r[:, None, None]
    pts = np.stack([rr * st * np.cos(phi), rr * st * np.sin(phi),
                    np.broadcast_to(rr * ct, phi.shape)], axis=-1).reshape(-1, 3)
    w = (wr[:, None, None] * rr**2 * w_theta[..., None] * w_phi).reshape(-1)
    keep = w > 0  # shells beyond the cap have empty windows
    pts, w = pts[keep], w[keep]
    # no node on the polar axis, where an m-aligned frame is undefined
    off_axis = np.hypot(pts[:, 0], pts[:, 1]) / np.linalg.norm(pts, axis=1)
    assert off_axis.min() > 1e-12, "quadrature node on the polar axis"
    pts = pts @ rot.T
    pts.setflags(write=False)
    w.setflags(write=False)
    return pts, w


def momentum_grid(a: float, center=(0.0, 0.0, 1.0), spec: QuadratureSpec = DEFAULT_SPEC,
                  polar_axis=None):
    """Nodes ``(N, 3)`` and flat-measure weights ``(N,)`` for ``d^3p`` integrals.

    The polar axis defaults to the Gaussian centre's direction. On each
    shell only the cap where the weight exceeds ``exp(-angular_cutoff)`` is
    covered: a polar-angle window, then an azimuth window per polar node.
    """
    key = tuple(float(c) for c in np.asarray(center).reshape(3))
    if polar_axis is not None:
        ax = np.asarray(polar_axis, dtype=float).reshape(3)
        polar_axis = tuple(float(c) for c in ax / np.linalg.norm(ax))
    return _grid_cached(float(a), key, spec, polar_axis)


def singular_ray_exponent(a: float, center, m) -> float:
    """``-log`` of the Gaussian weight (relative to its peak) on the rays ``p || +/-m``."""
    c = np.asarray(center, dtype=float)
    m = np.asarray(m, dtype=float) / np.linalg.norm(m)
    p0 = np.linalg.norm(c)
    d = np.linalg.norm(np.cross(c, m))  # distance to the full line through the origin
    return float(d * d / (4 * a * p0 * p0))


def polar_axis_for(state, spec: QuadratureSpec = DEFAULT_SPEC):
    """Grid axis for integrands of ``state``.

    States whose amplitude depends on the frame's reference vector ``m`` are
    discontinuous across the rays ``p || +/-m``. If those rays carry weight
    the grid is aligned with ``m`` so that they become its poles.
    """
    if not getattr(state, "frame_dependent", False):
        return None
    if singular_ray_exponent(state.a, state.center, state.m) > spec.angular_cutoff:
        return None
    return state.m


def gaussian_weight(p: np.ndarray, a: float, center: np.ndarray, p0: float = 1.0) -> np.ndarray:
    d2 = np.sum((p - center) ** 2, axis=-1)
    return np.exp(-d2 / (4 * a * p0**2)) / (4 * np.pi * a * p0**2) ** 1.5


def _chunks(n: int, size: int = 200_000):
    for start in range(0, n, size):
        yield slice(start, min(n, start + size))


def integrate(integrand: Callable[[np.ndarray], np.ndarray], a: float, center,
              spec: QuadratureSpec = DEFAULT_SPEC, polar_axis=None) -> np.ndarray:
    """``sum_i w_i f(p_i)`` over the grid for an array-valued integrand ``f``.

    Chunks are reduced in a fixed order so results are reproducible.
    """
    pts, w = momentum_grid(a, center, spec, polar_axis)
    total = None
    for sl in _chunks(len(w)):
        vals = np.asarray(integrand(pts[sl]))
        part = np.tensordot(w[sl], vals, axes=(0, 0))
        total = part if total is None else total + part
    return total


def integrate_state(integrand: Callable[[np.ndarray], np.ndarray], state,
                    spec: QuadratureSpec = DEFAULT_SPEC) -> np.ndarray:
    """:func:`integrate` on the grid suited to ``state`` (see :func:`polar_axis_for`)."""
    return integrate(integrand, state.a, state.center, spec, polar_axis_for(state, spec))


def checked(compute: Callable[[QuadratureSpec], np.ndarray], spec: QuadratureSpec,
            scale: Optional[float] = None, context: str = "") -> np.ndarray:
    """Run ``compute`` at ``spec`` and at ``spec.refined()``; raise on disagreement.

    Each component must agree to ``tol * max(|fine|, scale)``; ``scale``
    defaults to the largest component magnitude.
    """
    coarse = np.asarray(compute(spec))
    fine = np.asarray(compute(spec.refined()))
    ref = np.abs(fine)
    floor = float(np.max(ref)) if scale is None else float(scale)
    bound = spec.target_rel_tol * np.maximum(ref, floor)
    if np.any(np.abs(fine - coarse) > bound):
        raise ToleranceNotMet(coarse.tolist(), fine.tolist(), spec.target_rel_tol, context)
    return fine


def gaussian_moment(weight: Callable[[np.ndarray], np.ndarray], a: float, p0: float = 1.0,
                    spec: QuadratureSpec = DEFAULT_SPEC, center=None, check: bool = True):
    """``int d^3p g(p) weight(p)`` with ``g`` the normalised Gaussian of width ``a``."""
    c = np.array([0.0, 0.0, p0]) if center is None else np.asarray(center, dtype=float)

    def integrand(p):
        vals = np.asarray(weight(p))
        g = gaussian_weight(p, a, c, p0)
        return g.reshape(g.shape + (1,) * (vals.ndim - 1)) * vals

    def run(s):
        return integrate(integrand, a, c, s)

    out = checked(run, spec, context="gaussian_moment") if check else run(spec)
    return out.item() if np.ndim(out) == 0 else out


def photon_inner_product(phi: PhotonState, psi: PhotonState, spec: QuadratureSpec = DEFAULT_SPEC,
                         check: bool = True) -> complex:
    """``<phi|psi> = int d^3p/|p| sum_i conj(phi^i) psi^i``."""

    def run(s):
        return integrate_state(lambda p: np.sum(np.conj(phi.reduced(p)) * psi.reduced(p), axis=-1),
                               phi, s)

    out = checked(run, spec, scale=1.0, context="inner product") if check else run(spec)
    return complex(out)


def position_wavefunction(state: PhotonState, x, spec: QuadratureSpec = DEFAULT_SPEC,
                          check: bool = True) -> np.ndarray:
    """Spin components of the position-space wavefunction at points ``x``.

    ``psi_s(x) = (2 pi)^(-3/2) int d^3p exp(i p.x) phi_s(p)``. The oscillating
    phase makes accuracy degrade with ``|x|``; with ``check`` the result is
    compared against the refined grid and :class:`ToleranceNotMet` is raised
    when they disagree.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    norm = (2 * np.pi) ** -1.5

    def run(s):
        # the integrand is linear in the amplitude, which decays like sqrt(g)
        s = replace(s, angular_cutoff=2 * s.angular_cutoff,
                    radial_halfwidth=math.sqrt(2) * s.radial_halfwidth)
        pts, w = momentum_grid(state.a, state.center, s, polar_axis_for(state, s))
        out = np.zeros((x.shape[0], 3), dtype=complex)
        step = max(1, 2_000_000 // max(1, x.shape[0]))
        for sl in _chunks(len(w), step):
            amp = state.spin_amplitude(pts[sl]) * w[sl, None]
            out += np.exp(1j * (x @ pts[sl].T)) @ amp
        return out * norm

    res = checked(run, spec, context="position wavefunction") if check else run(spec)
    return res
