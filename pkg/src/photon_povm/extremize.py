"""Extremes of the spin-state uncertainty products over the coefficient vector h.

The vector h is rescaled so that the projected norm is one:

    h = (h~_+ b_+ + h~_- b_-)/sqrt(1 - 2a u2) + h~_0 e_0/sqrt(4a u2),

with ``b_pm = (1, 0, +/-1)/sqrt(2)`` and ``e_0 = (0, 1, 0)``, so that
``|h~|^2 = 1``. Along z the squared product depends on h only through
``rho = |h~_0|^2`` and is a cubic in rho. Along x it is parametrised by
``lambda = |h~_+|^2``, ``xi`` and the phase ``phi2`` of ``h~_-``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import bisect, brentq

from .closedform import spin_axis_moments
from .errors import DomainError, InvalidParam
from .specfun import u_functions

GOLDEN_TOL = 1e-10
THRESHOLD_TOL = 1e-9


def _check_a(a: float) -> float:
    a = float(a)
    if not (np.isfinite(a) and a > 0):
        raise DomainError(f"width parameter must be positive, got {a!r}")
    return a


def _check_unit(x: float, name: str) -> float:
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {x!r}")
    return float(x)


# ----------------------------------------------------------------- z axis

def _z_linear_parts(a: float, published: bool = False):
    """Pairs (value at rho=0, value at rho=1) for <P_z>, <P_z^2>, <Z^2>."""
    u = u_functions(a)
    u1, u2 = u.u1, u.u2
    k1, k2 = 1 - 2 * a * u2, 4 * a * u2
    sign = 1.0 if published else -1.0
    dz = 0.25 / a + 0.5 * u2 + sign * u2 / (8 * a) - u1
    bz = 0.75 / a - (3 + 0.75 / a) * u2 + 2 * u1
    return (((1 - 2 * a * u1) / k1, u1 / u2),
            ((1 + 16 * a * a * u1) / k1, (1 - 8 * a * u1) / u2),
            (dz / k1, bz / k2))


def z_cubic(a: float, published: bool = False) -> Polynomial:
    """Squared z-axis product as a polynomial in rho.

    ``published=True`` keeps the printed ``+u2/(8a)`` term in ``<Z^2>``;
    the default uses ``-u2/(8a)``, which matches the moment table.
    """
    a = _check_a(a)
    lines = [Polynomial([lo, hi - lo]) for lo, hi in _z_linear_parts(a, published)]
    p, p2, z2 = lines
    return (p2 - p * p) * z2


def z_product_sq(a: float, rho: float, published: bool = False) -> float:
    return float(z_cubic(a, published)(_check_unit(rho, "rho")))


@dataclass(frozen=True)
class ZExtremes:
    min: float
    max: float
    rho_min: float
    rho_max: float


def z_axis_extremes(a: float) -> ZExtremes:
    """Extremes over rho in [0, 1] from the endpoints and the derivative's real roots."""
    f = z_cubic(a)
    cands = [0.0, 1.0]
    for r in f.deriv().roots():
        if abs(r.imag) < 1e-14 and 0.0 < r.real < 1.0:
            cands.append(float(r.real))
    vals = [float(f(r)) for r in cands]
    i_min, i_max = int(np.argmin(vals)), int(np.argmax(vals))
    return ZExtremes(math.sqrt(max(vals[i_min], 0.0)), math.sqrt(max(vals[i_max], 0.0)),
                     cands[i_min], cands[i_max])


# ----------------------------------------------------------------- x axis

@dataclass(frozen=True)
class HTildeParam:
    """Coordinates ``h~ = (sqrt(lam) e^{i phi1}, sqrt(1-lam) sqrt(xi), sqrt(1-lam) sqrt(1-xi) e^{i phi2})``
    on the (b_+, e_0, b_-) components."""

    lam: float
    xi: float
    phi2: float = 0.0
    phi1: float = 0.0

    def __post_init__(self):
        _check_unit(self.lam, "lambda")
        _check_unit(self.xi, "xi")

    @property
    def rho(self) -> float:
        return (1 - self.lam) * self.xi

    def h_tilde(self) -> np.ndarray:
        s = math.sqrt(1 - self.lam)
        return np.array([math.sqrt(self.lam) * np.exp(1j * self.phi1),
                         s * math.sqrt(self.xi),
                         s * math.sqrt(1 - self.xi) * np.exp(1j * self.phi2)])

    def to_h(self, a: float) -> np.ndarray:
        """Unit-norm h with this parametrisation (the product is scale invariant)."""
        return h_from_tilde(a, self.h_tilde())


def h_from_tilde(a: float, ht) -> np.ndarray:
    """Map ``(h~_+, h~_0, h~_-)`` to h; ``h^+ K h = |h~|^2`` before normalising."""
    a = _check_a(a)
    ht = np.asarray(ht, dtype=complex)
    if ht.shape != (3,) or not np.any(ht):
        raise InvalidParam("h~ must be a nonzero 3-vector")
    u2 = u_functions(a).u2
    s1, s0 = math.sqrt(1 - 2 * a * u2), math.sqrt(4 * a * u2)
    hp, h0, hm = ht
    h = np.array([(hp + hm) / math.sqrt(2) / s1, h0 / s0, (hp - hm) / math.sqrt(2) / s1])
    return h / np.linalg.norm(h)


def x_product_sq(a: float, param: HTildeParam) -> float:
    """Squared x-axis product from the moment table, including ``<X>``."""
    return spin_axis_moments(a, param.to_h(a), "x").product ** 2


def golden_max(f: Callable[[float], float], lo: float = 0.0, hi: float = 1.0,
               tol: float = GOLDEN_TOL) -> tuple[float, float]:
    """Golden-section maximisation on ``[lo, hi]``, endpoints included."""
    g = (math.sqrt(5) - 1) / 2
    c, d = hi - g * (hi - lo), lo + g * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - g * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + g * (hi - lo)
            fd = f(d)
    best = max([(f(lo), lo), (f(hi), hi), (f(0.5 * (lo + hi)), 0.5 * (lo + hi))])
    return best[1], best[0]


def stencil_derivative(f: Callable[[float], float], x: float, h: float = 1e-4) -> float:
    """Fourth-order central difference."""
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


def polish_stationary(f: Callable[[float], float], x0: float, width: float = 1e-3) -> float:
    """Refine a comparison-located extremum to a root of the derivative.

    Golden section alone pins the argument only to about sqrt(machine eps).
    """
    d = lambda x: stencil_derivative(f, x)
    lo, hi = x0 - width, x0 + width
    if d(lo) * d(hi) > 0:
        return x0
    return float(brentq(d, lo, hi, xtol=1e-14))


@dataclass(frozen=True)
class XExtremes:
    min: float
    max: float
    argmin: HTildeParam
    argmax: HTildeParam


def x_axis_extremes(a: float) -> XExtremes:
    """Minimum at a ``b_+``/``b_-`` corner; maximum over xi at ``lam=0``, ``cos(phi2)=0``."""
    a = _check_a(a)
    plus, minus = HTildeParam(1.0, 0.0), HTildeParam(0.0, 0.0, 0.0)
    vp, vm = x_product_sq(a, plus), x_product_sq(a, minus)
    arg_min, v_min = (plus, vp) if vp <= vm else (minus, vm)
    ridge = lambda xi: x_product_sq(a, HTildeParam(0.0, xi, math.pi / 2))
    xi_star, v_max = golden_max(ridge)
    if 1e-3 < xi_star < 1 - 1e-3:
        xi_star = polish_stationary(ridge, xi_star)
        v_max = ridge(xi_star)
    ends = [(ridge(0.0), 0.0), (ridge(1.0), 1.0)]
    for v, xi in ends:
        if v > v_max:
            xi_star, v_max = xi, v
    return XExtremes(math.sqrt(v_min), math.sqrt(v_max), arg_min, HTildeParam(0.0, xi_star, math.pi / 2))


# ------------------------------------------------------------- thresholds

def z_threshold(lo: float = 1.0, hi: float = 20.0, tol: float = THRESHOLD_TOL) -> float:
    """Width where the z minimum moves from ``rho = 0`` to ``rho = 1``."""
    f = lambda a: z_product_sq(a, 0.0) - z_product_sq(a, 1.0)
    return float(bisect(f, lo, hi, xtol=tol))


def x_threshold(lo: float = 0.5, hi: float = 10.0, tol: float = THRESHOLD_TOL) -> float:
    """Width where the x minimum moves from ``b_+`` (lam = 1) to ``b_-`` (lam = 0)."""
    f = lambda a: x_product_sq(a, HTildeParam(1.0, 0.0)) - x_product_sq(a, HTildeParam(0.0, 0.0))
    return float(bisect(f, lo, hi, xtol=tol))
