"""Dawson's integral and the width functions u1..u4 built on it.

Every closed-form result in :mod:`photon_povm.closedform` is a rational
expression in ``a`` and the four functions returned by :func:`u_functions`.
Near ``a -> inf`` the textbook expressions lose all significant digits to
cancellation (``u2 ~ 1/(6a)`` is obtained as ``1 - (1 - 1/(6a) + ...)``), so
for ``a >= 1/4`` the functions are summed from cancellation-free power series
in ``x = 1/(2 sqrt(a))``.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.special import dawsn, erf

from .errors import DomainError

# Below this argument of D the power series is used for the u-functions.
_SERIES_X_MAX = 1.0
_SERIES_TERMS = 40


def dawson(x):
    """Dawson's integral ``D(x) = exp(-x^2) * int_0^x exp(t^2) dt``.

    Accepts scalars or arrays. Odd in ``x`` to the last bit.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("dawson requires finite arguments")
    out = np.sign(x) * dawsn(np.abs(x))
    return float(out) if out.ndim == 0 else out


class UFunctions(NamedTuple):
    u1: float
    u2: float
    u3: float
    u4: float


def _check_width(a: float) -> float:
    a = float(a)
    if not math.isfinite(a) or a <= 0.0:
        raise DomainError(f"width parameter must be positive and finite, got {a!r}")
    return a


def _series_u(x: float) -> tuple[float, float, float]:
    """u1, u2, u3 from power series in x = 1/(2 sqrt a); accurate for x <= 1.

    With t_k = 2^k x^(2k) / (2k+1)!!:
      u2 = sum_{k>=1} (-1)^(k+1) t_k
      u1 = sum_{k>=2} (-1)^k (3/2) t_k / x^2
      u3 = exp(-x^2)/sqrt(pi) * sum_{k>=1} k t_k / x
    """
    x2 = x * x
    u1 = u2 = u3s = 0.0
    t = 1.0
    for k in range(1, _SERIES_TERMS):
        t *= 2.0 * x2 / (2 * k + 1)
        sign = 1.0 if k % 2 == 1 else -1.0
        u2 += sign * t
        if k >= 2:
            u1 -= sign * 1.5 * t / x2
        u3s += k * t / x
    return u1, u2, math.exp(-x2) / math.sqrt(math.pi) * u3s


def u_functions(a: float) -> UFunctions:
    """Return ``(u1, u2, u3, u4)`` at width ``a``.

    u1 = 1 - 6a + 12 a^(3/2) D(1/(2 sqrt a))
    u2 = 1 - 2 sqrt(a) D(1/(2 sqrt a))
    u3 = (2 sqrt(a/pi) exp(-1/(4a)) + (1 - 2a) erf(1/(2 sqrt a))) / 2
    u4 = 1 - 2a u2
    """
    a = _check_width(a)
    x = 0.5 / math.sqrt(a)
    if x <= _SERIES_X_MAX:
        u1, u2, u3 = _series_u(x)
    else:
        sd = math.sqrt(a) * float(dawsn(x))
        u2 = 1.0 - 2.0 * sd
        u1 = 1.0 - 6.0 * a * u2
        u3 = 0.5 * (2.0 * math.sqrt(a / math.pi) * math.exp(-0.25 / a)
                    + (1.0 - 2.0 * a) * float(erf(x)))
    return UFunctions(u1, u2, u3, 1.0 - 2.0 * a * u2)


def mean_inverse_p2(a: float) -> float:
    """Gaussian average of ``1/|p|^2`` (units of 1/p0^2): ``(1 - u2)/(2a)``."""
    a = _check_width(a)
    return (1.0 - u_functions(a).u2) / (2.0 * a)


def mean_transverse_inverse_p2(a: float) -> float:
    """Gaussian average of ``n_x^2/|p|^2`` with ``n = p/|p|``: ``(u4 - u2)/(4a)``."""
    a = _check_width(a)
    u = u_functions(a)
    return (u.u4 - u.u2) / (4.0 * a)
