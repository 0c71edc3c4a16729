"""Closed-form moments, spin distributions and uncertainty products.

All quantities are built from the width functions of
:mod:`photon_povm.specfun` with ``p0 = 1`` along +z. Where a published
formula disagrees with the definitional integrals, both are provided: the
plain name returns the value that agrees with direct quadrature and the
``*_published`` variant reproduces the formula as printed, so reports can
flag the discrepancy.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError, InvalidParam, RegimeMismatch, VanishingProjection
from .geometry import V_MATRIX
from .specfun import u_functions

AXES = ("x", "y", "z")
_S2 = np.sqrt(2.0)


def _axis_index(axis) -> int:
    if isinstance(axis, str):
        try:
            return AXES.index(axis.lower())
        except ValueError:
            raise InvalidParam(f"unknown axis {axis!r}") from None
    if axis in (0, 1, 2):
        return int(axis)
    raise InvalidParam(f"unknown axis {axis!r}")


# ---------------------------------------------------------------- spin family

def k_matrix(a: float) -> np.ndarray:
    """Squared norm of the projected spin state as a quadratic form in h."""
    u = u_functions(a)
    return (np.diag([1.0, 0.0, 1.0]) + 2 * a * u.u2 * np.diag([-1.0, 2.0, -1.0])).astype(complex)


@dataclass(frozen=True)
class MomentTable:
    """Quadratic forms in h for norm, momentum and position moments.

    ``P[j]``, ``P2[j]``, ``X[j]`` and ``X2[j]`` hold the first and second
    moments along axis j. The transverse first-position forms ``X[0]`` and
    ``X[1]`` are not zero: they vanish on the basis vectors of h but couple
    ``m_s = 0`` to ``m_s = +/-1`` with coefficient ``u2/(2 sqrt 2)``.
    """

    a: float
    K: np.ndarray
    P: tuple
    P2: tuple
    X: tuple
    X2: tuple

    def expectation(self, h: np.ndarray, form: np.ndarray) -> float:
        h = np.asarray(h, dtype=complex)
        return float(np.vdot(h, form @ h).real / np.vdot(h, self.K @ h).real)


def spin_moment_table(a: float, p0: float = 1.0) -> MomentTable:
    u = u_functions(a)
    u1, u2 = u.u1, u.u2
    K = k_matrix(a)
    c = 2 * a * u1 / _S2
    px = c * np.array([[0, 1, 0], [1, 0, -1], [0, -1, 0]], dtype=complex)
    py = c * np.array([[0, -1j, 0], [1j, 0, 1j], [0, -1j, 0]], dtype=complex)
    pz = (np.diag([1.0, 0, 1.0]) + 2 * a * u1 * np.diag([-1.0, 2, -1])).astype(complex)
    base = 2 * a * np.diag([1.0, 0, 1.0])
    px2 = base + 4 * a * a * u1 * np.array([[-2, 0, 1], [0, 4, 0], [1, 0, -2]])
    py2 = base + 4 * a * a * u1 * np.array([[-2, 0, -1], [0, 4, 0], [-1, 0, -2]])
    pz2 = np.diag([1.0, 4 * a, 1.0]) + 16 * a * a * u1 * np.diag([1.0, -2, 1])
    d = 0.5 * u1 - u2 * (0.5 + 0.25 / a) + 0.375 / a
    q = (u1 + 2 * u2) / 4
    mid = 2 * u2 - u1
    x2 = np.array([[d, 0, -q], [0, mid, 0], [-q, 0, d]], dtype=complex)
    y2 = np.array([[d, 0, q], [0, mid, 0], [q, 0, d]], dtype=complex)
    dz = 0.25 / a + (4 * a - 1) / (8 * a) * u2 - u1
    bz = 0.75 / a - (12 * a + 3) / (4 * a) * u2 + 2 * u1
    z2 = np.diag([dz, bz, dz]).astype(complex)
    ez = np.array([0.0, 0.0, 1.0])

    def first(e):
        gen = np.outer(ez, e) - np.outer(e, ez)
        return 0.5j * u2 * (V_MATRIX @ gen @ V_MATRIX.conj().T)

    x1 = (first(np.array([1.0, 0, 0])), first(np.array([0, 1.0, 0])), np.zeros((3, 3), complex))
    return MomentTable(
        a, K,
        (p0 * px, p0 * py, p0 * pz),
        (p0**2 * px2, p0**2 * py2, p0**2 * pz2),
        tuple(m / p0 for m in x1),
        (x2 / p0**2, y2 / p0**2, z2 / p0**2),
    )


def _spin_vector(h) -> np.ndarray:
    h = np.asarray(h, dtype=complex).reshape(-1)
    if h.shape != (3,):
        raise InvalidParam("h must have three components")
    n = np.vdot(h, h).real
    if abs(n - 1.0) > 1e-12:
        raise InvalidParam(f"h must be normalised, |h|^2 = {n!r}")
    return h


class AxisMoments(NamedTuple):
    mean_p: float
    mean_p2: float
    mean_x: float
    mean_x2: float

    @property
    def product(self) -> float:
        vp = self.mean_p2 - self.mean_p**2
        vx = self.mean_x2 - self.mean_x**2
        return float(np.sqrt(max(vp, 0.0) * max(vx, 0.0)))


def spin_axis_moments(a: float, h, axis, eps_proj: float = 1e-12) -> AxisMoments:
    """Normalised momentum and position moments of a spin state along one axis."""
    h = _spin_vector(h)
    t = spin_moment_table(a)
    k2 = float(np.vdot(h, t.K @ h).real)
    if k2 <= eps_proj:
        raise VanishingProjection(k2, eps_proj)
    j = _axis_index(axis)
    return AxisMoments(*(t.expectation(h, f[j]) for f in (t.P, t.P2, t.X, t.X2)))


def spin_uncertainty(a: float, h, eps_proj: float = 1e-12) -> dict[str, float]:
    """Uncertainty products ``Delta X_k Delta P_k`` for all three axes (units of hbar)."""
    return {ax: spin_axis_moments(a, h, ax, eps_proj).product for ax in AXES}


def heis_100(a: float) -> dict[str, float]:
    """Products for ``h = (1,0,0)`` (equal for ``(0,0,1)``) in closed form."""
    u = u_functions(a)
    u1, u2 = u.u1, u.u2
    k1 = 1 - 2 * a * u2
    dz = 0.25 / a + (0.5 - 0.125 / a) * u2 - u1
    d = 0.5 * u1 - u2 * (0.5 + 0.25 / a) + 0.375 / a
    z = np.sqrt((1 + 16 * a * a * u1 - (1 - 2 * a * u1) ** 2 / k1) * dz) / k1
    x = np.sqrt(2 * a * (1 - 4 * a * u1) * d) / k1
    return {"x": float(x), "y": float(x), "z": float(z)}


def heis_010(a: float) -> dict[str, float]:
    """Products for ``h = (0,1,0)`` in closed form."""
    u = u_functions(a)
    u1, u2 = u.u1, u.u2
    b = 0.75 / a - (3 + 0.75 / a) * u2 + 2 * u1
    z = np.sqrt(((1 - 8 * a * u1) * u2 - u1 * u1) * b / a) / (2 * u2**1.5)
    x = np.sqrt(u1 * (2 * u2 - u1)) / u2
    return {"x": float(x), "y": float(x), "z": float(z)}


def heis_100_published(a: float) -> dict[str, float]:
    """The ``h = (1,0,0)`` products exactly as printed (x uses ``1 - 4a u2``)."""
    u = u_functions(a)
    u1, u2 = u.u1, u.u2
    k1 = 1 - 2 * a * u2
    d = 0.5 * u1 - u2 * (0.5 + 0.25 / a) + 0.375 / a
    x = np.sqrt(2 * a * (1 - 4 * a * u2) * d) / k1
    return {"x": float(x), "y": float(x), "z": heis_100(a)["z"]}


def heis_010_published(a: float) -> dict[str, float]:
    """The ``h = (0,1,0)`` products exactly as printed (z divides by ``2 u2``)."""
    u = u_functions(a)
    u1, u2 = u.u1, u.u2
    b = 0.75 / a - (3 + 0.75 / a) * u2 + 2 * u1
    z = np.sqrt(((1 - 8 * a * u1) * u2 - u1 * u1) * b / a) / (2 * u2)
    out = heis_010(a)
    out["z"] = float(z)
    return out


def spin_sz_matrices(a: float) -> dict[int, np.ndarray]:
    """Diagonal forms ``Sigma(m_s)`` with ``p(m_s) = h^+ Sigma h / h^+ K h``.

    They satisfy ``Sigma(1) + Sigma(0) + Sigma(-1) = K``.
    """
    u = u_functions(a)
    u2, u4 = u.u2, u.u4
    corner_hi = 4 * a + (1 - 6 * a) * u4
    corner_lo = 1 + 4 * a - (1 + 6 * a) * u4
    mid_pm = (1 + 12 * a) * u4 - (1 + 8 * a)
    side0 = 4 * a - (2 * a + 24 * a * a) * u2
    mid0 = 8 * a * ((1 + 6 * a) * u2 - 1)
    return {
        1: np.diag([corner_hi, mid_pm, corner_lo]).astype(complex),
        0: np.diag([side0, mid0, side0]).astype(complex),
        -1: np.diag([corner_lo, mid_pm, corner_hi]).astype(complex),
    }


def spin_sz_matrices_published(a: float) -> dict[int, np.ndarray]:
    """``Sigma(m_s)`` as printed; the middle entries do not add up to ``K``."""
    u = u_functions(a)
    u2, u4 = u.u2, u.u4
    out = spin_sz_matrices(a)
    mid_pm = 2 * (1 + 12 * a) * u4 - (1 + 8 * a)
    out[1][1, 1] = out[-1][1, 1] = mid_pm
    out[0][1, 1] = (1 + 6 * a) * 8 * u2 - 4 * a
    return out


def spin_sz_distribution(a: float, h, eps_proj: float = 1e-12) -> dict[int, float]:
    h = _spin_vector(h)
    k = k_matrix(a)
    k2 = float(np.vdot(h, k @ h).real)
    if k2 <= eps_proj:
        raise VanishingProjection(k2, eps_proj)
    sig = spin_sz_matrices(a)
    return {m: float(np.vdot(h, sig[m] @ h).real / k2) for m in (1, 0, -1)}


# --------------------------------------------------------- polarisation family

class PolProducts(NamedTuple):
    z: float
    x: float


def pol_uncertainty(a: float) -> PolProducts:
    """Reference polarisation-state products, a single formula for every gamma.

    ``z = sqrt(1 - 4a + 4 sqrt(a)(1+2a) D)/2`` agrees with quadrature for
    circular polarisation. ``x = sqrt(1 + 8a - 16 a^(3/2) D)/2`` does not
    agree with quadrature for any polarisation; see
    :func:`pol_uncertainty_exact`.
    """
    u = u_functions(a)
    z = 0.5 * np.sqrt(3 - 2 * (1 + 2 * a) * u.u2)
    x = 0.5 * np.sqrt(1 + 8 * a * u.u2)
    return PolProducts(float(z), float(x))


def _gamma(gamma) -> np.ndarray:
    g = np.asarray(gamma, dtype=complex).reshape(-1)
    if g.shape != (2,):
        raise InvalidParam("gamma must have two components")
    n = np.vdot(g, g).real
    if abs(n - 1.0) > 1e-12:
        raise InvalidParam(f"gamma must be normalised, |gamma|^2 = {n!r}")
    return g


def pol_frame_curvature(a: float, axis) -> float:
    """Average of ``(1 - n_k^2)/|p|^2`` over the Gaussian weight.

    This is the position variance added by the rotation of ``e1`` when the
    frame's reference vector is aligned with the measured axis.
    """
    u = u_functions(a)
    k = _axis_index(axis)
    if k == 2:
        return (u.u4 - u.u2) / (2 * a)
    return (2 - u.u2 - u.u4) / (4 * a)


def pol_axis_moments(a: float, gamma, axis, x0=(0.0, 0.0, 0.0), p0: float = 1.0) -> AxisMoments:
    """Moments of a polarisation state along ``axis`` with the frame's reference
    vector ``m`` parallel to that axis (the only choice giving finite moments
    for every gamma)."""
    g = _gamma(gamma)
    k = _axis_index(axis)
    x0 = np.asarray(x0, dtype=float)
    pk = p0 if k == 2 else 0.0
    curv = pol_frame_curvature(a, k) / p0**2
    mx2 = 1 / (8 * a * p0**2) + x0[k] ** 2 + abs(g[0]) ** 2 * curv
    return AxisMoments(pk, pk**2 + 2 * a * p0**2, float(x0[k]), float(mx2))


def pol_uncertainty_exact(a: float, gamma) -> dict[str, float]:
    """``sqrt(1 + 8a |gamma_1|^2 c_k)/2`` per axis, axis-aligned frame gauge."""
    return {ax: pol_axis_moments(a, gamma, ax).product for ax in AXES}


def pol_sz_matrices(a: float) -> dict[int, np.ndarray]:
    """2x2 forms ``Sigma(m_s)`` with ``p(m_s) = gamma^+ Sigma gamma``.

    Exact for circular polarisation. For other gamma the true distribution
    depends on the frame reference vector and these give its m-independent
    part (the mean of the two diagonal entries).
    """
    u = u_functions(a)
    diag = 1 / 3 + u.u1 / 6
    s1 = np.array([[diag, 1j * u.u3], [-1j * u.u3, diag]])
    s0 = 2 * a * u.u2 * np.eye(2, dtype=complex)
    return {1: s1, 0: s0, -1: s1.conj()}


def pol_sz_distribution(a: float, gamma) -> dict[int, float]:
    g = _gamma(gamma)
    sig = pol_sz_matrices(a)
    return {m: float(np.vdot(g, sig[m] @ g).real) for m in (1, 0, -1)}


# ------------------------------------------------------------ asymptotic rows

class Term(NamedTuple):
    """``coef * sqrt(surd) * pi^(-1/2 if inv_sqrt_pi) * a^power``."""

    coef: Fraction
    power: Fraction
    surd: int = 1
    inv_sqrt_pi: bool = False

    def value(self, a: float) -> float:
        v = float(self.coef) * np.sqrt(self.surd) * a ** float(self.power)
        return v / np.sqrt(np.pi) if self.inv_sqrt_pi else v


def _t(coef, power, surd=1, pi=False) -> Term:
    return Term(Fraction(coef), Fraction(power), surd, pi)


SMALL_WINDOW = 1e-2
LARGE_WINDOW = 1e2


@dataclass(frozen=True)
class AsymptoticSeries:
    """One stored asymptotic row plus the first term the row leaves out.

    ``first_omitted`` is the next nonzero term of the true expansion of the
    quantity, derived independently of the row.
    """

    key: str
    group: str
    label: str
    regime: str
    terms: tuple
    first_omitted: Term

    def evaluate(self, a: float) -> float:
        return asymptotic_eval(self, a)


def asymptotic_eval(series: AsymptoticSeries, a: float) -> float:
    if not a > 0:
        raise DomainError("a must be positive")
    if series.regime == "small" and a > SMALL_WINDOW:
        raise RegimeMismatch(f"small-a series used at a = {a}")
    if series.regime == "large" and a < LARGE_WINDOW:
        raise RegimeMismatch(f"large-a series used at a = {a}")
    return float(sum(t.value(a) for t in series.terms))


def _row(key, group, label, regime, terms, omitted) -> AsymptoticSeries:
    return AsymptoticSeries(key, group, label, regime, tuple(terms), omitted)


h = Fraction(1, 2)
TABLE_ROWS: tuple[AsymptoticSeries, ...] = (
    # polarisation products
    _row("pol_z", "pol product", "z", "small", [_t(h, 0), _t(4, 2)], _t(16, 3)),
    _row("pol_z", "pol product", "z", "large",
         [_t(Fraction(1, 6), 0, 21), _t(Fraction(-1, 105), -1, 21), _t(Fraction(11, 14700), -2, 21)],
         _t(Fraction(-38, 1157625), -3, 21)),
    _row("pol_x", "pol product", "x", "small", [_t(h, 0), _t(2, 1), _t(-16, 2)], _t(24, 3)),
    _row("pol_x", "pol product", "x", "large",
         [_t(Fraction(1, 6), 0, 21), _t(Fraction(-1, 105), -1, 21), _t(Fraction(1, 3675), -2, 21)],
         _t(Fraction(-103, 9261000), -3, 21)),
    # S_z distribution, circular polarisation
    _row("pol_sz:+:1", "pol spin", "m_s=+1, pol +1", "small", [_t(2, 2)], _t(4, 3)),
    _row("pol_sz:+:0", "pol spin", "m_s=0, pol +1", "small", [_t(2, 1), _t(-4, 2)], _t(-8, 3)),
    _row("pol_sz:+:-1", "pol spin", "m_s=-1, pol +1", "small", [_t(1, 0), _t(-2, 1), _t(2, 2)], _t(4, 3)),
    _row("pol_sz:-:1", "pol spin", "m_s=+1, pol -1", "small", [_t(1, 0), _t(-2, 1), _t(2, 2)], _t(4, 3)),
    _row("pol_sz:-:0", "pol spin", "m_s=0, pol -1", "small", [_t(2, 1), _t(-4, 2)], _t(-8, 3)),
    _row("pol_sz:-:-1", "pol spin", "m_s=-1, pol -1", "small", [_t(2, 2)], _t(4, 3)),
    _row("pol_sz:+:1", "pol spin", "m_s=+1, pol +1", "large",
         [_t(Fraction(1, 3), 0), _t(-1, -h, pi=True), _t(Fraction(1, 60), -1)],
         _t(Fraction(1, 60), Fraction(-3, 2), pi=True)),
    _row("pol_sz:+:0", "pol spin", "m_s=0, pol +1", "large",
         [_t(Fraction(1, 3), 0), _t(Fraction(-1, 30), -1)], _t(Fraction(1, 420), -2)),
    _row("pol_sz:+:-1", "pol spin", "m_s=-1, pol +1", "large",
         [_t(Fraction(1, 3), 0), _t(1, -h, pi=True), _t(Fraction(1, 60), -1)],
         _t(Fraction(-1, 60), Fraction(-3, 2), pi=True)),
    _row("pol_sz:-:1", "pol spin", "m_s=+1, pol -1", "large",
         [_t(Fraction(1, 3), 0), _t(1, -h, pi=True), _t(Fraction(1, 60), -1)],
         _t(Fraction(-1, 60), Fraction(-3, 2), pi=True)),
    _row("pol_sz:-:0", "pol spin", "m_s=0, pol -1", "large",
         [_t(Fraction(1, 3), 0), _t(Fraction(-1, 30), -1)], _t(Fraction(1, 420), -2)),
    _row("pol_sz:-:-1", "pol spin", "m_s=-1, pol -1", "large",
         [_t(Fraction(1, 3), 0), _t(-1, -h, pi=True), _t(Fraction(1, 60), -1)],
         _t(Fraction(1, 60), Fraction(-3, 2), pi=True)),
    # spin-state products
    _row("spin_100:z", "spin product", "h=(1,0,0), z", "small", [_t(h, 0), _t(4, 2)], _t(16, 3)),
    _row("spin_100:z", "spin product", "h=(1,0,0), z", "large",
         [_t(Fraction(1, 5), 0, 21), _t(Fraction(-59, 2450), -1, 21)],
         _t(Fraction(283007, 69148800), -2, 21)),
    _row("spin_100:x", "spin product", "h=(1,0,0), x", "small", [_t(h, 0), _t(1, 1), _t(40, 3)], _t(-16, 4)),
    _row("spin_100:x", "spin product", "h=(1,0,0), x", "large",
         [_t(Fraction(3, 2), 0, 41), _t(Fraction(-1381, 114800), -1, 41)],
         _t(Fraction(7781813, 5930568000), -2, 41)),
    _row("spin_010:z", "spin product", "h=(0,1,0), z", "small", [_t(h, 0), _t(16, 2), _t(272, 3)], _t(1760, 4)),
    _row("spin_010:z", "spin product", "h=(0,1,0), z", "large",
         [_t(Fraction(9, 10), 0), _t(Fraction(-1, 175), -1)], _t(Fraction(-3, 1225), -2)),
    _row("spin_010:x", "spin product", "h=(0,1,0), x", "small", [_t(1, 0), _t(-8, 2), _t(32, 3)], _t(128, 4)),
    _row("spin_010:x", "spin product", "h=(0,1,0), x", "large",
         [_t(Fraction(1, 5), 0, 21), _t(Fraction(2, 1225), -1, 21)],
         _t(Fraction(-323, 5402250), -2, 21)),
    # S_z distribution, spin states
    _row("spin_sz:100:1", "spin S_z", "m_s=+1, h=(1,0,0)", "small", [_t(1, 0), _t(-2, 1), _t(8, 2)], _t(-64, 4)),
    _row("spin_sz:100:0", "spin S_z", "m_s=0, h=(1,0,0)", "small", [_t(2, 1), _t(-16, 2)], _t(16, 3)),
    _row("spin_sz:100:-1", "spin S_z", "m_s=-1, h=(1,0,0)", "small", [_t(8, 2)], _t(-16, 3)),
    _row("spin_sz:010:1", "spin S_z", "m_s=+1, h=(0,1,0)", "small", [_t(h, 0), _t(-4, 1), _t(8, 2)], _t(48, 3)),
    _row("spin_sz:010:0", "spin S_z", "m_s=0, h=(0,1,0)", "small", [_t(8, 1), _t(-16, 2)], _t(-96, 3)),
    _row("spin_sz:100:1", "spin S_z", "m_s=+1, h=(1,0,0)", "large",
         [_t(Fraction(7, 10), 0), _t(Fraction(51, 1400), -1)], _t(Fraction(-49, 12000), -2)),
    _row("spin_sz:100:0", "spin S_z", "m_s=0, h=(1,0,0)", "large",
         [_t(Fraction(1, 10), 0), _t(Fraction(3, 1400), -1)], _t(Fraction(-79, 84000), -2)),
    _row("spin_sz:100:-1", "spin S_z", "m_s=-1, h=(1,0,0)", "large",
         [_t(Fraction(2, 10), 0), _t(Fraction(-54, 1400), -1)], _t(Fraction(211, 42000), -2)),
    _row("spin_sz:010:1", "spin S_z", "m_s=+1, h=(0,1,0)", "large",
         [_t(Fraction(1, 10), 0), _t(Fraction(3, 175), -1)], _t(Fraction(-1, 5250), -2)),
    _row("spin_sz:010:0", "spin S_z", "m_s=0, h=(0,1,0)", "large",
         [_t(Fraction(8, 10), 0), _t(Fraction(-6, 175), -1)], _t(Fraction(1, 2625), -2)),
    # extremes over h
    _row("ext_z:min", "extreme", "h_min, z", "small", [_t(h, 0), _t(4, 2)], _t(16, 3)),
    _row("ext_z:min", "extreme", "h_min, z", "large",
         [_t(Fraction(9, 10), 0), _t(Fraction(-1, 175), -1)], _t(Fraction(-3, 1225), -2)),
    _row("ext_z:max", "extreme", "h_max, z", "small", [_t(h, 0), _t(h, 1), _t(12, 2)],
         _t(Fraction(603, 4), 3)),
    _row("ext_z:max", "extreme", "h_max, z", "large",
         [_t(Fraction(2, 13), 0, 39), _t(Fraction(-317, 3640 * 13), -1, 39)],
         _t(Fraction("0.0472495605735") / 13, -2, 39)),
    _row("ext_x:min", "extreme", "h_min, x", "small", [_t(h, 0), _t(4, 2)], _t(24, 3)),
    _row("ext_x:min", "extreme", "h_min, x", "large",
         [_t(Fraction(9, 10), 0), _t(Fraction(-23, 525), -1)],
         _t(Fraction("0.00215142353237"), -2)),
    _row("ext_x:max", "extreme", "h_max, x", "small", [_t(1, 0), _t(-8, 2), _t(32, 3)], _t(128, 4)),
    _row("ext_x:max", "extreme", "h_max, x", "large",
         [_t(Fraction(2, 13), 0, 39), _t(Fraction(-1021, 9100 * 13), -1, 39)],
         _t(Fraction("0.0148723131165") / 13, -2, 39)),
)
del h
