"""Acceptance suite: ten numbered criteria with measured and expected values.

Each criterion returns a :class:`CriterionResult`; :func:`run_suite` runs all
of them (or those touching selected modules) and :func:`format_report`
renders one line per criterion followed by indented details.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from . import closedform as cf
from . import extremize as ex
from . import geometry as geo
from . import povm
from . import states as st
from .quadrature import DEFAULT_SPEC, QuadratureSpec

SQRT_7_12 = math.sqrt(7 / 12)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    measured: float
    expected: float
    tolerance: float
    details: list[str] = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.number:>2}. {self.title}: measured={self.measured:.10g} "
                f"expected={self.expected:.10g} tol={self.tolerance:.1e}")


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    modules: tuple[str, ...]
    run: Callable[[QuadratureSpec], CriterionResult]


# ------------------------------------------------------------- criteria 1-4

def small_a_limit(spec: QuadratureSpec) -> CriterionResult:
    a = 1e-4
    closed = cf.pol_uncertainty(a).z
    state = st.make_pol_state(st.GaussianPolState(a, (1.0, 0.0), m=(0.0, 0.0, 1.0)))
    quad = povm.moments_and_uncertainty(state, spec, axes=("z",)).products[2]
    exact = cf.pol_uncertainty_exact(a, (1.0, 0.0))["z"]
    ok = abs(closed - 0.5) <= 1e-7 and abs(quad - closed) <= 1e-6
    return CriterionResult(1, "small-a Heisenberg limit", ok, closed, 0.5, 1e-7, [
        f"quadrature (gamma=(1,0), m=z) = {quad:.12f}, |quad - closed| = {abs(quad - closed):.2e} (tol 1e-6)",
        f"gamma-resolved closed form = {exact:.12f}",
    ])


def large_a_plateau(spec: QuadratureSpec) -> CriterionResult:
    pr = cf.pol_uncertainty(1e6)
    vals = {"x": pr.x, "y": pr.x, "z": pr.z}
    worst = max(abs(v - SQRT_7_12) for v in vals.values())
    return CriterionResult(2, "large-a plateau sqrt(7/12)", worst <= 1e-4, max(vals.values(), key=lambda v: abs(v - SQRT_7_12)),
                           SQRT_7_12, 1e-4, [f"{k} = {v:.10f}" for k, v in vals.items()])


def spin_asymptote(spec: QuadratureSpec) -> CriterionResult:
    v = cf.spin_uncertainty(1e4, (1, 0, 0))["z"]
    return CriterionResult(3, "spin-family asymptote sqrt(21)/5", abs(v - 0.916515) <= 1e-3, v, 0.916515, 1e-3)


def anomalous_x_limit(spec: QuadratureSpec) -> CriterionResult:
    v = cf.spin_uncertainty(1e-4, (0, 1, 0))["x"]
    return CriterionResult(4, "anomalous x-axis limit", abs(v - 1.0) <= 1e-3, v, 1.0, 1e-3)


# ---------------------------------------------------------------- criterion 5

DUAL_PATH_WIDTHS = (0.1, 1.0, 10.0)


def _rel(x: float, y: float, floor: float) -> float:
    return abs(x - y) / max(abs(y), floor)


def dual_path(spec: QuadratureSpec) -> CriterionResult:
    worst, details = 0.0, []
    spin_reports: dict = {}
    names = ("<P>", "<P^2>", "<X>", "<X^2>")
    cases = [("gamma=(1,0)", "pol", (1.0, 0.0)), ("gamma+", "pol", tuple(st.GAMMA_PLUS)),
             ("h=(1,0,0)", "spin", (1, 0, 0)), ("h=(0,1,0)", "spin", (0, 1, 0)),
             ("h=(0,0,1)", "spin", (0, 0, 1))]
    for a in DUAL_PATH_WIDTHS:
        for label, family, coef in cases:
            for ax in ("x", "z"):
                k = "xyz".index(ax)
                if family == "pol":
                    # frame reference vector along the measured axis
                    m = tuple(np.eye(3)[k])
                    state = st.make_pol_state(st.GaussianPolState(a, coef, m=m))
                    closed = cf.pol_axis_moments(a, coef, ax)
                    rep = povm.moments_and_uncertainty(state, spec, axes=(ax,))
                else:
                    closed = cf.spin_axis_moments(a, coef, ax)
                    key = (a, coef)
                    if key not in spin_reports:
                        state, _ = st.project_spin_state(st.GaussianSpinState(a, coef))
                        spin_reports[key] = povm.moments_and_uncertainty(state, spec)
                    rep = spin_reports[key]
                quad = (rep.mean_p[k], rep.mean_p2[k], rep.mean_x[k], rep.mean_x2[k])
                floors = (math.sqrt(closed.mean_p2), closed.mean_p2, math.sqrt(closed.mean_x2), closed.mean_x2)
                errs = [_rel(q, c, f) for q, c, f in zip(quad, closed, floors)]
                errs.append(_rel(rep.products[k], closed.product, 1.0))
                e = max(errs)
                worst = max(worst, e)
                if e > 1e-6:
                    bad = [n for n, x in zip(names + ("product",), errs) if x > 1e-6]
                    details.append(f"a={a} {label} {ax}: mismatch in {bad}, max rel {e:.2e}")
    # closed-form product formulas against the moment table
    for a in DUAL_PATH_WIDTHS:
        for fn, h in ((cf.heis_100, (1, 0, 0)), (cf.heis_010, (0, 1, 0))):
            table = cf.spin_uncertainty(a, h)
            for ax, v in fn(a).items():
                e = _rel(v, table[ax], 1.0)
                worst = max(worst, e)
                if e > 1e-6:
                    details.append(f"a={a} {fn.__name__} {ax}: {v} vs moment table {table[ax]}")
    for a in DUAL_PATH_WIDTHS:
        pub1, pub2 = cf.heis_100_published(a), cf.heis_010_published(a)
        details.append(f"flag a={a}: printed h=(1,0,0) x = {pub1['x']:.8f} vs {cf.heis_100(a)['x']:.8f}; "
                       f"printed h=(0,1,0) z = {pub2['z']:.8f} vs {cf.heis_010(a)['z']:.8f}")
    return CriterionResult(5, "dual-path equivalence", worst <= 1e-6, worst, 0.0, 1e-6, details)


# ---------------------------------------------------------------- criterion 6

def sigma_claims(spec: QuadratureSpec) -> CriterionResult:
    rng = np.random.default_rng(20240606)
    widths = 10 ** rng.uniform(-3, 3, size=10)
    worst, details = 0.0, []
    for a in widths:
        checks = {}
        sig = cf.spin_sz_matrices(a)
        checks["spin sum = K"] = np.max(np.abs(sig[1] + sig[0] + sig[-1] - cf.k_matrix(a)))
        for h in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
            d = cf.spin_sz_distribution(a, h)
            checks[f"spin {h} sums to 1"] = abs(sum(d.values()) - 1)
        d010 = cf.spin_sz_distribution(a, (0, 1, 0))
        checks["p(+1|010) = p(-1|010)"] = abs(d010[1] - d010[-1])
        checks["p(+1|100) = p(-1|001)"] = abs(cf.spin_sz_distribution(a, (1, 0, 0))[1]
                                             - cf.spin_sz_distribution(a, (0, 0, 1))[-1])
        ps = cf.pol_sz_matrices(a)
        checks["pol sum = I"] = np.max(np.abs(ps[1] + ps[0] + ps[-1] - np.eye(2)))
        for g, name in ((st.GAMMA_PLUS, "+"), (st.GAMMA_MINUS, "-")):
            v = ps[1] @ g
            checks[f"gamma{name} eigenvector"] = abs(abs(np.vdot(g, v)) - np.linalg.norm(v))
        dp, dm = cf.pol_sz_distribution(a, st.GAMMA_PLUS), cf.pol_sz_distribution(a, st.GAMMA_MINUS)
        checks["p(0|+) = p(0|-)"] = abs(dp[0] - dm[0])
        checks["p(+1|+) = p(-1|-)"] = abs(dp[1] - dm[-1])
        for k, v in checks.items():
            worst = max(worst, float(v))
            if v > 1e-10:
                details.append(f"a={a:.4g}: {k} off by {v:.2e}")
    pub = cf.spin_sz_matrices_published(1.0)
    off = np.max(np.abs(pub[1] + pub[0] + pub[-1] - cf.k_matrix(1.0)))
    details.append(f"flag: printed middle entries give |sum - K| = {off:.3f} at a=1")
    return CriterionResult(6, "Sigma completeness and symmetry", worst <= 1e-10, worst, 0.0, 1e-10, details)


# ---------------------------------------------------------------- criterion 7

def row_value(key: str, a: float) -> float:
    """Closed-form value of the quantity a table row expands."""
    kind, _, rest = key.partition(":")
    if kind == "pol_z":
        return cf.pol_uncertainty(a).z
    if kind == "pol_x":
        return cf.pol_uncertainty(a).x
    if kind == "pol_sz":
        sign, m = rest.split(":")
        g = st.GAMMA_PLUS if sign == "+" else st.GAMMA_MINUS
        return cf.pol_sz_distribution(a, g)[int(m)]
    if kind in ("spin_100", "spin_010"):
        fn = cf.heis_100 if kind == "spin_100" else cf.heis_010
        return fn(a)[rest]
    if kind == "spin_sz":
        hkey, m = rest.split(":")
        h = tuple(int(c) for c in hkey)
        return cf.spin_sz_distribution(a, h)[int(m)]
    if kind == "ext_z":
        return getattr(ex.z_axis_extremes(a), rest)
    if kind == "ext_x":
        return getattr(ex.x_axis_extremes(a), rest)
    raise KeyError(key)


def row_check(row: cf.AsymptoticSeries, factor: float = 3.0) -> tuple[bool, float, str]:
    a = 1e-3 if row.regime == "small" else 1e3
    closed = row_value(row.key, a)
    series = row.evaluate(a)
    bound = abs(row.first_omitted.value(a))
    ratio = abs(closed - series) / bound
    ok = ratio < factor
    msg = (f"{row.group} {row.label} ({row.regime} a={a:g}): closed={closed:.12g} "
           f"series={series:.12g} |diff|/omitted={ratio:.3g}")
    return ok, ratio, msg


def table_rows(spec: QuadratureSpec) -> CriterionResult:
    worst, details, fails = 0.0, [], 0
    for row in cf.TABLE_ROWS:
        ok, ratio, msg = row_check(row)
        worst = max(worst, ratio)
        if not ok:
            fails += 1
            details.append("FAIL " + msg)
    details.insert(0, f"{len(cf.TABLE_ROWS) - fails}/{len(cf.TABLE_ROWS)} rows within 3x first omitted term")
    return CriterionResult(7, "table-row regression", fails == 0, worst, 0.0, 3.0, details)


# ---------------------------------------------------------------- criterion 8

def thresholds(spec: QuadratureSpec) -> CriterionResult:
    z, x = ex.z_threshold(), ex.x_threshold()
    ok = abs(z - 6.131) <= 0.01 and abs(x - 2.610) <= 0.01
    return CriterionResult(8, "extremum switch points", ok, z, 6.131, 0.01, [
        f"z switch a* = {z:.9f} (expected 6.131 +- 0.01)",
        f"x switch a* = {x:.9f} (expected 2.610 +- 0.01)",
    ])


# ---------------------------------------------------------------- criterion 9

BALL_RADIUS = 0.5


def dichotomy(spec: QuadratureSpec) -> CriterionResult:
    pol = st.make_pol_state(st.GaussianPolState(1.0, (1.0, 0.0)))
    spin, _ = st.project_spin_state(st.GaussianSpinState(1.0, (1, 0, 0)))
    region = povm.MomentumRegion.ball((0.3, -0.2, 1.1), 0.8)
    sharp = {
        "momentum ball": povm.project_effect(povm.identity_kernel(region)),
        "helicity +1": povm.project_effect(povm.helicity_kernel(1)),
        "helicity -1": povm.project_effect(povm.helicity_kernel(-1, region)),
    }
    sharp_worst, details = 0.0, []
    for sname, state in (("pol a=1", pol), ("spin a=1", spin)):
        for name, kernel in sharp.items():
            d = povm.effect_defect(state, kernel, spec)
            sharp_worst = max(sharp_worst, d)
            details.append(f"{name} on {sname}: defect {d:.2e}")
    sz = min(povm.effect_defect(pol, povm.project_effect(povm.spin_kernel(m)), spec) for m in (1, 0, -1))
    ball = povm.position_ball_defect(pol, BALL_RADIUS)
    details.append(f"S_z effects on pol a=1: smallest defect {sz:.3e}")
    details.append(f"position ball r={BALL_RADIUS} on pol a=1: defect {ball['projected']:.3e} "
                   f"(unprojected {ball['unprojected']:.1e}, probability {ball['probability']:.4f})")
    unsharp = min(sz, ball["projected"])
    ok = sharp_worst <= 1e-12 and unsharp > 1e-3
    return CriterionResult(9, "sharp/unsharp dichotomy", ok, unsharp, 1e-3, 1e-12, details)


# --------------------------------------------------------------- criterion 10

def structural(spec: QuadratureSpec, samples: int = 64) -> CriterionResult:
    rng = np.random.default_rng(7)
    checks: dict[str, tuple[float, float]] = {}
    p = rng.normal(size=(samples, 3))
    m = rng.normal(size=3)
    m /= np.linalg.norm(m)
    pi = geo.transverse_projector(p)
    checks["pi idempotent"] = (float(np.max(np.abs(pi @ pi - pi))), 1e-12)
    cp = geo.conjugated_projector(p)
    checks["Pi idempotent"] = (float(np.max(np.abs(cp @ cp - cp))), 1e-12)
    v = geo.V_MATRIX
    checks["V unitary"] = (float(np.max(np.abs(v @ v.conj().T - np.eye(3)))), 1e-14)
    err = 0.0
    for _ in range(samples):
        axis = rng.normal(size=3)
        ang = rng.uniform(-np.pi, np.pi)
        lhs = v.conj().T @ geo.spin_rotation(axis, ang) @ v
        err = max(err, float(np.max(np.abs(lhs - geo.rotation_matrix(axis, ang)))))
    checks["V^+ exp(-i phi n.S) V = R"] = (err, 1e-12)
    fr = geo.intrinsic_frame(p, m)
    e = fr.stacked()
    gram = np.einsum("nic,njc->nij", e, e)
    checks["frame orthonormal"] = (float(np.max(np.abs(gram - np.eye(3)))), 1e-12)
    grad = geo.frame_gradient(p, m)
    step = 1e-6
    fd = np.zeros_like(grad)
    for j in range(3):
        dp = np.zeros(3)
        dp[j] = step
        hi, lo = geo.intrinsic_frame(p + dp, m).stacked(), geo.intrinsic_frame(p - dp, m).stacked()
        fd[:, :, j, :] = (hi - lo) / (2 * step)
    checks["frame gradient vs finite differences"] = (float(np.max(np.abs(grad - fd))), 1e-6)
    checks["prob_spin_n covariance"] = (covariance_defect(spec, rng), 1e-8)
    worst_ratio = max(val / tol for val, tol in checks.values())
    details = [f"{k}: {val:.2e} (tol {tol:.0e})" for k, (val, tol) in checks.items()]
    return CriterionResult(10, "structural invariants", worst_ratio <= 1.0, worst_ratio, 1.0, 1.0, details)


def covariance_defect(spec: QuadratureSpec, rng: np.random.Generator) -> float:
    """Largest ``|p(S_{Rn} = m; U psi) - p(S_n = m; psi)|`` over m for a random R, n, shift."""
    gamma = rng.normal(size=2) + 1j * rng.normal(size=2)
    gamma /= np.linalg.norm(gamma)
    state = st.make_pol_state(st.GaussianPolState(0.5, gamma))
    axis = rng.normal(size=3)
    rot = geo.rotation_matrix(axis, rng.uniform(0, np.pi))
    shift = rng.normal(size=3)
    moved = st.apply_rototranslation(st.embed_photon_state(state), shift, rot)
    # the image is discontinuous along the rotated rays +/- R m
    image = povm.with_norm(st.project_extended(moved, m=rot @ state.m), spec)
    n = rng.normal(size=3)
    n /= np.linalg.norm(n)
    worst = 0.0
    for m_s in (1, 0, -1):
        before = povm.prob_spin_n(state, n, m_s, spec)
        after = povm.prob_spin_n(image, rot @ n, m_s, spec)
        worst = max(worst, abs(after - before))
    return worst


# ---------------------------------------------------------------- registry

CRITERIA: tuple[Criterion, ...] = (
    Criterion(1, "small-a Heisenberg limit", ("specfun", "closedform", "quadrature", "povm"), small_a_limit),
    Criterion(2, "large-a plateau", ("specfun", "closedform"), large_a_plateau),
    Criterion(3, "spin-family asymptote", ("specfun", "closedform"), spin_asymptote),
    Criterion(4, "anomalous x-axis limit", ("specfun", "closedform"), anomalous_x_limit),
    Criterion(5, "dual-path equivalence", ("closedform", "quadrature", "povm", "states", "geometry"), dual_path),
    Criterion(6, "Sigma completeness and symmetry", ("specfun", "closedform"), sigma_claims),
    Criterion(7, "table-row regression", ("specfun", "closedform", "extremize"), table_rows),
    Criterion(8, "extremum switch points", ("extremize",), thresholds),
    Criterion(9, "sharp/unsharp dichotomy", ("povm", "quadrature", "states"), dichotomy),
    Criterion(10, "structural invariants", ("geometry", "states", "povm"), structural),
)


def select(only: Optional[Iterable[str]] = None) -> list[Criterion]:
    if not only:
        return list(CRITERIA)
    wanted = set(only)
    return [c for c in CRITERIA if wanted & set(c.modules) or str(c.number) in wanted]


def run_suite(only: Optional[Iterable[str]] = None, spec: QuadratureSpec = DEFAULT_SPEC) -> list[CriterionResult]:
    out = []
    for crit in select(only):
        try:
            out.append(crit.run(spec))
        except Exception as err:  # a crash is reported as a failure of that criterion
            out.append(CriterionResult(crit.number, crit.title, False, float("nan"), float("nan"),
                                       float("nan"), [f"error: {type(err).__name__}: {err}"]))
    return out


def format_report(results: list[CriterionResult], verbose: bool = True) -> str:
    lines = []
    for r in results:
        lines.append(r.line())
        if verbose:
            lines.extend("      " + d for d in r.details)
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} criteria passed")
    return "\n".join(lines)
