"""Command line interface: tabulate every curve as CSV or JSON rows.

Every data command emits rows with the stable columns
``a, quantity, axis, closed_form, quadrature, abs_diff, units``.
Missing values are ``nan`` in CSV and ``null`` in JSON.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Optional

import click
import numpy as np

from . import closedform as cf
from . import extremize as ex
from . import povm
from . import states as st
from . import verify as vf
from .errors import PhotonPovmError, ToleranceNotMet
from .quadrature import QuadratureSpec

COLUMNS = ("a", "quantity", "axis", "closed_form", "quadrature", "abs_diff", "units")

ROW_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "photon-povm rows",
    "type": "array",
    "items": {
        "type": "object",
        "required": list(COLUMNS),
        "additionalProperties": False,
        "properties": {
            "a": {"type": "number", "exclusiveMinimum": 0},
            "quantity": {"type": "string"},
            "axis": {"type": "string"},
            "closed_form": {"type": ["number", "null"]},
            "quadrature": {"type": ["number", "null"]},
            "abs_diff": {"type": ["number", "null"]},
            "units": {"type": "string"},
        },
    },
}

NAN = float("nan")


# ------------------------------------------------------------------ config

def _complex_list(value, size: int, name: str) -> tuple[complex, ...]:
    """Parse ``[[re, im], ...]``, plain reals, or the aliases ``+``/``-`` for gamma."""
    if isinstance(value, str):
        alias = {"+": st.GAMMA_PLUS, "plus": st.GAMMA_PLUS, "-": st.GAMMA_MINUS, "minus": st.GAMMA_MINUS}
        if size == 2 and value.strip().lower() in alias:
            return tuple(alias[value.strip().lower()])
        value = json.loads(value)
    out = []
    for item in value:
        if isinstance(item, (list, tuple)):
            if len(item) != 2:
                raise click.BadParameter(f"{name} entries must be [re, im] pairs")
            out.append(complex(item[0], item[1]))
        else:
            out.append(complex(item))
    if len(out) != size:
        raise click.BadParameter(f"{name} needs {size} entries")
    c = np.array(out)
    return tuple(c / np.linalg.norm(c))


def _vector(value, name: str) -> Optional[tuple[float, float, float]]:
    if value is None:
        return None
    if isinstance(value, str):
        value = json.loads(value)
    v = tuple(float(x) for x in value)
    if len(v) != 3:
        raise click.BadParameter(f"{name} must have three entries")
    return v


@dataclass
class RunConfig:
    family: str = "polarization"
    gamma: Any = ((1.0, 0.0), (0.0, 0.0))
    h: Any = ((1.0, 0.0), (0.0, 0.0), (0.0, 0.0))
    x0: Any = (0.0, 0.0, 0.0)
    a_min: float = 1e-3
    a_max: float = 1e3
    points: int = 13
    log: bool = True
    axis: str = "xz"
    m_vector: Any = None
    radial_nodes: int = QuadratureSpec.radial_nodes
    theta_nodes: int = QuadratureSpec.theta_nodes
    phi_nodes: int = QuadratureSpec.phi_nodes
    tol: float = QuadratureSpec.target_rel_tol
    quadrature: bool = True
    output: Optional[str] = None
    format: str = "csv"
    x_max: float = 2.0
    x_points: int = 21

    def validate(self) -> "RunConfig":
        if self.family not in ("polarization", "spin"):
            raise click.BadParameter("family must be 'polarization' or 'spin'")
        if not (self.a_min > 0 and self.a_max > 0):
            raise click.BadParameter("a-grid bounds must be positive")
        if self.points < 1 or (self.points >= 2 and not self.a_min < self.a_max):
            raise click.BadParameter("need a-min < a-max for a grid of two or more points")
        if self.format not in ("csv", "json"):
            raise click.BadParameter("format must be csv or json")
        if not set(self.axis) <= set("xyz") or not self.axis:
            raise click.BadParameter("axis must be a combination of x, y, z")
        return self

    @property
    def spec(self) -> QuadratureSpec:
        return QuadratureSpec(self.radial_nodes, self.theta_nodes, self.phi_nodes,
                              target_rel_tol=self.tol)

    def a_grid(self) -> np.ndarray:
        if self.points == 1:
            return np.array([self.a_min])
        if self.log:
            return np.logspace(math.log10(self.a_min), math.log10(self.a_max), self.points)
        return np.linspace(self.a_min, self.a_max, self.points)

    @property
    def axes(self) -> list[str]:
        return [c for c in "xyz" if c in self.axis]


_SECTIONS = {"a_grid": {"min": "a_min", "max": "a_max", "points": "points", "scale": "log"},
             "quadrature": {"radial_nodes": "radial_nodes", "theta_nodes": "theta_nodes",
                            "phi_nodes": "phi_nodes", "target_rel_tol": "tol"}}


def flatten_config(raw: dict) -> dict:
    """Accept flat keys or the nested ``a_grid``/``state``/``quadrature`` sections."""
    flat = {}
    for key, value in raw.items():
        key = key.replace("-", "_")
        if key in _SECTIONS and isinstance(value, dict):
            for k, v in value.items():
                target = _SECTIONS[key].get(k, k)
                flat[target] = (v == "log") if (target == "log" and isinstance(v, str)) else v
        elif key == "state" and isinstance(value, dict):
            flat.update(flatten_config(value))
        elif key == "m":
            flat["m_vector"] = value
        else:
            flat[key] = value
    unknown = set(flat) - {f for f in RunConfig.__dataclass_fields__}
    if unknown:
        raise click.BadParameter(f"unknown config keys: {sorted(unknown)}")
    return flat


def build_config(flags: dict, config_path: Optional[str]) -> RunConfig:
    """Defaults, then command-line flags, then the config file (which wins)."""
    values = {k: v for k, v in flags.items() if v is not None}
    if config_path:
        values.update(flatten_config(json.loads(Path(config_path).read_text())))
    return RunConfig(**values).validate()


# ------------------------------------------------------------------- rows

def row(a, quantity, axis, closed, quad, units) -> dict:
    closed = NAN if closed is None else float(closed)
    quad = NAN if quad is None else float(quad)
    return {"a": float(a), "quantity": quantity, "axis": axis, "closed_form": closed,
            "quadrature": quad, "abs_diff": abs(closed - quad), "units": units}


def _gamma(cfg: RunConfig):
    return _complex_list(cfg.gamma, 2, "gamma")


def _h(cfg: RunConfig):
    return _complex_list(cfg.h, 3, "h")


def _pol_state(cfg: RunConfig, a: float, m):
    return st.make_pol_state(st.GaussianPolState(a, _gamma(cfg), x0=_vector(cfg.x0, "x0"), m=m))


def _spin_state(cfg: RunConfig, a: float, h=None):
    m = _vector(cfg.m_vector, "m-vector") or (1.0, 0.0, 0.0)
    params = st.GaussianSpinState(a, _h(cfg) if h is None else h, x0=_vector(cfg.x0, "x0"), m=m)
    return st.project_spin_state(params)[0]


def _ms(m: int) -> str:
    return f"{m:+d}" if m else "0"


def _same_h(h, ref) -> bool:
    return abs(abs(np.vdot(np.asarray(ref, complex), np.asarray(h, complex))) - 1) < 1e-12


def scan_rows(cfg: RunConfig, a: float) -> list[dict]:
    out = []
    if cfg.family == "polarization":
        gamma = _gamma(cfg)
        published = cf.pol_uncertainty(a)
        for ax in cfg.axes:
            k = "xyz".index(ax)
            aligned = tuple(np.eye(3)[k])
            m = _vector(cfg.m_vector, "m-vector") or aligned
            closed = None
            if np.allclose(np.cross(m, aligned), 0):
                closed = cf.pol_axis_moments(a, gamma, ax, _vector(cfg.x0, "x0")).product
            quad = None
            if cfg.quadrature:
                rep = povm.moments_and_uncertainty(_pol_state(cfg, a, m), cfg.spec, axes=(ax,))
                quad = rep.products[k]
            out.append(row(a, "product", ax, closed, quad, "hbar"))
            printed = published.z if ax == "z" else published.x
            out.append(row(a, "product_published", ax, printed, quad, "hbar"))
    else:
        h = _h(cfg)
        closed = cf.spin_uncertainty(a, h)
        rep = povm.moments_and_uncertainty(_spin_state(cfg, a), cfg.spec) if cfg.quadrature else None
        printed = None
        if _same_h(h, (1, 0, 0)) or _same_h(h, (0, 0, 1)):
            printed = cf.heis_100_published(a)
        elif _same_h(h, (0, 1, 0)):
            printed = cf.heis_010_published(a)
        for ax in cfg.axes:
            k = "xyz".index(ax)
            quad = None if rep is None else rep.products[k]
            out.append(row(a, "product", ax, closed[ax], quad, "hbar"))
            if printed is not None:
                out.append(row(a, "product_published", ax, printed[ax], quad, "hbar"))
    return out


def spin_dist_rows(cfg: RunConfig, a: float) -> list[dict]:
    if cfg.family == "polarization":
        closed = cf.pol_sz_distribution(a, _gamma(cfg))
        state = _pol_state(cfg, a, _vector(cfg.m_vector, "m-vector") or (1.0, 0.0, 0.0))
    else:
        closed = cf.spin_sz_distribution(a, _h(cfg))
        state = _spin_state(cfg, a)
    quad = povm.spin_distribution(state, spec=cfg.spec) if cfg.quadrature else {}
    out = [row(a, f"p(m_s={_ms(m)})", "z", closed[m], quad.get(m), "1") for m in (1, 0, -1)]
    out.append(row(a, "sum", "z", sum(closed.values()), sum(quad.values()) if quad else None, "1"))
    return out


def helicity_rows(cfg: RunConfig, a: float) -> list[dict]:
    if cfg.family == "polarization":
        g = _gamma(cfg)
        closed = {e: abs(g[0] + e * 1j * g[1]) ** 2 / 2 for e in (1, -1)}
        state = _pol_state(cfg, a, _vector(cfg.m_vector, "m-vector") or (1.0, 0.0, 0.0))
    else:
        closed = {1: None, -1: None}
        state = _spin_state(cfg, a)
    out = []
    for e in (1, -1):
        quad = povm.prob_helicity(state, eps=e, spec=cfg.spec) if cfg.quadrature else None
        out.append(row(a, f"p(helicity={e:+d})", "p", closed[e], quad, "1"))
    return out


def position_rows(cfg: RunConfig, a: float) -> list[dict]:
    if cfg.family == "polarization":
        state = _pol_state(cfg, a, _vector(cfg.m_vector, "m-vector") or (1.0, 0.0, 0.0))
    else:
        state = _spin_state(cfg, a)
    out = []
    xs = np.linspace(-cfg.x_max, cfg.x_max, cfg.x_points)
    for ax in cfg.axes:
        pts = np.outer(xs, np.eye(3)["xyz".index(ax)])
        dens = {m: povm.position_spin_density(state, pts, m, cfg.spec) for m in (1, 0, -1)}
        for i, x in enumerate(xs):
            for m in (1, 0, -1):
                out.append(row(a, f"density(m_s={_ms(m)},x={x:.6g})", ax, None, dens[m][i], "p0^3/hbar^3"))
    return out


def extremize_rows(cfg: RunConfig, a: float) -> list[dict]:
    out = []

    def quad_product(h, ax):
        if not cfg.quadrature:
            return None
        state = _spin_state(cfg, a, h)
        return povm.moments_and_uncertainty(state, cfg.spec).products["xyz".index(ax)]

    if "z" in cfg.axes:
        z = ex.z_axis_extremes(a)
        for which, val, rho in (("min", z.min, z.rho_min), ("max", z.max, z.rho_max)):
            h = ex.h_from_tilde(a, [math.sqrt((1 - rho) / 2), math.sqrt(rho), math.sqrt((1 - rho) / 2)])
            out.append(row(a, which, "z", val, quad_product(h, "z"), "hbar"))
            out.append(row(a, f"rho_{which}", "z", rho, None, "1"))
    if "x" in cfg.axes:
        x = ex.x_axis_extremes(a)
        for which, val, par in (("min", x.min, x.argmin), ("max", x.max, x.argmax)):
            out.append(row(a, which, "x", val, quad_product(par.to_h(a), "x"), "hbar"))
            out.append(row(a, f"lambda_{which}", "x", par.lam, None, "1"))
            out.append(row(a, f"xi_{which}", "x", par.xi, None, "1"))
            out.append(row(a, f"cos2_phi2_{which}", "x", math.cos(par.phi2) ** 2, None, "1"))
    return out


def thread_count() -> int:
    env = os.environ.get("PHOTON_POVM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise click.BadParameter("PHOTON_POVM_THREADS must be an integer") from None
    return max(1, min(8, os.cpu_count() or 1))


def collect(cfg: RunConfig, producer: Callable[[RunConfig, float], list[dict]]) -> list[dict]:
    """Evaluate ``producer`` over the a-grid concurrently; rows come back in ascending a."""
    grid = sorted(cfg.a_grid())

    def job(a):
        try:
            return producer(cfg, a)
        except ToleranceNotMet as err:
            raise click.ClickException(f"tolerance not met at a = {a:.6g}: {err}") from err
        except PhotonPovmError as err:
            raise click.ClickException(f"a = {a:.6g}: {err}") from err

    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        blocks = list(pool.map(job, grid))
    return [r for block in blocks for r in block]


def render(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        clean = [{k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in r.items()}
                 for r in rows]
        return json.dumps(clean, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


# -------------------------------------------------------------------- click

def common_options(fn):
    opts = [
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                     help="JSON file; its values override flags."),
        click.option("--family", type=click.Choice(["polarization", "spin"]), default=None),
        click.option("--gamma", default=None, help='Polarisation as [[re,im],[re,im]], or "+"/"-".'),
        click.option("--h", "h", default=None, help="Spin vector as [[re,im],[re,im],[re,im]]."),
        click.option("--x0", default=None, help="Position centroid [x,y,z]."),
        click.option("--a-min", type=float, default=None),
        click.option("--a-max", type=float, default=None),
        click.option("--points", type=int, default=None),
        click.option("--log/--linear", "log", default=None, help="Grid spacing in a (default log)."),
        click.option("--axis", default=None, help="Axes to report, e.g. xz (default) or xyz."),
        click.option("--m-vector", default=None, help="Frame reference vector [x,y,z]."),
        click.option("--radial-nodes", type=int, default=None),
        click.option("--theta-nodes", type=int, default=None),
        click.option("--phi-nodes", type=int, default=None),
        click.option("--tol", type=float, default=None, help="Quadrature refinement tolerance."),
        click.option("--quadrature/--closed-only", "quadrature", default=None,
                     help="Also compute the quadrature column (default on)."),
        click.option("--output", type=click.Path(dir_okay=False), default=None),
        click.option("--format", "format", type=click.Choice(["csv", "json"]), default=None),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _run(producer, config_path, **flags):
    cfg = build_config(flags, config_path)
    emit(render(collect(cfg, producer), cfg.format), cfg.output)


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Tabulate uncertainty products, spin and helicity distributions of Gaussian photon states."""


@main.command("scan-uncertainty")
@common_options
def scan_uncertainty(config_path, **flags):
    """Uncertainty products per axis: closed form against quadrature."""
    _run(scan_rows, config_path, **flags)


@main.command("spin-dist")
@common_options
def spin_dist(config_path, **flags):
    """Probabilities of S_z = +1, 0, -1 and their sum."""
    _run(spin_dist_rows, config_path, **flags)


@main.command("helicity-dist")
@common_options
def helicity_dist(config_path, **flags):
    """Probabilities of helicity +1 and -1."""
    _run(helicity_rows, config_path, **flags)


@main.command("position-density")
@common_options
@click.option("--x-max", type=float, default=None, help="Half-length of the sampled line.")
@click.option("--x-points", type=int, default=None)
def position_density(config_path, **flags):
    """Spin-resolved position densities along lines through the origin."""
    _run(position_rows, config_path, **flags)


@main.command("extremize")
@common_options
def extremize_cmd(config_path, **flags):
    """Minimum and maximum products over h with their arguments."""
    flags["family"] = "spin"
    _run(extremize_rows, config_path, **flags)


@main.command("verify")
@click.option("--only", multiple=True, help="Module name or criterion number; repeatable.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.option("--quiet", is_flag=True, help="One line per criterion.")
def verify_cmd(only, fmt, quiet):
    """Run the acceptance suite; exit status 1 if any criterion fails."""
    results = vf.run_suite(only)
    if fmt == "json":
        click.echo(json.dumps([asdict(r) for r in results], indent=1, default=str))
    else:
        click.echo(vf.format_report(results, verbose=not quiet))
    sys.exit(0 if results and all(r.passed for r in results) else 1)


@main.command("schema")
def schema_cmd():
    """Print the JSON schema of data rows."""
    click.echo(json.dumps(ROW_SCHEMA, indent=1))


if __name__ == "__main__":
    main()
