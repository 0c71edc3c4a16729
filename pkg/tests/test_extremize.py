import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from photon_povm import closedform as cf
from photon_povm import extremize as ex
from photon_povm.errors import DomainError, InvalidParam

R313 = math.sqrt(3 / 13)


@pytest.mark.parametrize("a", [1e-3, 0.2, 3.0, 50.0])
def test_cubic_endpoints(a):
    assert ex.z_product_sq(a, 0.0) == pytest.approx(cf.heis_100(a)["z"] ** 2, rel=1e-12)
    assert ex.z_product_sq(a, 1.0) == pytest.approx(cf.heis_010(a)["z"] ** 2, rel=1e-12)


def test_cubic_matches_moment_table_on_reparametrised_h():
    rng = np.random.default_rng(11)
    for _ in range(20):
        a, rho = 10 ** rng.uniform(-3, 3), rng.uniform()
        split = rng.uniform()
        phases = np.exp(2j * np.pi * rng.uniform(size=3))
        ht = phases * np.sqrt([(1 - rho) * split, rho, (1 - rho) * (1 - split)])
        h = ex.h_from_tilde(a, ht)
        assert ex.z_product_sq(a, rho) == pytest.approx(cf.spin_uncertainty(a, h)["z"] ** 2, rel=1e-9)


def test_published_cubic_differs():
    assert abs(ex.z_product_sq(1.0, 0.5, published=True) - ex.z_product_sq(1.0, 0.5)) > 1e-3


def test_z_minimum_switches():
    assert ex.z_axis_extremes(1.0).rho_min == 0.0
    assert ex.z_axis_extremes(1.0).min == pytest.approx(cf.heis_100(1.0)["z"], rel=1e-14)
    assert ex.z_axis_extremes(10.0).rho_min == 1.0


def test_thresholds():
    assert ex.z_threshold() == pytest.approx(6.13116, abs=1e-5)
    assert ex.x_threshold() == pytest.approx(2.6095, abs=1e-4)


def test_x_minimum_corner():
    assert ex.x_axis_extremes(1.0).argmin.lam == 1.0
    assert ex.x_axis_extremes(5.0).argmin.lam == 0.0
    assert ex.x_axis_extremes(1e-4).min == pytest.approx(0.5 + 4e-8, abs=1e-9)


def test_x_maximum_plateau():
    assert ex.x_axis_extremes(1e4).max == pytest.approx(2 * R313, abs=1e-4)


@pytest.mark.xfail(strict=True, reason="the 1/a coefficient -1021/9100 does not match the moment table")
def test_x_maximum_quoted_correction():
    a = 1e4
    quoted = 2 * R313 - 1021 / 9100 * R313 / a
    assert ex.x_axis_extremes(a).max == pytest.approx(quoted, abs=1e-9)


@pytest.mark.parametrize("a", np.logspace(-4, 4, 17))
def test_extremes_sandwich_fixed_h(a):
    z, x = ex.z_axis_extremes(a), ex.x_axis_extremes(a)
    for h in ((1, 0, 0), (0, 1, 0)):
        prod = cf.spin_uncertainty(a, h)
        assert z.min - 1e-9 <= prod["z"] <= z.max + 1e-9
        assert x.min - 1e-9 <= prod["x"] <= x.max + 1e-9


@given(st.sampled_from([0.05, 1.0, 4.0, 30.0]), st.floats(0, 1), st.floats(0, 1),
       st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_no_h_escapes_x_extremes(a, lam, xi, phi1, phi2):
    ext = ex.x_axis_extremes(a)
    v = math.sqrt(ex.x_product_sq(a, ex.HTildeParam(lam, xi, phi2, phi1)))
    assert ext.min - 1e-9 <= v <= ext.max + 1e-9


@given(st.sampled_from([0.05, 1.0, 8.0]), st.floats(0, 1))
def test_no_rho_escapes_z_extremes(a, rho):
    ext = ex.z_axis_extremes(a)
    assert ext.min - 1e-12 <= math.sqrt(ex.z_product_sq(a, rho)) <= ext.max + 1e-12


@pytest.mark.parametrize("a", [0.3, 1.0, 3.0])
def test_interior_z_extremum_stationary(a):
    z = ex.z_axis_extremes(a)
    assert 0 < z.rho_max < 1
    assert abs(ex.z_cubic(a).deriv()(z.rho_max)) < 1e-8


@pytest.mark.parametrize("a", [1.0, 3.0, 100.0])
def test_interior_x_extremum_stationary(a):
    xi = ex.x_axis_extremes(a).argmax.xi
    assert 0 < xi < 1
    f = lambda t: ex.x_product_sq(a, ex.HTildeParam(0.0, t, math.pi / 2))
    assert abs(ex.stencil_derivative(f, xi)) < 1e-8


def test_x_maximum_at_boundary_for_small_a():
    a = 0.3
    ext = ex.x_axis_extremes(a)
    assert ext.argmax.xi == 1.0
    f = lambda t: ex.x_product_sq(a, ex.HTildeParam(0.0, t, math.pi / 2))
    assert ex.stencil_derivative(f, 1 - 1e-3) > 0


def test_validation():
    with pytest.raises(DomainError):
        ex.z_axis_extremes(0.0)
    with pytest.raises(DomainError):
        ex.HTildeParam(1.5, 0.0)
    with pytest.raises(InvalidParam):
        ex.h_from_tilde(1.0, (0, 0, 0))


def test_golden_max_finds_parabola_peak():
    x, v = ex.golden_max(lambda t: -(t - 0.3) ** 2)
    assert x == pytest.approx(0.3, abs=1e-8)
    assert ex.golden_max(lambda t: t)[0] == pytest.approx(1.0)
