import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from photon_povm import states as S
from photon_povm.errors import InvalidParam, ToleranceNotMet
from photon_povm.quadrature import (QuadratureSpec, gaussian_moment, momentum_grid, photon_inner_product,
                                    position_wavefunction)


def test_spec_validation_and_refinement():
    with pytest.raises(InvalidParam):
        QuadratureSpec(radial_nodes=3)
    with pytest.raises(InvalidParam):
        QuadratureSpec(target_rel_tol=0)
    fine = QuadratureSpec(10, 11, 12).refined()
    assert (fine.radial_nodes, fine.theta_nodes, fine.phi_nodes) == (15, 17, 18)


@pytest.mark.parametrize("a", [1e-4, 0.01, 1.0, 100.0])
def test_gaussian_moments(a):
    assert gaussian_moment(lambda p: np.ones(len(p)), a) == pytest.approx(1.0, rel=1e-10)
    assert gaussian_moment(lambda p: p[:, 2], a) == pytest.approx(1.0, rel=1e-10)
    d2 = gaussian_moment(lambda p: np.sum((p - [0, 0, 1]) ** 2, axis=1), a)
    assert d2 == pytest.approx(6 * a, rel=1e-9)


@pytest.mark.parametrize("polar", [(1, 0, 0), (0.3, 0.4, -0.2), (0, 0, -1)])
def test_tilted_grids_integrate_the_gaussian(polar):
    for a in (0.01, 0.5, 30.0):
        one = gaussian_moment(lambda p: np.ones(len(p)), a, check=False)
        pts, w = momentum_grid(a, (0, 0, 1), polar_axis=polar)
        g = np.exp(-np.sum((pts - [0, 0, 1]) ** 2, axis=1) / (4 * a)) / (4 * np.pi * a) ** 1.5
        assert w @ g == pytest.approx(one, rel=1e-9)


def test_grid_avoids_polar_axis():
    axis = np.array([1.0, 0, 0])
    pts, _ = momentum_grid(0.5, (0, 0, 1), polar_axis=axis)
    r = np.linalg.norm(pts, axis=1)
    assert np.min(np.linalg.norm(np.cross(pts, axis), axis=1) / r) > 1e-12


@given(st.floats(-3, 3), st.floats(0.01, 5))
@settings(max_examples=20)
def test_moment_is_linear(alpha, a):
    w1 = lambda p: p[:, 0] ** 2
    w2 = lambda p: np.cos(p[:, 2])
    lhs = gaussian_moment(lambda p: alpha * w1(p) + w2(p), a, check=False)
    rhs = alpha * gaussian_moment(w1, a, check=False) + gaussian_moment(w2, a, check=False)
    assert lhs == pytest.approx(rhs, abs=1e-12 * (1 + abs(alpha)))


def test_refinement_changes_less_than_tolerance():
    spec = QuadratureSpec()
    fine = QuadratureSpec(96, 96, 96)
    for a in (0.1, 1.0, 10.0):
        w = lambda p: np.sum(p * p, axis=1) ** -1
        c = gaussian_moment(w, a, spec=spec, check=False)
        f = gaussian_moment(w, a, spec=fine, check=False)
        assert abs(c - f) < spec.target_rel_tol * abs(f)


def test_tolerance_not_met_is_raised():
    coarse = QuadratureSpec(4, 4, 4, target_rel_tol=1e-14)
    with pytest.raises(ToleranceNotMet):
        gaussian_moment(lambda p: np.cos(40 * p[:, 0]), 1.0, spec=coarse)


def test_inner_products():
    plus = S.make_pol_state(S.GaussianPolState(0.2, S.GAMMA_PLUS))
    minus = S.make_pol_state(S.GaussianPolState(0.2, S.GAMMA_MINUS))
    assert photon_inner_product(plus, plus).real == pytest.approx(1.0, abs=1e-10)
    assert abs(photon_inner_product(plus, minus)) < 1e-12


def test_position_translation_covariance():
    d = np.array([0.3, -0.2, 0.5])
    base = S.make_pol_state(S.GaussianPolState(0.5, (1.0, 0.0)))
    moved = S.make_pol_state(S.GaussianPolState(0.5, (1.0, 0.0), x0=d))
    x = np.array([[0.1, 0.2, -0.3], [0.0, 0.4, 0.2]])
    a = np.sum(np.abs(position_wavefunction(base, x)) ** 2, axis=1)
    b = np.sum(np.abs(position_wavefunction(moved, x + d)) ** 2, axis=1)
    assert np.allclose(a, b, rtol=1e-9)


def test_position_value_self_consistent():
    state = S.make_pol_state(S.GaussianPolState(0.5, (1.0, 0.0)))
    base = QuadratureSpec()
    doubled = QuadratureSpec(96, 96, 96)
    v1 = position_wavefunction(state, [0, 0, 0], base)
    v2 = position_wavefunction(state, [0, 0, 0], doubled, check=False)
    assert np.max(np.abs(v1 - v2)) < 1e-6 * np.max(np.abs(v2))


@pytest.mark.slow
def test_position_density_normalised():
    # projected spin state: its position tail decays fast enough for a finite box
    state, _ = S.project_spin_state(S.GaussianSpinState(0.02, (1, 0, 0)))
    spec = QuadratureSpec(40, 40, 32)
    half = 12.0
    xg, xw = np.polynomial.legendre.leggauss(20)
    xg, xw = xg * half, xw * half
    pts = np.stack(np.meshgrid(xg, xg, xg, indexing="ij"), axis=-1).reshape(-1, 3)
    wts = np.einsum("i,j,k->ijk", xw, xw, xw).reshape(-1)
    dens = np.sum(np.abs(position_wavefunction(state, pts, spec, check=False)) ** 2, axis=1)
    assert wts @ dens == pytest.approx(1.0, abs=1e-4)
