import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from distgeo.errors import DomainError
from distgeo.geodesics import (conjugate_time, endpoint_r3, gauss_lemma_drift, jacobi, shoot,
                               shoot_many)
from distgeo.manifolds import ChartPoint, default_apex, ellipsoid, sphere, torus

angles = st.floats(0.0, 2 * math.pi, allow_nan=False)


def sphere_endpoint_error(step, alpha=0.7, T=2.5):
    m = sphere()
    p = ChartPoint(np.array([1.1, 0.3]), 0)
    v = m.unit_vector(p, alpha)
    path = shoot(m, p, v, T, step)
    return float(np.linalg.norm(endpoint_r3(m, path) - m.exp_closed(p, v, T)))


def test_rk4_order_on_sphere():
    steps = np.array([1e-2, 5e-3, 2.5e-3])
    errs = np.array([sphere_endpoint_error(h) for h in steps])
    order = np.polyfit(np.log(steps), np.log(errs), 1)[0]
    assert order >= 3.7


@given(angles)
def test_flat_geodesics_are_straight_lines(alpha):
    m = torus()
    p = ChartPoint(np.array([0.1, 0.2]), 0)
    v = np.array([math.cos(alpha), math.sin(alpha)])
    path = shoot(m, p, v, 0.9, 1e-2)
    ref = m.exp_closed(p, v, 0.9).coords
    assert m.chart_distance(path.endpoint, ref) < 1e-13


@given(angles)
def test_sphere_jacobi_norm_is_sin(alpha):
    m = sphere()
    p = default_apex(m)
    jac = jacobi(m, p, m.unit_vector(p, alpha), 3.0, 1e-3)
    t = jac.along.t
    assert np.max(np.abs(jac.norms() - np.abs(np.sin(t)))) < 1e-6


@given(angles)
def test_flat_jacobi_norm_is_t(alpha):
    m = torus()
    p = ChartPoint(np.zeros(2), 0)
    jac = jacobi(m, p, m.unit_vector(p, alpha), 1.0, 1e-2)
    assert np.max(np.abs(jac.norms() - jac.along.t)) < 1e-12
    assert jac.first_zero is None


@given(angles)
def test_sphere_conjugate_time_is_pi(alpha):
    m = sphere()
    p = default_apex(m)
    c = conjugate_time(m, p, m.unit_vector(p, alpha), 3.5)
    assert abs(c - math.pi) < 1e-6


@pytest.mark.parametrize("model", [torus(), sphere(), ellipsoid()],
                         ids=["torus", "sphere", "ellipsoid"])
def test_reversibility(model):
    p = model.best_chart(ChartPoint(np.array([1.2, 0.4]), 0)) if model.name != "torus" \
        else ChartPoint(np.array([0.3, 0.6]), 0)
    for alpha in (0.3, 2.0, 4.1):
        path = shoot(model, p, model.unit_vector(p, alpha), 2.0, 2e-3)
        back = shoot(model, path.endpoint, -path.final_velocity, 2.0, 2e-3)
        assert np.linalg.norm(endpoint_r3(model, back) - model.embed(p)) < 1e-6


@pytest.mark.parametrize("model", [torus(), sphere(), ellipsoid()],
                         ids=["torus", "sphere", "ellipsoid"])
def test_gauss_lemma_drift(model):
    p = default_apex(model)
    for path in shoot_many(model, p, np.linspace(0, 2 * np.pi, 16, endpoint=False), 3.0, 1e-3):
        assert gauss_lemma_drift(path) < 1e-7


def test_unit_speed_is_preserved():
    m = ellipsoid()
    p = default_apex(m)
    path = shoot(m, p, m.unit_vector(p, 0.9), 5.0, 1e-3)
    speeds = [m.norm(path.point(i), path.velocities[i]) for i in range(0, len(path.t), 50)]
    assert max(abs(s - 1) for s in speeds) < 1e-8


def test_shoot_rejects_bad_input():
    m = sphere()
    p = default_apex(m)
    with pytest.raises(DomainError):
        shoot(m, p, 2 * m.unit_vector(p, 0.0), 1.0)
    with pytest.raises(DomainError):
        shoot(m, p, m.unit_vector(p, 0.0), 0.0)


def test_state_at_interpolates_exactly():
    m = sphere()
    p = ChartPoint(np.array([1.0, 0.0]), 0)
    v = m.unit_vector(p, 0.4)
    path = shoot(m, p, v, 2.0, 1e-3)
    s, ch = path.state_at(1.23456)
    E = m.embed(ChartPoint(s[:2], ch))
    assert np.linalg.norm(E - m.exp_closed(p, v, 1.23456)) < 1e-10
    with pytest.raises(DomainError):
        path.state_at(3.0)
