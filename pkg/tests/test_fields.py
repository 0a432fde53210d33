import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from distgeo.fields import (Bump, TestVectorField, Wave, bump_1d, random_bumps, scalar_bump,
                            vector_bump)
from distgeo.manifolds import default_apex, sphere, torus

pts = st.tuples(st.floats(-0.25, 0.25), st.floats(-0.25, 0.25))


def fd_grad(fn, x, h=1e-6):
    return np.stack([(fn(x + h * e) - fn(x - h * e)) / (2 * h) for e in np.eye(2)], axis=-1)


def test_bump_1d_derivatives():
    s = np.linspace(-0.95, 0.95, 41)
    b, b1, b2 = bump_1d(s)
    h = 1e-6
    assert np.allclose(b1, (bump_1d(s + h)[0] - bump_1d(s - h)[0]) / (2 * h), atol=1e-7)
    assert np.allclose(b2, (bump_1d(s + h)[1] - bump_1d(s - h)[1]) / (2 * h), atol=1e-6)
    assert bump_1d(np.array([1.0, 1.5]))[0].tolist() == [0.0, 0.0]


@given(pts)
def test_bump_gradient_and_hessian(x):
    B = Bump((0.1, -0.05), 0.3, amplitude=2.0)
    x = np.array(x)
    _, g, H = B.evaluate(x[None])
    assert np.allclose(g[0], fd_grad(lambda y: B.evaluate(y[None])[0][0], x), atol=1e-6)
    assert np.allclose(H[0], fd_grad(lambda y: B.evaluate(y[None])[1][0], x), atol=1e-5)


def test_periodic_bump_wraps():
    B = Bump((0.95, 0.5), 0.2, periods=(1.0, 1.0))
    assert B.evaluate(np.array([[0.05, 0.5]]))[0][0] == pytest.approx(
        B.evaluate(np.array([[0.85, 0.5]]))[0][0])


@given(pts, st.floats(-3, 3))
def test_vector_field_tensor_derivatives(x, angle):
    fld = TestVectorField(Bump((0.0, 0.0), 0.35) * Wave((2.0, -1.0)),
                          (math.cos(angle), math.sin(angle)), rate=(1.5, -0.7))
    x = np.array(x)
    _, dV, ddV = fld.evaluate(x[None])
    assert np.allclose(dV[0], fd_grad(lambda y: fld.evaluate(y[None])[0][0], x), atol=1e-6)
    assert np.allclose(ddV[0], fd_grad(lambda y: fld.evaluate(y[None])[1][0], x), atol=1e-5)
    _, dT, ddT = fld.tensor(x[None])
    assert np.allclose(dT[0], fd_grad(lambda y: fld.tensor(y[None])[0][0], x), atol=1e-6)
    assert np.allclose(ddT[0], fd_grad(lambda y: fld.tensor(y[None])[1][0], x), atol=1e-5)


def test_norm_c1_flags():
    v = vector_bump((0, 0), 0.2, (1, 0))
    assert v.norm_is_c1 and v.negated().norm_is_c1 is False
    w = TestVectorField(Bump((0, 0), 0.2) * Wave((3.0, 0.0)))
    assert not w.norm_is_c1
    wave = Wave((3.0, 0.0))
    sq = TestVectorField(wave * wave)
    assert sq.profile.nonnegative


def test_tensor_is_even_in_v():
    v = vector_bump((0, 0), 0.2, (0.6, 0.8))
    X = np.random.default_rng(0).uniform(-0.2, 0.2, (50, 2))
    for a, b in zip(v.tensor(X), v.negated().tensor(X)):
        assert np.array_equal(a, b)


def test_random_bumps_are_seeded_and_excised():
    for m in (torus(), sphere()):
        p = default_apex(m)
        a = random_bumps(m, p, 5, np.random.default_rng(7))
        b = random_bumps(m, p, 5, np.random.default_rng(7))
        assert [f.support[0].tolist() for f in a] == [f.support[0].tolist() for f in b]
        for f in a:
            c, r = f.support
            assert 0.1 <= r <= 0.3


def test_scalar_bump_support():
    f = scalar_bump((1.0, 2.0), 0.25, amplitude=3.0)
    c, r = f.support
    assert c.tolist() == [1.0, 2.0] and r == 0.25
    assert f.evaluate(np.array([[1.0, 2.0]]))[0][0] == pytest.approx(3.0 * math.exp(-1.0))
