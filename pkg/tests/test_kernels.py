import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from distgeo import kernels
from distgeo.manifolds import default_apex, ellipsoid, sphere, torus
from distgeo.shooting import FanField, initial_states

MODELS = [torus(), sphere(), ellipsoid()]


@pytest.mark.parametrize("model", MODELS, ids=[m.name for m in MODELS])
@settings(max_examples=8)
@given(alpha=st.floats(0.0, 2 * np.pi), T=st.floats(0.5, 4.0))
def test_backends_agree_on_integrate(model, alpha, T):
    p = default_apex(model)
    s0 = initial_states(model, p, np.array([alpha, alpha + 1.0]))
    n = 200
    a, ca = kernels.integrate(model.geo, [p.chart, p.chart], s0, T / n, n, 4, backend="numba")
    b, cb = kernels.integrate(model.geo, [p.chart, p.chart], s0, T / n, n, 4, backend="numpy")
    assert np.array_equal(ca, cb)
    assert np.max(np.abs(a - b)) < 1e-12


def test_integrate_shapes_and_stride_check():
    m = torus()
    s0 = initial_states(m, default_apex(m), np.array([0.1, 0.2, 0.3]))
    out, ch = kernels.integrate(m.geo, np.zeros(3, int), s0, 0.01, 10, 5)
    assert out.shape == (3, 3, 8) and ch.shape == (3, 3)
    with pytest.raises(ValueError):
        kernels.integrate(m.geo, np.zeros(3, int), s0, 0.01, 10, 3)


def test_backends_agree_on_fan_newton():
    m = ellipsoid()
    fan = FanField(m, default_apex(m), 2 * np.pi * 1.05, n_dirs=256)
    rng = np.random.default_rng(1)
    Q = np.array([m.embed(m.point((t, f))) for t, f in
                  zip(rng.uniform(0.4, 2.7, 50), rng.uniform(-3, 3, 50))])
    qi, a0, t0 = fan._seeds(Q)
    A = kernels.fan_newton(fan.node, fan.dalpha, fan.dt, fan.Lmax, Q, qi, a0, t0, backend="numba")
    B = kernels.fan_newton(fan.node, fan.dalpha, fan.dt, fan.Lmax, Q, qi, a0, t0, backend="numpy")
    ok = (A[2] < 1e-9) & (B[2] < 1e-9)
    assert np.array_equal(A[2] < 1e-9, B[2] < 1e-9)
    assert np.max(np.abs(A[0] - B[0])[ok]) < 1e-10
    assert np.max(np.abs(A[1] - B[1])[ok]) < 1e-10


def test_environment_switch_selects_numpy():
    env = dict(os.environ, DISTGEO_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from distgeo import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    env["DISTGEO_DISABLE_NUMBA"] = "0"
    out = subprocess.run([sys.executable, "-c", "from distgeo import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numba"
