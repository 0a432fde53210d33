import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from distgeo.errors import DegeneracyError, DomainError
from distgeo.manifolds import (ChartPoint, REGISTRY, cylinder, default_apex, ellipsoid,
                               get_model, model_from_json, model_to_json, plane, sphere, torus)

MODELS = [plane(), torus(), cylinder(), sphere(), ellipsoid()]
IDS = [m.name for m in MODELS]


def interior_points(model, rng, n):
    if model.name in ("sphere", "ellipsoid"):
        return np.stack([rng.uniform(0.05, np.pi - 0.05, n), rng.uniform(-np.pi, np.pi, n)], -1)
    lo = [b[0] if np.isfinite(b[0]) else -3.0 for b in model.bounds]
    hi = [b[1] if np.isfinite(b[1]) else 3.0 for b in model.bounds]
    return np.stack([rng.uniform(lo[0], hi[0], n), rng.uniform(lo[1], hi[1], n)], -1)


@pytest.mark.parametrize("model", MODELS, ids=IDS)
def test_metric_positive_definite(model, rng):
    X = interior_points(model, rng, 10_000)
    for chart in (0, 1) if model.name in ("sphere", "ellipsoid") else (0,):
        g = model.grid_geometry(chart, X[:, 0], X[:, 1])["g"]
        assert np.all(np.linalg.eigvalsh(g)[:, 0] > 0)
        assert np.array_equal(g, np.swapaxes(g, -1, -2))


@pytest.mark.parametrize("model", MODELS, ids=IDS)
def test_christoffel_matches_finite_differences(model, rng):
    h = 1e-5
    for x in interior_points(model, rng, 100):
        G = model.christoffel_at(x)
        g = model.metric_at(x)
        dg = np.stack([(model.metric_at(x + h * e) - model.metric_at(x - h * e)) / (2 * h)
                       for e in np.eye(2)], axis=-1)          # dg[i, j, k] = d_k g_ij
        # Gamma^k_ij = g^{kl} (d_i g_jl + d_j g_il - d_l g_ij) / 2
        ginv = np.linalg.inv(g)
        ref = np.empty((2, 2, 2))
        for k in range(2):
            for i in range(2):
                for j in range(2):
                    ref[k, i, j] = 0.5 * sum(ginv[k, l] * (dg[j, l, i] + dg[i, l, j] - dg[i, j, l])
                                             for l in range(2))
        assert np.max(np.abs(G - ref)) < 1e-6


def test_christoffel_refuses_pole_band():
    with pytest.raises(DegeneracyError):
        sphere().christoffel_at(ChartPoint(np.array([1e-4, 0.3]), 0))


@pytest.mark.parametrize("model", [plane(), torus(), cylinder(), sphere()],
                         ids=["plane", "torus", "cylinder", "sphere"])
def test_distance_axioms(model, rng):
    X = interior_points(model, rng, 3000).reshape(1000, 3, 2)
    d = model.closed_form_distance
    for p, q, r in X:
        assert d(p, q) == d(q, p)
        assert d(p, p) == 0.0
        assert d(p, r) <= d(p, q) + d(q, r) + 1e-12


def test_torus_distance_matches_brute_force_shifts(rng):
    m = torus()
    for _ in range(200):
        p, q = rng.uniform(0, 1, 2), rng.uniform(0, 1, 2)
        brute = min(np.hypot(q[0] - p[0] + i, q[1] - p[1] + j)
                    for i in range(-3, 4) for j in range(-3, 4))
        assert abs(m.closed_form_distance(p, q) - brute) < 1e-15


def test_sphere_distance_matches_arccos(rng):
    m = sphere()
    for x in interior_points(m, rng, 200).reshape(100, 2, 2):
        P, Q = m.embed(x[0]), m.embed(x[1])
        ref = np.arccos(np.clip(P @ Q, -1, 1))
        assert abs(m.closed_form_distance(x[0], x[1]) - ref) < 1e-7


@given(st.floats(-5, 5), st.floats(-5, 5), st.integers(-3, 3))
def test_period_invariance(x, y, k):
    for m in (torus(), cylinder()):
        for ax, per in enumerate(m.periods):
            if per is None:
                continue
            shift = np.zeros(2)
            shift[ax] = k * per
            base = np.array([x, y]) if m.name == "cylinder" else np.array([x, y]) % 1.0
            assert np.array_equal(m.metric_at(base), m.metric_at(base + shift))


@given(st.floats(0.1, np.pi - 0.1), st.floats(-np.pi, np.pi))
def test_chart_round_trip(theta, phi):
    for m in (sphere(), ellipsoid()):
        p = ChartPoint(np.array([theta, phi]), 0)
        q = m.to_chart(m.to_chart(p, 1), 0)
        assert np.allclose(m.embed(p), m.embed(q), atol=1e-12)
        assert np.allclose(m.embed(p), m.embed(m.to_chart(p, 1)), atol=1e-12)


def test_model_specs_and_json():
    e = get_model("ellipsoid{a:1,b:1,c:2}")
    assert (e.a, e.c) == (1.0, 2.0)
    assert get_model({"name": "torus"}).name == "torus"
    for name in REGISTRY:
        m = get_model(name)
        assert model_from_json(model_to_json(m)).name == m.name
        assert json.loads(model_to_json(m))["name"] == name
    with pytest.raises(KeyError):
        get_model("klein_bottle")
    with pytest.raises(DomainError):
        ellipsoid(a=1.0, b=2.0)


def test_default_apexes():
    assert np.allclose(sphere().embed(default_apex(sphere())), [0, 0, 1])
    assert default_apex(ellipsoid()).chart == 0
    assert np.array_equal(default_apex(torus()).coords, [0.0, 0.0])


def test_curvature():
    assert sphere().curvature_bounds() == (1.0, 1.0)
    lo, hi = ellipsoid().curvature_bounds()
    # K = 1/c^2 on the equator and c^2/a^4 at the poles
    assert lo <= 0.25 <= 4.0 <= hi
    assert np.allclose(sphere().gaussian_curvature(ChartPoint(np.array([1.0, 0.2]), 0)), 1.0)


def test_point_outside_domain():
    with pytest.raises(DomainError):
        sphere().point((4.0, 0.0))
