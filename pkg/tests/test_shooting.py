import math

import numpy as np
import pytest

from distgeo.cutlocus import distance, distances_to
from distgeo.manifolds import ChartPoint, default_apex, ellipsoid, sphere
from distgeo.shooting import FanField, multistart, solve_bvp


def test_multistart_matches_sphere_closed_form(rng):
    m = sphere()
    p = ChartPoint(np.array([1.0, 0.2]), 0)
    for _ in range(5):
        q = ChartPoint(np.array([rng.uniform(0.3, 2.8), rng.uniform(-3, 3)]), 0)
        res = multistart(m, p, q, math.pi * 1.05)
        assert abs(res.distance - m.closed_form_distance(p, q)) < 1e-8


def test_round_ellipsoid_numeric_path_matches_sphere(rng):
    """An "ellipsoid" with a = c takes the fan route; the sphere gives the oracle."""
    num, ref = ellipsoid(a=1.0, c=1.0), sphere()
    p = default_apex(num)
    X = np.stack([rng.uniform(0.3, 2.8, 40), rng.uniform(-3, 3, 40)], -1)
    d_num = distances_to(num, p, X)
    d_ref = ref.distance_array(p, X)
    assert np.max(np.abs(d_num - d_ref)) < 1e-8


def test_fan_distance_agrees_with_multistart(rng):
    m = ellipsoid()
    p = default_apex(m)
    fan = FanField(m, p, 2 * math.pi * 1.05)
    for _ in range(4):
        q = ChartPoint(np.array([rng.uniform(0.4, 2.7), rng.uniform(-3, 3)]), 0)
        d_fan = fan.distance(m.embed(q)[None])[0]
        assert abs(d_fan - distance(m, p, q)) < 1e-8
    assert fan.error_estimate() < 1e-6


def test_solve_bvp_converges_from_nearby_guess():
    m = sphere()
    p = ChartPoint(np.array([1.0, 0.0]), 0)
    v = m.unit_vector(p, 0.8)
    q_emb = m.exp_closed(p, v, 1.3)
    q = ChartPoint(np.array([math.acos(q_emb[2]), math.atan2(q_emb[1], q_emb[0])]), 0)
    a, L, res, _, _ = solve_bvp(m, p, q, [0.75], [1.2])
    assert res[0] < 1e-10
    assert abs(L[0] - 1.3) < 1e-9 and abs(a[0] - 0.8) < 1e-9


def test_fan_requires_spheroid():
    from distgeo.manifolds import torus
    with pytest.raises(TypeError):
        FanField(torus(), (0.0, 0.0), 1.0)
