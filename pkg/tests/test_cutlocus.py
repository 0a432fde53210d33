import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from distgeo.cutlocus import (BisectionError, TOL_CLASS, annulus_points, classify_cutpoint,
                              cut_records, cut_time, direction_grid, distances_to,
                              minimal_geodesics, records_to_csv, sample_at, sample_cutlocus,
                              samples_to_csv, semiconcavity_probe, superdifferential_extremals,
                              tangent_pca_errors, upper_semicontinuity_probe, _bisect_cut)
from distgeo.errors import DomainError
from distgeo.geodesics import shoot
from distgeo.manifolds import ChartPoint, cylinder, default_apex, ellipsoid, plane, sphere, torus


@pytest.fixture(scope="module")
def torus_samples():
    m = torus()
    return m, default_apex(m), sample_cutlocus(m, default_apex(m), 512)


@pytest.fixture(scope="module")
def ellipsoid_samples():
    m = ellipsoid()
    return m, default_apex(m), sample_cutlocus(m, default_apex(m), 256)


def torus_cut_time(alpha):
    return 0.5 / max(abs(math.cos(alpha)), abs(math.sin(alpha)))


@given(st.floats(0.0, 2 * math.pi))
def test_torus_cut_time_oracle(alpha):
    m = torus()
    p = default_apex(m)
    sigma = cut_time(m, p, m.unit_vector(p, alpha))
    assert abs(sigma - torus_cut_time(alpha)) < 1e-7


@given(st.floats(-1.2, 1.2))
def test_cylinder_cut_time_oracle(alpha):
    m = cylinder()
    p = default_apex(m)
    sigma = cut_time(m, p, m.unit_vector(p, alpha))
    assert abs(sigma - math.pi / abs(math.cos(alpha))) < 1e-7


def test_plane_has_no_cut_points():
    m = plane()
    assert math.isinf(cut_time(m, default_apex(m), np.array([1.0, 0.0])))
    assert sample_cutlocus(m, default_apex(m), 16) == []


def test_sphere_cut_and_conjugate_coincide():
    m = sphere()
    recs, _, _ = cut_records(m, default_apex(m), 32)
    for r in recs:
        assert abs(r.sigma - math.pi) < 1e-6
        assert abs(r.conj - math.pi) < 1e-6
        assert r.cls == "Both"


def test_torus_samples_on_cross(torus_samples):
    m, p, samples = torus_samples
    assert len(samples) == 512
    for s in samples:
        x, y = np.mod(s.q.coords, 1.0)
        assert min(abs(x - 0.5), abs(y - 0.5)) < 1e-6
        assert 0 < s.jump <= 2 + 1e-12
    two = sum(s.multiplicity == 2 and not s.flagged for s in samples) / len(samples)
    assert two >= 0.99


def test_torus_jump_oracle(torus_samples):
    m, p, samples = torus_samples
    for s in samples:
        x, y = np.mod(s.q.coords, 1.0)
        if s.multiplicity != 2:
            continue
        r = math.hypot(0.5, (y + 0.5) % 1.0 - 0.5) if abs(x - 0.5) < 1e-6 \
            else math.hypot(0.5, (x + 0.5) % 1.0 - 0.5)
        assert abs(s.jump - 1.0 / r) < 1e-7


def test_torus_tangent_pca(torus_samples):
    m, p, samples = torus_samples
    # stay away from the corner where two segments meet
    mid = [s for s in samples if s.multiplicity == 2
           and min(abs(np.mod(s.q.coords, 1.0) - 0.5)) < 1e-6
           and max(abs(np.mod(s.q.coords, 1.0) - 0.5)) > 0.1]
    assert np.max(tangent_pca_errors(m, mid)) < 1e-2


def test_torus_quadrature_weights(torus_samples):
    """Total weight approximates the length of the cross, 2.

    Corner samples carry no weight, which leaves a deficit of a few cells there.
    """
    m, p, samples = torus_samples
    total = sum(s.weight for s in samples)
    assert 2.0 - 0.03 < total <= 2.0


def test_torus_corner_has_four_geodesics():
    m = torus()
    mg = minimal_geodesics(m, default_apex(m), (0.5, 0.5))
    assert mg.count == 4
    assert np.allclose(mg.lengths, math.sqrt(0.5))


def test_cylinder_saturation():
    m = cylinder()
    s = sample_at(m, default_apex(m), (math.pi, 0.0))
    assert abs(s.jump - 2.0) < 1e-12
    s = sample_at(m, default_apex(m), (math.pi, 1.0))
    assert s.jump < 2.0


def test_cylinder_windowed_sampling_matches_full_grid():
    m = cylinder()
    p = default_apex(m)
    full = {round(s.record.angle, 12): s for s in sample_cutlocus(m, p, 256)}
    win = sample_cutlocus(m, p, 256, window=[(-0.3, 0.3), (math.pi - 0.3, math.pi + 0.3)])
    assert len(win) == 2 * len(direction_grid(256, (-0.3, 0.3)))
    for s in win:
        key = round(math.atan2(math.sin(s.record.angle), math.cos(s.record.angle)), 12)
        ref = full.get(key) or full.get(round(key + 2 * math.pi, 12))
        assert ref is not None and abs(ref.jump - s.jump) < 1e-12


def test_ellipsoid_structure(ellipsoid_samples):
    m, p, samples = ellipsoid_samples
    for s in samples:
        r = s.record
        assert r.geodesic_count >= 2 or (r.conj is not None and abs(r.sigma - r.conj) < TOL_CLASS)
        if r.conj is not None:
            assert r.sigma <= r.conj + TOL_CLASS
        if math.isfinite(s.jump):
            assert 0 < s.jump <= 2 + 1e-9
    two = sum(s.multiplicity == 2 and not s.flagged for s in samples) / len(samples)
    assert two >= 0.99
    assert {s.record.cls for s in samples} == {"Sing", "Both"}


def test_superdifferential_counts_on_torus(rng):
    m = torus()
    p = default_apex(m)
    pts = [(0.5, 0.5), (0.5, 0.2), (0.3, 0.5)] + [tuple(rng.uniform(0.05, 0.95, 2)) for _ in range(20)]
    for q in pts:
        assert len(superdifferential_extremals(m, p, q).extremals) == minimal_geodesics(m, p, q).count


def test_upper_semicontinuity_towards_corner():
    m = torus()
    p = default_apex(m)
    seq = [(0.5, 0.5 - 2.0 ** -k) for k in range(3, 16)]
    assert upper_semicontinuity_probe(m, p, seq, (0.5, 0.5))
    # a smooth point is not a limit of these superdifferentials
    assert not upper_semicontinuity_probe(m, p, seq, (0.3, 0.3))


def test_semiconcavity_on_plane_annulus():
    m = plane()
    p = default_apex(m)
    r0, h = 0.5, 1e-3
    est = semiconcavity_probe(m, p, annulus_points(p, r0, 1.0), h)
    # the second difference of |x| across the circle direction at radius r0
    exact = (2 * math.sqrt(r0 ** 2 + h ** 2) - 2 * r0) / h ** 2
    assert abs(est - exact) < 1e-6
    assert est < 1 / r0


def test_classify_cutpoint_and_errors():
    m = torus()
    p = default_apex(m)
    assert classify_cutpoint(m, p, np.array([1.0, 0.0])).cls == "Sing"
    with pytest.raises(DomainError):
        classify_cutpoint(plane(), p, np.array([1.0, 0.0]))
    with pytest.raises(DomainError):
        minimal_geodesics(m, p, (0.0, 0.0))
    with pytest.raises(DomainError):
        sample_cutlocus(m, p, 4)


def test_bisection_reports_non_monotone_predicate():
    m = torus()
    path = shoot(m, default_apex(m), np.array([1.0, 0.0]), 1.0, 1e-2)
    idx = np.arange(0, len(path.t), 10)
    D = path.t[idx].copy()
    D[3] -= 1.0          # spurious "inside" then back outside
    with pytest.raises(BisectionError) as err:
        _bisect_cut(path, D, idx, default_apex(m), 1e-9)
    assert err.value.trace


def test_csv_writers(tmp_path, torus_samples):
    m, p, samples = torus_samples
    samples_to_csv(samples[:10], tmp_path / "s.csv")
    records_to_csv([s.record for s in samples[:10]], tmp_path / "r.csv")
    assert len((tmp_path / "s.csv").read_text().splitlines()) == 11
    assert (tmp_path / "r.csv").read_text().startswith("v_angle,sigma,conj,class")


def test_distances_are_batched_consistently():
    m = sphere()
    p = default_apex(m)
    X = np.array([[1.0, 0.3], [2.0, -1.0]])
    d = distances_to(m, p, X)
    assert np.allclose(d, [m.closed_form_distance(p, ChartPoint(x, 0)) for x in X], atol=1e-14)
