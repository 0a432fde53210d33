import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from distgeo import measure
from distgeo.cutlocus import sample_cutlocus
from distgeo.errors import CoverageError, DomainError, VerificationFailure
from distgeo.fields import Bump, TestVectorField, random_bumps, scalar_bump, vector_bump
from distgeo.manifolds import default_apex, ellipsoid, sphere, torus

# int over the segment x = 1/2 of jump * bump^2 for the normal field at
# (1/2, 1/4), radius 0.2; scipy quad, frozen
TORUS_SING_NORMAL_X = 0.04746992344531508
# int (2 - jump) * bump over the same segment, frozen from scipy quad
TORUS_LOWER_BOUND_SLACK = 0.01941759778595743


def seg_bump(y, c=0.25, r=0.2):
    s2 = ((y - c) / r) ** 2
    return math.exp(1.0 / (s2 - 1.0)) if s2 < 1 else 0.0


@pytest.fixture(scope="module")
def torus_setup():
    m = torus()
    p = default_apex(m)
    return m, p, sample_cutlocus(m, p, 512)


def test_quad_oracles_are_current():
    sing = quad(lambda y: seg_bump(y) ** 2 / math.hypot(0.5, y), 0.05, 0.45,
                epsabs=1e-14, epsrel=1e-13)[0]
    slack = quad(lambda y: (2 - 1 / math.hypot(0.5, y)) * seg_bump(y), 0.05, 0.45,
                 epsabs=1e-14, epsrel=1e-13)[0]
    assert sing == pytest.approx(TORUS_SING_NORMAL_X, rel=1e-12)
    assert slack == pytest.approx(TORUS_LOWER_BOUND_SLACK, rel=1e-12)


def test_ct_and_model_laplacian():
    assert measure.ct(0.0, 2.0) == 0.5
    assert abs(measure.ct(1.0, math.pi / 2)) < 1e-15
    assert measure.ct(-1.0, 1.0) == pytest.approx(1 / math.tanh(1.0))
    assert measure.model_laplacian(1.0, 3, 1.0) == pytest.approx(2 / math.tan(1.0))
    with pytest.raises(DomainError):
        measure.ct(1.0, 4.0)
    with pytest.raises(DomainError):
        measure.ct(0.0, 0.0)


@given(st.floats(-2, 2), st.floats(0.05, 1.2), st.floats(0, 2 * math.pi),
       st.floats(0.5, 2.0), st.floats(-0.4, 0.4))
def test_model_hessian_trace_identity(K, r, ang, stretch, shear):
    A = np.array([[stretch, shear], [0.0, 1.0 / stretch]])
    g = A.T @ A
    e1 = np.array([1.0, 0.0]) / math.sqrt(g[0, 0])
    w = np.array([0.0, 1.0]) - (np.array([1.0, 0.0]) @ g @ np.array([0.0, 1.0])) / g[0, 0] * np.array([1.0, 0.0])
    e2 = w / math.sqrt(w @ g @ w)
    u = math.cos(ang) * e1 + math.sin(ang) * e2          # g-unit vector
    dr = g @ u                                            # covector with |dr|_g = 1
    H = measure.model_hessian(K, r, g, dr)
    trace = np.einsum("ij,ij->", np.linalg.inv(g), H)
    assert trace == pytest.approx(measure.model_laplacian(K, 2, r), rel=1e-10)
    assert abs(u @ H @ u) < 1e-10 * max(1.0, abs(measure.ct(K, r)))


def fd_hessian(fn, x, h=1e-4):
    H = np.empty((2, 2))
    for i, ei in enumerate(np.eye(2)):
        for j, ej in enumerate(np.eye(2)):
            H[i, j] = (fn(x + h * ei + h * ej) - fn(x + h * ei - h * ej)
                       - fn(x - h * ei + h * ej) + fn(x - h * ei - h * ej)) / (4 * h * h)
    return H


def test_sphere_distance_jets_match_model_space(rng):
    m = sphere()
    p = default_apex(m)
    X = np.stack([rng.uniform(0.3, 2.8, 30), rng.uniform(-3, 3, 30)], -1)
    d, dd, H = measure.distance_jets(m, p, X)
    G = m.grid_geometry(0, X[:, 0], X[:, 1])
    ref = measure.model_hessian(1.0, d, G["g"], dd)
    assert np.max(np.abs(H - ref)) < 1e-10
    for x, h_ in zip(X[:5], H[:5]):
        fn = lambda y: m.distance_array(p, y[None])[0]
        gam = m.christoffel_at(x)
        grad = np.array([(fn(x + 1e-6 * e) - fn(x - 1e-6 * e)) / 2e-6 for e in np.eye(2)])
        cov = fd_hessian(fn, x) - np.einsum("kij,k->ij", gam, grad)
        assert np.max(np.abs(cov - h_)) < 1e-5


def test_flat_distance_jets_average_ties():
    m = torus()
    p = default_apex(m)
    d, dd, H = measure.distance_jets(m, p, np.array([[0.5, 0.25], [0.3, 0.2]]))
    assert np.allclose(dd[0], [0.0, 0.25 / math.hypot(0.5, 0.25)])
    assert np.allclose(dd[1], np.array([0.3, 0.2]) / math.hypot(0.3, 0.2))
    with pytest.raises(NotImplementedError):
        measure.distance_jets(ellipsoid(), default_apex(ellipsoid()), np.array([[1.0, 1.0]]))


@pytest.mark.parametrize("model", [torus(), sphere()], ids=["torus", "sphere"])
def test_hessian_density_integrates_by_parts(model):
    """int f D = int Hess f (V, V) dVol for a smooth f."""
    center = (0.3, 0.6) if model.name == "torus" else (1.2, 0.4)
    fld = TestVectorField(Bump(center, 0.25), (0.6, 0.8), rate=(1.0, -2.0))
    grid = measure.Grid.for_field(fld, 256)
    X = grid.X
    f = np.sin(X[:, 0]) * np.cos(2 * X[:, 1])
    df = np.stack([np.cos(X[:, 0]) * np.cos(2 * X[:, 1]),
                   -2 * np.sin(X[:, 0]) * np.sin(2 * X[:, 1])], -1)
    Hf = np.empty((len(X), 2, 2))
    Hf[:, 0, 0] = -f
    Hf[:, 1, 1] = -4 * f
    Hf[:, 0, 1] = Hf[:, 1, 0] = -2 * np.cos(X[:, 0]) * np.sin(2 * X[:, 1])
    G = model.grid_geometry(0, X[:, 0], X[:, 1])
    cov = Hf - np.einsum("bkij,bk->bij", G["gamma"], df)
    V = fld.evaluate(X)[0]
    lhs = measure._fsum(f * measure.hessian_test_density(model, fld, X), grid.h)
    rhs = measure._fsum(np.einsum("bi,bij,bj->b", V, cov, V) * G["sqrt_det"], grid.h)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)


def test_lhs_is_even_in_v():
    m = torus()
    p = default_apex(m)
    for fld in measure.torus_suite():
        assert (measure.pairing_lhs_hessian(m, p, fld, 128)
                == measure.pairing_lhs_hessian(m, p, fld.negated(), 128))


def test_singular_sum_oracle():
    m = torus()
    p = default_apex(m)
    fld = measure.torus_suite()[0]
    samples = sample_cutlocus(m, p, 2048)
    assert measure.singular_hessian_sum(m, p, fld, samples) == pytest.approx(
        TORUS_SING_NORMAL_X, rel=1e-8)


def test_torus_suite_decomposition(torus_setup):
    m, p, samples = torus_setup
    for fld in measure.torus_suite():
        rep = measure.verify_hessian_decomposition(m, p, fld, samples, 256)
        assert rep.relative_residual < 1e-3
        assert rep.cut_samples > 0
        back = measure.PairingReport(**json.loads(rep.to_json()))
        assert back.lhs == rep.lhs


def test_tangent_field_sees_no_singular_part(torus_setup):
    m, p, samples = torus_setup
    rep = measure.verify_hessian_decomposition(m, p, measure.torus_suite()[2], samples, 256)
    assert abs(rep.rhs_sing) < 1e-15
    assert rep.relative_residual < 1e-12


def test_refinement_order_is_two(torus_setup):
    m, p, samples = torus_setup
    st_ = measure.refinement_study(m, p, measure.torus_suite()[0], samples, (128, 256, 512))
    assert all(1.9 < o < 2.1 for o in st_["orders"])


def test_refine_until_stable():
    val, n = measure.refine_until_stable(lambda n: 1.0 + 1.0 / n ** 2, 16, 1e-3)
    assert abs(val - 1.0) < 1e-3 and n <= 256


def test_rank_one_singular_tensor():
    m = torus()
    M, ratio = measure.measured_singular_tensor(m, default_apex(m), (0.5, 0.25), 0.2, 256)
    assert ratio < 1e-3
    w, v = np.linalg.eigh(M)
    assert abs(abs(v[:, np.argmax(np.abs(w))] @ [1.0, 0.0]) - 1.0) < 1e-8


def test_truncated_samples_raise_coverage_error(torus_setup):
    m, p, samples = torus_setup
    fld = measure.torus_suite()[0]
    with pytest.raises(CoverageError) as err:
        measure.singular_hessian_sum(m, p, fld, samples[300:])
    assert any(g["kind"] == "uncovered-crossing" for g in err.value.gaps)
    sparse = samples[::8]
    with pytest.raises(CoverageError):
        measure.singular_hessian_sum(m, p, fld, sparse, max_gap=0.01)
    # every cut point is reached from both sides; dropping one side halves the sum
    one_side = [s for s in samples if not 0.05 < s.record.angle < 0.8]
    with pytest.raises(CoverageError) as err:
        measure.singular_hessian_sum(m, p, fld, one_side)
    assert {g["kind"] for g in err.value.gaps} == {"one-sided-crossing"}


def test_excision_guard():
    m = torus()
    fld = vector_bump((0.05, 0.0), 0.2, (1, 0), (1.0, 1.0))
    with pytest.raises(DomainError):
        measure.pairing_lhs_hessian(m, default_apex(m), fld, 64)


def test_strict_failure_carries_report(torus_setup):
    m, p, samples = torus_setup
    with pytest.raises(VerificationFailure) as err:
        measure.verify_hessian_decomposition(m, p, measure.torus_suite()[0], samples, 32, tol=1e-12)
    assert err.value.report["grid"] == 32


def test_laplacian_pairings(torus_setup):
    m, p, samples = torus_setup
    fld = scalar_bump((0.5, 0.25), 0.2, periods=(1.0, 1.0))
    assert measure.pairing_laplacian(m, p, fld, samples, 256).relative_residual < 1e-3
    s = sphere()
    bump = scalar_bump((1.0, 0.5), 0.3, periods=(None, 2 * math.pi))
    rep = measure.pairing_laplacian(s, default_apex(s), bump, [], 256)
    assert rep.rhs_sing == 0.0 and rep.relative_residual < 1e-6


def test_lower_bound_matches_oracle(torus_setup):
    m, p, samples = torus_setup
    fld = scalar_bump((0.5, 0.25), 0.2, periods=(1.0, 1.0))
    lb = measure.verify_lower_bound(m, p, fld, samples, 512)
    assert lb.passed
    assert lb.slack_formula == pytest.approx(TORUS_LOWER_BOUND_SLACK, rel=1e-4)
    assert lb.slack == pytest.approx(TORUS_LOWER_BOUND_SLACK, rel=1e-3)
    assert lb.max_jump <= 2.0


def test_comparison_on_torus_and_sphere():
    for m in (torus(), sphere()):
        p = default_apex(m)
        for fld in random_bumps(m, p, 4, np.random.default_rng(3)):
            assert measure.verify_comparison(m, p, fld, n=256).margin >= -1e-4
    t = torus()
    crossing = scalar_bump((0.5, 0.25), 0.2, periods=(1.0, 1.0))
    assert measure.verify_comparison(t, default_apex(t), crossing, n=256).margin > 0.1
    vec = vector_bump((0.5, 0.25), 0.2, (1.0, 0.0), (1.0, 1.0))
    assert measure.verify_comparison(t, default_apex(t), vec, n=256).margin > 0.0


def test_suite_for():
    assert len(measure.suite_for(torus())) == 5
    with pytest.raises(DomainError):
        measure.suite_for(sphere())
