"""Distributional Hessian and Laplacian of d_p tested against bump fields.

Pairings are computed on a uniform chart grid covering the support of the
field.  The test fields vanish to all orders at the edge of their support,
so the plain Riemann sum is the trapezoid rule.  The only loss of accuracy
comes from the kink of d_p along the cut locus, which costs O(h^2).
Sums use ``math.fsum`` so results do not depend on summation order.
"""
import json
import math
from dataclasses import asdict, dataclass, field as dc_field

import numpy as np

from .cutlocus import distances_to
from .errors import CoverageError, DomainError, VerificationFailure
from .fields import TestScalarField, TestVectorField
from .manifolds import FlatModel, SpheroidModel, as_point

DELTA_EXCL = 0.05
PAIRING_TOL = 1e-3
TIE_TOL = 1e-12


# ---------------------------------------------------------------- model spaces

def ct(K, r):
    """Comparison function ct_K(r) = sn_K'(r) / sn_K(r)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("ct_K needs r > 0")
    if K > 0:
        s = math.sqrt(K)
        if np.any(r >= math.pi / s):
            raise DomainError(f"ct_K needs r < pi/sqrt(K) = {math.pi / s}")
        return s / np.tan(s * r)
    if K < 0:
        s = math.sqrt(-K)
        return s / np.tanh(s * r)
    return 1.0 / r


def model_laplacian(K, n, r):
    """Laplacian of the distance from a point in the n-dim space form of curvature K."""
    return (n - 1) * ct(K, r)


def model_hessian(K, r, g, dr):
    """ct_K(r) (g - dr (x) dr): the model Hessian of the distance, covariant."""
    c = np.asarray(ct(K, r))
    dr = np.asarray(dr, dtype=float)
    return c[..., None, None] * (np.asarray(g) - dr[..., :, None] * dr[..., None, :])


# ------------------------------------------------------------------- grid data

@dataclass
class Grid:
    """Uniform (n+1)^2 node grid on the chart box center +- radius."""
    center: np.ndarray
    radius: float
    n: int
    X: np.ndarray        # active nodes (strictly inside the support disc)
    h: float

    @classmethod
    def for_field(cls, fld, n):
        c, r = fld.support
        s = np.linspace(-r, r, n + 1)
        U, W = np.meshgrid(s, s, indexing="ij")
        inside = (U * U + W * W) < r * r
        X = np.stack([c[0] + U[inside], c[1] + W[inside]], axis=-1)
        return cls(np.asarray(c, float), float(r), int(n), X, 2 * r / n)


def _fsum(values, h):
    return math.fsum(np.asarray(values, dtype=float).ravel()) * h * h


def _geometry(model, chart, X, order):
    return model.grid_geometry(chart, X[:, 0], X[:, 1], order=order)


def _sqrt_det_jets(G):
    """sqrt(det g) with first and second partial derivatives."""
    s = G["sqrt_det"]
    ginv, dg, ddg, dginv = G["ginv"], G["dg"], G["ddg"], G["dginv"]
    tr = np.einsum("...ab,...mba->...m", ginv, dg)                 # tr(g^-1 d_m g)
    s1 = 0.5 * s[..., None] * tr
    dtr = (np.einsum("...nab,...mba->...mn", dginv, dg)
           + np.einsum("...ab,...mnba->...mn", ginv, ddg))
    s2 = 0.5 * (s1[..., None, :] * tr[..., :, None] + s[..., None, None] * dtr)
    return s, s1, s2


def distance_jets(model, p, X, chart=0):
    """d_p, its chart differential and its covariant Hessian at chart points.

    Closed-form models only.  At nodes where several minimal branches tie the
    branch quantities are averaged (the two one-sided limits of a kink).
    """
    p = as_point(p)
    X = np.asarray(X, dtype=float)
    if isinstance(model, FlatModel):
        Y = model.displacements(p, X)                                 # (S, B, 2)
        R = np.linalg.norm(Y, axis=-1)
        dmin = R.min(axis=0)
        tie = (R <= dmin + TIE_TOL * np.maximum(1.0, dmin)).astype(float)
        cnt = tie.sum(axis=0)
        with np.errstate(invalid="ignore", divide="ignore"):
            U = Y / R[..., None]
            H = (np.eye(2) - U[..., :, None] * U[..., None, :]) / R[..., None, None]
        U = np.where(tie[..., None] > 0, U, 0.0)
        H = np.where(tie[..., None, None] > 0, H, 0.0)
        return dmin, U.sum(0) / cnt[:, None], H.sum(0) / cnt[:, None, None]
    if not model.has_closed_form:
        raise NotImplementedError(f"{model!r}: no closed-form distance Hessian")
    from . import _spheroid
    a = model.a
    J = _spheroid.jets(model.a, model.c, chart, X[:, 0], X[:, 1], order=2)
    P = model.embed(p) / a
    E = J[()] / a
    psi = np.arctan2(np.linalg.norm(np.cross(E, P), axis=-1), E @ P)
    s, c = np.sin(psi), np.cos(psi)
    PX = np.stack([J[(0,)] @ P, J[(1,)] @ P], axis=-1) / a
    PXX = np.empty(X.shape[:-1] + (2, 2))
    PXX[..., 0, 0] = J[(0, 0)] @ P / a
    PXX[..., 1, 1] = J[(1, 1)] @ P / a
    PXX[..., 0, 1] = PXX[..., 1, 0] = J[(0, 1)] @ P / a
    dpsi = -PX / s[..., None]
    ddpsi = -PXX / s[..., None, None] - (c / s ** 3)[..., None, None] * PX[..., :, None] * PX[..., None, :]
    gam = _geometry(model, chart, X, 1)["gamma"]
    hess = ddpsi - np.einsum("...kij,...k->...ij", gam, dpsi)
    return a * psi, a * dpsi, a * hess


def _check_excision(d, excl):
    if d.size and float(d.min()) < excl:
        raise DomainError(f"field support comes within {float(d.min()):.3g} of p "
                          f"(excision radius {excl})")


def _distances(model, p, grid, chart, excl):
    d = distances_to(model, p, grid.X, chart)
    _check_excision(d, excl)
    return d


# -------------------------------------------------------------------- pairings

def hessian_test_density(model, fld, X):
    """D with  <Hess d, V (x) V> = int d D dx  (chart Lebesgue measure).

    D = d_j [ d_i(sqrt(g) T^ij) + sqrt(g) Gamma^j_ik T^ik ],  T = V (x) V.
    """
    T, dT, ddT = fld.tensor(X)                      # [i,j], [i,j,k], [i,j,k,l]
    if isinstance(model, FlatModel):
        return np.einsum("...ijij->...", ddT)
    G = _geometry(model, fld.chart, X, 2)
    s, s1, s2 = _sqrt_det_jets(G)
    gam, dgam = G["gamma"], G["dgamma"]             # [j,i,k], [m,j,i,k]
    part1 = (np.einsum("...ij,...ij->...", s2, T)
             + 2 * np.einsum("...i,...jij->...", s1, dT)
             + s * np.einsum("...ijij->...", ddT))
    part2 = (np.einsum("...j,...jik,...ik->...", s1, gam, T)
             + s * np.einsum("...jjik,...ik->...", dgam, T)
             + s * np.einsum("...jik,...ikj->...", gam, dT))
    return part1 + part2


def laplacian_test_density(model, fld, X):
    """sqrt(g) * Laplacian(phi) at chart points."""
    phi, dphi, Hphi = fld.evaluate(X)
    if isinstance(model, FlatModel):
        return Hphi[..., 0, 0] + Hphi[..., 1, 1]
    G = _geometry(model, fld.chart, X, 1)
    hess = Hphi - np.einsum("...kij,...k->...ij", G["gamma"], dphi)
    return G["sqrt_det"] * np.einsum("...ij,...ij->...", G["ginv"], hess)


def pairing_lhs_hessian(model, p, fld, n=512, excl=DELTA_EXCL):
    """int d_p * div div (V (x) V) dVol on an n x n grid over supp V."""
    grid = Grid.for_field(fld, n)
    d = _distances(model, p, grid, fld.chart, excl)
    return _fsum(d * hessian_test_density(model, fld, grid.X), grid.h)


def pairing_lhs_laplacian(model, p, fld, n=512, excl=DELTA_EXCL):
    """int d_p * Laplacian(phi) dVol."""
    grid = Grid.for_field(fld, n)
    d = _distances(model, p, grid, fld.chart, excl)
    return _fsum(d * laplacian_test_density(model, fld, grid.X), grid.h)


def _volume(model, chart, X):
    if isinstance(model, FlatModel):
        return np.ones(len(X))
    return _geometry(model, chart, X, 1)["sqrt_det"]


def _metric(model, chart, X):
    if isinstance(model, FlatModel):
        return np.broadcast_to(np.eye(2), X.shape[:-1] + (2, 2))
    return _geometry(model, chart, X, 1)["g"]


def cut_crossings(model, p, fld, n=64):
    """Points of supp(fld) where the cut locus crosses an n x n probe grid.

    Flat models only: a crossing is the midpoint of two neighbouring nodes
    whose minimizing lattice shifts differ.  Other models return no points.
    """
    if not isinstance(model, FlatModel):
        return np.zeros((0, 2))
    c, r = fld.support
    s = np.linspace(-r, r, n + 1)
    U, W = np.meshgrid(s, s, indexing="ij")
    X = np.stack([c[0] + U, c[1] + W], axis=-1)
    branch = np.argmin(np.linalg.norm(model.displacements(p, X), axis=-1), axis=0)
    mids = []
    for ax in (0, 1):
        a = branch.take(range(n), axis=ax)
        b = branch.take(range(1, n + 1), axis=ax)
        xa = X.take(range(n), axis=ax)
        xb = X.take(range(1, n + 1), axis=ax)
        sel = a != b
        mids.append(0.5 * (xa[sel] + xb[sel]))
    M = np.concatenate(mids)
    if len(M):
        M = M[fld.profile.evaluate(M)[0] != 0.0]
    return M


def _chart_gap(model, A, B):
    d = np.asarray(B, float) - np.asarray(A, float)
    for ax, per in enumerate(model.periods):
        if per is not None:
            d[..., ax] = (d[..., ax] + 0.5 * per) % per - 0.5 * per
    return np.linalg.norm(d, axis=-1)


def coverage_gaps(model, p, fld, samples, max_gap=None):
    """Holes in the cut samples over supp(fld).

    Three kinds of gap are reported: consecutive sample directions, one
    landing in the support, whose cut points are farther apart than
    ``max_gap`` (default a quarter of the support radius) or have missing
    directions between them; probe-grid cut crossings with no sample within
    ``max_gap``; and crossings whose nearby samples all come from the same
    side of the cut (flat models only, like the crossings themselves).
    """
    c, r = fld.support
    if max_gap is None:
        max_gap = 0.25 * r
    gaps = []
    Q = np.zeros((0, 2))
    if samples:
        ang = np.array([s.record.angle for s in samples])
        order = np.argsort(ang)
        ss = [samples[k] for k in order]
        ang = ang[order]
        Q = np.array([model.to_chart(s.q, fld.chart).coords for s in ss])
        inside = fld.profile.evaluate(Q)[0] != 0.0
        dal = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
        base = np.median(dal) if len(dal) > 1 else 2 * np.pi
        for k in range(len(ss)):
            k1 = (k + 1) % len(ss)
            if not (inside[k] or inside[k1]):
                continue
            step = float(_chart_gap(model, Q[k], Q[k1]))
            if dal[k] > 1.5 * base or step > max_gap:
                gaps.append({"kind": "sample-spacing", "angle_from": float(ang[k]),
                             "angle_to": float(ang[k1]), "distance": step,
                             "missing_directions": max(0, int(round(dal[k] / base)) - 1)})
    angles = ang if samples else np.zeros(0)
    for m in cut_crossings(model, p, fld):
        dist = _chart_gap(model, Q, m) if len(Q) else np.zeros(0)
        near = float(dist.min()) if len(Q) else math.inf
        if near > max_gap:
            gaps.append({"kind": "uncovered-crossing", "point": m.tolist(), "distance": near})
            continue
        # the cut is reached from both sides: each of the two shortest branches
        # at m needs a nearby sample shot along (nearly) its direction
        Y = model.displacements(p, m)
        R = np.linalg.norm(Y, axis=-1)
        close = angles[dist <= max_gap]
        slack = 2 * max_gap / float(R.min()) + 1e-9
        for b in np.argsort(R)[:2]:
            a = math.atan2(Y[b, 1], Y[b, 0])
            off = np.abs((close - a + np.pi) % (2 * np.pi) - np.pi)
            if off.min() > slack:
                gaps.append({"kind": "one-sided-crossing", "point": m.tolist(),
                             "branch_angle": a, "angle_offset": float(off.min())})
    return gaps


def _require_coverage(model, p, fld, samples, max_gap):
    gaps = coverage_gaps(model, p, fld, samples, max_gap)
    if gaps:
        raise CoverageError(f"cut samples leave {len(gaps)} gap(s) in the field support", gaps)


def singular_hessian_sum(model, p, fld, samples, max_gap=None):
    """sum over cut samples of jump * g(nu, V)^2 * weight."""
    _require_coverage(model, p, fld, samples, max_gap)
    terms = []
    for s in samples:
        if s.weight == 0.0:
            continue
        q = model.to_chart(s.q, fld.chart)
        V = fld.evaluate(q.coords[None])[0][0]
        if not np.any(V):
            continue
        nu = model.tangent_to_chart(s.q, s.nu, fld.chart)
        gn = float(nu @ model.metric_at(q) @ V)
        terms.append(s.jump * gn * gn * s.weight)
    return math.fsum(terms)


def singular_laplacian_sum(model, p, fld, samples, max_gap=None, jump_power=1):
    """sum over cut samples of jump**jump_power * phi * weight."""
    _require_coverage(model, p, fld, samples, max_gap)
    terms = []
    for s in samples:
        if s.weight == 0.0:
            continue
        q = model.to_chart(s.q, fld.chart)
        phi = float(fld.evaluate(q.coords[None])[0][0])
        if phi != 0.0:
            terms.append(s.jump ** jump_power * phi * s.weight)
    return math.fsum(terms)


def ac_hessian(model, p, fld, n=512, excl=DELTA_EXCL):
    """int Hess(d_p)(V, V) dVol with the pointwise Hessian off the cut locus."""
    grid = Grid.for_field(fld, n)
    d, _, H = distance_jets(model, p, grid.X, fld.chart)
    _check_excision(d, excl)
    V = fld.evaluate(grid.X)[0]
    dens = np.einsum("...i,...ij,...j->...", V, H, V) * _volume(model, fld.chart, grid.X)
    return _fsum(dens, grid.h)


def ac_laplacian(model, p, fld, n=512, excl=DELTA_EXCL):
    """int Lap(d_p) phi dVol with the pointwise Laplacian off the cut locus."""
    grid = Grid.for_field(fld, n)
    d, _, H = distance_jets(model, p, grid.X, fld.chart)
    _check_excision(d, excl)
    phi = fld.evaluate(grid.X)[0]
    ginv = np.linalg.inv(_metric(model, fld.chart, grid.X))
    lap = np.einsum("...ij,...ij->...", ginv, H)
    return _fsum(lap * phi * _volume(model, fld.chart, grid.X), grid.h)


def pairing_rhs_hessian(model, p, fld, samples, n=512, excl=DELTA_EXCL, max_gap=None):
    """(a.c. part, singular part) of the Hessian pairing.

    The a.c. part integrates the pointwise Hessian of d_p against V (x) V;
    the singular part is carried by the cut samples.
    """
    return (ac_hessian(model, p, fld, n, excl),
            singular_hessian_sum(model, p, fld, samples, max_gap))


def pairing_rhs_laplacian(model, p, fld, samples, n=512, excl=DELTA_EXCL, max_gap=None):
    return (ac_laplacian(model, p, fld, n, excl),
            singular_laplacian_sum(model, p, fld, samples, max_gap))


@dataclass
class PairingReport:
    kind: str
    model: str
    field: str
    grid: int
    lhs: float
    rhs_ac: float
    rhs_sing: float
    residual: float
    relative_residual: float
    tolerance: float
    passed: bool
    cut_samples: int
    excision: float = DELTA_EXCL
    extra: dict = dc_field(default_factory=dict)

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _report(kind, model, fld, n, lhs, ac, sing, tol, samples, excl):
    res = lhs - (ac - sing)
    scale = max(abs(lhs), abs(ac), abs(sing), 1e-300)
    rel = abs(res) / scale
    return PairingReport(kind, model.name, fld.label or repr(fld), n, lhs, ac, sing, res, rel,
                         tol, bool(rel < tol), sum(1 for s in samples if s.weight > 0), excl)


def verify_hessian_decomposition(model, p, fld, samples, n=512, tol=PAIRING_TOL,
                                 excl=DELTA_EXCL, max_gap=None, strict=True):
    """Check <Hess d, V(x)V> = a.c. part - singular part; raise if the residual is large."""
    lhs = pairing_lhs_hessian(model, p, fld, n, excl)
    ac, sing = pairing_rhs_hessian(model, p, fld, samples, n, excl, max_gap)
    rep = _report("hessian", model, fld, n, lhs, ac, sing, tol, samples, excl)
    if strict and not rep.passed:
        raise VerificationFailure(f"Hessian pairing residual {rep.relative_residual:.3g} "
                                  f">= {tol}", rep.to_dict())
    return rep


def pairing_laplacian(model, p, fld, samples, n=512, tol=PAIRING_TOL, excl=DELTA_EXCL,
                      max_gap=None, strict=True):
    """Check <Lap d, phi> = a.c. part - singular part."""
    lhs = pairing_lhs_laplacian(model, p, fld, n, excl)
    ac, sing = pairing_rhs_laplacian(model, p, fld, samples, n, excl, max_gap)
    rep = _report("laplacian", model, fld, n, lhs, ac, sing, tol, samples, excl)
    if strict and not rep.passed:
        raise VerificationFailure(f"Laplacian pairing residual {rep.relative_residual:.3g} "
                                  f">= {tol}", rep.to_dict())
    return rep


def refinement_study(model, p, fld, samples, grids=(128, 256, 512), excl=DELTA_EXCL):
    """Residuals of the Hessian pairing on successive grids and observed orders."""
    sing = singular_hessian_sum(model, p, fld, samples)
    res = []
    for n in grids:
        lhs = pairing_lhs_hessian(model, p, fld, n, excl)
        ac = ac_hessian(model, p, fld, n, excl)
        res.append(lhs - (ac - sing))
    orders = [math.log(abs(res[k]) / abs(res[k + 1])) / math.log(grids[k + 1] / grids[k])
              if res[k + 1] != 0 else math.inf for k in range(len(grids) - 1)]
    return {"grids": list(grids), "residuals": res, "orders": orders}


def refine_until_stable(fn, n0=64, tol=PAIRING_TOL, n_max=4096):
    """Double n until two successive values of fn(n) differ by < 0.1 tol (relative)."""
    prev = fn(n0)
    n = n0
    while n < n_max:
        n *= 2
        cur = fn(n)
        if abs(cur - prev) < 0.1 * tol * max(abs(cur), 1e-300):
            return cur, n
        prev = cur
    return prev, n


def measured_singular_tensor(model, p, center, radius, n=512, excl=DELTA_EXCL):
    """2x2 tensor M with u.M.u = (a.c. part) - <Hess d, V_u (x) V_u> for V_u = bump * u.

    Built from three directions; on a cut window it should be rank one.
    """
    from .fields import vector_bump
    per = model.periods
    vals = []
    for u in ((1.0, 0.0), (0.0, 1.0), (math.sqrt(0.5), math.sqrt(0.5))):
        fld = vector_bump(center, radius, u, periods=per)
        lhs = pairing_lhs_hessian(model, p, fld, n, excl)
        ac = ac_hessian(model, p, fld, n, excl)
        vals.append(ac - lhs)
    mxx, myy, mdd = vals
    mxy = mdd - 0.5 * (mxx + myy)
    M = np.array([[mxx, mxy], [mxy, myy]])
    lam = np.sort(np.abs(np.linalg.eigvalsh(M)))[::-1]
    return M, float(lam[1] / lam[0])


# -------------------------------------------------------- comparison and bounds

@dataclass
class ComparisonResult:
    field: str
    lhs: float
    bound: float
    margin: float
    passed: bool
    K: float


def comparison_curvature(model):
    """Lower curvature bound used as K for the model-space comparison."""
    return model.curvature_bounds()[0]


def verify_comparison(model, p, fld, K=None, n=512, tol=1e-4, excl=DELTA_EXCL):
    """Check the pairing against the space-form model with curvature >= K.

    Scalar fields:  int d Lap(phi) <= int (n-1) ct_K(d) phi.
    Vector fields:  <Hess d, V(x)V> <= int ct_K(d) (|V|^2 - (dd.V)^2).
    Returns the margin bound - lhs; passes when margin >= -tol.
    """
    if K is None:
        K = comparison_curvature(model)
    grid = Grid.for_field(fld, n)
    d = _distances(model, p, grid, fld.chart, excl)
    vol = _volume(model, fld.chart, grid.X)
    if isinstance(fld, TestScalarField):
        lhs = _fsum(d * laplacian_test_density(model, fld, grid.X), grid.h)
        phi = fld.evaluate(grid.X)[0]
        if np.any(phi < 0):
            raise DomainError("comparison needs a nonnegative scalar field")
        bound = _fsum(model_laplacian(K, 2, d) * phi * vol, grid.h)
    elif isinstance(fld, TestVectorField):
        lhs = _fsum(d * hessian_test_density(model, fld, grid.X), grid.h)
        _, dd, _ = distance_jets(model, p, grid.X, fld.chart)
        V = fld.evaluate(grid.X)[0]
        g = _metric(model, fld.chart, grid.X)
        Mh = model_hessian(K, d, g, dd)
        bound = _fsum(np.einsum("...i,...ij,...j->...", V, Mh, V) * vol, grid.h)
    else:
        raise TypeError(f"unsupported field {fld!r}")
    margin = bound - lhs
    return ComparisonResult(fld.label or repr(fld), lhs, bound, margin, bool(margin >= -tol), K)


@dataclass
class LowerBoundReport:
    field: str
    lhs: float
    rhs_ac: float
    cut_mass: float
    slack: float
    slack_formula: float
    max_jump: float
    passed: bool


def verify_lower_bound(model, p, fld, samples, n=512, excl=DELTA_EXCL, tol=1e-3, max_gap=None):
    """Lower bound <Lap d, phi> >= a.c. part - 2 int_cut phi.

    ``slack`` is lhs minus the bound; ``slack_formula`` evaluates
    int (2 - jump) phi over the cut samples.  The two must agree, the slack
    must be nonnegative and every sampled jump must be at most 2.
    """
    lhs = pairing_lhs_laplacian(model, p, fld, n, excl)
    ac = ac_laplacian(model, p, fld, n, excl)
    mass = singular_laplacian_sum(model, p, fld, samples, max_gap, jump_power=0)
    with_jump = singular_laplacian_sum(model, p, fld, samples, max_gap)
    slack = lhs - (ac - 2 * mass)
    formula = 2 * mass - with_jump
    jumps = [s.jump for s in samples if s.weight > 0]
    max_jump = max(jumps) if jumps else 0.0
    ok = (abs(slack - formula) <= tol * max(mass, 1e-300) and slack >= -tol * max(mass, 1e-300)
          and max_jump <= 2 + 1e-9)
    return LowerBoundReport(fld.label or repr(fld), lhs, ac, mass, slack, formula, max_jump,
                            bool(ok))


# ------------------------------------------------------------- canonical suites

def torus_suite():
    """Five fields on the flat torus: two normal to the cut, one tangent, two oblique."""
    from .fields import vector_bump
    per = (1.0, 1.0)
    c, r = (0.5, 0.25), 0.2
    ob = lambda deg: (math.cos(math.radians(deg)), math.sin(math.radians(deg)))
    return [
        vector_bump(c, r, (1.0, 0.0), per, label="torus-normal-x"),
        vector_bump((0.25, 0.5), r, (0.0, 1.0), per, label="torus-normal-y"),
        vector_bump(c, r, (0.0, 1.0), per, label="torus-tangent"),
        vector_bump(c, r, ob(30.0), per, label="torus-oblique-30"),
        vector_bump((0.5, 0.3), 0.15, ob(60.0), per, label="torus-oblique-60"),
    ]


def cylinder_suite():
    """Three fields crossing the cut line theta = pi of the cylinder."""
    from .fields import vector_bump
    per = (2 * math.pi, None)
    c, r = (math.pi, 0.0), 0.4
    return [
        vector_bump(c, r, (1.0, 0.0), per, label="cylinder-normal"),
        vector_bump(c, r, (0.0, 1.0), per, label="cylinder-tangent"),
        vector_bump((math.pi, 0.3), r, (math.sqrt(0.5), math.sqrt(0.5)), per,
                    label="cylinder-oblique"),
    ]


def suite_for(model):
    if model.name == "torus":
        return torus_suite()
    if model.name == "cylinder":
        return cylinder_suite()
    raise DomainError(f"no canonical field suite for {model.name}")
