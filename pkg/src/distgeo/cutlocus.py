"""Distance, minimal geodesics, cut times and cutlocus samples from an apex p.

Models with a closed-form distance use it directly.  The ellipsoid goes
through :mod:`distgeo.shooting`: single queries by multistart shooting,
batches (cut-time scans, grids) through a cached :class:`FanField`.
"""
import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import nnls

from . import _spheroid, kernels
from .errors import (BisectionError, ConvergenceError, DomainError, StructureViolation)
from .geodesics import (DEFAULT_STEP, ZERO_WIDTH, GeodesicPath, first_zero, shoot,
                        shoot_many)
from .manifolds import ChartPoint, FlatModel, SpheroidModel, as_point
from .shooting import FanField, multistart, solve_bvp

DEDUP_ANGLE = 1e-4
TOL_CLASS = 1e-5
REACH_TOL = 1e-6
CONTINUUM_CAP = 64
SCAN_STRIDE = 10


def search_length(model):
    """Upper bound on distances from any point (None for non-compact models)."""
    if isinstance(model, SpheroidModel):
        return math.pi * max(model.a, model.c)
    if model.compact:
        return float(np.linalg.norm([per for per in model.periods])) / 2 + 0.25
    return None


def default_tmax(model):
    if isinstance(model, SpheroidModel):
        return math.pi * max(model.a, model.c) + (0.5 if model.has_closed_form else 0.0)
    if model.name == "torus":
        return 1.0
    if model.name == "cylinder":
        return 4 * math.pi
    return 10.0


_FANS = {}


def fan_for(model, p):
    """Cached fan of geodesics from ``p`` (ellipsoid-type models only)."""
    p = model.best_chart(as_point(p))
    key = (repr(model), tuple(np.round(p.coords, 15)), p.chart)
    if key not in _FANS:
        _FANS[key] = FanField(model, p, search_length(model) * 1.05)
    return _FANS[key]


def embed_points(model, X, charts=0):
    """Embedded points for spheroids, reduced chart points for flat models."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if isinstance(model, FlatModel):
        return model.reduce(X)
    charts = np.broadcast_to(np.asarray(charts), X.shape[:1])
    E = np.empty((len(X), 3))
    for ch in np.unique(charts):
        sel = charts == ch
        E[sel] = model.embed_array(int(ch), X[sel])
    return E


def distances_to(model, p, X, charts=0):
    """d_p at many chart points at once."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if isinstance(model, FlatModel):
        return model.distance_array(p, X)
    E = embed_points(model, X, charts)
    if model.has_closed_form:
        P = model.embed(p)
        return model.a * np.arctan2(np.linalg.norm(np.cross(E, P), axis=-1), E @ P)
    return fan_for(model, p).distance(E)


def distance(model, p, q):
    """Riemannian distance; closed form when available, else multistart shooting."""
    if model.has_closed_form:
        return model.closed_form_distance(p, q)
    if np.linalg.norm(model.embed(p) - model.embed(q)) < 1e-14:
        return 0.0
    return multistart(model, model.best_chart(as_point(p)), q, search_length(model)).distance


# ---------------------------------------------------------------------------
# minimal geodesics


@dataclass
class MinimalGeodesics:
    """Minimal geodesics p -> q; directions live at ``base`` (p in its working chart)."""
    base: ChartPoint
    q: ChartPoint
    directions: np.ndarray
    angles: np.ndarray
    lengths: np.ndarray
    final_velocities: np.ndarray     # components at q, in q's chart
    degenerate: bool = False

    @property
    def count(self):
        return len(self.angles)


def _candidates(model, p, q):
    """(directions at p, lengths) of candidate geodesics p -> q, plus degeneracy flag."""
    if isinstance(model, FlatModel):
        d = model.displacements(p, q.coords)
        L = np.linalg.norm(d, axis=1)
        return d / L[:, None], L, False
    P, Q = model.embed(p), model.embed(q)
    if model.has_closed_form:
        if np.linalg.norm(P + Q) < REACH_TOL:
            ang = 2 * np.pi * np.arange(CONTINUUM_CAP) / CONTINUUM_CAP
            dirs = _unit_vectors(model, p, ang)
            return dirs, np.full(CONTINUUM_CAP, math.pi * model.a), True
        V = Q - (P @ Q) * P / model.a ** 2
        V /= np.linalg.norm(V)
        L = model.closed_form_distance(p, q)
        v = _spheroid.tangent_to_chart(model.a, model.c, p.chart, p.coords, V)
        return v[None], np.array([L]), False
    fan = fan_for(model, p)
    _, a, t, res = fan.solve(Q[None])
    ok = res < 1e-6
    if not ok.any():
        sol = multistart(model, p, q, search_length(model))
        a, t = sol.alphas, sol.lengths
    else:
        a, t = a[ok], t[ok]
    a, t, r, _, _ = solve_bvp(model, p, q, a, t)
    ok = r < 1e-9
    return _unit_vectors(model, p, a[ok]), t[ok], False


def _unit_vectors(model, p, angles):
    e1, e2 = model.unit_frame(p)
    angles = np.asarray(angles, dtype=float)
    return np.cos(angles)[:, None] * e1 + np.sin(angles)[:, None] * e2


def _angles(model, p, dirs):
    g = model.metric_at(p)
    e1, e2 = model.unit_frame(p)
    return np.arctan2(dirs @ g @ e2, dirs @ g @ e1)


def _verify(model, p, q, dirs, lengths, step):
    """Shoot each candidate; keep those ending within REACH_TOL of q."""
    n = max(4, int(math.ceil(lengths.max() / step)))
    B = len(dirs)
    s0 = np.zeros((B, 8))
    s0[:, 0:2] = p.coords
    s0[:, 2:4] = dirs
    out, och = kernels.integrate(model.geo, np.full(B, p.chart), s0, lengths / n, n, n)
    st, ch = out[:, -1], och[:, -1]
    if isinstance(model, FlatModel):
        gap = np.array([model.chart_distance(ChartPoint(x, 0), q) for x in st[:, 0:2]])
        return gap < REACH_TOL, st[:, 2:4]
    E = embed_points(model, st[:, 0:2], ch)
    gap = np.linalg.norm(E - model.embed(q), axis=1)
    V = np.empty((B, 3))
    for c in np.unique(ch):
        sel = ch == c
        V[sel] = _spheroid.tangent_to_r3(model.a, model.c, int(c), st[sel, 0:2], st[sel, 2:4])
    vel = _spheroid.tangent_to_chart(model.a, model.c, q.chart, np.broadcast_to(q.coords, (B, 2)), V)
    return gap < REACH_TOL, vel


def _dedupe_dirs(model, p, dirs, lengths):
    ang = _angles(model, p, dirs)
    order = np.argsort(lengths, kind="stable")
    keep = []
    for i in order:
        if all(abs((ang[i] - ang[j] + np.pi) % (2 * np.pi) - np.pi) > DEDUP_ANGLE for j in keep):
            keep.append(i)
    keep = np.array(sorted(keep, key=lambda i: ang[i] % (2 * np.pi)), dtype=int)
    return keep, ang


def minimal_geodesics(model, p, q, tol_len=1e-6, step=1e-2) -> MinimalGeodesics:
    """All minimal geodesics from ``p`` to ``q`` (capped at 64 on a continuum)."""
    p, q = as_point(p), as_point(q)
    if isinstance(model, SpheroidModel):
        p, q = model.best_chart(p), model.best_chart(q)
    else:
        q = ChartPoint(model.reduce(q.coords), 0)
    if np.linalg.norm(_wrapped(model, model.embed(p) - model.embed(q))) < 1e-12:
        raise DomainError("minimal geodesics need q != p")
    dirs, L, degenerate = _candidates(model, p, q)
    if len(L) == 0:
        raise ConvergenceError(f"no geodesic found from {p.coords} to {q.coords}")
    sel = L <= L.min() + tol_len
    dirs, L = dirs[sel], L[sel]
    # a continuum family is verified at twice the step: 64 paths of length pi
    # keep an RK4 endpoint error near 1e-8, far inside REACH_TOL
    ok, vel = _verify(model, p, q, dirs, L, 2 * step if degenerate else step)
    if not ok.any():
        raise ConvergenceError(f"no candidate geodesic reached {q.coords}")
    dirs, L, vel = dirs[ok], L[ok], vel[ok]
    keep, ang = _dedupe_dirs(model, p, dirs, L)
    return MinimalGeodesics(p, q, dirs[keep], ang[keep], L[keep], vel[keep], degenerate)


# ---------------------------------------------------------------------------
# cut times


def _endpoint_error(path):
    """Richardson estimate of the endpoint error of ``path`` (step-doubling)."""
    n = len(path.t) - 1
    if n < 8:
        return 0.0
    m = n // 2
    out, och = kernels.integrate(path.model.geo, [path.charts[0]], path.states[:1],
                                 2 * path.step, m, m)
    E2 = embed_points(path.model, out[0, -1:, 0:2], och[0, -1:])
    E1 = embed_points(path.model, path.states[2 * m:2 * m + 1, 0:2], path.charts[2 * m:2 * m + 1])
    return float(np.linalg.norm(E1 - E2)) / 15.0


def tolerance_min(model, p, paths):
    """Slack in the cut predicate: 1e-9 plus ten times the combined error estimate."""
    err = max(_endpoint_error(paths[0]), _endpoint_error(paths[len(paths) // 2]))
    if not model.has_closed_form:
        err += fan_for(model, p).error_estimate()
    return 1e-9 + 10.0 * err


def _scan_indices(path, stride):
    n = len(path.t)
    idx = np.arange(0, n, stride)
    if idx[-1] != n - 1:
        idx = np.append(idx, n - 1)
    return idx


def _bisect_cut(path, D, idx, p, tol_min):
    model = path.model
    P = D < path.t[idx] - tol_min
    trace = [(float(path.t[i]), float(d), bool(b)) for i, d, b in zip(idx, D, P)]
    if not P.any():
        if model.compact:
            raise DomainError(f"Tmax={path.t[-1]} is below the cut time on a compact model")
        return math.inf
    k = int(np.argmax(P))
    if not P[k:].all():
        raise BisectionError("cut predicate is not monotone along the geodesic", trace)
    lo, hi = float(path.t[idx[k - 1]]), float(path.t[idx[k]])
    trace = trace[max(0, k - 2):k + 2]
    while hi - lo > ZERO_WIDTH:
        mid = 0.5 * (lo + hi)
        s, ch = path.state_at(mid)
        dm = distances_to(model, p, s[None, 0:2], [ch])[0]
        inside = dm < mid - tol_min
        trace.append((mid, float(dm), bool(inside)))
        if inside:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def cut_times(model, p, paths, tol_min=None, stride=SCAN_STRIDE):
    """Cut time along each path by bisection on d_p(gamma(t)) < t - tol_min."""
    if tol_min is None:
        tol_min = tolerance_min(model, p, paths)
    idxs = [_scan_indices(path, stride) for path in paths]
    X = np.concatenate([path.states[i, 0:2] for path, i in zip(paths, idxs)])
    C = np.concatenate([path.charts[i] for path, i in zip(paths, idxs)])
    D = distances_to(model, p, X, C)
    splits = np.cumsum([len(i) for i in idxs])[:-1]
    out = []
    for path, d, i in zip(paths, np.split(D, splits), idxs):
        sigma = _bisect_cut(path, d, i, p, tol_min)
        # past a conjugate point the length gap to nearby branches grows only
        # cubically, below the predicate's resolution; minimality ends there anyway
        conj = first_zero(path)
        if conj is not None and conj < sigma:
            sigma = conj
        out.append(sigma)
    return out


def cut_time(model, p, v, Tmax=None, step=DEFAULT_STEP):
    """sigma_v, or +inf when the geodesic minimizes up to Tmax on a non-compact model."""
    path = shoot(model, p, v, Tmax or default_tmax(model), step)
    return cut_times(model, p, [path])[0]


# ---------------------------------------------------------------------------
# classification


@dataclass
class CutRecord:
    angle: float
    v: np.ndarray
    sigma: float
    conj: Optional[float]
    cls: str
    geodesic_count: int
    degenerate: bool = False
    q: Optional[ChartPoint] = None


def _classify(sigma, conj, count, tol_class):
    conj_hit = conj is not None and abs(sigma - conj) < tol_class
    sing = count >= 2
    if conj_hit and sing:
        return "Both"
    if conj_hit:
        return "Conj"
    if sing:
        return "Sing"
    raise StructureViolation(f"cutpoint at sigma={sigma:.12g} has one minimal geodesic and "
                             f"no conjugate point (conj={conj})")


def _record(model, p, path, sigma, tol_class, step, tol_min):
    angle = model.direction_angle(path.p, path.v)
    if not math.isfinite(sigma):
        return CutRecord(angle, path.v, sigma, first_zero(path), "None", 1), None
    conj = first_zero(path)
    q = path.point_at(sigma)
    # q sits up to tol_min + ZERO_WIDTH past the cut, so the minimal branches
    # there differ in length by about that much; longer branches are not minimal
    mg = minimal_geodesics(model, p, q, tol_len=2 * (tol_min + ZERO_WIDTH), step=step)
    cls = _classify(sigma, conj, mg.count, tol_class)
    return CutRecord(angle, path.v, sigma, conj, cls, mg.count, mg.degenerate, q), mg


def classify_cutpoint(model, p, v, Tmax=None, step=DEFAULT_STEP, tol_class=TOL_CLASS):
    path = shoot(model, p, v, Tmax or default_tmax(model), step)
    tol_min = tolerance_min(model, p, [path])
    sigma = cut_times(model, p, [path], tol_min)[0]
    if not math.isfinite(sigma):
        raise DomainError("direction has no cut point before Tmax")
    return _record(model, p, path, sigma, tol_class, 1e-2, tol_min)[0]


def parallel_map(fn, items, workers=None):
    """Order-preserving map; results are indexed like ``items`` regardless of scheduling."""
    items = list(items)
    if not workers or workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def direction_grid(N, window=None):
    """Angles k 2pi/N, all of them or those inside ``window = (a0, a1)``."""
    if N < 1:
        raise DomainError("N must be positive")
    dalpha = 2 * np.pi / N
    if window is None:
        return dalpha * np.arange(N)
    a0, a1 = window
    if not a1 > a0:
        raise DomainError("window must have a0 < a1")
    k0 = math.ceil(a0 / dalpha - 1e-9)
    k1 = math.floor(a1 / dalpha + 1e-9)
    return dalpha * np.arange(k0, k1 + 1)


def cut_records(model, p, N, Tmax=None, step=DEFAULT_STEP, tol_class=TOL_CLASS, workers=None,
                window=None):
    """Cut records for uniformly spaced directions (with their minimal-geodesic sets).

    ``window`` restricts the N-point direction grid to angles in [a0, a1].
    """
    alphas = direction_grid(N, window)
    paths = shoot_many(model, p, alphas, Tmax or default_tmax(model), step)
    tol_min = tolerance_min(model, paths[0].p, paths)
    sig = cut_times(model, paths[0].p, paths, tol_min)
    out = parallel_map(lambda a: _record(model, paths[0].p, a[0], a[1], tol_class, 1e-2,
                                         tol_min), list(zip(paths, sig)), workers)
    return [r for r, _ in out], [m for _, m in out], paths


# ---------------------------------------------------------------------------
# cutlocus samples


@dataclass
class CutlocusSample:
    record: CutRecord
    q: ChartPoint
    nu: np.ndarray
    grad_plus: np.ndarray
    grad_minus: np.ndarray
    jump: float
    weight: float
    tangent: np.ndarray
    multiplicity: int
    flagged: bool


def _orient_normal(model, q, n):
    e1, e2 = model.unit_frame(q)
    g = model.metric_at(q)
    c1, c2 = e1 @ g @ n, e2 @ g @ n
    if c1 < -1e-9 or (abs(c1) <= 1e-9 and c2 < 0):
        n, c1, c2 = -n, -c1, -c2
    return n, -c2 * e1 + c1 * e2


def side_data(model, q, grads):
    """(nu, grad_plus, grad_minus, jump, tangent) from two side gradients at q."""
    a, b = grads
    diff = a - b
    jump = model.norm(q, diff)
    nu, tangent = _orient_normal(model, q, diff / jump)
    if model.inner(q, nu, a) > 0:
        return nu, a, b, jump, tangent
    return nu, b, a, jump, tangent


def _own_branch(model, mg, angle):
    d = np.abs((mg.angles - angle + np.pi) % (2 * np.pi) - np.pi)
    return int(np.argmin(d))


def _curve_points(model, samples):
    if isinstance(model, FlatModel):
        return np.array([s.q.coords for s in samples])
    return np.array([model.embed(s.q) for s in samples])


def _wrapped(model, d):
    if isinstance(model, FlatModel):
        d = d.copy()
        for k, per in enumerate(model.periods):
            if per is not None:
                d[..., k] = (d[..., k] + 0.5 * per) % per - 0.5 * per
    return d


def _arclength_speeds(model, Z, finite, dalpha, cyclic=True):
    """|dq/dalpha| on the direction grid: 4th-order stencil, 2nd-order fallback."""
    N = len(Z)
    speed = np.full(N, np.nan)
    if not cyclic:
        # pad with missing neighbours so the stencils fall back at the ends
        Z = np.concatenate([Z, np.zeros((2,) + Z.shape[1:])])
        finite = np.concatenate([finite, [False, False]])
    M = len(Z)
    for k in range(N):
        if not finite[k]:
            continue
        nb = {j: (k + j) % M for j in (-2, -1, 1, 2)}
        D = {j: _wrapped(model, Z[nb[j]] - Z[k]) for j in nb}
        if all(finite[nb[j]] for j in nb):
            der = (-D[2] + 8 * D[1] - 8 * D[-1] + D[-2]) / (12 * dalpha)
        elif finite[nb[1]] and finite[nb[-1]]:
            der = (D[1] - D[-1]) / (2 * dalpha)
        elif finite[nb[1]]:
            der = D[1] / dalpha
        elif finite[nb[-1]]:
            der = -D[-1] / dalpha
        else:
            continue
        speed[k] = np.linalg.norm(der)
    return speed


def sample_cutlocus(model, p, N, Tmax=None, step=DEFAULT_STEP, tol_class=TOL_CLASS,
                    workers=None, window=None):
    """Cutlocus samples for ``N`` uniform directions with finite cut time.

    With ``window = (a0, a1)`` only the grid directions in that angle range are
    used (same spacing 2pi/N); derivatives then use one-sided stencils at the ends.
    A list of windows samples each one separately.
    """
    if N < 8:
        raise DomainError("sample_cutlocus needs N >= 8")
    if window is not None and np.ndim(window) == 2:
        return [s for w in window
                for s in sample_cutlocus(model, p, N, Tmax, step, tol_class, workers, tuple(w))]
    records, mgs, paths = cut_records(model, p, N, Tmax, step, tol_class, workers, window)
    dalpha = 2 * np.pi / N
    samples = []
    for rec, mg in zip(records, mgs):
        if mg is None:
            samples.append(None)
            continue
        nan2 = np.full(2, np.nan)
        mult = mg.count
        flagged = mg.degenerate or mult != 2 or rec.cls != "Sing"
        if mg.degenerate or mult < 2:
            samples.append(CutlocusSample(rec, mg.q, nan2, nan2, nan2, math.nan, 0.0, nan2,
                                          mult, True))
            continue
        i = _own_branch(model, mg, rec.angle)
        j = (i + 1) % mult
        if mult > 2:
            # the neighbour across the locus is the branch whose gradient differs most
            gaps = [model.norm(mg.q, mg.final_velocities[i] - mg.final_velocities[k])
                    if k != i else -1.0 for k in range(mult)]
            j = int(np.argmax(gaps))
        nu, gp, gm, jump, tan = side_data(model, mg.q,
                                          (mg.final_velocities[i], mg.final_velocities[j]))
        samples.append(CutlocusSample(rec, mg.q, nu, gp, gm, jump, 0.0, tan, mult, flagged))
    finite = np.array([s is not None for s in samples])
    if finite.any():
        Z = np.zeros((len(samples), 3 if isinstance(model, SpheroidModel) else 2))
        Z[finite] = _curve_points(model, [s for s in samples if s is not None])
        speed = _arclength_speeds(model, Z, finite, dalpha, cyclic=window is None)
        for k, s in enumerate(samples):
            if s is not None and not s.flagged and np.isfinite(speed[k]):
                s.weight = float(speed[k] * dalpha / s.multiplicity)
    return [s for s in samples if s is not None]


def sample_at(model, p, q):
    """Side data at a single cut point ``q`` (weight 0; not part of a quadrature)."""
    mg = minimal_geodesics(model, p, q)
    if mg.count < 2:
        raise DomainError(f"{as_point(q).coords} is not a cut point with two branches")
    rec = CutRecord(math.nan, np.full(2, np.nan), float(mg.lengths.min()), None,
                    "Sing", mg.count, mg.degenerate, mg.q)
    nu, gp, gm, jump, tan = side_data(model, mg.q, mg.final_velocities[:2])
    return CutlocusSample(rec, mg.q, nu, gp, gm, jump, 0.0, tan, mg.count, mg.count != 2)


def samples_to_csv(samples, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["v_angle", "sigma", "conj", "class", "q0", "q1", "chart", "nu0", "nu1",
                    "jump", "weight", "multiplicity"])
        for s in samples:
            r = s.record
            w.writerow([repr(float(r.angle)), repr(float(r.sigma)),
                        "" if r.conj is None else repr(float(r.conj)), r.cls,
                        repr(float(s.q.coords[0])), repr(float(s.q.coords[1])), s.q.chart,
                        repr(float(s.nu[0])), repr(float(s.nu[1])), repr(float(s.jump)),
                        repr(float(s.weight)), s.multiplicity])


def records_to_csv(records, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["v_angle", "sigma", "conj", "class", "geodesic_count", "q0", "q1", "chart"])
        for r in records:
            q = r.q if r.q is not None else ChartPoint(np.full(2, np.nan), -1)
            w.writerow([repr(float(r.angle)), repr(float(r.sigma)),
                        "" if r.conj is None else repr(float(r.conj)), r.cls,
                        r.geodesic_count, repr(float(q.coords[0])), repr(float(q.coords[1])),
                        q.chart])


def tangent_pca_errors(model, samples, k=10):
    """Angle between each sample's tangent and the principal axis of its k nearest cut points."""
    pts = np.array([s.q.coords for s in samples])
    out = np.empty(len(samples))
    for i, s in enumerate(samples):
        d = _wrapped(model, pts - pts[i])
        nn = np.argsort(np.linalg.norm(d, axis=1), kind="stable")[:k]
        loc = d[nn] - d[nn].mean(axis=0)
        _, _, vt = np.linalg.svd(loc)
        axis = vt[0]
        t = s.tangent / np.linalg.norm(s.tangent)
        out[i] = math.acos(min(1.0, abs(float(axis @ t))))
    return out


# ---------------------------------------------------------------------------
# superdifferential


@dataclass
class SuperdifferentialSet:
    q: ChartPoint
    extremals: np.ndarray        # covectors, one row per minimal geodesic

    def hull_distance(self, covector, ginv):
        """Distance (dual metric) from ``covector`` to the convex hull of the extremals."""
        L = np.linalg.cholesky(ginv)
        A = (self.extremals @ L).T
        x = covector @ L
        big = 1e3
        Aa = np.vstack([A, big * np.ones(A.shape[1])])
        xa = np.append(x, big)
        w, _ = nnls(Aa, xa)
        return float(np.linalg.norm(A @ w - x))


def superdifferential_extremals(model, p, q):
    mg = minimal_geodesics(model, p, q)
    g = model.metric_at(mg.q)
    return SuperdifferentialSet(mg.q, mg.final_velocities @ g)


def upper_semicontinuity_gap(model, p, q_sequence, q_limit, tail=3):
    """Largest dual distance from tail extremals of the sequence to the hull at ``q_limit``."""
    lim = superdifferential_extremals(model, p, q_limit)
    ginv = np.linalg.inv(model.metric_at(lim.q))
    gap = 0.0
    for q in list(q_sequence)[-tail:]:
        for xi in superdifferential_extremals(model, p, q).extremals:
            gap = max(gap, lim.hull_distance(xi, ginv))
    return gap


def upper_semicontinuity_probe(model, p, q_sequence, q_limit=None, tol=1e-3):
    q_sequence = list(q_sequence)
    if q_limit is None:
        q_limit = q_sequence[-1]
    return upper_semicontinuity_gap(model, p, q_sequence, q_limit) <= tol


def annulus_points(p, r0, r1, n_r=8, n_a=32):
    """Chart points on the closed annulus r0 <= |x - p| <= r1 (includes the axis directions)."""
    p = as_point(p)
    r = np.linspace(r0, r1, n_r)
    a = 2 * np.pi * np.arange(n_a) / n_a
    R, A = np.meshgrid(r, a, indexing="ij")
    return p.coords + np.stack([R * np.cos(A), R * np.sin(A)], axis=-1).reshape(-1, 2)


def second_difference_quotients(model, p, region, h, chart=0):
    """(d(x+he) - 2d(x) + d(x-he)) / h^2 over region points and both chart axes."""
    region = np.atleast_2d(np.asarray(region, dtype=float))
    p = as_point(p)
    d0 = distances_to(model, p, region, chart)
    if np.min(d0) <= 2 * h:
        raise DomainError("semiconcavity region touches the apex")
    out = []
    for e in np.eye(2):
        dp = distances_to(model, p, region + h * e, chart)
        dm = distances_to(model, p, region - h * e, chart)
        out.append((dp - 2 * d0 + dm) / h ** 2)
    return np.stack(out, axis=-1)


def semiconcavity_probe(model, p, region, h, chart=0):
    """Upper semiconcavity constant estimate: max second difference quotient."""
    return float(np.max(second_difference_quotients(model, p, region, h, chart)))
