"""Three weak senses of "Hess f <= A" / "Lap f <= alpha": barrier, viscosity, distributional.

Functions live on an interval (1D) or a chart box (2D) and are evaluated
through an analytic evaluator when one is available.  Each checker returns
"holds", "fails" or "inconclusive":

* a barrier failure is only reported with an explicit obstruction (a convex
  kink, or second difference quotients along dyadic windows that force the
  Hessian of any upper barrier above the bound);
* a viscosity verdict comes from directional suprema of the second-order
  subjet, bracketed by bisection over quadratic jets that touch f from below
  on sampled dyadic shells;
* the distributional verdict pairs f with bumps shrinking around the point.
"""
import json
import math
from dataclasses import asdict, dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import VerificationFailure
from .fields import bump_1d, scalar_bump

HOLDS, FAILS, INCONCLUSIVE = "holds", "fails", "inconclusive"
EPS = np.finfo(float).eps
M_PERP = 1e4          # curvature used to switch off the complementary direction
N_LEVELS = 64


# ------------------------------------------------------------------ data types

class SampledFunction:
    """A continuous function on a box given by grid values and/or an evaluator.

    ``fn`` maps an array of points (..., dim) to values (...); without it the
    grid values are interpolated linearly and no scale below ``h`` is probed.
    ``model`` and ``apex`` mark f = d_p on a surface model (used for excision
    and for the metric in 2D pairings).
    """

    def __init__(self, lo, hi, h, values=None, fn=None, model=None, apex=None, label=""):
        self.lo = np.atleast_1d(np.asarray(lo, dtype=float))
        self.hi = np.atleast_1d(np.asarray(hi, dtype=float))
        self.dim = len(self.lo)
        self.h = float(h)
        self.fn = fn
        self.model = model
        self.apex = apex
        self.label = label
        axes = [np.arange(l, u + 0.5 * self.h, self.h) for l, u in zip(self.lo, self.hi)]
        self.axes = axes
        if values is None:
            if fn is None:
                raise ValueError("need grid values or an evaluator")
            mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
            values = fn(mesh if self.dim > 1 else mesh[..., 0])
        self.values = np.asarray(values, dtype=float)
        self._interp = RegularGridInterpolator(axes, self.values, bounds_error=False,
                                               fill_value=None)

    @classmethod
    def from_callable(cls, fn, lo, hi, h, **kw):
        return cls(lo, hi, h, fn=fn, **kw)

    @property
    def min_scale(self):
        return 0.0 if self.fn is not None else 2 * self.h

    def __call__(self, X):
        X = np.asarray(X, dtype=float)
        if self.fn is not None:
            return np.asarray(self.fn(X), dtype=float)
        pts = X[..., None] if self.dim == 1 else X
        return self._interp(pts.reshape(-1, self.dim)).reshape(pts.shape[:-1])

    def plus_affine(self, c, b):
        """f + c + b . x (all three senses ignore affine parts)."""
        b = np.atleast_1d(np.asarray(b, dtype=float))
        base = self

        def fn(X):
            X = np.asarray(X, dtype=float)
            lin = X * b[0] if base.dim == 1 else X @ b
            return base(X) + c + lin

        return SampledFunction(self.lo, self.hi, self.h, fn=fn, model=self.model,
                               apex=self.apex, label=self.label + "+affine")


@dataclass
class QuadraticJet:
    """h(y) = value + <p, y - x> + Q(y - x, y - x) / 2."""
    x: np.ndarray
    value: float
    p: np.ndarray
    Q: np.ndarray

    def __call__(self, Y):
        D = np.asarray(Y, dtype=float) - self.x
        if self.x.size == 1:
            D = D.reshape(D.shape[:-1] if D.shape[-1:] == (1,) else D.shape)
            return self.value + float(self.p[0]) * D + 0.5 * float(self.Q[0, 0]) * D * D
        return (self.value + D @ self.p
                + 0.5 * np.einsum("...i,ij,...j->...", D, self.Q, D))

    def to_dict(self):
        return {"x": self.x.tolist(), "value": self.value, "p": self.p.tolist(),
                "Q": self.Q.tolist()}


@dataclass
class ComparisonData:
    """Bound A (Hessian case) or alpha (Laplacian case) as an evaluator of x."""
    kind: str
    fn: Callable
    metric: Optional[Callable] = None
    label: str = ""

    @classmethod
    def hessian(cls, A, metric=None, label=""):
        return cls("hessian", A, metric, label)

    @classmethod
    def laplacian(cls, alpha, metric=None, label=""):
        return cls("laplacian", alpha, metric, label)

    def at(self, x):
        return self.fn(np.asarray(x, dtype=float))

    def g(self, x, dim):
        return np.eye(dim) if self.metric is None else np.asarray(self.metric(x))


@dataclass
class SenseVerdict:
    row: str
    barrier: str
    viscosity: str
    distributional: str
    witnesses: dict = dc_field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


# -------------------------------------------------------------- local sampling

def _shells_1d(r, n_shells=12, m=4096):
    """Offsets t with |t| in [r 2^-n_shells, r], dense in every dyadic shell."""
    out = []
    for j in range(n_shells):
        hi = r * 2.0 ** -j
        out.append(np.linspace(0.5 * hi, hi, m, endpoint=False))
    t = np.concatenate(out)
    return np.concatenate([t, -t])


def _shells_2d(r, n_shells=10, m_r=12, m_a=64):
    ang = np.linspace(0, 2 * np.pi, m_a, endpoint=False)
    dirs = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    out = []
    for j in range(n_shells):
        hi = r * 2.0 ** -j
        rad = np.linspace(0.5 * hi, hi, m_r, endpoint=False)
        out.append((rad[:, None, None] * dirs[None]).reshape(-1, 2))
    return np.concatenate(out)


class _Local:
    """f sampled around x on dyadic shells, with the roundoff slack for comparisons."""

    def __init__(self, f, x, r):
        self.f = f
        self.x = np.atleast_1d(np.asarray(x, dtype=float))
        self.dim = f.dim
        self.f0 = float(f(self.x if self.dim > 1 else self.x[0]))
        self.r = r
        D = _shells_1d(r)[:, None] if self.dim == 1 else _shells_2d(r)
        self.D = D
        pts = self.x + D
        self.F = f(pts if self.dim > 1 else pts[:, 0]) - self.f0
        self.slack = 64 * EPS * max(1.0, abs(self.f0))

    def within(self, radius):
        return np.linalg.norm(self.D, axis=-1) <= radius * (1 + 1e-12)

    def below(self, p, Q, radius):
        """True when the jet (p, Q) stays below f on the sampled ball."""
        sel = self.within(radius)
        D = self.D[sel]
        hq = D @ p + 0.5 * np.einsum("bi,ij,bj->b", D, Q, D)
        return bool(np.all(hq <= self.F[sel] + self.slack))

    def above(self, p, Q, radius):
        sel = self.within(radius)
        D = self.D[sel]
        hq = D @ p + 0.5 * np.einsum("bi,ij,bj->b", D, Q, D)
        return bool(np.all(hq >= self.F[sel] - self.slack))


def _first_order(f, x, scales):
    """Central-difference gradient and the symmetric slope gaps along test directions.

    The gap (f(x+te) + f(x-te) - 2 f(x)) / t tends to 0 where f is
    differentiable, to a positive constant at a convex kink and to a negative
    one at a concave kink.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    dim = len(x)
    ev = (lambda P: f(P)) if dim > 1 else (lambda P: f(P[..., 0]))
    f0 = float(ev(x[None])[0])
    # roundoff-balanced step; f(x) = 0 allows much smaller steps
    tp = max(scales[-1] * 2.0 ** -20, 0.1 * (EPS * abs(f0)) ** (1 / 3))
    if f.min_scale:
        tp = max(tp, f.min_scale)
    E = np.eye(dim)
    p = np.array([(ev((x + tp * e)[None])[0] - ev((x - tp * e)[None])[0]) / (2 * tp) for e in E])
    dirs = _directions(dim)
    gaps = np.empty((len(dirs), len(scales)))
    for i, e in enumerate(dirs):
        T = np.asarray(scales)[:, None] * e
        gaps[i] = (ev(x + T) + ev(x - T) - 2 * f0) / np.asarray(scales)
    return p, gaps, tp


def _directions(dim, n=8):
    if dim == 1:
        return np.array([[1.0]])
    a = np.pi * np.arange(n) / n
    return np.stack([np.cos(a), np.sin(a)], axis=-1)


def _kink(gaps, scales, tol=1e-6):
    """+1 convex kink, -1 concave kink, 0 differentiable (per direction, last scales)."""
    tail = gaps[:, -4:]
    out = np.zeros(len(gaps), dtype=int)
    for i, g in enumerate(tail):
        # a kink keeps a slope gap that does not shrink with the scale
        if np.all(g > tol) and g[-1] > 0.5 * g[0]:
            out[i] = 1
        elif np.all(g < -tol) and g[-1] < 0.5 * g[0]:
            out[i] = -1
    return out


def _levels(center):
    mags = 10.0 ** np.linspace(-4, 4, N_LEVELS // 2)
    return np.concatenate([center - mags[::-1], center + mags])


def _rank_one(e, q, dim):
    e = np.asarray(e, dtype=float)
    if dim == 1:
        return np.array([[q]])
    n = np.array([-e[1], e[0]])
    return q * np.outer(e, e) - M_PERP * np.outer(n, n)


def _sup_touching(loc, p, e, center, radius, rel=1e-6, iters=60):
    """Bracket sup{q : (p, rank-one q along e) touches f from below}.

    Returns (lo, hi) with lo touching and hi not touching; lo = -inf if even
    the lowest level fails and hi = +inf if the highest level touches.
    """
    dim = loc.dim
    lev = _levels(center)
    ok = lambda q: loc.below(p, _rank_one(e, q, dim), radius)
    if not ok(lev[0]):
        return -math.inf, lev[0]
    if ok(lev[-1]):
        return lev[-1], math.inf
    a, b = 0, len(lev) - 1
    while b - a > 1:
        m = (a + b) // 2
        if ok(lev[m]):
            a = m
        else:
            b = m
    lo, hi = lev[a], lev[b]
    for _ in range(iters):
        if hi - lo <= rel * (1 + abs(lo)):
            break
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi


def _window_quotients(f, x, p, e, scales, m=4096):
    """min over dyadic windows of the max of 2 (f(x+te) - f(x) - p.te) / t^2, t > 0.

    Also returns the maximizing points (the obstruction sequence x_k).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    ev = (lambda P: f(P)) if len(x) > 1 else (lambda P: f(P[..., 0]))
    f0 = float(ev(x[None])[0])
    best, pts = [], []
    for s in scales:
        t = np.linspace(0.5 * s, s, m)
        R = 2 * (ev(x + t[:, None] * e) - f0 - t * (e @ p)) / t ** 2
        k = int(np.argmax(R))
        best.append(float(R[k]))
        pts.append((x + t[k] * e).tolist())
    return min(best), best, pts


# --------------------------------------------------------------------- checkers

def _bound_scalar(data, x, e, dim):
    """A(e, e) for the Hessian case, alpha for the Laplacian case."""
    b = data.at(x)
    if data.kind == "laplacian" or dim == 1:
        return float(np.asarray(b).reshape(-1)[0]) if np.ndim(b) else float(b)
    return float(e @ np.asarray(b) @ e)


def _scales(r0, budget, min_scale=0.0):
    s = [r0 * 2.0 ** -k for k in range(budget + 1)]
    return [v for v in s if v > min_scale] or [r0]


def check_barrier(f, data, x, eps=0.5, search_budget=12, r0=None):
    """Upper-barrier sense at x.  Returns (verdict, witness dict)."""
    dim = f.dim
    x = np.atleast_1d(np.asarray(x, dtype=float))
    r0 = r0 if r0 is not None else (0.5 if dim == 1 else 0.05)
    scales = _scales(r0, search_budget, f.min_scale)
    p_c, gaps, _ = _first_order(f, x, scales)
    kinks = _kink(gaps, scales)
    g = data.g(x, dim)
    B = np.asarray(data.at(x), dtype=float)
    if dim == 1:
        Qmax = np.array([[float(B.reshape(-1)[0]) + eps]])
    elif data.kind == "hessian":
        Qmax = B + eps * g
    else:
        # Laplacian bound: shift a Hessian estimate to the allowed trace
        t = scales[-1]
        H = _hessian_estimate(f, x, t)
        Qmax = H + (float(B) + eps - np.trace(np.linalg.solve(g, H))) / dim * g
    cands = [p_c]
    if dim == 1 and kinks[0] == -1:
        # concave kink: any slope between the one-sided derivatives works
        s = scales[-1]
        dm = (f(x[0]) - f(x[0] - s)) / s
        dp = (f(x[0] + s) - f(x[0])) / s
        cands = [np.array([v]) for v in np.linspace(dp, dm, 9)]
    loc = _Local(f, x, scales[0])
    for k, rad in enumerate(scales):
        for p in cands:
            if loc.above(p, Qmax, rad):
                jet = QuadraticJet(x, loc.f0, np.asarray(p, float), Qmax)
                return HOLDS, {"jet": jet.to_dict(), "radius": rad}
    if np.any(kinks == 1):
        i = int(np.argmax(kinks == 1))
        return FAILS, {"obstruction": "convex kink", "direction": _directions(dim)[i].tolist(),
                       "slope_gaps": gaps[i].tolist(), "scales": list(scales)}
    if np.all(kinks == 0):
        fine = scales[len(scales) // 2:]
        need = {}
        for e in _directions(dim):
            for sgn in (1.0, -1.0):
                c, per_window, pts = _window_quotients(f, x, p_c, sgn * e, fine)
                need[(tuple(e), sgn)] = (c, per_window, pts)
        if data.kind == "hessian" or dim == 1:
            lim = float(B.reshape(-1)[0]) + eps if dim == 1 else None
            for (e, sgn), (c, per_window, pts) in need.items():
                e = np.asarray(e)
                bound = lim if dim == 1 else float(e @ (B + eps * g) @ e)
                if c > bound + 1e-6:
                    return FAILS, {"obstruction": "second difference quotients",
                                   "direction": (sgn * e).tolist(), "forced_hessian": c,
                                   "bound": bound, "sequence": pts, "window_max": per_window}
        else:
            dirs = _directions(dim)
            n = len(dirs)
            for i in range(n // 2):
                e, e2 = dirs[i], dirs[i + n // 2]
                c1 = min(need[(tuple(e), 1.0)][0], need[(tuple(e), -1.0)][0])
                c2 = min(need[(tuple(e2), 1.0)][0], need[(tuple(e2), -1.0)][0])
                if c1 + c2 > float(B) + eps + 1e-6:
                    return FAILS, {"obstruction": "second difference quotients (trace)",
                                   "frame": [e.tolist(), e2.tolist()],
                                   "forced_trace": c1 + c2, "bound": float(B) + eps}
    return INCONCLUSIVE, {"searched_radii": list(scales)}


def _hessian_estimate(f, x, t):
    dim = len(x)
    E = np.eye(dim)
    f0 = float(f(x))
    H = np.empty((dim, dim))
    for i in range(dim):
        H[i, i] = (f(x + t * E[i]) + f(x - t * E[i]) - 2 * f0) / t ** 2
        for j in range(i + 1, dim):
            H[i, j] = H[j, i] = (f(x + t * (E[i] + E[j])) - f(x + t * (E[i] - E[j]))
                                 - f(x - t * (E[i] - E[j])) + f(x - t * (E[i] + E[j]))) / (4 * t * t)
    return H


def check_viscosity(f, data, x, search_budget=12, r0=None):
    """Viscosity sense at x (test functions touching from below).  Returns (verdict, info)."""
    dim = f.dim
    x = np.atleast_1d(np.asarray(x, dtype=float))
    r0 = r0 if r0 is not None else (0.5 if dim == 1 else 0.05)
    scales = _scales(r0, search_budget, f.min_scale)
    p_c, gaps, _ = _first_order(f, x, scales)
    kinks = _kink(gaps, scales)
    if np.any(kinks == -1):
        i = int(np.argmax(kinks == -1))
        return HOLDS, {"vacuous": "concave kink: no C2 function touches from below",
                       "direction": _directions(dim)[i].tolist(), "slope_gaps": gaps[i].tolist()}
    cands = [p_c]
    if dim == 1 and kinks[0] == 1:
        s = scales[-1]
        dm = (f(x[0]) - f(x[0] - s)) / s
        dp = (f(x[0] + s) - f(x[0])) / s
        cands = [np.array([v]) for v in np.linspace(dm, dp, 9)]
    rad = scales[-1]
    loc = _Local(f, x, rad)
    dirs = _directions(dim)
    B = data.at(x)
    best = None
    for p in cands:
        p = np.asarray(p, dtype=float)
        centers = [_bound_scalar(data, x, e, dim) if data.kind == "hessian" or dim == 1
                   else float(B) / dim for e in dirs]
        br = [_sup_touching(loc, p, e, c, rad) for e, c in zip(dirs, centers)]
        lo = np.array([b[0] for b in br])
        hi = np.array([b[1] for b in br])
        if data.kind == "hessian" or dim == 1:
            bound = np.array([_bound_scalar(data, x, e, dim) for e in dirs])
            viol = lo - bound
            i = int(np.argmax(viol))
            if viol[i] > 0:
                Q = _rank_one(dirs[i], lo[i], dim)
                return FAILS, {"jet": QuadraticJet(x, loc.f0, p, Q).to_dict(),
                               "direction": dirs[i].tolist(), "bound": float(bound[i]),
                               "radius": rad}
            margin = float(np.min(bound - hi))
        else:
            n = len(dirs) // 2
            upper = min(hi[i] + hi[i + n] for i in range(n))
            lower = max(lo[i] + lo[i + n] for i in range(n))
            i = int(np.argmax([lo[i] + lo[i + n] for i in range(n)]))
            if lower > float(B):
                e, e2 = dirs[i], dirs[i + n]
                Q = lo[i] * np.outer(e, e) + lo[i + n] * np.outer(e2, e2)
                if loc.below(p, Q, rad):
                    return FAILS, {"jet": QuadraticJet(x, loc.f0, p, Q).to_dict(),
                                   "trace": lower, "bound": float(B), "radius": rad}
            margin = float(B) - upper
        best = margin if best is None else min(best, margin)
    info = {"margin": best, "radius": rad}
    if best is not None and best > 0:
        return HOLDS, info
    return INCONCLUSIVE, info


# ------------------------------------------------------------- distributional

def shrinking_bumps_1d(x, r0=0.5, count=20, ratio=0.75):
    return [(float(x), r0 * ratio ** k) for k in range(count)]


def _pair_1d(f, data, center, radius, n):
    s = np.linspace(-1.0, 1.0, n + 1)
    X = center + radius * s
    b, _, b2 = bump_1d(s)
    phi, phi2 = b, b2 / radius ** 2
    h = 2 * radius / n
    fx = f(X)
    lhs = math.fsum(fx * phi2) * h
    alpha = np.broadcast_to(np.asarray(data.at(X), dtype=float).reshape(-1)
                            if np.ndim(data.at(X)) else data.at(X), X.shape)
    rhs = math.fsum(alpha * phi) * h
    mass = math.fsum(phi) * h
    scale = math.fsum(np.abs(fx * phi2)) * h
    return lhs, rhs, mass, scale


def _refined(pair, n0, n_max, tol):
    prev = pair(n0)
    n = n0
    while n < n_max:
        n *= 2
        cur = pair(n)
        floor = max(abs(cur[0]), abs(cur[1]), 1e-14 * cur[3], 1e-300)
        if abs(cur[0] - prev[0]) < 0.1 * tol * floor and abs(cur[1] - prev[1]) < 0.1 * tol * floor:
            return cur, n, True
        prev = cur
    return prev, n, False


def check_distributional(f, data, test_suite, tol=1e-3):
    """Pair f against each test function: int f L(phi) <= int bound phi, within tolerance.

    1D suites are (center, radius) bumps; 2D suites are measure-engine fields.
    The excess (lhs - rhs) is normalized by the bump mass; a test fails when
    it exceeds ``tol`` times the larger side (or the mass).
    """
    rows = []
    verdict = HOLDS
    for item in test_suite:
        if f.dim == 1:
            c, r = item
            (lhs, rhs, mass, _), n, conv = _refined(lambda n: _pair_1d(f, data, c, r, n),
                                                    256, 1 << 17, tol)
            label = f"bump({c:g},{r:.4g})"
        else:
            lhs, rhs, mass, n, conv = _pair_2d(f, data, item, tol)
            label = item.label or repr(item)
        excess = lhs - rhs
        floor = tol * max(abs(lhs), abs(rhs), mass * 1e-3)
        status = HOLDS if excess <= floor else FAILS
        if not conv and status == FAILS:
            status = INCONCLUSIVE
        rows.append({"test": label, "lhs": lhs, "rhs": rhs, "excess": excess, "mass": mass,
                     "grid": n, "status": status})
        if status == FAILS:
            verdict = FAILS
        elif status == INCONCLUSIVE and verdict == HOLDS:
            verdict = INCONCLUSIVE
    return verdict, rows


def _pair_2d(f, data, fld, tol):
    from . import measure
    from .fields import TestScalarField
    model = f.model

    def pair(n):
        grid = measure.Grid.for_field(fld, n)
        X = grid.X
        fx = f(X)
        if f.apex is not None:
            d = measure.distances_to(model, f.apex, X, fld.chart)
            measure._check_excision(d, measure.DELTA_EXCL)
        vol = measure._volume(model, fld.chart, X)
        if isinstance(fld, TestScalarField):
            dens = measure.laplacian_test_density(model, fld, X)
            phi = fld.evaluate(X)[0]
            rhs = measure._fsum(np.asarray(data.at(X)) * phi * vol, grid.h)
            mass = measure._fsum(phi * vol, grid.h)
        else:
            dens = measure.hessian_test_density(model, fld, X)
            V = fld.evaluate(X)[0]
            A = np.asarray(data.at(X))
            rhs = measure._fsum(np.einsum("...i,...ij,...j->...", V, A, V) * vol, grid.h)
            mass = measure._fsum(np.einsum("...i,...i->...", V, V) * vol, grid.h)
        lhs = measure._fsum(fx * dens, grid.h)
        return lhs, rhs, mass, measure._fsum(np.abs(fx * dens), grid.h)

    (lhs, rhs, mass, _), n, conv = _refined(pair, 64, 1024, tol)
    return lhs, rhs, mass, n, conv


def shrinking_bumps_2d(model, x, r0=0.2, count=6, ratio=0.7):
    return [scalar_bump(x, r0 * ratio ** k, periods=model.periods, label=f"bump{k}")
            for k in range(count)]


# --------------------------------------------------- Hessian -> scalar reduction

def hessian_to_scalar_reduction(f, A, W, x=None, samples=None, n_approx=(1, 2, 4, 8, 16)):
    """Scalar operator -W^i W^j Hess_ij f + A(W, W) >= 0 for one field W.

    Runs the distributional check for W and the viscosity check of the
    directional second derivative along W(x).  Also evaluates the
    approximating family W_n = W (1 + psi / n) (psi a smaller bump) whose
    pairings must converge to the W pairing.  Fields with a sign-changing
    profile (|W| not C^1) are flagged and not reduced.
    """
    from . import measure
    from .fields import Bump, Scaled, Sum, TestVectorField, _root_bump
    out = {"field": W.label or repr(W), "norm_is_c1": W.norm_is_c1}
    if not W.norm_is_c1:
        out["verdict"] = INCONCLUSIVE
        out["reason"] = "|W| is not C^1: the reduction does not apply"
        return out
    data = ComparisonData.hessian(A)
    dist, rows = check_distributional(f, data, [W])
    out["distributional"] = dist
    out["pairing"] = rows[0]
    c, r = W.support
    psi = Bump(c, 0.5 * r, periods=_root_bump(W.profile).periods)
    seq = []
    for n in n_approx:
        Wn = TestVectorField(Sum(W.profile, Scaled(psi, 1.0 / n) * W.profile), chart=W.chart)
        Wn.angle0, Wn.scale, Wn.rate = W.angle0, W.scale, W.rate
        seq.append(check_distributional(f, data, [Wn])[1][0]["excess"])
    out["approximation_excess"] = seq
    if samples is not None:
        out["singular_part"] = measure.singular_hessian_sum(f.model, f.apex, W, samples)
    if x is not None:
        Wx = W.evaluate(np.atleast_2d(x))[0][0]
        e = Wx / np.linalg.norm(Wx)
        dir_data = ComparisonData.hessian(lambda X: np.asarray(A(X)))
        loc_verdict, info = check_viscosity(f, dir_data, x)
        out["viscosity"] = loc_verdict
        out["direction"] = e.tolist()
    out["verdict"] = dist
    return out


# ------------------------------------------------------------- implication suite

def _row_1d(label, fn, alpha=0.0, x=0.0):
    f = SampledFunction.from_callable(fn, -1.0, 1.0, 1e-3, label=label)
    data = ComparisonData.laplacian(lambda X: np.full(np.shape(X), float(alpha)))
    return f, data, x, shrinking_bumps_1d(x)


def x2sin(X):
    X = np.asarray(X, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(X == 0, 0.0, X * X * np.sin(1.0 / np.where(X == 0, 1.0, X)))


def _distance_row(model, p, x, K, label):
    from . import measure
    from .cutlocus import distances_to
    fn = lambda X: distances_to(model, p, np.asarray(X, dtype=float).reshape(-1, 2)).reshape(
        np.shape(X)[:-1])
    f = SampledFunction.from_callable(fn, np.asarray(x) - 0.3, np.asarray(x) + 0.3, 0.05,
                                      model=model, apex=p, label=label)
    alpha = lambda X: measure.model_laplacian(K, 2, fn(X))
    data = ComparisonData.laplacian(alpha, label=f"K={K:g}")
    return f, data, np.asarray(x, float), shrinking_bumps_2d(model, x, r0=0.15, count=4)


def default_corpus():
    """(label, f, data, x, tests) rows of the implication suite."""
    from .manifolds import default_apex, sphere, torus
    rows = [
        ("-x^2",) + _row_1d("-x^2", lambda X: -np.asarray(X) ** 2),
        ("x^2",) + _row_1d("x^2", lambda X: np.asarray(X) ** 2),
        ("|x|",) + _row_1d("|x|", lambda X: np.abs(X)),
        ("-|x|",) + _row_1d("-|x|", lambda X: -np.abs(X)),
        ("x^2 sin(1/x)",) + _row_1d("x^2 sin(1/x)", x2sin),
    ]
    tor = torus()
    pt = default_apex(tor)
    rows.append(("d_p torus cut point (K=0)",)
                + _distance_row(tor, pt, (0.5, 0.25), 0.0, "d_p torus cut"))
    rows.append(("d_p torus smooth point (K=-1)",)
                + _distance_row(tor, pt, (0.25, 0.1), -1.0, "d_p torus smooth"))
    sph = sphere()
    ps = default_apex(sph)
    rows.append(("d_p sphere (K=0)",)
                + _distance_row(sph, ps, (1.0, 0.5), 0.0, "d_p sphere"))
    return rows


def evaluate_row(label, f, data, x, tests, eps=0.5, search_budget=12):
    b, wb = check_barrier(f, data, x, eps, search_budget)
    v, wv = check_viscosity(f, data, x, search_budget)
    d, wd = check_distributional(f, data, tests)
    return SenseVerdict(label, b, v, d, {"barrier": wb, "viscosity": wv, "distributional": wd})


def implication_suite(corpus=None, strict=True):
    """Run all three checkers on the corpus and check the implications between them."""
    rows = [evaluate_row(*r) for r in (corpus or default_corpus())]
    bad = []
    for r in rows:
        if r.barrier == HOLDS and r.viscosity == FAILS:
            bad.append((r.row, "barrier holds but viscosity fails"))
        if INCONCLUSIVE not in (r.viscosity, r.distributional) and r.viscosity != r.distributional:
            bad.append((r.row, "viscosity and distributional disagree"))
    if bad and strict:
        raise VerificationFailure(f"implication violated: {bad}",
                                  {"rows": [r.to_dict() for r in rows], "violations": bad})
    return rows


def verdicts_to_json(rows):
    return json.dumps([r.to_dict() for r in rows], sort_keys=True, default=_jsonable)


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, tuple):
        return list(o)
    return str(o)


def summary_table(rows):
    w = max(len(r.row) for r in rows)
    lines = [f"{'row':<{w}}  {'barrier':<12}  {'viscosity':<12}  {'distributional':<14}"]
    lines += [f"{r.row:<{w}}  {r.barrier:<12}  {r.viscosity:<12}  {r.distributional:<14}"
              for r in rows]
    return "\n".join(lines)
