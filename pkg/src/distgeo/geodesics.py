"""Geodesic shooting, Jacobi fields and first conjugate times."""
import csv
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _spheroid, kernels
from .errors import DomainError, IntegrationError
from .manifolds import ChartPoint, SpheroidModel, as_point

DEFAULT_STEP = 1e-3
ZERO_WIDTH = 1e-8


@dataclass(frozen=True)
class GeodesicPath:
    """Sampled unit-speed geodesic together with one Jacobi field along it.

    ``states[i] = [x0, x1, v0, v1, J0, J1, Jd0, Jd1]`` in chart ``charts[i]``.
    """
    model: object
    p: ChartPoint
    v: np.ndarray
    step: float
    t: np.ndarray
    states: np.ndarray
    charts: np.ndarray

    @property
    def positions(self):
        return self.states[:, 0:2]

    @property
    def velocities(self):
        return self.states[:, 2:4]

    @property
    def endpoint(self) -> ChartPoint:
        return ChartPoint(self.model.reduce(self.states[-1, 0:2]), int(self.charts[-1]))

    @property
    def final_velocity(self):
        return self.states[-1, 2:4].copy()

    def point(self, i) -> ChartPoint:
        return ChartPoint(self.model.reduce(self.states[i, 0:2]), int(self.charts[i]))

    def state_at(self, t):
        """State at time ``t`` via one partial RK4 step from the last sample before it."""
        if t < 0 or t > self.t[-1] + 1e-12:
            raise DomainError(f"t={t} outside [0, {self.t[-1]}]")
        i = min(int(t / self.step), len(self.t) - 1)
        ds = t - self.t[i]
        if ds <= 0.0:
            return self.states[i].copy(), int(self.charts[i])
        out, ch = kernels.integrate(self.model.geo, [self.charts[i]], self.states[i][None],
                                    ds, 1, 1)
        return out[0, -1], int(ch[0, -1])

    def point_at(self, t) -> ChartPoint:
        s, ch = self.state_at(t)
        return ChartPoint(self.model.reduce(s[0:2]), ch)

    def speeds(self):
        return np.sqrt(_pointwise_inner(self.model, self.charts, self.positions,
                                        self.velocities, self.velocities))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "chart", "x0", "x1", "v0", "v1"])
            for t, ch, s in zip(self.t, self.charts, self.states):
                w.writerow([repr(float(t)), int(ch)] + [repr(float(u)) for u in s[:4]])


@dataclass(frozen=True)
class JacobiSolution:
    """Jacobi field with J(0) = 0, J'(0) = w along ``along``."""
    along: GeodesicPath
    w: np.ndarray
    first_zero: Optional[float]

    @property
    def samples(self):
        return self.along.t, self.along.states[:, 4:6], self.along.states[:, 6:8]

    def norms(self):
        P = self.along
        J = P.states[:, 4:6]
        return np.sqrt(_pointwise_inner(P.model, P.charts, P.positions, J, J))

    def normal_component(self):
        return normal_component(self.along.model, self.along.charts, self.along.states)


def _pointwise_inner(model, charts, X, U, V):
    out = np.empty(len(X))
    for ch in np.unique(charts):
        sel = charts == ch
        g = model.grid_geometry(int(ch), X[sel, 0], X[sel, 1])["g"]
        out[sel] = np.einsum("bi,bij,bj->b", U[sel], g, V[sel])
    return out


def normal_component(model, charts, states):
    """Signed normal part of J relative to the oriented normal of the velocity.

    Chart independent: uses the surface orientation, not the chart's.
    """
    states = np.atleast_2d(states)
    charts = np.atleast_1d(charts)
    if not isinstance(model, SpheroidModel):
        v, J = states[:, 2:4], states[:, 4:6]
        return v[:, 0] * J[:, 1] - v[:, 1] * J[:, 0]
    out = np.empty(len(states))
    for ch in np.unique(charts):
        sel = charts == ch
        X = states[sel, 0:2]
        E = _spheroid.embed(model.a, model.c, int(ch), X[:, 0], X[:, 1])
        n = _spheroid.outward_normal(model.a, model.c, E)
        T = _spheroid.tangent_to_r3(model.a, model.c, int(ch), X, states[sel, 2:4])
        J = _spheroid.tangent_to_r3(model.a, model.c, int(ch), X, states[sel, 4:6])
        out[sel] = np.einsum("bi,bi->b", np.cross(n, T), J)
    return out


def normal_direction(model, p, v):
    """Unit vector at ``p`` orthogonal to ``v``, oriented like the frame rotation."""
    e1, e2 = model.unit_frame(p)
    a = model.direction_angle(p, v)
    return -math.sin(a) * e1 + math.cos(a) * e2


def _prepare(model, p, v):
    p = as_point(p)
    v = np.asarray(v, dtype=float)
    if isinstance(model, SpheroidModel):
        q = model.best_chart(p)
        if q.chart != p.chart:
            v = model.tangent_to_chart(p, v, q.chart)
            p = q
    nv = model.norm(p, v)
    if abs(nv - 1.0) > 1e-10:
        raise DomainError(f"direction is not unit: |v|_g = {nv!r}")
    return p, v


def shoot(model, p, v, T, step=DEFAULT_STEP, w=None):
    """Integrate the geodesic ``t -> exp_p(t v)`` on ``[0, T]``.

    The last ``T / step`` is rounded up to an integer number of equal steps;
    the Jacobi field carried along has J(0) = 0 and J'(0) = ``w``
    (default: the unit normal to ``v``).
    """
    if not T > 0:
        raise DomainError("T must be positive")
    p, v = _prepare(model, p, v)
    if w is None:
        w = normal_direction(model, p, v)
    n = max(1, int(math.ceil(T / step - 1e-9)))
    h = T / n
    s0 = np.concatenate([p.coords, v, [0.0, 0.0], w])
    states, charts = kernels.integrate(model.geo, [p.chart], s0[None], h, n, 1)
    states, charts = states[0], charts[0]
    if not np.all(np.isfinite(states)):
        raise IntegrationError(f"non-finite state while shooting from {p.coords} along {v}")
    return GeodesicPath(model, p, v, h, np.arange(n + 1) * h, states, charts)


def shoot_many(model, p, alphas, T, step=DEFAULT_STEP):
    """Shoot unit geodesics from ``p`` at frame angles ``alphas`` in one batch.

    Each path carries the Jacobi field with J'(0) the rotated unit normal.
    """
    p = as_point(p)
    if isinstance(model, SpheroidModel):
        p = model.best_chart(p)
    alphas = np.asarray(alphas, dtype=float)
    e1, e2 = model.unit_frame(p)
    ca, sa = np.cos(alphas)[:, None], np.sin(alphas)[:, None]
    V = ca * e1 + sa * e2
    W = -sa * e1 + ca * e2
    B = len(alphas)
    s0 = np.concatenate([np.broadcast_to(p.coords, (B, 2)), V, np.zeros((B, 2)), W], axis=1)
    n = max(1, int(math.ceil(T / step - 1e-9)))
    h = T / n
    states, charts = kernels.integrate(model.geo, np.full(B, p.chart), s0, h, n, 1)
    if not np.all(np.isfinite(states)):
        raise IntegrationError("non-finite state in batched shooting")
    t = np.arange(n + 1) * h
    return [GeodesicPath(model, p, V[i], h, t, states[i], charts[i]) for i in range(B)]


def first_zero(path):
    """First zero of the normal Jacobi component along ``path`` (None if none)."""
    b = normal_component(path.model, path.charts, path.states)
    return _first_zero(path, b)


def _first_zero(path, b):
    idx = np.nonzero(b[1:-1] * b[2:] <= 0.0)[0]
    for i in idx + 1:
        if b[i] == 0.0:
            return float(path.t[i])
        # refine the sign change inside one step by bisection on partial steps
        lo, hi = 0.0, path.step
        s_i, ch = path.states[i], int(path.charts[i])
        sign_lo = np.sign(b[i])
        while hi - lo > ZERO_WIDTH:
            mid = 0.5 * (lo + hi)
            out, och = kernels.integrate(path.model.geo, [ch], s_i[None], mid, 1, 1)
            bm = normal_component(path.model, och[0, -1:], out[0, -1:])[0]
            if np.sign(bm) == sign_lo:
                lo = mid
            else:
                hi = mid
        return float(path.t[i] + 0.5 * (lo + hi))
    return None


def jacobi(model, p, v, T, step=DEFAULT_STEP, w=None) -> JacobiSolution:
    path = shoot(model, p, v, T, step, w)
    b = normal_component(model, path.charts, path.states)
    return JacobiSolution(path, path.states[0, 6:8].copy(), _first_zero(path, b))


def conjugate_time(model, p, v, Tmax, step=DEFAULT_STEP):
    """First conjugate time along ``exp_p(t v)`` in (0, Tmax], or None."""
    return jacobi(model, p, v, Tmax, step).first_zero


def gauss_lemma_drift(path, jac=None):
    """max_t |g(gamma', J)(t) - g(gamma', J)(0)|."""
    J = path.states[:, 4:6]
    vals = _pointwise_inner(path.model, path.charts, path.positions, path.velocities, J)
    return float(np.max(np.abs(vals - vals[0])))


def endpoint_r3(model, path):
    """Embedded endpoint (spheroids) or reduced chart endpoint (flat)."""
    return model.embed(path.endpoint)
