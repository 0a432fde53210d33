"""Boundary-value geodesics by multistart shooting.

Used for models without a closed-form distance.  Two entry points:

* :func:`multistart` solves p -> q for a single target: 64 start directions,
  each seeded at the closest approach of its geodesic to q, then refined by
  Gauss-Newton on (angle, length) with Jacobi fields as the Jacobian.
* :class:`FanField` precomputes the exponential map on an (angle, time) grid
  with its derivatives and inverts a bicubic Hermite interpolant of it; this
  is the batched evaluator for grids of query points.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from . import _kernels_numpy, _spheroid, kernels
from .errors import ConvergenceError
from .manifolds import SpheroidModel, as_point

N_STARTS = 64
BVP_TOL = 1e-11


def _frame(model, p):
    e1, e2 = model.unit_frame(p)
    return e1, e2


def initial_states(model, p, alphas):
    e1, e2 = _frame(model, p)
    ca, sa = np.cos(alphas)[:, None], np.sin(alphas)[:, None]
    v = ca * e1 + sa * e2
    w = -sa * e1 + ca * e2          # d v / d alpha
    B = len(alphas)
    return np.concatenate([np.broadcast_to(p.coords, (B, 2)), v, np.zeros((B, 2)), w], axis=1)


def target_vector(model, q):
    """Point representation used for residuals: R^3 for spheroids, chart coords otherwise."""
    return model.embed(as_point(q))


def _end_residual(model, states, charts, Q):
    """Residual and its (angle, length) Jacobian at path endpoints."""
    B = len(states)
    if isinstance(model, SpheroidModel):
        R = np.empty((B, 3))
        Jm = np.empty((B, 3, 2))
        for ch in np.unique(charts):
            sel = charts == ch
            X = states[sel, 0:2]
            R[sel] = _spheroid.embed(model.a, model.c, int(ch), X[:, 0], X[:, 1]) - Q
            Jm[sel, :, 1] = _spheroid.tangent_to_r3(model.a, model.c, int(ch), X, states[sel, 2:4])
            Jm[sel, :, 0] = _spheroid.tangent_to_r3(model.a, model.c, int(ch), X, states[sel, 4:6])
        return R, Jm
    R = states[:, 0:2] - Q
    for k, per in enumerate(model.periods):
        if per is not None:
            R[:, k] = (R[:, k] + 0.5 * per) % per - 0.5 * per
    Jm = np.stack([states[:, 4:6], states[:, 2:4]], axis=-1)
    return R, Jm


def solve_bvp(model, p, q, alpha0, L0, step=5e-3, maxiter=30, tol=BVP_TOL):
    """Batched Gauss-Newton on (angle, length) so that exp_p(L v(angle)) = q.

    Returns ``(alpha, L, residual_norm, final_states, final_charts)``.
    """
    p = as_point(p)
    Q = target_vector(model, q)
    alpha = np.array(alpha0, dtype=float, copy=True)
    L = np.maximum(np.array(L0, dtype=float, copy=True), 1e-6)
    res = np.full(len(alpha), np.inf)
    active = np.ones(len(alpha), dtype=bool)
    states = np.zeros((len(alpha), 8))
    charts = np.zeros(len(alpha), dtype=np.int64)
    for _ in range(maxiter):
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        n = max(8, int(math.ceil(L[idx].max() / step)))
        s0 = initial_states(model, p, alpha[idx])
        out, och = kernels.integrate(model.geo, np.full(len(idx), p.chart), s0, L[idx] / n, n, n)
        st, ch = out[:, -1], och[:, -1]
        R, Jm = _end_residual(model, st, ch, Q)
        rn = np.linalg.norm(R, axis=1)
        states[idx], charts[idx], res[idx] = st, ch, rn
        done = rn < tol
        active[idx[done]] = False
        upd = ~done
        if not upd.any():
            break
        JtJ = np.einsum("bki,bkj->bij", Jm[upd], Jm[upd])
        JtR = np.einsum("bki,bk->bi", Jm[upd], R[upd])
        JtJ += 1e-14 * np.eye(2)
        try:
            delta = np.linalg.solve(JtJ, JtR[..., None])[..., 0]
        except np.linalg.LinAlgError:
            delta = np.linalg.lstsq(JtJ[0], JtR[0], rcond=None)[0][None]
        # damp long jumps; Newton is only trusted locally
        scale = np.minimum(1.0, 0.5 / np.maximum(np.abs(delta).max(axis=1), 1e-300))
        j = idx[upd]
        alpha[j] -= scale * delta[:, 0]
        L[j] = np.maximum(L[j] - scale * delta[:, 1], 1e-6)
    return alpha, L, res, states, charts


@dataclass
class ShootingResult:
    distance: float
    alphas: np.ndarray          # converged start angles, sorted by length
    lengths: np.ndarray
    final_states: np.ndarray
    final_charts: np.ndarray
    residuals: np.ndarray = field(default=None)


def _dedupe(alphas, lengths, *rest, ang_tol=1e-4):
    order = np.argsort(lengths, kind="stable")
    keep = []
    for i in order:
        if all(abs((alphas[i] - alphas[j] + np.pi) % (2 * np.pi) - np.pi) > ang_tol for j in keep):
            keep.append(i)
    keep = np.array(keep, dtype=int)
    return (alphas[keep], lengths[keep]) + tuple(r[keep] for r in rest)


def multistart(model, p, q, Lmax, n_starts=N_STARTS, step=5e-3, scan_step=1e-2,
               tol=BVP_TOL):
    """All geodesics p -> q found from ``n_starts`` seeded shooting runs."""
    p = as_point(p)
    Q = target_vector(model, q)
    alphas = 2 * np.pi * np.arange(n_starts) / n_starts
    n = int(math.ceil(Lmax / scan_step))
    out, och = kernels.integrate(model.geo, np.full(n_starts, p.chart),
                                 initial_states(model, p, alphas), Lmax / n, n, 1)
    B, T = och.shape
    R, _ = _end_residual(model, out.reshape(B * T, 8), och.reshape(B * T), Q)
    dist = np.linalg.norm(R, axis=1).reshape(B, T)
    tbest = np.argmin(dist, axis=1)
    L0 = np.maximum(tbest * (Lmax / n), 1e-3)
    a, L, res, st, ch = solve_bvp(model, p, q, alphas, L0, step=step, tol=tol)
    ok = res < max(tol * 100, 1e-9)
    if not ok.any():
        raise ConvergenceError(f"no geodesic from {p.coords} reached {as_point(q).coords}")
    a = np.mod(a[ok], 2 * np.pi)
    a, L, st, ch, res = _dedupe(a, L[ok], st[ok], ch[ok], res[ok])
    return ShootingResult(float(L[0]), a, L, st, ch, res)


# ---------------------------------------------------------------------------
# fan interpolation


class FanField:
    """Exponential-map fan from ``p`` with bicubic Hermite inversion.

    Node data per (angle i, time j): embedded point E, E_t = dX v,
    E_a = dX J and E_at = d2X(v, J) + dX J' where J is the Jacobi field with
    J'(0) = dv/dangle.  Queries are solved by Gauss-Newton on the interpolant.
    """

    def __init__(self, model, p, Lmax, n_dirs=1024, step=5e-3, stride=2):
        if not isinstance(model, SpheroidModel):
            raise TypeError("FanField is meant for spheroid models")
        self.model = model
        self.p = as_point(p)
        self.n_dirs = n_dirs
        self.dalpha = 2 * np.pi / n_dirs
        n = int(math.ceil(Lmax / (step * stride))) * stride
        self._h = Lmax / n
        self.dt = self._h * stride
        self.Lmax = Lmax
        alphas = self.dalpha * np.arange(n_dirs)
        out, och = kernels.integrate(model.geo, np.full(n_dirs, self.p.chart),
                                     initial_states(model, self.p, alphas), Lmax / n, n, stride)
        A, T, _ = out.shape
        self.n_t = T
        flat, fch = out.reshape(A * T, 8), och.reshape(A * T)
        E = np.empty((A * T, 3))
        Et = np.empty((A * T, 3))
        Ea = np.empty((A * T, 3))
        Eat = np.empty((A * T, 3))
        a, c = model.a, model.c
        for ch in (0, 1):
            sel = fch == ch
            if not sel.any():
                continue
            X = flat[sel]
            J = _spheroid.jets(a, c, ch, X[:, 0], X[:, 1], order=2)
            d1 = [J[(0,)], J[(1,)]]
            E[sel] = J[()]
            Et[sel] = d1[0] * X[:, 2:3] + d1[1] * X[:, 3:4]
            Ea[sel] = d1[0] * X[:, 4:5] + d1[1] * X[:, 5:6]
            acc = d1[0] * X[:, 6:7] + d1[1] * X[:, 7:8]
            for i in range(2):
                for j in range(2):
                    acc = acc + J[tuple(sorted((i, j)))] * (X[:, 2 + i] * X[:, 4 + j])[:, None]
            Eat[sel] = acc
        self.E = E.reshape(A, T, 3)
        self.Et = Et.reshape(A, T, 3)
        self.Ea = Ea.reshape(A, T, 3)
        self.Eat = Eat.reshape(A, T, 3)
        self.node = np.ascontiguousarray(np.stack(
            [self.E, self.Ea * self.dalpha, self.Et * self.dt, self.Eat * self.dalpha * self.dt],
            axis=2))
        self.tree = cKDTree(E)

    def evaluate(self, alpha, t):
        """Interpolated point and its (angle, time) derivatives."""
        return _kernels_numpy.fan_eval(self.node, self.dalpha, self.dt, self.Lmax,
                                       np.asarray(alpha, dtype=float), np.asarray(t, dtype=float))

    @property
    def cell_radius(self):
        """Largest embedded cell diagonal: every branch through q has a node this close."""
        if not hasattr(self, "_cell_radius"):
            E = self.E
            En = np.roll(E, -1, axis=0)
            d1 = np.linalg.norm(En[:, 1:] - E[:, :-1], axis=-1)
            d2 = np.linalg.norm(En[:, :-1] - E[:, 1:], axis=-1)
            self._cell_radius = float(max(d1.max(), d2.max()))
        return self._cell_radius

    def _seeds(self, Q, slack=3.0):
        """Seeds (query index, alpha, t) for every branch that can be minimal.

        A node within one cell radius of q has t >= d(p, q) - R, and the
        minimal branch owns such a node with t <= d(p, q) + R, so only nodes
        with t <= t_min + slack * R are kept.
        """
        R = self.cell_radius
        hits = self.tree.query_ball_point(Q, R * 1.01)
        seeds_q, seeds_a, seeds_t = [], [], []
        for qi, nodes in enumerate(hits):
            if not nodes:
                nodes = [int(self.tree.query(Q[qi])[1])]
            nodes = np.asarray(nodes)
            ai, tj = np.divmod(nodes, self.n_t)
            tt = tj * self.dt
            keep = tt <= tt.min() + slack * R
            ai, tj = ai[keep], tj[keep]
            dist = np.linalg.norm(self.E[ai, tj] - Q[qi], axis=1)
            # nearest node per angle index: near caustics distinct branches
            # sit only a few indices apart, so clusters are not merged
            order = np.lexsort((dist, ai))
            av, tv = ai[order], tj[order]
            first = np.ones(len(av), dtype=bool)
            first[1:] = av[1:] != av[:-1]
            seeds_q.extend([qi] * int(first.sum()))
            seeds_a.extend(av[first] * self.dalpha)
            seeds_t.extend(tv[first] * self.dt)
        return np.array(seeds_q), np.array(seeds_a), np.array(seeds_t)

    def solve(self, Q, maxiter=40, tol=1e-12):
        """All interpolated geodesic branches reaching the embedded points ``Q``.

        Returns per-branch arrays ``(query_index, alpha, t, residual)``.
        """
        Q = np.atleast_2d(Q)
        qi, a, t = self._seeds(Q)
        a, t, res = kernels.fan_newton(self.node, self.dalpha, self.dt, self.Lmax, Q, qi, a, t,
                                       maxiter, tol)
        return qi, a, t, res

    def distance(self, Q, tol=1e-9):
        """Distance from ``p`` to embedded points ``Q`` (min over converged branches)."""
        Q = np.atleast_2d(Q)
        qi, a, t, res = self.solve(Q)
        d = np.full(len(Q), np.inf)
        ok = res < tol
        np.minimum.at(d, qi[ok], t[ok])
        # points within one node spacing of p: the apex is a branch of its own
        near = np.linalg.norm(Q - self.E[0, 0], axis=1)
        d = np.where(near < 1e-9, 0.0, d)
        if np.isinf(d).any():
            bad = np.nonzero(np.isinf(d))[0]
            raise ConvergenceError(f"fan inversion failed at {len(bad)} query points")
        return d

    def error_estimate(self, n_probe=16):
        """Max embedded gap between the interpolant and directly shot geodesics.

        Probes mid-cell angles at every fine time step, so both interpolation
        directions are exercised away from nodes.
        """
        idx = np.linspace(0, self.n_dirs - 1, n_probe).astype(int)
        alphas = (idx + 0.5) * self.dalpha
        stride = int(round(self.dt / self._h))
        n = (self.n_t - 1) * stride
        out, och = kernels.integrate(self.model.geo, np.full(n_probe, self.p.chart),
                                     initial_states(self.model, self.p, alphas), self._h, n, 1)
        t = np.arange(n + 1) * self._h
        A = np.repeat(alphas, n + 1)
        T = np.tile(t, n_probe)
        F, _, _ = self.evaluate(A, T)
        E = np.empty_like(F)
        flat, fch = out.reshape(-1, 8), och.reshape(-1)
        for ch in (0, 1):
            sel = fch == ch
            E[sel] = _spheroid.embed(self.model.a, self.model.c, ch, flat[sel, 0], flat[sel, 1])
        return float(np.max(np.linalg.norm(F - E, axis=1)))
