"""Vectorized numpy twin of the compiled integrator (batch axis first)."""
import numpy as np

from . import _spheroid


def _geom(geo, charts, x, need_d=True):
    B = x.shape[0]
    if geo[0] < 0.5:
        gam = np.zeros((B, 2, 2, 2))
        dgam = np.zeros((B, 2, 2, 2, 2))
        return gam, dgam
    a, c = geo[1], geo[2]
    gam = np.empty((B, 2, 2, 2))
    dgam = np.zeros((B, 2, 2, 2, 2))
    for chart in (0, 1):
        sel = charts == chart
        if not sel.any():
            continue
        G = _spheroid.geometry(a, c, chart, x[sel, 0], x[sel, 1],
                               order=2 if need_d else 1)
        gam[sel] = G["gamma"]
        if need_d:
            dgam[sel] = G["dgamma"]
    return gam, dgam


def _rhs(geo, charts, s):
    gam, dgam = _geom(geo, charts, s[:, 0:2])
    v, J, Jd = s[:, 2:4], s[:, 4:6], s[:, 6:8]
    out = np.empty_like(s)
    out[:, 0:2] = v
    out[:, 4:6] = Jd
    out[:, 2:4] = -np.einsum("bkij,bi,bj->bk", gam, v, v)
    out[:, 6:8] = (-2.0 * np.einsum("bkij,bi,bj->bk", gam, v, Jd)
                   - np.einsum("bmkij,bi,bj,bm->bk", dgam, v, v, J))
    return out


def _maybe_switch(geo, charts, s):
    if geo[0] < 0.5:
        return charts
    a, c, sw = geo[1], geo[2], geo[3]
    hit = np.abs(np.cos(s[:, 0])) > sw
    if not hit.any():
        return charts
    old = charts
    charts = charts.copy()
    for chart in (0, 1):
        sel = hit & (old == chart)
        if not sel.any():
            continue
        st = s[sel]
        gam, _ = _geom(geo, np.full(st.shape[0], chart), st[:, 0:2], need_d=False)
        dj = st[:, 6:8] + np.einsum("bkij,bi,bj->bk", gam, st[:, 2:4], st[:, 4:6])
        E = _spheroid.embed(a, c, chart, st[:, 0], st[:, 1])
        V = _spheroid.tangent_to_r3(a, c, chart, st[:, 0:2], st[:, 2:4])
        JJ = _spheroid.tangent_to_r3(a, c, chart, st[:, 0:2], st[:, 4:6])
        DJ = _spheroid.tangent_to_r3(a, c, chart, st[:, 0:2], dj)
        new = 1 - chart
        x = _spheroid.to_chart(a, c, new, E)
        v = _spheroid.tangent_to_chart(a, c, new, x, V)
        J = _spheroid.tangent_to_chart(a, c, new, x, JJ)
        DJn = _spheroid.tangent_to_chart(a, c, new, x, DJ)
        gam_new, _ = _geom(geo, np.full(st.shape[0], new), x, need_d=False)
        Jd = DJn - np.einsum("bkij,bi,bj->bk", gam_new, v, J)
        s[sel] = np.concatenate([x, v, J, Jd], axis=1)
        charts[sel] = new
    return charts


def integrate(geo, charts0, states0, h, nsteps, stride):
    s = np.array(states0, dtype=float, copy=True)
    charts = np.asarray(charts0, dtype=np.int64).copy()
    h = np.asarray(h, dtype=float)[:, None]
    nrec = nsteps // stride + 1
    B = s.shape[0]
    out = np.empty((B, nrec, 8))
    och = np.empty((B, nrec), dtype=np.int64)
    charts = _maybe_switch(geo, charts, s)
    out[:, 0] = s
    och[:, 0] = charts
    r = 1
    for n in range(1, nsteps + 1):
        k1 = _rhs(geo, charts, s)
        k2 = _rhs(geo, charts, s + 0.5 * h * k1)
        k3 = _rhs(geo, charts, s + 0.5 * h * k2)
        k4 = _rhs(geo, charts, s + h * k3)
        s = s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        charts = _maybe_switch(geo, charts, s)
        if n % stride == 0:
            out[:, r] = s
            och[:, r] = charts
            r += 1
    return out, och


def _herm(u):
    u2, u3 = u * u, u * u * u
    h = np.stack([2 * u3 - 3 * u2 + 1, u3 - 2 * u2 + u, -2 * u3 + 3 * u2, u3 - u2])
    dh = np.stack([6 * u2 - 6 * u, 3 * u2 - 4 * u + 1, -6 * u2 + 6 * u, 3 * u2 - 2 * u])
    return h, dh


def fan_eval(node, dalpha, dt, Lmax, a, t):
    """Interpolated point and its (angle, time) derivatives, vectorized."""
    A, T = node.shape[:2]
    a = np.mod(a, 2 * np.pi)
    t = np.clip(t, 0.0, Lmax - 1e-12)
    fi = a / dalpha
    fl = np.floor(fi)
    i0 = fl.astype(int) % A
    u = fi - fl
    fj = t / dt
    j0 = np.minimum(np.floor(fj).astype(int), T - 2)
    s = fj - j0
    hu, dhu = _herm(u)
    hs, dhs = _herm(s)
    F = np.zeros(a.shape + (3,))
    Fa = np.zeros_like(F)
    Ft = np.zeros_like(F)
    for ci in range(2):
        ia = (i0 + ci) % A
        for cj in range(2):
            jt = j0 + cj
            for slot in range(4):
                hU = 2 * ci + (slot & 1)
                hS = 2 * cj + (slot >> 1)
                x = node[ia, jt, slot]
                F += (hu[hU] * hs[hS])[..., None] * x
                Fa += (dhu[hU] * hs[hS] / dalpha)[..., None] * x
                Ft += (hu[hU] * dhs[hS] / dt)[..., None] * x
    return F, Fa, Ft


def fan_newton(node, dalpha, dt, Lmax, Q, qidx, a0, t0, maxiter, tol):
    a = np.array(a0, dtype=float, copy=True)
    t = np.array(t0, dtype=float, copy=True)
    Qb = Q[qidx]
    active = np.ones(len(a), dtype=bool)
    for _ in range(maxiter):
        idx = np.nonzero(active)[0]
        if len(idx) == 0:
            break
        F, Fa, Ft = fan_eval(node, dalpha, dt, Lmax, a[idx], t[idx])
        R = F - Qb[idx]
        done = np.linalg.norm(R, axis=1) < tol
        m00 = np.einsum("bc,bc->b", Fa, Fa) + 1e-14
        m01 = np.einsum("bc,bc->b", Fa, Ft)
        m11 = np.einsum("bc,bc->b", Ft, Ft) + 1e-14
        b0 = np.einsum("bc,bc->b", Fa, R)
        b1 = np.einsum("bc,bc->b", Ft, R)
        det = m00 * m11 - m01 * m01
        d0 = (m11 * b0 - m01 * b1) / det
        d1 = (m00 * b1 - m01 * b0) / det
        big = np.maximum(np.abs(d0), np.abs(d1))
        scale = np.where(big <= 0.2, 1.0, 0.2 / np.maximum(big, 1e-300))
        scale[done] = 0.0
        a[idx] -= scale * d0
        t[idx] = np.clip(t[idx] - scale * d1, 0.0, Lmax)
        active[idx[done | (big * scale < 1e-15)]] = False
    F, _, _ = fan_eval(node, dalpha, dt, Lmax, a, t)
    return np.mod(a, 2 * np.pi), t, np.linalg.norm(F - Qb, axis=1)
