"""Compiled geodesic + Jacobi integrator.

State layout per path: ``[x0, x1, v0, v1, J0, J1, Jd0, Jd1]`` where ``J`` is
a Jacobi field in chart components and ``Jd`` its coordinate time derivative.
``geo = [kind, a, c, switch_cos]`` with kind 0 = flat, 1 = spheroid.
"""
import math

import numpy as np

from ._accel import njit
from ._spheroid import EMBED_TABLE

_TABLE = np.ascontiguousarray(EMBED_TABLE)
_HP = 0.5 * math.pi


@njit
def _cyc(m, s, c):
    # m-th derivative of sin evaluated through (sin, cos)
    r = m % 4
    if r == 0:
        return s
    if r == 1:
        return c
    if r == 2:
        return -s
    return -c


@njit
def _jets(a, c, chart, t, f, XJ):
    # XJ[m, k, :] = d^m_t d^k_f X for m + k <= 3.  Every table frequency is
    # 0 or 1 and every phase a multiple of pi/2, so one sin/cos pair per
    # angle suffices and phases become quarter-turn index shifts.
    st, ct = math.sin(t), math.cos(t)
    sf, cf = math.sin(f), math.cos(f)
    for comp in range(3):
        coef0 = c if _TABLE[chart, comp, 0] > 0.5 else a
        wt = _TABLE[chart, comp, 1]
        qt = int(round(_TABLE[chart, comp, 2] / _HP))
        wf = _TABLE[chart, comp, 3]
        qf = int(round(_TABLE[chart, comp, 4] / _HP))
        s1, c1 = (st, ct) if wt > 0.5 else (0.0, 1.0)
        s2, c2 = (sf, cf) if wf > 0.5 else (0.0, 1.0)
        pm = coef0
        for m in range(4):
            tm = pm * _cyc(m + qt, s1, c1)
            pk = 1.0
            for k in range(4 - m):
                XJ[m, k, comp] = tm * pk * _cyc(k + qf, s2, c2)
                pk *= wf
            pm *= wt


@njit
def _d3(XJ, m1, k1, m2, k2):
    return (XJ[m1, k1, 0] * XJ[m2, k2, 0] + XJ[m1, k1, 1] * XJ[m2, k2, 1]
            + XJ[m1, k1, 2] * XJ[m2, k2, 2])


@njit
def _workspace():
    return (np.empty((2, 2)), np.empty((2, 2)), np.empty((2, 2, 2)),
            np.empty((2, 2, 2, 2)), np.empty((4, 4, 3)), np.empty((2, 2, 2)),
            np.empty((2, 2, 2)), np.empty((2, 2, 2, 2)), np.empty((2, 2, 2)))


@njit
def _geom(geo, chart, t, f, ws, need_d):
    g, gi, gam, dgam, XJ, gl, dg, dgl, dgi = ws
    if geo[0] < 0.5:
        g[:, :] = 0.0
        g[0, 0] = 1.0
        g[1, 1] = 1.0
        gi[:, :] = g
        gam[:, :, :] = 0.0
        dgam[:, :, :, :] = 0.0
        return
    _jets(geo[1], geo[2], chart, t, f, XJ)
    for i in range(2):
        for j in range(2):
            g[i, j] = _d3(XJ, 1 - i, i, 1 - j, j)
    det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    gi[0, 0] = g[1, 1] / det
    gi[1, 1] = g[0, 0] / det
    gi[0, 1] = -g[0, 1] / det
    gi[1, 0] = -g[1, 0] / det
    for l in range(2):
        for i in range(2):
            for j in range(2):
                mij = (i == 0) + (j == 0)
                gl[l, i, j] = _d3(XJ, mij, 2 - mij, 1 - l, l)
    for k in range(2):
        for i in range(2):
            for j in range(2):
                gam[k, i, j] = gi[k, 0] * gl[0, i, j] + gi[k, 1] * gl[1, i, j]
    if not need_d:
        return
    for m in range(2):
        for i in range(2):
            for j in range(2):
                mim = (i == 0) + (m == 0)
                mjm = (j == 0) + (m == 0)
                dg[m, i, j] = (_d3(XJ, mim, 2 - mim, 1 - j, j)
                               + _d3(XJ, 1 - i, i, mjm, 2 - mjm))
                mij = (i == 0) + (j == 0)
                mijm = mij + (m == 0)
                for l in range(2):
                    mlm = (l == 0) + (m == 0)
                    dgl[m, l, i, j] = (_d3(XJ, mijm, 3 - mijm, 1 - l, l)
                                       + _d3(XJ, mij, 2 - mij, mlm, 2 - mlm))
    for m in range(2):
        for k in range(2):
            for l in range(2):
                s = 0.0
                for p in range(2):
                    for q in range(2):
                        s -= gi[k, p] * dg[m, p, q] * gi[q, l]
                dgi[m, k, l] = s
    for m in range(2):
        for k in range(2):
            for i in range(2):
                for j in range(2):
                    s = 0.0
                    for l in range(2):
                        s += dgi[m, k, l] * gl[l, i, j] + gi[k, l] * dgl[m, l, i, j]
                    dgam[m, k, i, j] = s


@njit
def _rhs(geo, chart, s, out, ws):
    if geo[0] < 0.5:
        out[0] = s[2]
        out[1] = s[3]
        out[2] = 0.0
        out[3] = 0.0
        out[4] = s[6]
        out[5] = s[7]
        out[6] = 0.0
        out[7] = 0.0
        return
    _geom(geo, chart, s[0], s[1], ws, True)
    gam = ws[2]
    dgam = ws[3]
    out[0] = s[2]
    out[1] = s[3]
    out[4] = s[6]
    out[5] = s[7]
    for k in range(2):
        acc = 0.0
        jac = 0.0
        for i in range(2):
            for j in range(2):
                acc -= gam[k, i, j] * s[2 + i] * s[2 + j]
                jac -= 2.0 * gam[k, i, j] * s[2 + i] * s[6 + j]
                for m in range(2):
                    jac -= dgam[m, k, i, j] * s[2 + i] * s[2 + j] * s[4 + m]
        out[2 + k] = acc
        out[6 + k] = jac


@njit
def _to_r3(XJ, u0, u1, out):
    for comp in range(3):
        out[comp] = XJ[1, 0, comp] * u0 + XJ[0, 1, comp] * u1


@njit
def _from_r3(XJ, e, out):
    b0 = XJ[1, 0, 0] * e[0] + XJ[1, 0, 1] * e[1] + XJ[1, 0, 2] * e[2]
    b1 = XJ[0, 1, 0] * e[0] + XJ[0, 1, 1] * e[1] + XJ[0, 1, 2] * e[2]
    g00 = _d3(XJ, 1, 0, 1, 0)
    g01 = _d3(XJ, 1, 0, 0, 1)
    g11 = _d3(XJ, 0, 1, 0, 1)
    det = g00 * g11 - g01 * g01
    out[0] = (g11 * b0 - g01 * b1) / det
    out[1] = (g00 * b1 - g01 * b0) / det


@njit
def _maybe_switch(geo, chart, s, ws):
    """Move the state to the other chart when it nears a coordinate pole."""
    if geo[0] < 0.5 or abs(math.cos(s[0])) <= geo[3]:
        return chart
    a = geo[1]
    c = geo[2]
    gam = ws[2]
    XJ = ws[4]
    _geom(geo, chart, s[0], s[1], ws, False)
    dj0 = s[6]
    dj1 = s[7]
    for i in range(2):
        for j in range(2):
            dj0 += gam[0, i, j] * s[2 + i] * s[4 + j]
            dj1 += gam[1, i, j] * s[2 + i] * s[4 + j]
    E = np.empty(3)
    V = np.empty(3)
    JJ = np.empty(3)
    DJ = np.empty(3)
    for comp in range(3):
        E[comp] = XJ[0, 0, comp]
    _to_r3(XJ, s[2], s[3], V)
    _to_r3(XJ, s[4], s[5], JJ)
    _to_r3(XJ, dj0, dj1, DJ)
    new = 1 - chart
    x = E[0] / a
    y = E[1] / a
    z = E[2] / c
    if new == 0:
        t = math.acos(min(1.0, max(-1.0, z)))
        f = math.atan2(y, x)
    else:
        t = math.acos(min(1.0, max(-1.0, x)))
        f = math.atan2(z, y)
    _geom(geo, new, t, f, ws, False)
    u = np.empty(2)
    s[0] = t
    s[1] = f
    _from_r3(XJ, V, u)
    s[2] = u[0]
    s[3] = u[1]
    _from_r3(XJ, JJ, u)
    s[4] = u[0]
    s[5] = u[1]
    _from_r3(XJ, DJ, u)
    for k in range(2):
        acc = u[k]
        for i in range(2):
            for j in range(2):
                acc -= gam[k, i, j] * s[2 + i] * s[4 + j]
        s[6 + k] = acc
    return new


@njit
def _rk4(geo, chart, s, h, k1, k2, k3, k4, tmp, ws):
    _rhs(geo, chart, s, k1, ws)
    for q in range(8):
        tmp[q] = s[q] + 0.5 * h * k1[q]
    _rhs(geo, chart, tmp, k2, ws)
    for q in range(8):
        tmp[q] = s[q] + 0.5 * h * k2[q]
    _rhs(geo, chart, tmp, k3, ws)
    for q in range(8):
        tmp[q] = s[q] + h * k3[q]
    _rhs(geo, chart, tmp, k4, ws)
    for q in range(8):
        s[q] += h / 6.0 * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q])


@njit
def _integrate_flat(states0, h, nsteps, stride, out):
    # zero Christoffel symbols: the RK4 stages collapse to this update
    for b in range(states0.shape[0]):
        x0, x1, v0, v1, J0, J1, D0, D1 = states0[b]
        hb = h[b]
        for q in range(8):
            out[b, 0, q] = states0[b, q]
        r = 1
        for n in range(1, nsteps + 1):
            x0 += hb * v0
            x1 += hb * v1
            J0 += hb * D0
            J1 += hb * D1
            if n % stride == 0:
                out[b, r, 0] = x0
                out[b, r, 1] = x1
                out[b, r, 2] = v0
                out[b, r, 3] = v1
                out[b, r, 4] = J0
                out[b, r, 5] = J1
                out[b, r, 6] = D0
                out[b, r, 7] = D1
                r += 1


@njit
def integrate(geo, charts0, states0, h, nsteps, stride):
    """Classical RK4 on a batch of paths; returns recorded states and charts."""
    B = states0.shape[0]
    nrec = nsteps // stride + 1
    out = np.empty((B, nrec, 8))
    och = np.empty((B, nrec), dtype=np.int64)
    if geo[0] < 0.5:
        _integrate_flat(states0, h, nsteps, stride, out)
        for b in range(B):
            och[b, :] = charts0[b]
        return out, och
    k1 = np.empty(8)
    k2 = np.empty(8)
    k3 = np.empty(8)
    k4 = np.empty(8)
    tmp = np.empty(8)
    s = np.empty(8)
    ws = _workspace()
    for b in range(B):
        for q in range(8):
            s[q] = states0[b, q]
        chart = charts0[b]
        chart = _maybe_switch(geo, chart, s, ws)
        out[b, 0, :] = s
        och[b, 0] = chart
        r = 1
        for n in range(1, nsteps + 1):
            _rk4(geo, chart, s, h[b], k1, k2, k3, k4, tmp, ws)
            chart = _maybe_switch(geo, chart, s, ws)
            if n % stride == 0:
                out[b, r, :] = s
                och[b, r] = chart
                r += 1
    return out, och


@njit
def geometry_point(geo, chart, t, f):
    ws = _workspace()
    _geom(geo, chart, t, f, ws, True)
    return ws[0].copy(), ws[2].copy(), ws[3].copy()


# ---------------------------------------------------------------------------
# fan inversion: bicubic Hermite interpolant of the exponential map
# node[i, j] = [E, E_a * da, E_t * dt, E_at * da * dt] at angle i, time j


@njit
def _herm(u, h, dh):
    u2 = u * u
    u3 = u2 * u
    h[0] = 2 * u3 - 3 * u2 + 1
    h[1] = u3 - 2 * u2 + u
    h[2] = -2 * u3 + 3 * u2
    h[3] = u3 - u2
    dh[0] = 6 * u2 - 6 * u
    dh[1] = 3 * u2 - 4 * u + 1
    dh[2] = -6 * u2 + 6 * u
    dh[3] = 3 * u2 - 2 * u


@njit
def _fan_point(node, dalpha, dt, Lmax, a, t, F, Fa, Ft, hu, dhu, hs, dhs):
    A = node.shape[0]
    T = node.shape[1]
    a = a % (2 * math.pi)
    t = min(max(t, 0.0), Lmax - 1e-12)
    fi = a / dalpha
    fl = math.floor(fi)
    i0 = int(fl) % A
    u = fi - fl
    fj = t / dt
    j0 = min(int(math.floor(fj)), T - 2)
    s = fj - j0
    _herm(u, hu, dhu)
    _herm(s, hs, dhs)
    for c in range(3):
        F[c] = 0.0
        Fa[c] = 0.0
        Ft[c] = 0.0
    for ci in range(2):
        ia = (i0 + ci) % A
        iu = 2 * ci
        for cj in range(2):
            jt = j0 + cj
            js = 2 * cj
            for slot in range(4):
                hU = iu + (slot & 1)
                hS = js + (slot >> 1)
                w = hu[hU] * hs[hS]
                wa = dhu[hU] * hs[hS] / dalpha
                wt = hu[hU] * dhs[hS] / dt
                for c in range(3):
                    x = node[ia, jt, slot, c]
                    F[c] += w * x
                    Fa[c] += wa * x
                    Ft[c] += wt * x


@njit
def fan_newton(node, dalpha, dt, Lmax, Q, qidx, a0, t0, maxiter, tol):
    """Damped Gauss-Newton on the interpolant, one seed at a time."""
    S = a0.shape[0]
    a_out = np.empty(S)
    t_out = np.empty(S)
    r_out = np.empty(S)
    F = np.empty(3)
    Fa = np.empty(3)
    Ft = np.empty(3)
    hu = np.empty(4)
    dhu = np.empty(4)
    hs = np.empty(4)
    dhs = np.empty(4)
    R = np.empty(3)
    for k in range(S):
        a = a0[k]
        t = t0[k]
        q = qidx[k]
        for it in range(maxiter):
            _fan_point(node, dalpha, dt, Lmax, a, t, F, Fa, Ft, hu, dhu, hs, dhs)
            res = 0.0
            for c in range(3):
                R[c] = F[c] - Q[q, c]
                res += R[c] * R[c]
            if math.sqrt(res) < tol:
                break
            m00 = 1e-14
            m01 = 0.0
            m11 = 1e-14
            b0 = 0.0
            b1 = 0.0
            for c in range(3):
                m00 += Fa[c] * Fa[c]
                m01 += Fa[c] * Ft[c]
                m11 += Ft[c] * Ft[c]
                b0 += Fa[c] * R[c]
                b1 += Ft[c] * R[c]
            det = m00 * m11 - m01 * m01
            d0 = (m11 * b0 - m01 * b1) / det
            d1 = (m00 * b1 - m01 * b0) / det
            big = max(abs(d0), abs(d1))
            scale = 1.0 if big <= 0.2 else 0.2 / big
            a -= scale * d0
            t = min(max(t - scale * d1, 0.0), Lmax)
            if big * scale < 1e-15:
                break
        _fan_point(node, dalpha, dt, Lmax, a, t, F, Fa, Ft, hu, dhu, hs, dhs)
        res = 0.0
        for c in range(3):
            res += (F[c] - Q[q, c]) ** 2
        a_out[k] = a % (2 * math.pi)
        t_out[k] = t
        r_out[k] = math.sqrt(res)
    return a_out, t_out, r_out
