"""Closed-form chart geometry of an ellipsoid of revolution.

Two spherical-type charts cover the surface x^2/a^2 + y^2/a^2 + z^2/c^2 = 1:

* chart 0: (a sin t cos f, a sin t sin f, c cos t), degenerate at t in {0, pi}
* chart 1: (a cos t, a sin t cos f, c sin t sin f), degenerate on the x-axis

Each embedding component is ``coef * sin(wt*t + pt) * sin(wf*f + pf)``, so
partial derivatives of any order are phase shifts; everything below (metric,
Christoffel symbols and their derivatives) follows from the embedding jets.
Arrays are vectorized over arbitrary leading shapes.
"""
import numpy as np

HALF_PI = 0.5 * np.pi

# rows: component; cols: (uses_c, wt, pt, wf, pf)
EMBED_TABLE = np.array([
    [[0, 1, 0.0, 1, HALF_PI],
     [0, 1, 0.0, 1, 0.0],
     [1, 1, HALF_PI, 0, HALF_PI]],
    [[0, 1, HALF_PI, 0, HALF_PI],
     [0, 1, 0.0, 1, HALF_PI],
     [1, 1, 0.0, 1, 0.0]],
])


def embed_deriv(a, c, chart, t, f, m, k):
    """Partial derivative d^m/dt^m d^k/df^k of the embedding, shape (..., 3)."""
    t = np.asarray(t, dtype=float)
    f = np.asarray(f, dtype=float)
    out = np.empty(np.broadcast(t, f).shape + (3,))
    for comp in range(3):
        uses_c, wt, pt, wf, pf = EMBED_TABLE[chart, comp]
        coef = (c if uses_c else a) * wt ** m * wf ** k
        if coef == 0.0:
            out[..., comp] = 0.0
            continue
        out[..., comp] = (coef * np.sin(wt * t + pt + m * HALF_PI)
                          * np.sin(wf * f + pf + k * HALF_PI))
    return out


def embed(a, c, chart, t, f):
    return embed_deriv(a, c, chart, t, f, 0, 0)


def _multi(idx):
    m = sum(1 for i in idx if i == 0)
    return m, len(idx) - m


def jets(a, c, chart, t, f, order=3):
    """Dict mapping sorted coordinate-index tuples to embedding derivatives."""
    out = {}
    for n in range(order + 1):
        for m in range(n + 1):
            idx = (0,) * m + (1,) * (n - m)
            out[idx] = embed_deriv(a, c, chart, t, f, m, n - m)
    return out


def _X(J, *idx):
    return J[tuple(sorted(idx))]


def _dot(u, v):
    return np.sum(u * v, axis=-1)


def geometry(a, c, chart, t, f, order=1):
    """Metric data at chart points.

    Returns a dict with ``g``, ``ginv``, ``sqrt_det``, ``gamma`` (index order
    [k, i, j] for Gamma^k_ij) and, when ``order >= 2``, ``dg`` ([m, i, j] for
    d_m g_ij), ``dgamma`` ([m, k, i, j]) and ``ddg`` ([m, n, i, j]).
    """
    J = jets(a, c, chart, t, f, order=3 if order >= 2 else 2)
    shape = np.broadcast(np.asarray(t), np.asarray(f)).shape
    g = np.empty(shape + (2, 2))
    for i in range(2):
        for j in range(2):
            g[..., i, j] = _dot(_X(J, i), _X(J, j))
    det = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]
    ginv = np.empty_like(g)
    ginv[..., 0, 0] = g[..., 1, 1] / det
    ginv[..., 1, 1] = g[..., 0, 0] / det
    ginv[..., 0, 1] = -g[..., 0, 1] / det
    ginv[..., 1, 0] = -g[..., 1, 0] / det
    # first kind: gl[l, i, j] = X_ij . X_l
    gl = np.empty(shape + (2, 2, 2))
    for l in range(2):
        for i in range(2):
            for j in range(2):
                gl[..., l, i, j] = _dot(_X(J, i, j), _X(J, l))
    gamma = np.einsum("...kl,...lij->...kij", ginv, gl)
    out = {"g": g, "ginv": ginv, "det": det, "sqrt_det": np.sqrt(det),
           "gamma": gamma}
    if order < 2:
        return out

    dg = np.empty(shape + (2, 2, 2))
    dgl = np.empty(shape + (2, 2, 2, 2))
    ddg = np.empty(shape + (2, 2, 2, 2))
    for m in range(2):
        for i in range(2):
            for j in range(2):
                dg[..., m, i, j] = (_dot(_X(J, i, m), _X(J, j))
                                    + _dot(_X(J, i), _X(J, j, m)))
                for l in range(2):
                    dgl[..., m, l, i, j] = (_dot(_X(J, i, j, m), _X(J, l))
                                            + _dot(_X(J, i, j), _X(J, l, m)))
                for n in range(2):
                    ddg[..., m, n, i, j] = (
                        _dot(_X(J, i, m, n), _X(J, j))
                        + _dot(_X(J, i, m), _X(J, j, n))
                        + _dot(_X(J, i, n), _X(J, j, m))
                        + _dot(_X(J, i), _X(J, j, m, n)))
    dginv = -np.einsum("...ka,...mab,...bl->...mkl", ginv, dg, ginv)
    dgamma = (np.einsum("...mkl,...lij->...mkij", dginv, gl)
              + np.einsum("...kl,...mlij->...mkij", ginv, dgl))
    out.update(dg=dg, dgamma=dgamma, ddg=ddg, dginv=dginv)
    return out


def gaussian_curvature_embedded(a, c, xyz):
    """Gaussian curvature of the spheroid at embedded points."""
    x, y, z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
    s = x * x / a ** 4 + y * y / a ** 4 + z * z / c ** 4
    return 1.0 / (a ** 4 * c * c * s * s)


def to_chart(a, c, chart, xyz):
    """Invert the embedding of ``chart`` at embedded points."""
    x, y, z = xyz[..., 0] / a, xyz[..., 1] / a, xyz[..., 2] / c
    if chart == 0:
        t = np.arccos(np.clip(z, -1.0, 1.0))
        f = np.arctan2(y, x)
    else:
        t = np.arccos(np.clip(x, -1.0, 1.0))
        f = np.arctan2(z, y)
    return np.stack([t, f], axis=-1)


def tangent_to_chart(a, c, chart, coords, vec3):
    """Components in ``chart`` of an embedded tangent vector at ``coords``."""
    t, f = coords[..., 0], coords[..., 1]
    X0 = embed_deriv(a, c, chart, t, f, 1, 0)
    X1 = embed_deriv(a, c, chart, t, f, 0, 1)
    b0, b1 = _dot(X0, vec3), _dot(X1, vec3)
    g00, g01, g11 = _dot(X0, X0), _dot(X0, X1), _dot(X1, X1)
    det = g00 * g11 - g01 * g01
    return np.stack([(g11 * b0 - g01 * b1) / det,
                     (g00 * b1 - g01 * b0) / det], axis=-1)


def tangent_to_r3(a, c, chart, coords, vec):
    t, f = coords[..., 0], coords[..., 1]
    X0 = embed_deriv(a, c, chart, t, f, 1, 0)
    X1 = embed_deriv(a, c, chart, t, f, 0, 1)
    return X0 * vec[..., 0:1] + X1 * vec[..., 1:2]


def outward_normal(a, c, xyz):
    n = np.stack([xyz[..., 0] / a ** 2, xyz[..., 1] / a ** 2,
                  xyz[..., 2] / c ** 2], axis=-1)
    return n / np.linalg.norm(n, axis=-1, keepdims=True)
