"""Backend dispatch for the hot kernels (geodesic integration, fan inversion)."""
import numpy as np

from . import _accel
from . import _kernels_numpy

if _accel.USE_NUMBA:
    from . import _kernels_numba as _backend
    BACKEND = "numba"
else:
    _backend = _kernels_numpy
    BACKEND = "numpy"


def integrate(geo, charts0, states0, h, nsteps, stride=1, backend=None):
    """Integrate a batch of geodesic + Jacobi states with fixed-step RK4.

    Parameters
    ----------
    geo : array (4,)
        ``[kind, a, c, switch_cos]`` geometry descriptor of the model.
    charts0 : int array (B,)
    states0 : array (B, 8)
    h : array (B,)
        Step size per path (paths may have different lengths).
    nsteps, stride : int
        Number of steps; every ``stride``-th state is recorded.

    Returns
    -------
    states : array (B, nsteps // stride + 1, 8)
    charts : int array (B, nsteps // stride + 1)
    """
    if nsteps % stride:
        raise ValueError("nsteps must be a multiple of stride")
    geo = np.ascontiguousarray(geo, dtype=np.float64)
    charts0 = np.ascontiguousarray(np.atleast_1d(charts0), dtype=np.int64)
    states0 = np.ascontiguousarray(np.atleast_2d(states0), dtype=np.float64)
    h = np.ascontiguousarray(np.broadcast_to(h, (states0.shape[0],)), dtype=np.float64)
    impl = _impl(backend)
    return impl.integrate(geo, charts0, states0, h, int(nsteps), int(stride))


def _impl(backend):
    if backend is None:
        return _backend
    if backend == "numpy":
        return _kernels_numpy
    from . import _kernels_numba
    return _kernels_numba


def fan_newton(node, dalpha, dt, Lmax, Q, qidx, a0, t0, maxiter=40, tol=1e-12, backend=None):
    """Invert the fan interpolant: find (alpha, t) with E(alpha, t) = Q[qidx] per seed.

    Returns ``(alpha, t, residual)`` arrays, one entry per seed.
    """
    impl = _impl(backend)
    return impl.fan_newton(np.ascontiguousarray(node), float(dalpha), float(dt), float(Lmax),
                           np.ascontiguousarray(np.atleast_2d(Q), dtype=np.float64),
                           np.ascontiguousarray(qidx, dtype=np.int64),
                           np.ascontiguousarray(a0, dtype=np.float64),
                           np.ascontiguousarray(t0, dtype=np.float64), int(maxiter), float(tol))
