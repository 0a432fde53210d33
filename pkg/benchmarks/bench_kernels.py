"""Compare the numba and numpy backends of the hot kernels.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--dirs 256]

Reports the best wall time per backend, the speedup, and the largest
difference between the two results (they should agree to roundoff; for
fan_newton only converged seeds are compared).
"""
import argparse
import time

import numpy as np

from distgeo import kernels
from distgeo.manifolds import default_apex, ellipsoid, sphere, torus
from distgeo.shooting import FanField, initial_states


def best_of(fn, repeat):
    fn()                                   # warm-up (JIT compile, caches)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_integrate(model, n_dirs, length, step, repeat):
    p = default_apex(model)
    alphas = 2 * np.pi * np.arange(n_dirs) / n_dirs
    s0 = initial_states(model, p, alphas)
    n = int(round(length / step))
    charts = np.full(n_dirs, p.chart)
    rows = {}
    for backend in ("numba", "numpy"):
        rows[backend] = best_of(
            lambda: kernels.integrate(model.geo, charts, s0, step, n, 1, backend=backend), repeat)
    diff = float(np.max(np.abs(rows["numba"][1][0] - rows["numpy"][1][0])))
    return rows["numba"][0], rows["numpy"][0], diff, n_dirs * n


def bench_fan_newton(n_queries, repeat, seed=0):
    model = ellipsoid()
    p = default_apex(model)
    fan = FanField(model, p, np.pi * 2 * 1.05)
    rng = np.random.default_rng(seed)
    th = rng.uniform(0.3, np.pi - 0.3, n_queries)
    ph = rng.uniform(-np.pi, np.pi, n_queries)
    Q = np.array([model.embed(model.point((a, b), 0)) for a, b in zip(th, ph)])
    qi, a0, t0 = fan._seeds(Q)
    rows = {}
    for backend in ("numba", "numpy"):
        rows[backend] = best_of(
            lambda: kernels.fan_newton(fan.node, fan.dalpha, fan.dt, fan.Lmax, Q, qi, a0, t0,
                                       backend=backend), repeat)
    a_nb, t_nb, r_nb = rows["numba"][1]
    a_np, t_np, r_np = rows["numpy"][1]
    # seeds that do not converge (no branch nearby) may stop at different iterates
    ok = (r_nb < 1e-9) & (r_np < 1e-9)
    diff = float(max(np.max(np.abs(a_nb - a_np)[ok]), np.max(np.abs(t_nb - t_np)[ok])))
    return rows["numba"][0], rows["numpy"][0], diff, len(qi)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--dirs", type=int, default=256)
    ap.add_argument("--queries", type=int, default=2000)
    args = ap.parse_args(argv)

    cases = [
        ("integrate torus", lambda: bench_integrate(torus(), args.dirs, 1.0, 1e-3, args.repeat)),
        ("integrate sphere", lambda: bench_integrate(sphere(), args.dirs, np.pi, 1e-2,
                                                     args.repeat)),
        ("integrate ellipsoid", lambda: bench_integrate(ellipsoid(), args.dirs, 2 * np.pi, 1e-2,
                                                        args.repeat)),
        ("fan_newton ellipsoid", lambda: bench_fan_newton(args.queries, args.repeat)),
    ]
    print(f"{'kernel':<22} {'work':>9} {'numba [s]':>10} {'numpy [s]':>10} {'speedup':>8} "
          f"{'max diff':>10}")
    for name, fn in cases:
        t_nb, t_np, diff, work = fn()
        print(f"{name:<22} {work:>9d} {t_nb:>10.4f} {t_np:>10.4f} {t_np / t_nb:>8.1f} "
              f"{diff:>10.2e}")


if __name__ == "__main__":
    main()
