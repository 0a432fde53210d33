"""Compactly supported test functions and vector fields with exact derivatives.

Everything lives in one chart.  A profile returns ``(value, grad, hess)``
with the derivative axes last: shapes ``(...)``, ``(..., 2)``, ``(..., 2, 2)``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .manifolds import as_point


def bump_1d(s):
    """exp(1/(s^2 - 1)) on |s| < 1, zero outside, with its first two derivatives."""
    s = np.asarray(s, dtype=float)
    w = s * s
    inside = w < 1.0
    wm = np.where(inside, w - 1.0, -1.0)
    b = np.where(inside, np.exp(1.0 / wm), 0.0)
    bw = -b / wm ** 2
    bww = b * (2 * w - 1) / wm ** 4
    return b, 2 * s * bw, 2 * bw + 4 * w * bww


class Profile:
    """Scalar profile; subclasses implement :meth:`evaluate`."""

    nonnegative = True

    def evaluate(self, X):
        raise NotImplementedError

    def __mul__(self, other):
        return Product(self, other)

    def __add__(self, other):
        return Sum(self, other)

    def scaled(self, k):
        return Scaled(self, k)


class Bump(Profile):
    """amplitude * exp(1/(s^2 - 1)) with s = |x - center| / radius (chart norm).

    Periodic axes measure the displacement to the nearest copy of ``center``.
    """

    def __init__(self, center, radius, amplitude=1.0, periods=(None, None)):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.amplitude = float(amplitude)
        self.periods = tuple(periods)
        self.nonnegative = self.amplitude >= 0

    def displacement(self, X):
        d = np.asarray(X, dtype=float) - self.center
        for k, per in enumerate(self.periods):
            if per is not None:
                d[..., k] = (d[..., k] + 0.5 * per) % per - 0.5 * per
        return d

    def evaluate(self, X):
        y = self.displacement(X)
        r2 = self.radius ** 2
        w = np.einsum("...i,...i->...", y, y) / r2
        inside = w < 1.0
        wm = np.where(inside, w - 1.0, -1.0)
        b = np.where(inside, np.exp(1.0 / wm), 0.0)
        bw = -b / wm ** 2
        bww = b * (2 * w - 1) / wm ** 4
        dw = 2 * y / r2
        grad = bw[..., None] * dw
        hess = (bww[..., None, None] * dw[..., :, None] * dw[..., None, :]
                + bw[..., None, None] * (2 / r2) * np.eye(2))
        a = self.amplitude
        return a * b, a * grad, a * hess

    def __repr__(self):
        return f"Bump(center={self.center.tolist()}, radius={self.radius:g})"


class Product(Profile):
    def __init__(self, f, g):
        self.f, self.g = f, g
        self.nonnegative = (f is g) or (f.nonnegative and g.nonnegative)

    def evaluate(self, X):
        a, da, Ha = self.f.evaluate(X)
        b, db, Hb = self.g.evaluate(X)
        outer = da[..., :, None] * db[..., None, :]
        return (a * b, a[..., None] * db + b[..., None] * da,
                a[..., None, None] * Hb + b[..., None, None] * Ha + outer
                + np.swapaxes(outer, -1, -2))


class Sum(Profile):
    def __init__(self, f, g):
        self.f, self.g = f, g
        self.nonnegative = f.nonnegative and g.nonnegative

    def evaluate(self, X):
        a = self.f.evaluate(X)
        b = self.g.evaluate(X)
        return tuple(x + y for x, y in zip(a, b))


class Scaled(Profile):
    def __init__(self, f, k):
        self.f, self.k = f, float(k)
        self.nonnegative = f.nonnegative and self.k >= 0

    def evaluate(self, X):
        return tuple(self.k * x for x in self.f.evaluate(X))


class Wave(Profile):
    """sin(k . (x - x0)): a smooth sign-changing factor."""

    nonnegative = False

    def __init__(self, k, x0=(0.0, 0.0)):
        self.k = np.asarray(k, dtype=float)
        self.x0 = np.asarray(x0, dtype=float)

    def evaluate(self, X):
        ph = (np.asarray(X, dtype=float) - self.x0) @ self.k
        s, c = np.sin(ph), np.cos(ph)
        return s, c[..., None] * self.k, -s[..., None, None] * np.outer(self.k, self.k)


def _root_bump(profile):
    """The first Bump inside a profile expression (it fixes the support)."""
    if isinstance(profile, Bump):
        return profile
    for name in ("f", "g"):
        sub = getattr(profile, name, None)
        if sub is not None:
            b = _root_bump(sub)
            if b is not None:
                return b
    return None


@dataclass
class TestScalarField:
    """phi = profile, supported in the chart disc of the profile's bump."""
    __test__ = False
    profile: Profile
    chart: int = 0
    label: str = ""

    @property
    def support(self):
        b = _root_bump(self.profile)
        return b.center, b.radius

    def evaluate(self, X):
        return self.profile.evaluate(X)


class TestVectorField:
    """V = profile * u(x) with u constant or rotating at a fixed rate.

    ``rate`` is a covector w: the direction angle is angle0 + w . (x - center),
    so u has closed-form derivatives as well.
    """
    __test__ = False

    def __init__(self, profile, direction=(1.0, 0.0), chart=0, rate=None, label=""):
        self.profile = profile
        self.chart = chart
        self.label = label
        u = np.asarray(direction, dtype=float)
        self.angle0 = math.atan2(u[1], u[0])
        self.scale = float(np.linalg.norm(u))
        self.rate = None if rate is None else np.asarray(rate, dtype=float)

    @property
    def support(self):
        b = _root_bump(self.profile)
        return b.center, b.radius

    @property
    def norm_is_c1(self):
        """|V| is C^1 when the profile keeps one sign (|profile| = +-profile)."""
        return bool(self.profile.nonnegative)

    def _direction(self, X):
        X = np.asarray(X, dtype=float)
        shape = X.shape[:-1]
        if self.rate is None:
            u = self.scale * np.array([math.cos(self.angle0), math.sin(self.angle0)])
            return (np.broadcast_to(u, shape + (2,)), np.zeros(shape + (2, 2)),
                    np.zeros(shape + (2, 2, 2)))
        c, _ = self.support
        d = X - c
        th = self.angle0 + d @ self.rate
        e = np.stack([np.cos(th), np.sin(th)], axis=-1) * self.scale
        de = np.stack([-np.sin(th), np.cos(th)], axis=-1) * self.scale
        w = self.rate
        du = de[..., :, None] * w                          # [i, k] = d_k u^i
        ddu = -e[..., :, None, None] * np.outer(w, w)      # [i, k, l]
        return e, du, ddu

    def evaluate(self, X):
        """V^i, d_k V^i and d_k d_l V^i."""
        b, db, Hb = self.profile.evaluate(X)
        u, du, ddu = self._direction(X)
        V = b[..., None] * u
        dV = u[..., :, None] * db[..., None, :] + b[..., None, None] * du
        ddV = (u[..., :, None, None] * Hb[..., None, :, :]
               + du[..., :, :, None] * db[..., None, None, :]
               + du[..., :, None, :] * db[..., None, :, None]
               + b[..., None, None, None] * ddu)
        return V, dV, ddV

    def tensor(self, X):
        """T^{ij} = V^i V^j with first and second partial derivatives."""
        V, dV, ddV = self.evaluate(X)
        T = V[..., :, None] * V[..., None, :]
        dT = dV[..., :, None, :] * V[..., None, :, None] + V[..., :, None, None] * dV[..., None, :, :]
        ddT = (ddV[..., :, None, :, :] * V[..., None, :, None, None]
               + dV[..., :, None, :, None] * dV[..., None, :, None, :]
               + dV[..., :, None, None, :] * dV[..., None, :, :, None]
               + V[..., :, None, None, None] * ddV[..., None, :, :, :])
        return T, dT, ddT

    def negated(self):
        out = TestVectorField(self.profile.scaled(-1.0), chart=self.chart, label=self.label + "-")
        out.angle0, out.scale, out.rate = self.angle0, self.scale, self.rate
        return out

    def __repr__(self):
        return f"TestVectorField({self.label or _root_bump(self.profile)!r})"


def vector_bump(center, radius, direction, periods=(None, None), chart=0, label=""):
    return TestVectorField(Bump(center, radius, periods=periods), direction, chart, label=label)


def scalar_bump(center, radius, amplitude=1.0, periods=(None, None), chart=0, label=""):
    return TestScalarField(Bump(center, radius, amplitude, periods), chart, label)


def random_bumps(model, p, n, rng, radius=(0.1, 0.3), excl=0.05, theta_margin=0.3,
                 max_tries=10000):
    """``n`` seeded scalar bumps whose supports avoid p by ``excl``.

    Flat models draw centers in the chart box; spheroids in chart 0 away from
    its poles (support kept inside theta in [theta_margin, pi - theta_margin]).
    """
    from .cutlocus import distances_to
    from .manifolds import SpheroidModel
    p = as_point(p)
    out = []
    for _ in range(max_tries):
        if len(out) == n:
            break
        r = rng.uniform(*radius)
        if isinstance(model, SpheroidModel):
            c = np.array([rng.uniform(theta_margin + r, np.pi - theta_margin - r),
                          rng.uniform(-np.pi, np.pi)])
            # supports are chart discs: keep every support point away from p
            ring = c + r * np.stack([np.cos(np.linspace(0, 2 * np.pi, 64)),
                                     np.sin(np.linspace(0, 2 * np.pi, 64))], -1)
            if min(distances_to(model, p, ring, 0).min(),
                   distances_to(model, p, c[None], 0)[0] - r) < excl:
                continue
            periods = (None, 2 * np.pi)
        else:
            lo = [b[0] if np.isfinite(b[0]) else -3.0 for b in model.bounds]
            hi = [b[1] if np.isfinite(b[1]) else 3.0 for b in model.bounds]
            c = np.array([rng.uniform(lo[0], hi[0]), rng.uniform(lo[1], hi[1])])
            if distances_to(model, p, c[None])[0] < r + excl:
                continue
            periods = model.periods
        out.append(scalar_bump(c, r, periods=periods, label=f"random{len(out)}"))
    if len(out) < n:
        raise RuntimeError("could not place the requested random bumps")
    return out
