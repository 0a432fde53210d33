"""Charted two-dimensional model manifolds.

Shipped models: the flat plane, the flat square torus R^2/Z^2, the flat
cylinder S^1 x R, the unit round sphere and the ellipsoid of revolution
(a = b = 1, c = 2).  Flat models use a single global chart; the spheroids
use two rotated spherical charts (see :mod:`distgeo._spheroid`).
"""
import json
import re
from typing import NamedTuple

import numpy as np

from . import _spheroid
from .errors import DegeneracyError, DomainError

TWO_PI = 2.0 * np.pi
POLE_BAND = 1e-3           # christoffel_at refuses points closer than this to a chart pole
SWITCH_COS = 0.8           # integrator leaves a chart once |cos(theta)| exceeds this


class ChartPoint(NamedTuple):
    coords: np.ndarray
    chart: int = 0


class TangentVec(NamedTuple):
    base: ChartPoint
    components: np.ndarray


def as_point(p) -> ChartPoint:
    if isinstance(p, ChartPoint):
        return ChartPoint(np.asarray(p.coords, dtype=float), int(p.chart))
    return ChartPoint(np.asarray(p, dtype=float), 0)


class ManifoldModel:
    """Common interface; subclasses supply the chart geometry."""

    name = "model"
    dim = 2
    compact = True
    curvature_kind = "constant"

    def __init__(self, **params):
        self.params = params

    # -- chart bookkeeping -------------------------------------------------
    periods = (None, None)
    bounds = ((-np.inf, np.inf), (-np.inf, np.inf))

    def reduce(self, coords):
        x = np.array(coords, dtype=float, copy=True)
        for k, per in enumerate(self.periods):
            if per is not None:
                lo = self.bounds[k][0]
                x[..., k] = lo + np.mod(x[..., k] - lo, per)
        return x

    def point(self, coords, chart=0) -> ChartPoint:
        x = self.reduce(coords)
        for k, (lo, hi) in enumerate(self.bounds):
            if self.periods[k] is None and not (lo - 1e-12 <= x[k] <= hi + 1e-12):
                raise DomainError(f"{self.name}: coordinate {k}={x[k]} outside [{lo}, {hi}]")
        return ChartPoint(x, chart)

    def to_dict(self):
        return {"name": self.name, "params": dict(self.params)}

    def __repr__(self):
        args = ",".join(f"{k}:{v:g}" for k, v in self.params.items())
        return f"{self.name}{{{args}}}" if args else self.name

    # -- metric ------------------------------------------------------------
    def metric_at(self, x):
        return self.grid_geometry(as_point(x).chart, *self._split(x))["g"]

    def volume_density(self, x):
        return float(self.grid_geometry(as_point(x).chart, *self._split(x))["sqrt_det"])

    def inner(self, x, u, v):
        return float(np.asarray(u) @ self.metric_at(x) @ np.asarray(v))

    def norm(self, x, v):
        return float(np.sqrt(self.inner(x, v, v)))

    def _split(self, x):
        p = as_point(x)
        self._check_domain(p)
        return p.coords[0], p.coords[1]

    def _check_domain(self, p):
        for k, (lo, hi) in enumerate(self.bounds):
            if self.periods[k] is None and not (lo - 1e-12 <= p.coords[k] <= hi + 1e-12):
                raise DomainError(f"{self.name}: point {p.coords} outside chart domain")

    def unit_frame(self, p):
        """g-orthonormal frame at ``p`` (first vector along the first axis)."""
        g = self.metric_at(p)
        e1 = np.array([1.0, 0.0]) / np.sqrt(g[0, 0])
        w = np.array([0.0, 1.0])
        w = w - (e1 @ g @ w) * e1
        e2 = w / np.sqrt(w @ g @ w)
        return e1, e2

    def unit_vector(self, p, angle):
        e1, e2 = self.unit_frame(p)
        return np.cos(angle) * e1 + np.sin(angle) * e2

    def direction_angle(self, p, v):
        g = self.metric_at(p)
        e1, e2 = self.unit_frame(p)
        return float(np.arctan2(e2 @ g @ v, e1 @ g @ v))


class FlatModel(ManifoldModel):
    """Quotient of the Euclidean plane by a lattice of coordinate shifts."""

    curvature_kind = "constant"
    geo = np.array([0.0, 0.0, 0.0, SWITCH_COS])
    has_closed_form = True

    def __init__(self, name, periods, compact):
        super().__init__()
        self.name = name
        self.periods = tuple(periods)
        self.compact = compact
        self.bounds = tuple((0.0 if per is not None else -np.inf,
                             per if per is not None else np.inf) for per in periods)

    def shifts(self):
        axes = [[0.0] if per is None else [-per, 0.0, per] for per in self.periods]
        return np.array([(s0, s1) for s0 in axes[0] for s1 in axes[1]])

    def grid_geometry(self, chart, t, f, order=1):
        shape = np.broadcast(np.asarray(t), np.asarray(f)).shape
        g = np.zeros(shape + (2, 2))
        g[..., 0, 0] = g[..., 1, 1] = 1.0
        out = {"g": g, "ginv": g.copy(), "det": np.ones(shape),
               "sqrt_det": np.ones(shape), "gamma": np.zeros(shape + (2, 2, 2))}
        if order >= 2:
            out.update(dg=np.zeros(shape + (2, 2, 2)),
                       dgamma=np.zeros(shape + (2, 2, 2, 2)),
                       ddg=np.zeros(shape + (2, 2, 2, 2)),
                       dginv=np.zeros(shape + (2, 2, 2)))
        return out

    def christoffel_at(self, x):
        self._check_domain(as_point(x))
        return np.zeros((2, 2, 2))

    def gaussian_curvature(self, x):
        return np.zeros(np.shape(as_point(x).coords)[:-1])

    def curvature_bounds(self, region=None):
        return (0.0, 0.0)

    def displacements(self, p, X):
        """Lifted displacements ``X - p + shift`` for every lattice shift, shape (S, ..., 2)."""
        p = as_point(p)
        d = self.reduce(np.asarray(X, dtype=float)) - self.reduce(p.coords)
        return d[None, ...] + self.shifts().reshape((-1,) + (1,) * (d.ndim - 1) + (2,))

    def closed_form_distance(self, p, q):
        q = as_point(q)
        d = self.displacements(p, q.coords)
        return float(np.min(np.linalg.norm(d, axis=-1)))

    def distance_array(self, p, X):
        return np.min(np.linalg.norm(self.displacements(p, X), axis=-1), axis=0)

    def embed(self, x):
        return self.reduce(as_point(x).coords)

    def chart_distance(self, p, q):
        return self.closed_form_distance(p, q)

    def to_chart(self, p, chart):
        return as_point(p)

    def tangent_to_chart(self, p, vec, chart):
        return np.asarray(vec, dtype=float)

    def exp_closed(self, p, v, t):
        p = as_point(p)
        return ChartPoint(self.reduce(p.coords + np.multiply.outer(t, v)), 0)


class SpheroidModel(ManifoldModel):
    """Ellipsoid of revolution x^2/a^2 + y^2/a^2 + z^2/c^2 = 1 in two charts."""

    periods = (None, TWO_PI)
    bounds = ((0.0, np.pi), (-np.pi, np.pi))

    def __init__(self, name="ellipsoid", a=1.0, c=2.0):
        super().__init__(a=float(a), b=float(a), c=float(c))
        self.name = name
        self.a, self.c = float(a), float(c)
        self.geo = np.array([1.0, self.a, self.c, SWITCH_COS])
        # a spheroid with a == c built as "ellipsoid" deliberately keeps the
        # numeric distance path so it can be checked against the sphere
        self.has_closed_form = name == "sphere"
        self.curvature_kind = "constant" if self.a == self.c else "sampled"
        if name == "sphere":
            self.params = {}

    def grid_geometry(self, chart, t, f, order=1):
        return _spheroid.geometry(self.a, self.c, chart, t, f, order=order)

    def christoffel_at(self, x):
        p = as_point(x)
        self._check_domain(p)
        if not (POLE_BAND <= p.coords[0] <= np.pi - POLE_BAND):
            raise DegeneracyError(f"{self.name}: theta={p.coords[0]} inside the pole band")
        return self.grid_geometry(p.chart, p.coords[0], p.coords[1])["gamma"]

    def embed(self, x):
        p = as_point(x)
        return _spheroid.embed(self.a, self.c, p.chart, p.coords[..., 0], p.coords[..., 1])

    def embed_array(self, chart, X):
        X = np.asarray(X, dtype=float)
        return _spheroid.embed(self.a, self.c, chart, X[..., 0], X[..., 1])

    def gaussian_curvature(self, x):
        return _spheroid.gaussian_curvature_embedded(self.a, self.c, self.embed(x))

    def curvature_bounds(self, region=None, n=200):
        """Gaussian-curvature bracket; sampled on an n x n grid unless constant."""
        if self.a == self.c:
            k = 1.0 / self.a ** 2
            return (k, k)
        if region is None:
            region = ((0.0, np.pi), (-np.pi, np.pi))
        (t0, t1), (f0, f1) = region
        T, F = np.meshgrid(np.linspace(t0, t1, n), np.linspace(f0, f1, n), indexing="ij")
        K = _spheroid.gaussian_curvature_embedded(
            self.a, self.c, _spheroid.embed(self.a, self.c, 0, T, F))
        lo, hi = float(K.min()), float(K.max())
        return (lo - 0.01 * abs(lo), hi + 0.01 * abs(hi))

    def to_chart(self, p, chart):
        p = as_point(p)
        if p.chart == chart:
            return p
        E = self.embed(p)
        return ChartPoint(_spheroid.to_chart(self.a, self.c, chart, E), chart)

    def tangent_to_chart(self, p, vec, chart):
        p = as_point(p)
        if p.chart == chart:
            return np.asarray(vec, dtype=float)
        V = _spheroid.tangent_to_r3(self.a, self.c, p.chart, p.coords, np.asarray(vec, float))
        q = self.to_chart(p, chart)
        return _spheroid.tangent_to_chart(self.a, self.c, chart, q.coords, V)

    def tangent_r3(self, p, vec):
        p = as_point(p)
        return _spheroid.tangent_to_r3(self.a, self.c, p.chart, p.coords, np.asarray(vec, float))

    def best_chart(self, p):
        """Re-express ``p`` in the chart where it is farthest from a pole."""
        p = as_point(p)
        other = self.to_chart(p, 1 - p.chart)
        if abs(np.cos(other.coords[0])) < abs(np.cos(p.coords[0])):
            return other
        return p

    def closed_form_distance(self, p, q):
        if not self.has_closed_form:
            raise NotImplementedError(f"{self!r} has no closed-form distance")
        P, Q = self.embed(p), self.embed(q)
        # atan2 keeps full precision near p and near the antipode
        return float(self.a * np.arctan2(np.linalg.norm(np.cross(P, Q)), P @ Q))

    def distance_array(self, p, X, chart=0):
        if not self.has_closed_form:
            raise NotImplementedError(f"{self!r} has no closed-form distance")
        P = self.embed(p)
        E = self.embed_array(chart, X)
        return self.a * np.arctan2(np.linalg.norm(np.cross(E, P), axis=-1), E @ P)

    def chart_distance(self, p, q):
        p, q = as_point(p), as_point(q)
        q = self.to_chart(q, p.chart)
        d = q.coords - p.coords
        d[1] = (d[1] + np.pi) % TWO_PI - np.pi
        return float(np.linalg.norm(d))

    def exp_closed(self, p, v, t):
        """Great-circle exponential map, returned in embedded coordinates."""
        if not self.has_closed_form:
            raise NotImplementedError
        P = self.embed(p) / self.a
        V = self.tangent_r3(p, v)
        t = np.asarray(t, dtype=float)[..., None] / self.a
        return self.a * (np.cos(t) * P + np.sin(t) * V / np.linalg.norm(V))


def plane():
    return FlatModel("plane", (None, None), compact=False)


def torus():
    return FlatModel("torus", (1.0, 1.0), compact=True)


def cylinder():
    return FlatModel("cylinder", (TWO_PI, None), compact=False)


def sphere():
    return SpheroidModel("sphere", a=1.0, c=1.0)


def ellipsoid(a=1.0, b=None, c=2.0):
    if b is not None and float(b) != float(a):
        raise DomainError("only ellipsoids of revolution (a == b) are supported")
    return SpheroidModel("ellipsoid", a=a, c=c)


REGISTRY = {"plane": plane, "torus": torus, "cylinder": cylinder,
            "sphere": sphere, "ellipsoid": ellipsoid}

_SPEC_RE = re.compile(r"^\s*([a-z_]+)\s*(?:\{(.*)\})?\s*$")


def get_model(spec, **params) -> ManifoldModel:
    """Build a model from ``"ellipsoid{a:1,b:1,c:2}"``-style specs or a name plus params."""
    if isinstance(spec, dict):
        return get_model(spec["name"], **spec.get("params", {}))
    m = _SPEC_RE.match(spec)
    if not m or m.group(1) not in REGISTRY:
        raise KeyError(f"unknown model spec {spec!r}; known: {sorted(REGISTRY)}")
    name, body = m.groups()
    if body:
        for item in body.split(","):
            k, v = item.split(":")
            params.setdefault(k.strip(), float(v))
    if name == "sphere":
        params.pop("a", None), params.pop("b", None), params.pop("c", None)
    return REGISTRY[name](**params) if params else REGISTRY[name]()


def model_to_json(model):
    return json.dumps(model.to_dict())


def model_from_json(text):
    return get_model(json.loads(text))


def default_apex(model) -> ChartPoint:
    """Apex used by the shipped experiments."""
    if model.name == "sphere":
        return ChartPoint(np.array([np.pi / 2, np.pi / 2]), 1)   # north pole
    if isinstance(model, SpheroidModel):
        return ChartPoint(np.array([np.pi / 2, 0.0]), 0)         # on the equator
    return ChartPoint(np.zeros(2), 0)
