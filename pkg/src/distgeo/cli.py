"""Command-line harness: configs in, CSV/JSON reports and plot-ready series out.

    distgeo cutlocus --model torus --N 512 --out run1
    distgeo pairing --model cylinder --grid 512
    distgeo comparison --model sphere --seed 3
    distgeo weaksense --corpus default
    distgeo all --config experiment.json

Every experiment returns a list of named checks.  The exit status is 0 when
all of them pass, 1 when a check fails, 2 on a usage or config error and 3
when an engine raises.  Output files are a pure function of the config; the
only run-dependent values (timestamps, timings) live in the report header.
"""
import argparse
import csv
import json
import math
import os
import sys
import time
import zlib
from dataclasses import asdict, dataclass, field as dc_field
from datetime import datetime, timezone
from typing import Optional

import numpy as np

from . import __version__
from .errors import ConfigError, DistGeoError, UsageError

KINDS = ("cutlocus", "pairing", "comparison", "weaksense")
ALL_MODELS = ("torus", "cylinder", "sphere", "ellipsoid")
PAIRING_MODELS = ("torus", "cylinder", "sphere")
DEFAULT_N = {"torus": 512, "cylinder": 512, "sphere": 256, "ellipsoid": 256, "plane": 64}
CYLINDER_PAIRING_N = 8192
CYLINDER_WINDOWS = ((-0.35, 0.35), (math.pi - 0.35, math.pi + 0.35))
ELLIPSOID_GRID = 256
GEOM_TOL = 1e-6
JUMP_TOL = 1e-5
SATURATION_TOL = 1e-4
ORDER_MIN = 1.5
ROUNDOFF_FLOOR = 1e-10
RANK_ONE_TOL = 1e-3
COMPARISON_TOL = 1e-4
FIELD_SETS = ("canonical", "canonical5", "canonical3")
CORPORA = ("default",)
PLOT_KINDS = ("cutlocus-points", "jump-profile", "refinement", "conjugate-scan")


# ------------------------------------------------------------------- config

@dataclass
class ExperimentConfig:
    """One experiment run.  ``model`` is a list of model specs."""
    kind: str = "all"
    model: list = dc_field(default_factory=lambda: ["torus"])
    apex: Optional[dict] = None
    N: Optional[int] = None
    grid: int = 512
    tol: float = 1e-3
    seed: int = 0
    out: str = "distgeo-out"
    fields: str = "canonical"
    corpus: str = "default"
    bumps: int = 10
    workers: int = 1

    def to_dict(self):
        return asdict(self)


def _positive_int(v, path):
    if isinstance(v, bool) or not isinstance(v, int) or v <= 0:
        raise ConfigError(f"expected a positive integer, got {v!r}", path)
    return v


def _check_model(v, path):
    from .manifolds import get_model
    try:
        get_model(v)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid model spec {v!r} ({exc})", path) from None
    return v


def _check_models(v, path):
    items = v if isinstance(v, list) else [v]
    if not items:
        raise ConfigError("empty model list", path)
    return [_check_model(m, f"{path}[{k}]") for k, m in enumerate(items)]


def _check_apex(v, path):
    if v is None:
        return None
    if isinstance(v, list):
        v = {"coords": v}
    if not isinstance(v, dict) or set(v) - {"coords", "chart"} or "coords" not in v:
        raise ConfigError("apex must be [x, y] or {coords: [x, y], chart: 0|1}", path)
    c = v["coords"]
    if (not isinstance(c, list) or len(c) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in c)):
        raise ConfigError("apex coords must be two numbers", f"{path}.coords")
    chart = v.get("chart", 0)
    if chart not in (0, 1):
        raise ConfigError("chart must be 0 or 1", f"{path}.chart")
    return {"coords": [float(x) for x in c], "chart": chart}


def _check_tol(v, path):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0 or not math.isfinite(v):
        raise ConfigError(f"tolerance must be a positive number, got {v!r}", path)
    return float(v)


def _choice(options):
    def check(v, path):
        if v not in options:
            raise ConfigError(f"expected one of {list(options)}, got {v!r}", path)
        return v
    return check


def _check_seed(v, path):
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise ConfigError(f"seed must be a nonnegative integer, got {v!r}", path)
    return v


def _check_str(v, path):
    if not isinstance(v, str) or not v:
        raise ConfigError("expected a nonempty string", path)
    return v


SCHEMA = {
    "kind": _choice(KINDS + ("all",)),
    "model": _check_models,
    "apex": _check_apex,
    "N": lambda v, path: None if v is None else _positive_int(v, path),
    "grid": _positive_int,
    "tol": _check_tol,
    "seed": _check_seed,
    "out": _check_str,
    "fields": _choice(FIELD_SETS),
    "corpus": _choice(CORPORA),
    "bumps": _positive_int,
    "workers": _positive_int,
}


def load_config(doc=None, overrides=None):
    """Validate a config document, apply overrides (flags win) and fill defaults."""
    merged = {}
    for src, root in ((doc or {}, "config"), (overrides or {}, "flags")):
        if not isinstance(src, dict):
            raise ConfigError("config must be a JSON object", root)
        for key, val in src.items():
            if key not in SCHEMA:
                raise ConfigError(f"unknown key {key!r}; known: {sorted(SCHEMA)}", f"{root}.{key}")
            merged[key] = SCHEMA[key](val, f"{root}.{key}")
    if "model" not in merged and merged.get("kind", "all") == "all":
        merged["model"] = list(ALL_MODELS)
    return ExperimentConfig(**merged)


def read_config(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config ({exc.strerror})", path) from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} at line {exc.lineno}", path) from None


# ------------------------------------------------------------------ reports

@dataclass
class Check:
    name: str
    passed: bool
    value: object = None
    limit: object = None


@dataclass
class ExperimentResult:
    kind: str
    model: str
    checks: list = dc_field(default_factory=list)
    results: dict = dc_field(default_factory=dict)
    error: Optional[str] = None

    @property
    def passed(self):
        return self.error is None and all(c.passed for c in self.checks)

    def check(self, name, passed, value=None, limit=None):
        self.checks.append(Check(name, bool(passed), value, limit))

    def to_dict(self):
        return {"kind": self.kind, "model": self.model, "passed": self.passed,
                "error": self.error, "checks": [asdict(c) for c in self.checks],
                "results": self.results}


@dataclass
class RunReport:
    config: ExperimentConfig
    experiments: list = dc_field(default_factory=list)
    series: dict = dc_field(default_factory=dict)
    header: dict = dc_field(default_factory=dict)

    @property
    def passed(self):
        return all(e.passed for e in self.experiments)

    @property
    def errored(self):
        return any(e.error is not None for e in self.experiments)

    def add_series(self, kind, columns, rows):
        cols, old = self.series.get(kind, (columns, []))
        self.series[kind] = (cols, old + rows)

    def to_dict(self):
        return {"header": self.header, "config": self.config.to_dict(),
                "version": __version__, "passed": self.passed,
                "experiments": [e.to_dict() for e in self.experiments]}


def _clean(o):
    """JSON-safe copy: arrays to lists, non-finite floats to strings."""
    if isinstance(o, dict):
        return {str(k): _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    if isinstance(o, np.ndarray):
        return _clean(o.tolist())
    if isinstance(o, (np.floating, float)):
        x = float(o)
        return x if math.isfinite(x) else repr(x)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.bool_,)):
        return bool(o)
    return o


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return x


def write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(x) for x in r])


def emit_plot_data(report, kind, out_dir=None):
    """Write one plot series of ``report`` as a long-format CSV; returns its path.

    Kinds: cutlocus-points (model, v_angle, x, y, z, jump), jump-profile
    (y, jump, analytic), refinement (model, field, grid, residual, relative,
    order) and conjugate-scan (v_angle, c_v).
    """
    if kind not in PLOT_KINDS:
        raise UsageError(f"unknown plot kind {kind!r}; known: {list(PLOT_KINDS)}")
    if kind not in report.series:
        raise UsageError(f"report has no {kind!r} series (run the experiment that produces it)")
    out_dir = os.path.join(out_dir or report.config.out, "plots")
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{kind}.csv")
    columns, rows = report.series[kind]
    write_csv(path, columns, rows)
    return path


# -------------------------------------------------------------- experiments

def _apex(model, cfg):
    from .manifolds import ChartPoint, default_apex
    if cfg.apex is None:
        return default_apex(model)
    return model.best_chart(ChartPoint(np.array(cfg.apex["coords"]), cfg.apex["chart"]))


def _rng(cfg, *keys):
    """Generator for one (experiment, model) stream, independent of run order."""
    return np.random.default_rng([cfg.seed] + [zlib.crc32(k.encode()) for k in keys])


def _model_tag(spec):
    return spec if isinstance(spec, str) else json.dumps(spec, sort_keys=True)


def _cross_error(q):
    """Distance from q to {x = 1/2} u {y = 1/2} (mod 1)."""
    r = np.mod(q, 1.0)
    return float(min(abs(r[0] - 0.5), abs(r[1] - 0.5)))


def run_cutlocus(model, p, cfg, report, res):
    from .cutlocus import sample_at, sample_cutlocus, samples_to_csv
    from .manifolds import FlatModel
    N = cfg.N or DEFAULT_N.get(model.name, 256)
    samples = sample_cutlocus(model, p, N, workers=cfg.workers)
    tag = model.name
    samples_to_csv(samples, os.path.join(cfg.out, f"cutlocus_{tag}.csv"))
    classes = {}
    for s in samples:
        classes[s.record.cls] = classes.get(s.record.cls, 0) + 1
    jumps = [s.jump for s in samples if math.isfinite(s.jump)]
    res.results.update({"N": N, "samples": len(samples), "classes": classes,
                        "max_jump": max(jumps) if jumps else None})
    if jumps:
        res.check("0 < jump <= 2", 0 < min(jumps) and max(jumps) <= 2 + 1e-9, max(jumps), 2.0)
    if model.name in ("torus", "cylinder", "ellipsoid") and samples:
        two = sum(1 for s in samples if s.multiplicity == 2 and not s.flagged) / len(samples)
        res.check("fraction with exactly two minimal geodesics", two >= 0.99, two, 0.99)
    flat = isinstance(model, FlatModel)
    rows = []
    for s in samples:
        z = np.append(s.q.coords, 0.0) if flat else model.embed(s.q)
        rows.append([model.name, s.record.angle, z[0], z[1], z[2], s.jump])
    report.add_series("cutlocus-points", ["model", "v_angle", "x", "y", "z", "jump"], rows)

    if model.name == "torus":
        err = max(_cross_error(s.q.coords) for s in samples)
        res.check("cut points on the cross", err < GEOM_TOL, err, GEOM_TOL)
        oracle = 1.0 / math.sqrt(0.25 + 0.25 ** 2)
        j = sample_at(model, p, (0.5, 0.25)).jump
        res.check("jump at (0.5, 0.25)", abs(j - oracle) < JUMP_TOL, j, oracle)
        prof = []
        for s in samples:
            x, y = np.mod(s.q.coords, 1.0)
            if abs(x - 0.5) < GEOM_TOL and s.multiplicity == 2:
                y = (y + 0.5) % 1.0 - 0.5
                prof.append((y, s.jump, 1.0 / math.sqrt(0.25 + y * y)))
        prof.sort()
        report.add_series("jump-profile", ["y", "jump", "analytic"], [list(r) for r in prof])
        if prof:
            perr = max(abs(a - b) for _, a, b in prof)
            res.check("jump profile matches 1/sqrt(1/4 + y^2)", perr < JUMP_TOL, perr, JUMP_TOL)
    elif model.name == "cylinder":
        err = max(abs(abs(((s.q.coords[0] - p.coords[0]) + math.pi) % (2 * math.pi) - math.pi)
                      - math.pi) for s in samples)
        res.check("cut points on the antipodal line", err < GEOM_TOL, err, GEOM_TOL)
        z0 = sample_at(model, p, (p.coords[0] + math.pi, p.coords[1])).jump
        res.check("jump saturates at 2 opposite the apex", abs(z0 - 2) < SATURATION_TOL,
                  z0, 2.0)
    elif model.name == "sphere":
        sig = max(abs(s.record.sigma - math.pi) for s in samples)
        conj = max(abs(s.record.conj - math.pi) if s.record.conj is not None else math.inf
                   for s in samples)
        res.check("sigma_v = pi", sig < GEOM_TOL, sig, GEOM_TOL)
        res.check("c_v = pi", conj < GEOM_TOL, conj, GEOM_TOL)
        res.check("every cut point is Both", classes == {"Both": len(samples)}, classes)
        report.add_series("conjugate-scan", ["v_angle", "c_v"],
                          [[s.record.angle, s.record.conj] for s in samples])
    else:
        res.check("classified as Sing/Conj/Both", set(classes) <= {"Sing", "Conj", "Both"},
                  classes)
        late = max((s.record.sigma - s.record.conj for s in samples
                    if s.record.conj is not None), default=0.0)
        res.check("cut no later than conjugate", late < 1e-5, late, 1e-5)


def _pairing_samples(model, p, N, workers):
    from .cutlocus import sample_cutlocus
    if model.name == "sphere":
        return []       # the cut locus is a point: no H^1 mass
    if model.name == "cylinder":
        return sample_cutlocus(model, p, N or CYLINDER_PAIRING_N, workers=workers,
                               window=[list(w) for w in CYLINDER_WINDOWS])
    return sample_cutlocus(model, p, N or DEFAULT_N[model.name], workers=workers)


def _sphere_bumps():
    from .fields import scalar_bump
    per = (None, 2 * math.pi)
    return [scalar_bump((1.0, 0.5), 0.3, periods=per, label="sphere-bump-a"),
            scalar_bump((2.0, -1.0), 0.25, periods=per, label="sphere-bump-b"),
            scalar_bump((1.5, 2.5), 0.3, periods=per, label="sphere-bump-c")]


def _window(model):
    if model.name == "torus":
        return (0.5, 0.25), 0.2
    return (math.pi, 0.0), 0.2


def run_pairing(model, p, cfg, report, res):
    from . import measure
    from .fields import scalar_bump
    if model.name not in PAIRING_MODELS:
        raise ConfigError(f"pairing supports {list(PAIRING_MODELS)}, not {model.name}", "model")
    n = cfg.grid
    samples = _pairing_samples(model, p, cfg.N, cfg.workers)
    reports, rows = [], []
    if model.name == "sphere":
        for fld in _sphere_bumps():
            t0 = time.perf_counter()
            rep = measure.pairing_laplacian(model, p, fld, samples, n, cfg.tol, strict=False)
            reports.append((rep, time.perf_counter() - t0))
            res.check(f"{rep.field}: relative residual", rep.passed, rep.relative_residual, cfg.tol)
            res.check(f"{rep.field}: no singular part", rep.rhs_sing == 0.0, rep.rhs_sing, 0.0)
    else:
        expected = {"canonical5": "torus", "canonical3": "cylinder"}.get(cfg.fields)
        if expected not in (None, model.name):
            raise ConfigError(f"field set {cfg.fields} belongs to the {expected}", "fields")
        refine = []
        for fld in measure.suite_for(model):
            t0 = time.perf_counter()
            rep = measure.verify_hessian_decomposition(model, p, fld, samples, n, cfg.tol,
                                                       strict=False)
            reports.append((rep, time.perf_counter() - t0))
            res.check(f"{rep.field}: relative residual", rep.passed, rep.relative_residual, cfg.tol)
            grids = (n // 2, n)
            st = measure.refinement_study(model, p, fld, samples, grids)
            scale = max(abs(rep.lhs), abs(rep.rhs_ac), abs(rep.rhs_sing))
            rel = [abs(r) / scale for r in st["residuals"]]
            order = st["orders"][0]
            exact = rel[0] < ROUNDOFF_FLOOR
            res.check(f"{rep.field}: refinement order {grids[0]}->{grids[1]}",
                      exact or order >= ORDER_MIN, "roundoff" if exact else order, ORDER_MIN)
            for k, g in enumerate(grids):
                refine.append([model.name, rep.field, g, st["residuals"][k], rel[k],
                               order if k else math.nan])
        report.add_series("refinement", ["model", "field", "grid", "residual", "relative",
                                         "order"], refine)
        write_csv(os.path.join(cfg.out, f"refinement_{model.name}.csv"),
                  ["model", "field", "grid", "residual", "relative", "order"], refine)

        center, radius = _window(model)
        M, ratio = measure.measured_singular_tensor(model, p, center, radius, n)
        res.results["singular_tensor"] = {"center": list(center), "radius": radius,
                                          "M": M, "ratio": ratio}
        res.check("singular tensor is rank one", ratio < RANK_ONE_TOL, ratio, RANK_ONE_TOL)

        bump = scalar_bump(center, radius, periods=model.periods, label=f"{model.name}-bump")
        t0 = time.perf_counter()
        rep = measure.pairing_laplacian(model, p, bump, samples, n, cfg.tol, strict=False)
        reports.append((rep, time.perf_counter() - t0))
        res.check(f"{rep.field}: Laplacian relative residual", rep.passed,
                  rep.relative_residual, cfg.tol)
        lb = measure.verify_lower_bound(model, p, bump, samples, n, tol=cfg.tol)
        res.results["lower_bound"] = asdict(lb)
        res.check("lower bound slack matches int (2 - jump) phi", lb.passed,
                  abs(lb.slack - lb.slack_formula) / max(lb.cut_mass, 1e-300), cfg.tol)

    for rep, dt in reports:
        rows.append([rep.model, rep.field, rep.kind, rep.lhs, rep.rhs_ac, rep.rhs_sing,
                     rep.residual, rep.relative_residual, rep.grid])
        report.header.setdefault("field_timings", {})[f"{model.name}:{rep.field}"] = dt
    write_csv(os.path.join(cfg.out, f"pairing_{model.name}.csv"),
              ["model", "field", "kind", "lhs", "rhs_ac", "rhs_sing", "residual", "relative",
               "grid"], rows)
    res.results["reports"] = [r.to_dict() for r, _ in reports]
    res.results["cut_samples"] = len(samples)


def _crossing_bumps(model):
    from .fields import scalar_bump
    if model.name != "torus":
        return []
    per = model.periods
    return [scalar_bump((0.5, 0.25), 0.2, periods=per, label="torus-cut-crossing-a"),
            scalar_bump((0.3, 0.5), 0.15, periods=per, label="torus-cut-crossing-b")]


def run_comparison(model, p, cfg, report, res):
    from . import measure
    from .fields import random_bumps
    n = cfg.grid if model.has_closed_form else min(cfg.grid, ELLIPSOID_GRID)
    K = measure.comparison_curvature(model)
    bumps = random_bumps(model, p, cfg.bumps, _rng(cfg, "comparison", model.name))
    rows = []
    for fld in bumps + _crossing_bumps(model):
        r = measure.verify_comparison(model, p, fld, K, n, COMPARISON_TOL)
        c, rad = fld.support
        rows.append([model.name, r.field, c[0], c[1], rad, K, r.lhs, r.bound, r.margin, n])
        res.check(f"{r.field}: margin", r.passed, r.margin, -COMPARISON_TOL)
        if "crossing" in r.field:
            res.check(f"{r.field}: strictly positive margin", r.margin > COMPARISON_TOL,
                      r.margin, COMPARISON_TOL)
    write_csv(os.path.join(cfg.out, f"comparison_{model.name}.csv"),
              ["model", "field", "c0", "c1", "radius", "K", "lhs", "bound", "margin", "grid"],
              rows)
    res.results.update({"K": K, "grid": n, "margins": {r[1]: r[8] for r in rows}})


def run_weaksense(cfg, report, res):
    from . import weaksense
    rows = weaksense.implication_suite(strict=False)
    with open(os.path.join(cfg.out, "weaksense.json"), "w") as fh:
        fh.write(weaksense.verdicts_to_json(rows) + "\n")
    write_csv(os.path.join(cfg.out, "weaksense.csv"),
              ["row", "barrier", "viscosity", "distributional"],
              [[r.row, r.barrier, r.viscosity, r.distributional] for r in rows])
    H, F, I = weaksense.HOLDS, weaksense.FAILS, weaksense.INCONCLUSIVE
    for r in rows:
        res.check(f"{r.row}: barrier => viscosity", not (r.barrier == H and r.viscosity == F),
                  [r.barrier, r.viscosity])
        if I not in (r.viscosity, r.distributional):
            res.check(f"{r.row}: viscosity = distributional", r.viscosity == r.distributional,
                      [r.viscosity, r.distributional])
    x2 = next((r for r in rows if r.row == "x^2 sin(1/x)"), None)
    if x2 is not None:
        got = [x2.barrier, x2.viscosity, x2.distributional]
        res.check("x^2 sin(1/x) separates barrier from viscosity", got == [F, H, H], got,
                  [F, H, H])
    res.results["table"] = weaksense.summary_table(rows)
    res.results["verdicts"] = [[r.row, r.barrier, r.viscosity, r.distributional] for r in rows]


RUNNERS = {"cutlocus": run_cutlocus, "pairing": run_pairing, "comparison": run_comparison}


def _plan(cfg):
    """(kind, model spec) pairs to run; weaksense is model independent."""
    kinds = KINDS if cfg.kind == "all" else (cfg.kind,)
    plan = []
    for kind in kinds:
        if kind == "weaksense":
            plan.append((kind, None))
            continue
        for spec in cfg.model:
            name = spec if isinstance(spec, str) else spec.get("name", "")
            name = name.split("{")[0].strip()
            if cfg.kind == "all" and kind == "pairing" and name not in PAIRING_MODELS:
                continue
            plan.append((kind, spec))
    return plan


def run(cfg, log=None):
    """Execute ``cfg``; writes report.json, the experiment CSVs and the plot series."""
    from .manifolds import get_model
    log = log or (lambda msg: None)
    os.makedirs(cfg.out, exist_ok=True)
    report = RunReport(cfg)
    started = datetime.now(timezone.utc)
    t_run = time.perf_counter()
    timings = {}
    for kind, spec in _plan(cfg):
        tag = "-" if spec is None else _model_tag(spec)
        res = ExperimentResult(kind, tag)
        t0 = time.perf_counter()
        try:
            if kind == "weaksense":
                run_weaksense(cfg, report, res)
            else:
                model = get_model(spec)
                RUNNERS[kind](model, _apex(model, cfg), cfg, report, res)
        except ConfigError:
            raise
        except (DistGeoError, NotImplementedError) as exc:
            res.error = f"{kind} on {tag}: {type(exc).__name__}: {exc}"
        timings[f"{kind}:{tag}"] = time.perf_counter() - t0
        report.experiments.append(res)
        log(f"{kind:<10} {tag:<10} {'PASS' if res.passed else 'FAIL'}"
            f"  ({timings[f'{kind}:{tag}']:.1f} s)" + (f"  {res.error}" if res.error else ""))
    report.header.update({"started": started.isoformat(),
                          "finished": datetime.now(timezone.utc).isoformat(),
                          "wall_clock_s": time.perf_counter() - t_run, "timings": timings,
                          "version": __version__})
    with open(os.path.join(cfg.out, "report.json"), "w") as fh:
        json.dump(_clean(report.to_dict()), fh, indent=2, sort_keys=True)
        fh.write("\n")
    for kind in PLOT_KINDS:
        if kind in report.series:
            emit_plot_data(report, kind)
    return report


# ---------------------------------------------------------------------- CLI

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config document (flags override it)")
    common.add_argument("--model", action="append",
                        help="model spec, e.g. torus or 'ellipsoid{a:1,c:2}' (repeatable)")
    common.add_argument("--N", type=int, help="number of directions for cut sampling")
    common.add_argument("--grid", type=int, help="pairing grid size per axis")
    common.add_argument("--tol", type=float, help="relative residual tolerance")
    common.add_argument("--seed", type=int, help="seed for every stochastic choice")
    common.add_argument("--out", help="output directory")
    common.add_argument("--workers", type=int, help="threads for cut sampling")
    common.add_argument("--quiet", action="store_true")

    ap = argparse.ArgumentParser(prog="distgeo",
                                 description="Distance-function experiments on surfaces.")
    ap.add_argument("--version", action="version", version=f"distgeo {__version__}")
    sub = ap.add_subparsers(dest="kind", required=True)
    sub.add_parser("cutlocus", parents=[common], help="cut times, classes and cut samples")
    pp = sub.add_parser("pairing", parents=[common], help="Hessian/Laplacian pairings")
    pp.add_argument("--fields", choices=FIELD_SETS)
    sub.add_parser("comparison", parents=[common], help="model-space comparison on bumps")
    wp = sub.add_parser("weaksense", parents=[common], help="barrier/viscosity/distributional")
    wp.add_argument("--corpus", choices=CORPORA)
    al = sub.add_parser("all", parents=[common], help="every experiment")
    al.add_argument("--fields", choices=FIELD_SETS)
    al.add_argument("--corpus", choices=CORPORA)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    flags = {k: getattr(args, k) for k in ("N", "grid", "tol", "seed", "out", "workers",
                                            "fields", "corpus")
             if getattr(args, k, None) is not None}
    if args.model:
        flags["model"] = args.model
    flags["kind"] = args.kind
    log = (lambda msg: None) if args.quiet else (lambda msg: print(msg, flush=True))
    try:
        doc = read_config(args.config) if args.config else None
        cfg = load_config(doc, flags)
        report = run(cfg, log)
    except (ConfigError, UsageError) as exc:
        print(f"distgeo: error: {exc}", file=sys.stderr)
        return 2
    for e in report.experiments:
        if e.error:
            print(f"distgeo: {e.error}", file=sys.stderr)
        for c in e.checks:
            if not c.passed:
                log(f"  FAIL {e.kind}/{e.model}: {c.name} (value {c.value!r}, limit {c.limit!r})")
        if e.kind == "weaksense" and "table" in e.results:
            log(e.results["table"])
    log(f"{'PASS' if report.passed else 'FAIL'}: report written to "
        f"{os.path.join(cfg.out, 'report.json')}")
    if report.errored:
        return 3
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
