"""Config-driven runner: ``vortexkg run|validate|list-scenarios``.

A config is a YAML mapping::

    schema_version: 1
    scenario: field-run
    name: wave-helix          # run directory under --out (default: scenario)
    params: {c: 1.0, nu: 0.5, zeta: 1.0, gamma: 1.0}
    grid: {n: 64, L: 6.283185307179586}
    time: {dt: 0.01, steps: 100, cadence: 10}
    backend: spectral         # or fd
    options: {...}            # scenario specific, see SCENARIOS

Each run writes ``series/*.csv``, ``report.json`` and finally ``manifest.json``.
"""

import argparse
from dataclasses import dataclass, field
import hashlib
import json
import math
import os
import shutil
import sys
import time

import numpy as np
import yaml

from . import __version__
from . import analysis as an
from . import fields as fl
from . import filament as fm
from . import induction as ind
from .model import (Closure, HelixSpec, PhysicalParams, check_commensurate, derive_params,
                    helix_field_snapshot, mass_coefficient_ledger)

SCHEMA_VERSION = 1
FMT = "{:.17g}"


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    scenario: str
    name: str
    params: PhysicalParams
    n: int
    L: float
    dt: object
    steps: int
    cadence: int
    backend: str
    options: dict
    raw: dict = field(repr=False, default_factory=dict)


# ---------------------------------------------------------------- output


def _fmt(v):
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, str):
        return v
    return FMT.format(float(v))


def write_table(path, header, rows):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def emit_series(history, path):
    """Write a field or curve history as CSV, one row per (time, node)."""
    if not history:
        raise ValueError("cannot emit an empty history")
    first = history[0]
    rows = []
    if isinstance(first, fm.Curve3D):
        header = ["t", "j", "x", "y", "z"]
        for c in history:
            t = c.t
            rows.extend((t, j, *c.nodes[j]) for j in range(c.n))
    else:
        header = ["t", "j", "x", "re", "im"]
        for s in history:
            f = s.phi if isinstance(s, fl.FieldState) else s
            x = f.grid.x
            t = f.t
            rows.extend((t, j, x[j], f.values[j].real, f.values[j].imag) for j in range(f.grid.n))
    return write_table(path, header, rows)


class RunWriter:
    def __init__(self, run_dir):
        self.run_dir = run_dir
        self.files = []
        os.makedirs(os.path.join(run_dir, "series"), exist_ok=True)

    def _rel(self, rel):
        self.files.append(rel)
        return os.path.join(self.run_dir, rel)

    def table(self, name, header, rows):
        return write_table(self._rel(f"series/{name}.csv"), header, rows)

    def history(self, name, history):
        return emit_series(history, self._rel(f"series/{name}.csv"))

    def report(self, data):
        path = self._rel("report.json")
        with open(path, "w") as fh:
            json.dump(_jsonable(data), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


# ---------------------------------------------------------------- validation


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


def _number(d, key, default=None, positive=False, nonneg=False):
    v = d.get(key, default)
    _require(v is not None, f"missing required field {key!r}")
    _require(isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v),
             f"{key!r} must be a finite number, got {v!r}")
    _require(not positive or v > 0, f"{key!r} must be positive, got {v!r}")
    _require(not nonneg or v >= 0, f"{key!r} must be non-negative, got {v!r}")
    return float(v)


def _integer(d, key, default=None, minimum=1):
    v = d.get(key, default)
    _require(isinstance(v, int) and not isinstance(v, bool), f"{key!r} must be an integer, got {v!r}")
    _require(v >= minimum, f"{key!r} must be >= {minimum}, got {v}")
    return v


def _number_list(d, key, default=None):
    v = d.get(key, default)
    _require(isinstance(v, list) and v, f"{key!r} must be a non-empty list")
    return [_number({key: x}, key) for x in v]


EQUATIONS = ("wave", "schrodinger", "klein-gordon")


def _equation(cfg, opts):
    name = opts.get("equation", "wave")
    _require(name in EQUATIONS, f"equation must be one of {EQUATIONS}, got {name!r}")
    p = cfg.params
    if name == "wave":
        return fl.Wave(p.c)
    if name == "schrodinger":
        return fl.Schrodinger(p.nu)
    mu = opts.get("mu", "derived")
    mu = derive_params(p).mu if mu == "derived" else _number(opts, "mu", nonneg=True)
    return fl.KleinGordon(p.c, mu)


def parse_config(raw):
    """Check the common sections and return a ScenarioConfig (no files touched)."""
    _require(isinstance(raw, dict), "config must be a mapping")
    _require(raw.get("schema_version") == SCHEMA_VERSION,
             f"schema_version must be {SCHEMA_VERSION}, got {raw.get('schema_version')!r}")
    scenario = raw.get("scenario")
    _require(scenario in SCENARIOS, f"unknown scenario {scenario!r}; see list-scenarios")
    name = raw.get("name", scenario)
    _require(isinstance(name, str) and name and os.path.basename(name) == name and name not in (".", ".."),
             f"name must be a plain directory name, got {name!r}")
    try:
        params = PhysicalParams(**(raw.get("params") or {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"params: {exc}") from None
    grid = raw.get("grid") or {}
    n = _integer(grid, "n", 64, minimum=8)
    _require(n % 2 == 0, f"grid n must be even, got {n}")
    L = _number(grid, "L", 2 * math.pi, positive=True)
    tm = raw.get("time") or {}
    dt = tm.get("dt", "auto")
    if dt != "auto":
        dt = _number(tm, "dt", positive=True)
    steps = _integer(tm, "steps", 100)
    cadence = _integer(tm, "cadence", 1)
    backend = raw.get("backend", "spectral")
    _require(backend in ("spectral", "fd"), f"backend must be 'spectral' or 'fd', got {backend!r}")
    options = raw.get("options") or {}
    _require(isinstance(options, dict), "options must be a mapping")
    return ScenarioConfig(scenario, name, params, n, L, dt, steps, cadence, backend, options, raw)


def validate(raw):
    """Full fail-fast validation; returns (config, runner)."""
    cfg = parse_config(raw)
    try:
        runner = SCENARIOS[cfg.scenario][0](cfg)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{cfg.scenario}: {exc}") from None
    return cfg, runner


# ---------------------------------------------------------------- scenarios


def _fixed_dt(cfg):
    _require(cfg.dt != "auto", "this scenario needs a numeric time.dt")
    return cfg.dt


def _field_init(cfg, kind, grid, opts):
    init = opts.get("init", {"type": "helix", "a": 0.01, "tau": 1.0})
    kind_name = init.get("type")
    if kind_name == "helix":
        spec = HelixSpec(_number(init, "a", nonneg=True), _number(init, "tau"),
                         _number(init, "phase0", 0.0))
        omega = float(kind.omega(spec.tau))
        phi = helix_field_snapshot(spec, omega, grid, 0.0)
    elif kind_name == "packet":
        phi = an.gaussian_packet(grid, _number(init, "k0"), _number(init, "width", positive=True))
        omega = None
    else:
        raise ConfigError(f"field init type must be 'helix' or 'packet', got {kind_name!r}")
    if isinstance(kind, fl.Schrodinger):
        return phi
    vel = -1j * omega * phi.values if omega is not None else np.zeros(grid.n)
    return fl.FieldState(phi, phi.with_values(vel))


def _prep_field_run(cfg):
    opts = cfg.options
    kind = _equation(cfg, opts)
    grid = fl.make_grid(cfg.n, cfg.L)
    dt = _fixed_dt(cfg)
    if cfg.backend == "fd" and not isinstance(kind, fl.Schrodinger):
        fl.check_leapfrog_stability(kind, grid, dt)
    state = _field_init(cfg, kind, grid, opts)

    def run(w):
        hist = fl.evolve(kind, state, dt, cfg.steps, cfg.backend, cfg.cadence)
        w.history("field", hist)
        q = [fl.conserved_quantity(kind, s, backend=cfg.backend, dt=dt) for s in hist]
        rep = {"equation": type(kind).__name__, "backend": cfg.backend,
               "conserved_initial": q[0], "conserved_final": q[-1],
               "conserved_max_rel_drift": max(abs(v - q[0]) for v in q) / abs(q[0]) if q[0] else 0.0}
        if opts.get("init", {}).get("type", "helix") == "helix" and len(hist) > 1:
            curves = [fm.field_to_curve(s if isinstance(s, fl.ComplexField) else s.phi) for s in hist]
            rot = an.measure_rotation_rate(curves)
            rep["rotation_rate"] = rot.as_dict()
            rep["rotation_rate_predicted"] = float(kind.omega(opts.get("init", {}).get("tau", 1.0)))
        return rep
    return run


def _lia_dt(cfg, curve, duration=None):
    if cfg.dt == "auto":
        dl = float(np.min(curve.segment_lengths()))
        dt = 0.19 * dl * dl / cfg.params.nu
    else:
        dt = cfg.dt
    if duration is None:
        return dt, cfg.steps
    steps = max(1, math.ceil(duration / dt - 1e-9))
    return duration / steps, steps


def _prep_lia_run(cfg):
    opts = cfg.options
    init = opts.get("init", {"type": "helix", "a": 0.01, "tau": 1.0})
    typ = init.get("type")
    _require(typ in ("helix", "line"), f"lia-run init type must be 'helix' or 'line', got {typ!r}")
    if typ == "helix":
        spec = HelixSpec(_number(init, "a", nonneg=True), _number(init, "tau"), _number(init, "phase0", 0.0))
        curve = fm.make_helix_curve(spec, cfg.L, cfg.n)
    else:
        curve = fm.make_line(cfg.L, cfg.n)
    duration = opts.get("duration")
    if duration is not None:
        duration = _number(opts, "duration", positive=True)
    dt, steps = _lia_dt(cfg, curve, duration)
    number = fm.lia_stability_number(curve, cfg.params.nu, dt)
    _require(number <= 0.2, f"LIA step too large: nu dt / dl^2 = {number:.3g} > 0.2")
    cadence = cfg.cadence if duration is None else max(1, steps // int(opts.get("snapshots", 50)))

    def run(w):
        hist = fm.evolve_lia(curve, dt, steps, cfg.params.nu, cadence=cadence)
        w.history("curve", hist)
        L0, L1 = fm.spline_length(hist[0]), fm.spline_length(hist[-1])
        rep = {"dt": dt, "steps": steps, "length_initial": L0, "length_final": L1,
               "length_rel_drift": abs(L1 - L0) / L0}
        if typ == "helix":
            rep["rotation_rate"] = an.measure_rotation_rate(hist).as_dict()
            rep["shape_deviation_over_a"] = (fm.rigid_shape_deviation(hist[-1], hist[0]) / spec.a
                                             if spec.a > 0 else 0.0)
        return rep
    return run


def _prep_dispersion(cfg):
    opts = cfg.options
    kind = _equation(cfg, opts)
    ks = _number_list(opts, "k", [1.0, 2.0, 3.0, 4.0])
    grid = fl.make_grid(cfg.n, cfg.L)
    kmax = grid.n / 4 * 2 * math.pi / grid.length
    for k in ks:
        grid.mode_index(k)
        _require(abs(k) <= kmax + 1e-12, f"k={k} exceeds the resolved range {kmax:g}")
    dt = grid.dx * 0.5 if cfg.dt == "auto" else cfg.dt
    if cfg.backend == "fd" and not isinstance(kind, fl.Schrodinger):
        fl.check_leapfrog_stability(kind, grid, dt)

    def run(w):
        samples = an.dispersion_scan(kind, ks, backend=cfg.backend, n=cfg.n, L=cfg.L, dt=dt,
                                     steps=cfg.steps)
        w.table("dispersion", ["k", "omega_measured", "omega_predicted", "rel_err"],
                [(s.k, s.omega_measured, s.omega_predicted, s.rel_err) for s in samples])
        return {"equation": type(kind).__name__, "backend": cfg.backend, "dt": dt,
                "samples": [s.as_dict() for s in samples],
                "max_rel_err": max(s.rel_err for s in samples)}
    return run


def _prep_ledger(cfg):
    def run(w):
        reports = [mass_coefficient_ledger(cfg.params, c) for c in Closure]
        d = derive_params(cfg.params)
        w.table("ledger", ["closure", "tau", "nu2_tau4", "m0sq_c4_over_hbarsq", "ratio"],
                [(r.closure.value, r.tau, r.lhs_coefficient, r.rhs_coefficient, r.ratio) for r in reports])
        return {"derived": {"a0": d.a0, "m0": d.m0, "hbar": d.hbar, "mu": d.mu},
                "closures": {r.closure.value: r.as_dict() for r in reports}}
    return run


def _prep_biot_savart(cfg):
    opts = cfg.options
    a = _number(opts, "a", 0.01, nonneg=True)
    tau = _number(opts, "tau", 1.0)
    h = _number(opts, "h", 2.0, positive=True)
    samples = _integer(opts, "samples", 16)
    amps = _number_list(opts, "amplitudes", [0.00125, 0.0025, 0.005, 0.01])
    check_commensurate(tau, cfg.L)
    helix, base = ind.helix_perturbation(a, tau, cfg.L, cfg.n)
    _require(h > a + ind.default_cutoff(base), f"h={h} lies within the cutoff of the filament")
    xs = np.arange(samples) * cfg.L / samples
    # a line of constant h that co-rotates with the helix
    points = [(x, h * math.cos(tau * x), h * math.sin(tau * x)) for x in xs]

    def run(w):
        rows = ind.velocity_samples(helix, points, cfg.params.gamma, baseline=base)
        w.table("velocity", ["x", "y", "z", "u_x", "u_y", "u_z"], rows)
        slope, resid, _ = ind.amplitude_response(amps, tau, h, cfg.L, cfg.n, gamma=cfg.params.gamma)
        cmp = ind.estimate_comparison(a, tau, h, cfg.L, cfg.n, gamma=cfg.params.gamma)
        return {"estimate_comparison": cmp,
                "amplitude_response": {"amplitudes": amps, "slope": slope, "residual": resid}}
    return run


def _prep_soliton(cfg):
    opts = cfg.options
    eta = _number(opts, "eta", 1.0, positive=True)
    tau0 = _number(opts, "tau0", 0.5)
    duration = _number(opts, "duration", 4.0, positive=True)
    curve = fm.make_hasimoto_soliton_curve(eta, tau0, cfg.L, cfg.n)
    dt, steps = _lia_dt(cfg, curve, duration)
    number = fm.lia_stability_number(curve, cfg.params.nu, dt)
    _require(number <= 0.2, f"LIA step too large: nu dt / dl^2 = {number:.3g} > 0.2")
    cadence = max(1, steps // _integer(opts, "snapshots", 20))

    def run(w):
        hist = fm.evolve_lia(curve, dt, steps, cfg.params.nu, cadence=cadence)
        w.history("curve", hist)
        peaks = [an.soliton_peak_position(c) for c in hist]
        w.table("peak", ["t", "arclength", "curvature"], [(c.t, *p) for c, p in zip(hist, peaks)])
        rep = an.measure_soliton_speed(hist, eta)
        return {"speed": rep.as_dict(), "predicted": 2 * cfg.params.nu * tau0, "dt": dt, "steps": steps}
    return run


def _prep_group_velocity(cfg):
    opts = cfg.options
    k0s = _number_list(opts, "k0", [1.0, 2.0])
    width = _number(opts, "width", 5.0, positive=True)
    _require(width >= 8 * cfg.L / cfg.n, "packet envelope must span at least 16 grid cells")

    def run(w):
        reps = [an.measure_group_velocity(cfg.params.nu, k0, width, cfg.L, cfg.n) for k0 in k0s]
        rows = []
        for r in reps:
            rows.extend((r.metadata["k0"], t, x) for t, x in zip(r.metadata["times"], r.metadata["centroids"]))
        w.table("centroid", ["k0", "t", "x"], rows)
        return {"measurements": [r.as_dict() for r in reps]}
    return run


def _prep_linearization(cfg):
    opts = cfg.options
    ratios = _number_list(opts, "a_over_L", [1e-3, 2e-3, 4e-3, 8e-3])
    _require(max(ratios) <= 1e-2, "a/L must not exceed 1e-2")
    tau = _number(opts, "tau", 1.0)
    check_commensurate(tau, cfg.L)
    rich = bool(opts.get("richardson", True))

    def run(w):
        kw = dict(tau=tau, nu=cfg.params.nu, L=cfg.L, n=cfg.n)
        raw = [an.linearization_consistency(r, **kw).value for r in ratios]
        fit = an.linearization_scaling(ratios, richardson=rich, **kw)
        w.table("deviation", ["a_over_L", "deviation", "deviation_extrapolated"],
                list(zip(ratios, raw, fit.metadata["deviations"])))
        return {"deviation": dict(zip(map(str, ratios), raw)), "scaling": fit.as_dict()}
    return run


SCENARIOS = {
    "field-run": (_prep_field_run, "evolve a Wave/Schrodinger/KleinGordon field"),
    "lia-run": (_prep_lia_run, "evolve a filament under local induction"),
    "dispersion": (_prep_dispersion, "measure omega(k) against the closed forms"),
    "ledger": (_prep_ledger, "mass-coefficient ratio under both torsion closures"),
    "biot-savart": (_prep_biot_savart, "delta u of a helix by segment quadrature"),
    "soliton": (_prep_soliton, "translation speed of the Hasimoto soliton"),
    "group-velocity": (_prep_group_velocity, "centroid drift of Schrodinger packets"),
    "linearization": (_prep_linearization, "full LIA against the linear field equation"),
}


# ---------------------------------------------------------------- driver


def load_config(path):
    with open(path) as fh:
        try:
            return yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from None


def run_config(raw, out_root):
    """Validate, run and persist one scenario; returns the manifest dict."""
    cfg, runner = validate(raw)
    run_dir = os.path.join(out_root, cfg.name)
    if os.path.isdir(run_dir) and os.listdir(run_dir):
        raise ConfigError(f"run directory {run_dir} is not empty")
    start = time.perf_counter()
    w = RunWriter(run_dir)
    report = runner(w)
    report = {"scenario": cfg.scenario, "name": cfg.name, "version": __version__, "result": report}
    w.report(report)
    manifest = {
        "config": cfg.raw,
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "duration_s": time.perf_counter() - start,
        "files": [{"path": f, "sha256": _digest(os.path.join(run_dir, f))} for f in w.files],
    }
    tmp = os.path.join(run_dir, "manifest.json.tmp")
    with open(tmp, "w") as fh:
        json.dump(_jsonable(manifest), fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, os.path.join(run_dir, "manifest.json"))
    return manifest


def _cmd_run(args):
    raw = load_config(args.config)
    cfg, _ = validate(raw)
    run_dir = os.path.join(args.out, cfg.name)
    if args.force and os.path.isdir(run_dir):
        shutil.rmtree(run_dir)
    man = run_config(raw, args.out)
    print(f"wrote {len(man['files'])} files to {run_dir} in {man['duration_s']:.2f} s")


def _cmd_validate(args):
    cfg, _ = validate(load_config(args.config))
    print(f"ok: {cfg.scenario} ({cfg.name})")


def _cmd_list(args):
    for name, (_, desc) in SCENARIOS.items():
        print(f"{name:16s} {desc}")


def build_parser():
    ap = argparse.ArgumentParser(prog="vortexkg", description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=".", help="root directory for run outputs")
    sub = ap.add_subparsers(dest="cmd", required=True)
    p = sub.add_parser("run", help="validate and run a config")
    p.add_argument("config")
    p.add_argument("--force", action="store_true", help="replace an existing run directory")
    p.set_defaults(func=_cmd_run)
    p = sub.add_parser("validate", help="check a config without running it")
    p.add_argument("config")
    p.set_defaults(func=_cmd_validate)
    p = sub.add_parser("list-scenarios", help="show the available scenarios")
    p.set_defaults(func=_cmd_list)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"vortexkg: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
