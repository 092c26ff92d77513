"""Command line front end: ``wki <command> [--config run.json] [--set a.b=value ...]``.

Commands: scatter, soliton, asymptote, simulate, compare, verify.  Each one
reads a JSON config (merged over built-in defaults), writes its artefacts and
prints a JSON report.  Exit codes: 0 success, 1 failed check, 2 invalid input,
3 numerical abort.
"""
from __future__ import annotations

import argparse
import copy
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from . import asymptotics as asy
from .errors import GridMismatch, InputError, NumericalAbort, WKIError
from .numerics import RealGridFunction
from .oracle import FieldFrame, SimConfig, conserved, simulate
from .scattering import (InitialProfile, SpectralBox, SpectralData, s22_upper, spectral_data,
                         trace_formula_residual)
from .soliton import SolitonParams, soliton_field

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
WORKERS_ENV = "WKI_WORKERS"
REPORT_VERSION = 1

DEFAULTS: dict = {
    "scatter": {
        "profile": None,            # CSV x,re_q,im_q
        "sidecar": None,            # JSON {q_plus, q_minus}; defaults to <profile>.json
        "z_grid": {"min": -10.0, "max": 10.0, "n": 201},
        "box": {"re_min": -3.0, "re_max": 3.0, "im_min": 0.05, "im_max": 3.0},
        "output": "spectral.json",
    },
    "soliton": {
        "eigenvalues": [[0.5, 0.8]],
        "norming": [[1.0, 0.0]],
        "q_minus": [1.0, 0.0],
        "x": {"min": -30.0, "max": 30.0, "n": 601},
        "t": 0.0,
        "output": "soliton.csv",
    },
    "asymptote": {
        "spectral": None,
        "x": {"min": -50.0, "max": 50.0, "n": 101},
        "t": -40.0,
        "terms": 2,
        "t_min": 10.0,
        "scale_reading": "abs",     # "abs": sqrt(2|t|) in the local scaling, "signed": sqrt(2t)
        "output": "asymptote.csv",
        "dump_scalars": None,       # path for the deformation scalars at x = 0
    },
    "simulate": {
        "profile": None,
        "sidecar": None,
        "grid": {"x_min": -100.0, "x_max": 100.0, "n_x": 2001},
        "dt": None,                 # default: the stability limit
        "t_end": 5.0,
        "frame_every": 1.0,
        "filter_strength": 0.0,
        "output_dir": "frames",
    },
    "compare": {
        "reference": None,          # frame index JSON (usually from simulate)
        "candidate": None,          # second frame index; when absent the asymptotic field is used
        "spectral": None,
        "z0_rays": [-0.6, -0.4, 0.4, 0.6],
        "ray_offsets": [-1.0, -0.5, 0.0, 0.5, 1.0],
        "times": None,              # subset of reference times; default all with |t| >= t_min
        "t_min": 10.0,
        "scale_reading": "abs",
        "windows": {"1": [-0.65, -0.35], "2": [-1e9, -0.6]},
        "confidence": 0.95,
        "output": "compare.json",
    },
    "verify": {
        "tolerance_scale": 1.0,
        "sweep": [],
        "corrupt_r_scale": 1.0,     # fault injection: multiply r before the trace check
        "corrupt_r": None,          # fault injection: "grid_sign" (r(z) -> r(-z)) or "value_sign" (r -> -r)
        "output": "verify.json",
    },
}


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    base_dir: Path = Path(".")

    def path(self, key: str) -> Path | None:
        value = self.params.get(key)
        if value is None:
            return None
        p = Path(value)
        return p if p.is_absolute() else self.base_dir / p


# --- config handling ------------------------------------------------------------

def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def apply_override(params: dict, assignment: str) -> None:
    """Set a leaf by dotted path: ``grid.n_x=4001``.  Values are parsed as JSON when possible."""
    if "=" not in assignment:
        raise InputError(f"override {assignment!r} is not of the form key=value")
    key, raw = assignment.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = params
    parts = key.split(".")
    for p in parts[:-1]:
        if not isinstance(node.get(p), dict):
            node[p] = {}
        node = node[p]
    node[parts[-1]] = value


def load_config(command: str, config_path: str | None, overrides=()) -> RunConfig:
    if command not in DEFAULTS:
        raise InputError(f"unknown command {command!r}")
    params = copy.deepcopy(DEFAULTS[command])
    base = Path(".")
    if config_path:
        with open(config_path) as fh:
            data = json.load(fh)
        # a file may hold one section per command or the bare section
        section = data.get(command, data) if isinstance(data, dict) else {}
        params = _merge(params, section)
        base = Path(config_path).parent
    for item in overrides:
        apply_override(params, item)
    return RunConfig(command, params, base)


# --- file formats ---------------------------------------------------------------

def _pair(v) -> complex:
    return complex(v[0], v[1])


def _as_pair(c) -> list:
    c = complex(c)
    return [c.real, c.imag]


def write_frame(path: Path, frame: FieldFrame, q_plus=None, q_minus=None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "re_q", "im_q"])
        for x, q in zip(frame.x_nodes, frame.q):
            w.writerow([repr(float(x)), repr(float(q.real)), repr(float(q.imag))])
    qp = frame.q[-1] if q_plus is None else q_plus
    qm = frame.q[0] if q_minus is None else q_minus
    with open(path.with_suffix(".json"), "w") as fh:
        json.dump({"t": frame.t, "q_plus": _as_pair(qp), "q_minus": _as_pair(qm)}, fh)


def read_csv_field(path: Path) -> tuple[np.ndarray, np.ndarray]:
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if data.shape[1] != 3:
        raise InputError(f"{path}: expected columns x,re_q,im_q")
    return data[:, 0], data[:, 1] + 1j * data[:, 2]


def read_frame(path: Path) -> FieldFrame:
    path = Path(path)
    x, q = read_csv_field(path)
    side = path.with_suffix(".json")
    t = json.loads(side.read_text())["t"] if side.exists() else 0.0
    return FieldFrame(t, x, q)


def read_profile(path: Path, sidecar: Path | None = None) -> InitialProfile:
    x, q = read_csv_field(path)
    side = Path(sidecar) if sidecar else Path(path).with_suffix(".json")
    if side.exists():
        meta = json.loads(side.read_text())
        return InitialProfile(x, q, _pair(meta["q_plus"]), _pair(meta["q_minus"]))
    return InitialProfile(x, q, q[-1], q[0])


def read_frame_index(path: Path) -> list[FieldFrame]:
    path = Path(path)
    index = json.loads(path.read_text())
    return [read_frame(path.parent / name) for name in index["files"]]


def _grid(spec: dict) -> np.ndarray:
    n = int(spec["n"])
    if n < 2:
        raise InputError("grids need at least two points")
    return np.linspace(float(spec["min"]), float(spec["max"]), n)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        raise InputError(f"{WORKERS_ENV} must be an integer")


def _asym_point(args):
    x, t, spec_json, terms, t_min, reading = args
    spec = SpectralData.from_json(spec_json)
    return asy.asymptotic_q(x, t, spec, asy.AsymptoticConfig(terms=terms, t_min=t_min, scale_reading=reading))


def asymptotic_values(xs, t: float, spec: SpectralData, terms: int, t_min: float = 10.0,
                      reading: str = "abs") -> np.ndarray:
    """Asymptotic field at the given x, fanned out over WKI_WORKERS processes."""
    xs = [float(v) for v in xs]
    workers = _workers()
    if workers == 1 or len(xs) < 2 * workers:
        cfg = asy.AsymptoticConfig(terms=terms, t_min=t_min, scale_reading=reading)
        return np.array([asy.asymptotic_q(x, t, spec, cfg) for x in xs])
    payload = spec.to_json()
    with ProcessPoolExecutor(workers) as pool:
        return np.array(list(pool.map(_asym_point, [(x, t, payload, terms, t_min, reading) for x in xs])))


# --- commands --------------------------------------------------------------------

def cmd_scatter(cfg: RunConfig) -> tuple[dict, int]:
    p = cfg.params
    src = cfg.path("profile")
    if src is None:
        raise InputError("scatter needs 'profile'")
    profile = read_profile(src, cfg.path("sidecar"))
    box = SpectralBox(**p["box"]) if p.get("box") else None
    spec = spectral_data(profile, _grid(p["z_grid"]), box)
    out = cfg.path("output")
    out.write_text(json.dumps(spec.to_json()))
    report = {
        "command": "scatter",
        "eigenvalues": [_as_pair(z) for z in spec.eigenvalues],
        "norming": [_as_pair(c) for c in spec.norming],
        "max_abs_r": float(np.max(np.abs(spec.r.values))),
        "phi0": spec.phi0,
        "output": str(out),
    }
    return report, EXIT_OK


def cmd_soliton(cfg: RunConfig) -> tuple[dict, int]:
    p = cfg.params
    params = SolitonParams(tuple(_pair(z) for z in p["eigenvalues"]), tuple(_pair(c) for c in p["norming"]),
                           _pair(p["q_minus"]))
    frame = soliton_field(params, _grid(p["x"]), float(p["t"]))
    out = cfg.path("output")
    write_frame(out, frame, params.q_minus, params.q_minus)
    return {"command": "soliton", "t": frame.t, "points": len(frame.q),
            "max_abs_q": float(np.max(np.abs(frame.q))), "output": str(out)}, EXIT_OK


def _load_spec(cfg: RunConfig) -> SpectralData:
    path = cfg.path("spectral")
    if path is None:
        raise InputError(f"{cfg.command} needs 'spectral'")
    try:
        return SpectralData.from_json(json.loads(path.read_text()))
    except (OSError, KeyError, ValueError) as exc:
        raise InputError(f"cannot read spectral data {path}: {exc}") from exc


def cmd_asymptote(cfg: RunConfig) -> tuple[dict, int]:
    p = cfg.params
    spec = _load_spec(cfg)
    xs = _grid(p["x"])
    t = float(p["t"])
    q = asymptotic_values(xs, t, spec, int(p["terms"]), float(p["t_min"]), p["scale_reading"])
    frame = FieldFrame(t, xs, q)
    out = cfg.path("output")
    write_frame(out, frame, spec.q_plus, spec.q_minus)
    report = {"command": "asymptote", "t": t, "terms": int(p["terms"]), "points": len(xs), "output": str(out)}
    dump = cfg.path("dump_scalars")
    if dump is not None:
        scalars = asy.deformation_dump(0.5, t, spec)
        dump.write_text(json.dumps(scalars))
        report["scalars"] = str(dump)
    return report, EXIT_OK


def cmd_simulate(cfg: RunConfig) -> tuple[dict, int]:
    p = cfg.params
    src = cfg.path("profile")
    if src is None:
        raise InputError("simulate needs 'profile'")
    profile = read_profile(src, cfg.path("sidecar"))
    g = p["grid"]
    probe = SimConfig(float(g["x_min"]), float(g["x_max"]), int(g["n_x"]), 1.0, float(p["t_end"]))
    dt = p["dt"] or probe.max_stable_dt(profile.phi0)
    sim = SimConfig(probe.x_min, probe.x_max, probe.n_x, float(dt), float(p["t_end"]),
                    p["frame_every"], float(p["filter_strength"]))
    x = sim.x_nodes
    # outside the sampled profile the field sits on its boundary values
    re = np.interp(x, profile.x_nodes, profile.q_values.real, profile.q_minus.real, profile.q_plus.real)
    im = np.interp(x, profile.x_nodes, profile.q_values.imag, profile.q_minus.imag, profile.q_plus.imag)
    frames = simulate(sim, FieldFrame(0.0, x, re + 1j * im))
    outdir = cfg.path("output_dir")
    outdir.mkdir(parents=True, exist_ok=True)
    files = []
    for k, fr in enumerate(frames):
        name = f"frame_{k:04d}.csv"
        write_frame(outdir / name, fr, profile.q_plus, profile.q_minus)
        files.append(name)
    c0 = conserved(frames[0])[0]
    drift = max(abs(conserved(fr)[0] - c0) for fr in frames) / max(abs(c0), 1e-300)
    index = {"times": [fr.t for fr in frames], "files": files, "config": p}
    (outdir / "index.json").write_text(json.dumps(index))
    return {"command": "simulate", "frames": len(frames), "c_initial": c0, "c_relative_drift": drift,
            "index": str(outdir / "index.json")}, EXIT_OK


def slope_fit(times, errors, confidence: float = 0.95) -> dict:
    """Least-squares slope of log(error) against log|t| with a t-distribution interval."""
    t = np.abs(np.asarray(times, float))
    e = np.asarray(errors, float)
    ok = (e > 0) & np.isfinite(e)
    if ok.sum() < 2 or np.ptp(np.log(t[ok])) == 0:
        return {"slope": None, "ci": None, "defined": False}
    lx, ly = np.log(t[ok]), np.log(e[ok])
    res = stats.linregress(lx, ly)
    n = int(ok.sum())
    if n > 2:
        half = float(stats.t.ppf(0.5 + confidence / 2, n - 2) * res.stderr)
    else:
        half = float("inf")
    return {"slope": float(res.slope), "ci": [float(res.slope - half), float(res.slope + half)], "defined": True}


def _ray_nodes(x_nodes: np.ndarray, t: float, phi0: float, rays, offsets) -> np.ndarray:
    targets = np.array([-2 * t * z0 / phi0 ** 2 + o for z0 in rays for o in offsets])
    idx = np.clip(np.searchsorted(x_nodes, targets), 0, len(x_nodes) - 1)
    return np.unique(idx)


def cmd_compare(cfg: RunConfig) -> tuple[dict, int]:
    p = cfg.params
    ref_path = cfg.path("reference")
    if ref_path is None:
        raise InputError("compare needs 'reference'")
    reference = read_frame_index(ref_path)
    cand_path = cfg.path("candidate")
    candidate = read_frame_index(cand_path) if cand_path is not None else None
    spec = _load_spec(cfg) if candidate is None else None
    phi0 = spec.phi0 if spec is not None else math.sqrt(1 + abs(reference[0].q[0]) ** 2)
    wanted = p["times"]
    frames = [f for f in reference if abs(f.t) >= float(p["t_min"]) and
              (wanted is None or any(abs(f.t - w) < 1e-6 for w in wanted))]
    if candidate is not None:
        by_t = {round(f.t, 6): f for f in candidate}
    series: dict[str, list] = {}
    times = []
    for fr in frames:
        idx = _ray_nodes(fr.x_nodes, fr.t, phi0, p["z0_rays"], p["ray_offsets"])
        times.append(fr.t)
        if candidate is not None:
            other = by_t.get(round(fr.t, 6))
            if other is None or other.x_nodes.shape != fr.x_nodes.shape or \
                    not np.allclose(other.x_nodes, fr.x_nodes, atol=1e-9):
                raise GridMismatch(f"candidate frame at t={fr.t} missing or on another grid")
            series.setdefault("candidate", []).append(float(np.max(np.abs(other.q[idx] - fr.q[idx]))))
            continue
        for terms in (1, 2):
            q = asymptotic_values(fr.x_nodes[idx], fr.t, spec, terms, float(p["t_min"]), p["scale_reading"])
            series.setdefault(str(terms), []).append(float(np.max(np.abs(q - fr.q[idx]))))
    fits = {}
    status = EXIT_OK
    for name, errs in series.items():
        fit = slope_fit(times, errs, float(p["confidence"]))
        window = p["windows"].get(name)
        if window is not None and fit["defined"]:
            fit["window"] = window
            fit["pass"] = bool(window[0] <= fit["slope"] <= window[1])
            if not fit["pass"]:
                status = EXIT_FAIL
        fits[name] = fit
    report = {"command": "compare", "version": REPORT_VERSION, "times": times,
              "sup_differences": series, "fits": fits}
    out = cfg.path("output")
    if out is not None:
        out.write_text(json.dumps(report, indent=1))
    return report, status


# --- verification fixtures -------------------------------------------------------

def fixture_spectral_data() -> SpectralData:
    """Synthetic data: one eigenvalue and a smooth r with r(0) = 0."""
    z = np.linspace(-12.0, 12.0, 961)
    r = 0.9 * z * np.exp(-z * z / 2 + 0.7j * z) / (1 + 0.2 * z * z)
    return SpectralData(RealGridFunction(z, r), (0.4 + 0.9j,), (1.0 + 0.5j,), math.sqrt(1.25), 0.5, 0.5)


def fixture_profile() -> InitialProfile:
    x = np.linspace(-25.0, 25.0, 2001)
    q = 0.8 * np.exp(0.35j * (1 + np.tanh(x))) * (1 + 0.5 * np.exp(0.5j * x) / np.cosh(x) ** 2)
    return InitialProfile(x, q, q[-1], q[0])


def corrupt_reflection(data: SpectralData, scale: float = 1.0, mode: str | None = None) -> SpectralData:
    """Deliberately damaged copy of ``data`` for fault-injection runs.

    ``value_sign`` flips r itself, which the trace formula cannot see since it
    depends on |r| only; ``grid_sign`` flips the z grid and must be caught.
    """
    nodes, values = data.r.nodes, scale * data.r.values
    if mode == "grid_sign":
        nodes, values = -nodes[::-1], values[::-1]
    elif mode == "value_sign":
        values = -values
    elif mode is not None:
        raise InputError(f"unknown corruption mode {mode!r}")
    return SpectralData(RealGridFunction(nodes, values), data.eigenvalues, data.norming, data.phi0,
                        data.q_minus, data.q_plus, data.d)


def run_checks(corrupt_r_scale: float = 1.0, corrupt_r: str | None = None) -> dict[str, tuple[float, float]]:
    """name -> (tolerance, measured) for the invariant suite on the built-in fixtures."""
    out: dict[str, tuple[float, float]] = {}
    for r0 in (0.1, 0.5, 0.9):
        out[f"pc_jump_r{r0}"] = (1e-8, asy.pc_jump_residual(r0 * np.exp(0.3j)))
        out[f"pc_m1_fit_r{r0}"] = (1e-3, asy.pc_m1_fit(r0 * np.exp(0.3j)))
        pc = asy.pc_coefficients(r0 * np.exp(0.3j))
        out[f"beta_product_r{r0}"] = (1e-12, abs(pc.beta12 * pc.beta21 - pc.nu0))
        out[f"alpha_modulus_r{r0}"] = (1e-12, abs(abs(pc.alpha) ** 2 - abs(pc.nu0)))
    spec = fixture_spectral_data()
    z0 = -0.35
    xs = (-2.3, -1.1, -0.71, -0.4)
    out["T_jump_ratio"] = (1e-6, max(abs(tp / tm - (1 + abs(spec.r(x)) ** 2))
                                    for x in xs for tp, tm in [asy.T_boundary_values(x, spec, z0)]))
    pts = [0.3 + 0.4j, -1.2 + 0.1j, 2.0 - 0.7j, -0.5 - 1.5j]
    out["T_reciprocal"] = (1e-10, max(abs(np.conj(asy.T_eval(np.conj(z), spec, z0)) * asy.T_eval(z, spec, z0) - 1)
                                      for z in pts))
    coeff = asy.T_large_z_coeff(spec, z0)
    out["T_large_z"] = (1e-3, abs((asy.T_eval(1e4j, spec, z0) - 1) * 1e4j - coeff))
    out["T0_unimodular"] = (1e-10, abs(abs(asy.T0_and_T1(spec, z0).T0_unit) - 1))
    out["factorization_right"] = (1e-10, max(asy.jump_factorization_residual(spec.r(x), x, z0, spec, np.exp(-0.4j * x))
                                             for x in (0.2, 1.3, 2.5)))
    out["factorization_left"] = (1e-8, max(asy.jump_factorization_residual(spec.r(x), x, z0, spec, np.exp(-0.4j * x))
                                           for x in xs))
    ts = np.array([1e2, 1e3, 1e4])
    pc = asy.pc_coefficients(0.5 * np.exp(0.3j))
    norms = [np.max(np.abs(asy.E_leading(np.eye(2), np.eye(2), pc, -0.5, math.sqrt(1.25), -t).E0 - np.eye(2)))
             for t in ts]
    out["E0_slope"] = (0.02, abs(slope_fit(ts, norms)["slope"] + 0.5))
    profile = fixture_profile()
    data = spectral_data(profile, np.linspace(-20.0, 20.0, 321))
    if corrupt_r_scale != 1.0 or corrupt_r is not None:
        data = corrupt_reflection(data, corrupt_r_scale, corrupt_r)
    rng = np.random.default_rng(7)
    zs = rng.uniform(-2, 2, 10) + 1j * rng.uniform(0.2, 2, 10)
    s22 = s22_upper(profile, zs)
    out["trace_formula"] = (1e-4, max(trace_formula_residual(data, z, s) for z, s in zip(zs, s22)))
    return {k: (float(t), float(m)) for k, (t, m) in out.items()}


def cmd_verify(cfg: RunConfig) -> tuple[dict, int]:
    p = cfg.params
    checks = run_checks(float(p["corrupt_r_scale"]), p.get("corrupt_r"))
    scale = float(p["tolerance_scale"])
    entries = []
    status = EXIT_OK
    for name, (tol, measured) in checks.items():
        ok = bool(np.isfinite(measured) and measured <= tol * scale)
        entries.append({"name": name, "tolerance": tol * scale, "measured": measured, "pass": ok})
        if not ok:
            status = EXIT_FAIL
    report = {"command": "verify", "version": REPORT_VERSION, "checks": entries}
    if p["sweep"]:
        onset = {}
        for name, (tol, measured) in checks.items():
            passes = [bool(measured <= tol * s) for s in p["sweep"]]
            first_fail = next((s for s, ok in zip(p["sweep"], passes) if not ok), None)
            onset[name] = {"scales": list(p["sweep"]), "pass": passes, "first_failing_scale": first_fail}
        report["sweep"] = onset
    out = cfg.path("output")
    if out is not None:
        out.write_text(json.dumps(report, indent=1))
    return report, status


COMMANDS = {
    "scatter": cmd_scatter,
    "soliton": cmd_soliton,
    "asymptote": cmd_asymptote,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "verify": cmd_verify,
}


def _knob_help(command: str) -> str:
    lines = [f"defaults for {command}:"]

    def walk(node, prefix):
        for k, v in node.items():
            if isinstance(v, dict):
                walk(v, f"{prefix}{k}.")
            else:
                lines.append(f"  {prefix}{k} = {json.dumps(v)}")
    walk(DEFAULTS[command], "")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wki", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sp = sub.add_parser(name, help=(fn.__doc__ or name).strip().splitlines()[0] if fn.__doc__ else name,
                            epilog=_knob_help(name) + f"\n\nworker count: ${WORKERS_ENV}",
                            formatter_class=argparse.RawDescriptionHelpFormatter)
        sp.add_argument("--config", help="JSON config (whole file or a section named after the command)")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config leaf by dotted path; VALUE is parsed as JSON when possible")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.command, args.config, args.set)
        report, code = COMMANDS[args.command](cfg)
    except InputError as exc:
        report, code = {"command": args.command, "error": type(exc).__name__, "message": str(exc)}, EXIT_INPUT
    except (NumericalAbort, np.linalg.LinAlgError) as exc:
        report, code = {"command": args.command, "error": type(exc).__name__, "message": str(exc)}, EXIT_NUMERIC
    except WKIError as exc:
        report, code = {"command": args.command, "error": type(exc).__name__, "message": str(exc)}, EXIT_NUMERIC
    print(json.dumps(report, indent=1, default=str))
    return code


if __name__ == "__main__":
    sys.exit(main())
