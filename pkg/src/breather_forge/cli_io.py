"""Config parsing, command dispatch, and machine-readable outputs.

Config files are flat ``section.key = value`` lines with ``#`` comments.
The solve manifest is a single JSON document that echoes the fully resolved
configuration, so any run can be reproduced bit-identically from its
manifest alone; numeric tables go to RFC-4180-style CSV files next to it.

Exit codes: 0 converged/complete, 1 usage/parse/verification errors,
2 solver finished without a nontrivial solution (collapse, divergence,
iteration budget), 3 resonance or precondition failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings

import numpy as np

from . import validation
from .lattice_model import MixedPotentialError, PotentialSpec
from .operators import Multiplier, ResonanceError, probe_operator_norm
from .solver import (BreatherResult, SolverConfig, STATUS_CONVERGED,
                     continuation_sweep, solve)
from .spectral_field import (GridSpec, SpectralField, WeightSpec,
                             max_amplitude_profile, parity_projector,
                             synthesize, time_means, x0_norm, x2_norm)

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Config rejected; message carries per-key line diagnostics."""


class ConfigWarning(UserWarning):
    pass


_DEFAULTS = {
    "grid.n_sites": "64",
    "grid.n_harmonics": "16",
    "grid.n_time_samples": "auto",
    "grid.omega": None,  # required
    "weight.lambda": "0.0",
    "potential.cubic": "0.0",
    "potential.quartic": "0.0",
    "solver.parity": "odd",
    "solver.strategy": "hybrid",
    "solver.damping": "0.5",
    "solver.accel_depth": "5",
    "solver.tol_residual": "1e-10",
    "solver.tol_zero": "1e-08",
    "solver.max_iter": "500",
    "solver.seed_amplitude": "auto",
    "solver.seed_width": "1.0",
}

_KEY_ORDER = list(_DEFAULTS)


def _parse_lines(text: str) -> dict[str, tuple[str, int]]:
    entries: dict[str, tuple[str, int]] = {}
    problems = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        if key == "omega":
            key = "grid.omega"  # bare alias for the one required key
        if key not in _DEFAULTS:
            problems.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in entries:
            problems.append(f"line {lineno}: duplicate key {key!r}")
            continue
        entries[key] = (value, lineno)
    if problems:
        raise ConfigError("; ".join(problems))
    return entries


def _get_float(raw, key, lineno_map) -> float:
    try:
        return float(raw)
    except ValueError:
        where = f"line {lineno_map.get(key, '?')}"
        raise ConfigError(f"{where}: {key} must be a number, got {raw!r}") from None


def _get_int(raw, key, lineno_map) -> int:
    try:
        return int(raw)
    except ValueError:
        where = f"line {lineno_map.get(key, '?')}"
        raise ConfigError(f"{where}: {key} must be an integer, got {raw!r}") from None


def build_config(values: dict[str, str], lineno_map: dict[str, int] | None = None) -> SolverConfig:
    """Validate a fully merged key set and construct the solver config."""
    lineno_map = lineno_map or {}
    merged = {k: v for k, v in _DEFAULTS.items()}
    merged.update(values)
    if merged["grid.omega"] is None:
        raise ConfigError("missing required key grid.omega (or bare 'omega')")

    omega = _get_float(merged["grid.omega"], "grid.omega", lineno_map)
    lam = _get_float(merged["weight.lambda"], "weight.lambda", lineno_map)
    n_sites = _get_int(merged["grid.n_sites"], "grid.n_sites", lineno_map)
    n_harm = _get_int(merged["grid.n_harmonics"], "grid.n_harmonics", lineno_map)
    if omega <= 0.0:
        raise ConfigError("grid.omega must be positive")
    if lam < 0.0:
        raise ConfigError("weight.lambda must be >= 0")
    if n_sites % 2 != 0 or n_sites < 8:
        raise ConfigError("grid.n_sites must be even and >= 8")
    if omega**2 <= 4.0:
        warnings.warn(
            f"omega^2 = {omega**2:.6g} does not clear the phonon band edge 4; "
            "solving will fail with a resonance error", ConfigWarning, stacklevel=2)

    potential = PotentialSpec(
        cubic=_get_float(merged["potential.cubic"], "potential.cubic", lineno_map),
        quartic=_get_float(merged["potential.quartic"], "potential.quartic", lineno_map))
    if merged["grid.n_time_samples"] == "auto":
        n_time = 2 * (max(potential.wprime_degree, 3) + 1) * n_harm + 2
    else:
        n_time = _get_int(merged["grid.n_time_samples"], "grid.n_time_samples", lineno_map)
    parity = merged["solver.parity"]
    if parity not in ("even", "odd"):
        raise ConfigError(f"solver.parity must be 'even' or 'odd', got {parity!r}")
    strategy = merged["solver.strategy"]
    if strategy not in ("picard", "newton", "hybrid"):
        raise ConfigError(f"solver.strategy must be picard|newton|hybrid, got {strategy!r}")
    seed_amp_raw = merged["solver.seed_amplitude"]
    seed_amp = None if seed_amp_raw == "auto" else _get_float(
        seed_amp_raw, "solver.seed_amplitude", lineno_map)
    try:
        return SolverConfig(
            grid=GridSpec(n_sites, n_harm, n_time, omega),
            weight=WeightSpec.for_parity(lam, parity),
            potential=potential,
            parity=parity,
            strategy=strategy,
            damping=_get_float(merged["solver.damping"], "solver.damping", lineno_map),
            accel_depth=_get_int(merged["solver.accel_depth"], "solver.accel_depth", lineno_map),
            tol_residual=_get_float(merged["solver.tol_residual"], "solver.tol_residual", lineno_map),
            tol_zero=_get_float(merged["solver.tol_zero"], "solver.tol_zero", lineno_map),
            max_iter=_get_int(merged["solver.max_iter"], "solver.max_iter", lineno_map),
            seed=(seed_amp, _get_float(merged["solver.seed_width"], "solver.seed_width", lineno_map)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def parse_config(text: str) -> SolverConfig:
    """Parse a flat config document; unknown keys and bad ranges are errors."""
    entries = _parse_lines(text)
    values = {k: v for k, (v, _) in entries.items()}
    linenos = {k: ln for k, (_, ln) in entries.items()}
    return build_config(values, linenos)


def serialize_config(config: SolverConfig) -> str:
    """Canonical flat text for a resolved config; parse round-trips exactly."""
    amp, width = config.seed
    values = {
        "grid.n_sites": repr(config.grid.n_sites),
        "grid.n_harmonics": repr(config.grid.n_harmonics),
        "grid.n_time_samples": repr(config.grid.n_time_samples),
        "grid.omega": repr(config.grid.omega),
        "weight.lambda": repr(config.weight.lam),
        "potential.cubic": repr(config.potential.cubic),
        "potential.quartic": repr(config.potential.quartic),
        "solver.parity": config.parity,
        "solver.strategy": config.strategy,
        "solver.damping": repr(config.damping),
        "solver.accel_depth": repr(config.accel_depth),
        "solver.tol_residual": repr(config.tol_residual),
        "solver.tol_zero": repr(config.tol_zero),
        "solver.max_iter": repr(config.max_iter),
        "solver.seed_amplitude": "auto" if amp is None else repr(amp),
        "solver.seed_width": repr(width),
    }
    return "".join(f"{key} = {values[key]}\n" for key in _KEY_ORDER)


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def _atomic_write(path: str, data: str):
    tmp = path + ".tmp"
    with open(tmp, "w", newline="") as handle:
        handle.write(data)
    os.replace(tmp, path)


def _write_csv(path: str, header: list[str], rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    _atomic_write(path, buffer.getvalue())


def bounds_dict(report) -> dict:
    return {
        "r_max": report.r_max, "r_crit": report.r_crit,
        "nonres0_ok": report.nonres0_ok, "nonres_ok": report.nonres_ok,
        "in_ring": report.in_ring, "x0_norm": report.x0_norm,
    }


def trajectory_dict(report) -> dict:
    return {
        "energy_drift": report.energy_drift,
        "momentum_drift": report.momentum_drift,
        "period_return_error": report.period_return_error,
        "periods_integrated": report.periods_integrated,
        "dt": report.dt,
    }


def build_manifest(result: BreatherResult, config_text: str,
                   artifact_paths: list[str], trajectory=None) -> dict:
    return _json_safe({
        "schema_version": SCHEMA_VERSION,
        "config_echo": config_text,
        "result": {
            "status": result.status,
            "omega": result.omega,
            "iterations": result.iterations,
            "fp_residual": result.fp_residual,
            "strong_residual": result.strong_residual,
            "x0_norm": result.x0_norm,
            "x2_norm": result.x2_norm,
            "parity_deviation": result.parity_deviation,
            "decay_fit": result.decay_fit,
            "parity": result.parity,
        },
        "bounds": bounds_dict(result.bounds) if result.bounds is not None else None,
        "trajectory": trajectory_dict(trajectory) if trajectory is not None else None,
        "artifact_paths": artifact_paths,
    })


def decay_rows(field: SpectralField, parity: str):
    """(abs_n, log_amp, fit_line) rows for the plot-ready decay file."""
    center = -0.5 if parity == "even" else 0.0
    amp = max_amplitude_profile(field)
    dist = np.abs(field.grid.sites - center)
    with np.errstate(divide="ignore"):
        logs = np.log(amp)
    try:
        lam_eff, _ = validation.fit_decay_profile(amp, center)
        peak = float(np.max(amp))
        mask = (amp >= 1e-12 * peak) & (amp <= 1e-2 * peak)
        intercept = float(np.mean(logs[mask] + lam_eff * dist[mask]))
        fit = intercept - lam_eff * dist
    except (validation.InsufficientTailError, ValueError):
        fit = np.full_like(dist, float("nan"))
    order = np.argsort(dist, kind="stable")
    for idx in order:
        yield float(dist[idx]), float(logs[idx]), float(fit[idx])


def emit_outputs(result: BreatherResult, out_dir: str, config_text: str,
                 trajectory=None, dump_nu: bool = False) -> str:
    """Write the manifest and CSV artifacts; returns the manifest path."""
    os.makedirs(out_dir, exist_ok=True)
    grid = result.field.grid
    sites = grid.sites
    artifacts = []

    _write_csv(os.path.join(out_dir, "trace.csv"),
               ["iter", "fp_residual", "x0_norm"],
               [(it, res, nrm) for it, res, nrm in result.trace])
    artifacts.append("trace.csv")

    amp = max_amplitude_profile(result.field)
    with np.errstate(divide="ignore"):
        log_amp = np.log(amp)
    _write_csv(os.path.join(out_dir, "profile.csv"),
               ["n", "max_abs_amplitude", "log_amplitude"],
               [(int(sites[i]), float(amp[i]), float(log_amp[i]))
                for i in range(grid.n_sites)])
    artifacts.append("profile.csv")

    samples = synthesize(result.field)
    _write_csv(os.path.join(out_dir, "samples.csv"),
               ["n", "t_index", "value"],
               ((int(sites[i]), j, float(samples[i, j]))
                for i in range(grid.n_sites) for j in range(samples.shape[1])))
    artifacts.append("samples.csv")

    _write_csv(os.path.join(out_dir, "spectrum.csv"),
               ["n", "m", "re", "im"],
               ((int(sites[i]), int(m), float(result.field.coeffs[i, m - 1].real),
                 float(result.field.coeffs[i, m - 1].imag))
                for i in range(grid.n_sites) for m in grid.harmonics))
    artifacts.append("spectrum.csv")

    _write_csv(os.path.join(out_dir, "decay.csv"),
               ["abs_n", "log_amp", "fit_line"],
               decay_rows(result.field, result.parity))
    artifacts.append("decay.csv")

    if dump_nu:
        _write_csv(os.path.join(out_dir, "nu_table.csv"), ["m", "j", "nu"],
                   Multiplier.build(grid).rows())
        artifacts.append("nu_table.csv")

    manifest = build_manifest(result, config_text, artifacts, trajectory)
    path = os.path.join(out_dir, "manifest.json")
    _atomic_write(path, json.dumps(manifest, indent=2, allow_nan=False) + "\n")
    return path


def load_manifest(path: str) -> dict:
    with open(path) as handle:
        return json.load(handle)


def field_from_spectrum_csv(path: str, grid: GridSpec) -> SpectralField:
    coeffs = np.zeros((grid.n_sites, grid.n_harmonics), dtype=complex)
    half = grid.n_sites // 2
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        next(reader)
        for n, m, re_part, im_part in reader:
            coeffs[int(n) + half, int(m) - 1] = float(re_part) + 1j * float(im_part)
    return SpectralField(grid, coeffs)


def _probe_seed() -> int:
    raw = os.environ.get("BREATHER_FORGE_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        return 0


def _read_config_text(args) -> str:
    if getattr(args, "config", None):
        with open(args.config) as handle:
            return handle.read()
    return ""


_OVERRIDE_MAP = {
    "omega": "grid.omega",
    "lam": "weight.lambda",
    "parity": "solver.parity",
    "cubic": "potential.cubic",
    "quartic": "potential.quartic",
    "n_sites": "grid.n_sites",
    "harmonics": "grid.n_harmonics",
    "time_samples": "grid.n_time_samples",
    "strategy": "solver.strategy",
    "damping": "solver.damping",
    "accel_depth": "solver.accel_depth",
    "tol_residual": "solver.tol_residual",
    "max_iter": "solver.max_iter",
    "seed_amplitude": "solver.seed_amplitude",
    "seed_width": "solver.seed_width",
}


def _config_from_args(args) -> SolverConfig:
    text = _read_config_text(args)
    entries = _parse_lines(text)
    values = {k: v for k, (v, _) in entries.items()}
    linenos = {k: ln for k, (_, ln) in entries.items()}
    for attr, key in _OVERRIDE_MAP.items():
        value = getattr(args, attr, None)
        if value is not None:
            values[key] = str(value)
            linenos.pop(key, None)
    return build_config(values, linenos)


def _print_warnings(caught):
    for item in caught:
        print(f"warning: {item.message}", file=sys.stderr)


def _status_exit(status: str) -> int:
    if status == STATUS_CONVERGED:
        return 0
    if status == "resonance":
        return 3
    return 2


def _cmd_solve(args) -> int:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ConfigWarning)
        config = _config_from_args(args)
    _print_warnings(caught)
    try:
        result = solve(config)
    except ResonanceError as exc:
        print(f"resonance: {exc}", file=sys.stderr)
        return 3
    trajectory = None
    if args.integrate_periods:
        try:
            trajectory = validation.integrate_trajectory(
                result.field, config.potential, args.integrate_periods,
                args.steps_per_period)
        except validation.BlowUpError as exc:
            print(f"trajectory blow-up: {exc}", file=sys.stderr)
    manifest_path = emit_outputs(result, args.out, serialize_config(config),
                                 trajectory, dump_nu=args.dump_nu)
    print(f"status = {result.status}")
    print(f"iterations = {result.iterations}")
    print(f"fp_residual = {result.fp_residual!r}")
    print(f"x0_norm = {result.x0_norm!r}")
    print(f"decay_fit = {result.decay_fit!r}")
    if result.bounds is not None:
        print(f"r_max = {result.bounds.r_max!r}")
        print(f"r_crit = {result.bounds.r_crit!r}")
    print(f"manifest = {manifest_path}")
    return _status_exit(result.status)


def _cmd_sweep(args) -> int:
    if args.omega is None:
        args.omega = args.omega_from
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ConfigWarning)
        config = _config_from_args(args)
    _print_warnings(caught)
    results = continuation_sweep(config, args.omega_from, args.omega_to, args.steps)
    os.makedirs(args.out, exist_ok=True)
    rows = []
    for idx, res in enumerate(results):
        point_dir = os.path.join(args.out, f"point_{idx:03d}")
        cfg_echo = serialize_config(config).replace(
            f"grid.omega = {config.grid.omega!r}", f"grid.omega = {res.omega!r}")
        emit_outputs(res, point_dir, cfg_echo)
        rows.append((res.omega, res.status, res.x0_norm, res.fp_residual))
        print(f"omega = {res.omega:.6f}  status = {res.status}  x0_norm = {res.x0_norm!r}")
    _write_csv(os.path.join(args.out, "sweep.csv"),
               ["omega", "status", "x0_norm", "fp_residual"], rows)
    return 0


def _verify_checks(manifest: dict, manifest_dir: str):
    """Yield (name, ok, detail) triples for every verification check."""
    config = parse_config(manifest["config_echo"])
    grid = config.grid
    field = field_from_spectrum_csv(os.path.join(manifest_dir, "spectrum.csv"), grid)
    rec = manifest["result"]

    yield "schema_version", manifest.get("schema_version") == SCHEMA_VERSION, \
        f"schema_version = {manifest.get('schema_version')}"

    norm0 = x0_norm(field, config.weight)
    stored = rec["x0_norm"]
    ok = stored is not None and abs(norm0 - stored) <= 1e-12 * max(1.0, abs(stored))
    yield "x0_norm_matches", ok, f"recomputed {norm0!r} vs stored {stored!r}"

    project = parity_projector(config.parity)
    dev = x0_norm(field.with_coeffs(field.coeffs - project(field).coeffs), config.weight)
    rel_dev = dev / norm0 if norm0 > 0.0 else dev
    yield "parity_relation", rel_dev <= 1e-12, f"relative deviation {rel_dev!r}"

    peak = float(np.max(np.abs(synthesize(field)))) or 1.0
    means = float(np.max(np.abs(time_means(field))))
    yield "zero_time_mean", means <= 1e-13 * peak, f"max site mean {means!r}"

    if rec["status"] == STATUS_CONVERGED:
        strong = validation.strong_residual(field, config.potential, config.weight)
        limit = 10.0 * config.tol_residual * x2_norm(field, config.weight)
        yield "strong_residual", strong <= limit, f"{strong!r} <= {limit!r}"

        floor = validation.boundary_floor(field)
        yield "boundary_floor", floor <= 1e-10, f"edge/peak ratio {floor!r}"

    if manifest.get("bounds") is not None:
        report = validation.bounds_report(grid.omega, config.weight,
                                          config.potential, norm0)
        stored_b = manifest["bounds"]
        ok = (abs(report.r_max - stored_b["r_max"]) <= 1e-14 * max(1.0, report.r_max)
              and abs(report.r_crit - stored_b["r_crit"]) <= 1e-14 * max(1.0, report.r_crit))
        yield "bounds_arithmetic", ok, \
            f"r_max {report.r_max!r}, r_crit {report.r_crit!r}"

    probe_max, exact = probe_operator_norm(grid.omega, grid, trials=25,
                                           seed=_probe_seed())
    yield "operator_norm_bound", probe_max <= exact + 1e-12, \
        f"probe {probe_max!r} vs exact {exact!r}"

    rerun = solve(config)
    with open(os.path.join(manifest_dir, "trace.csv"), newline="") as handle:
        stored_trace = handle.read()
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["iter", "fp_residual", "x0_norm"])
    for it, res, nrm in rerun.trace:
        writer.writerow([it, repr(res), repr(nrm)])
    yield "reproducible_trace", buffer.getvalue() == stored_trace, \
        f"{len(rerun.trace)} iterates compared bit-identically"


def _cmd_verify(args) -> int:
    manifest = load_manifest(args.manifest)
    manifest_dir = os.path.dirname(os.path.abspath(args.manifest))
    all_ok = True
    for name, ok, detail in _verify_checks(manifest, manifest_dir):
        all_ok &= ok
        print(f"CHECK {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    return 0 if all_ok else 1


def _cmd_integrate(args) -> int:
    manifest = load_manifest(args.manifest)
    config = parse_config(manifest["config_echo"])
    manifest_dir = os.path.dirname(os.path.abspath(args.manifest))
    field = field_from_spectrum_csv(os.path.join(manifest_dir, "spectrum.csv"),
                                    config.grid)
    try:
        report = validation.integrate_trajectory(field, config.potential,
                                                 args.periods, args.steps_per_period)
    except validation.BlowUpError as exc:
        print(f"trajectory blow-up: {exc}", file=sys.stderr)
        return 3
    out_dir = args.out or manifest_dir
    os.makedirs(out_dir, exist_ok=True)
    _atomic_write(os.path.join(out_dir, "trajectory.json"),
                  json.dumps(_json_safe(trajectory_dict(report)), indent=2) + "\n")
    print(f"period_return_error = {report.period_return_error!r}")
    print(f"energy_drift = {report.energy_drift!r}")
    print(f"momentum_drift = {report.momentum_drift!r}")
    return 0


def _cmd_bounds(args) -> int:
    omega = math.sqrt(args.omega2) if args.omega2 is not None else args.omega
    if omega is None:
        print("bounds: supply --omega or --omega2", file=sys.stderr)
        return 1
    potential = PotentialSpec(cubic=args.cubic or 0.0,
                              quartic=args.quartic if args.quartic is not None else args.beta or 0.0)
    try:
        report = validation.bounds_report(omega, WeightSpec(args.lam or 0.0),
                                          potential, args.x0_norm or 0.0)
    except MixedPotentialError as exc:
        print(f"bounds: {exc}", file=sys.stderr)
        return 3
    print(f"r_max = {report.r_max!r}")
    print(f"r_crit = {report.r_crit!r}")
    print(f"nonres0_ok = {report.nonres0_ok}")
    print(f"nonres_ok = {report.nonres_ok}")
    if args.x0_norm is not None:
        print(f"in_ring = {report.in_ring}")
    return 0


def _add_config_flags(parser):
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--omega", type=float, help="breather frequency (> 2 needed)")
    parser.add_argument("--lambda", dest="lam", type=float, help="weight decay rate")
    parser.add_argument("--parity", choices=["even", "odd"])
    parser.add_argument("--cubic", type=float, help="cubic force coefficient")
    parser.add_argument("--quartic", type=float, help="quartic force coefficient")
    parser.add_argument("--n-sites", dest="n_sites", type=int)
    parser.add_argument("--harmonics", dest="harmonics", type=int)
    parser.add_argument("--time-samples", dest="time_samples", type=int)
    parser.add_argument("--strategy", choices=["picard", "newton", "hybrid"])
    parser.add_argument("--damping", type=float)
    parser.add_argument("--accel-depth", dest="accel_depth", type=int)
    parser.add_argument("--tol-residual", dest="tol_residual", type=float)
    parser.add_argument("--max-iter", dest="max_iter", type=int)
    parser.add_argument("--seed-amplitude", dest="seed_amplitude", type=float)
    parser.add_argument("--seed-width", dest="seed_width", type=float)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="breather-forge",
        description="Spectral fixed-point solver and verifier for lattice breathers")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve for a breather and emit artifacts")
    _add_config_flags(p_solve)
    p_solve.add_argument("--out", default="out")
    p_solve.add_argument("--dump-nu", action="store_true",
                         help="also dump the multiplier table CSV")
    p_solve.add_argument("--integrate-periods", type=int, default=0,
                         help="follow up with a trajectory integration")
    p_solve.add_argument("--steps-per-period", type=int, default=512)
    p_solve.set_defaults(func=_cmd_solve)

    p_sweep = sub.add_parser("sweep", help="frequency continuation sweep")
    _add_config_flags(p_sweep)
    p_sweep.add_argument("--omega-from", type=float, required=True)
    p_sweep.add_argument("--omega-to", type=float, required=True)
    p_sweep.add_argument("--steps", type=int, required=True)
    p_sweep.add_argument("--out", default="out")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_verify = sub.add_parser("verify", help="re-check a manifest from a prior solve")
    p_verify.add_argument("--manifest", required=True)
    p_verify.set_defaults(func=_cmd_verify)

    p_int = sub.add_parser("integrate", help="symplectic integration of a stored solution")
    p_int.add_argument("--manifest", required=True)
    p_int.add_argument("--periods", type=int, default=10)
    p_int.add_argument("--steps-per-period", type=int, default=512)
    p_int.add_argument("--out")
    p_int.set_defaults(func=_cmd_integrate)

    p_bounds = sub.add_parser("bounds", help="print the existence bound arithmetic")
    p_bounds.add_argument("--omega", type=float)
    p_bounds.add_argument("--omega2", type=float, help="squared frequency")
    p_bounds.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p_bounds.add_argument("--cubic", "--alpha", dest="cubic", type=float)
    p_bounds.add_argument("--quartic", type=float)
    p_bounds.add_argument("--beta", type=float, help="alias for --quartic")
    p_bounds.add_argument("--x0-norm", dest="x0_norm", type=float,
                          help="report ring membership for this norm")
    p_bounds.set_defaults(func=_cmd_bounds)
    return parser


def run_command(argv) -> int:
    """Parse argv and dispatch; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ResonanceError as exc:
        print(f"resonance: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))
