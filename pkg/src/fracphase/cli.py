"""Command-line driver: ``simulate``, ``certify`` and ``sweep``.

Exit codes: 0 success, 1 invalid input/config, 2 solver blow-up,
3 a dissipation flag or a certification failed.
"""

from __future__ import annotations

import argparse
import copy
import csv
import itertools
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .config import RunConfig, SCHEMA_VERSION
from .energy import dissipation_report
from .errors import BlowUp, ConfigError, FracPhaseError
from .io import write_manifest, write_snapshot
from .kernelcert import (
    abel_kernel,
    certify_scaled,
    check_p_properties,
    kappa_energy_matrix,
    kappa_weighted_matrix,
    monotone_cholesky,
    mu_energy_kernel,
    sample_kernel_matrix,
    verify_kernel_conditions,
    weighted_monotone_kernel,
)
from .solver import run
from .spectral import SpectralWorkspace
from .weights import named_weight

log = logging.getLogger("fracphase")

EXIT_OK, EXIT_INPUT, EXIT_BLOWUP, EXIT_FLAG = 0, 1, 2, 3


# simulate -------------------------------------------------------------------


def simulate(cfg: RunConfig, out_dir: str | Path | None = None) -> tuple[int, dict]:
    """Run one configured experiment and write its outputs. Returns (exit code, summary)."""
    out = Path(out_dir if out_dir is not None else cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()

    grid = cfg.grid.grid()
    ws = SpectralWorkspace(grid, dealias=cfg.grid.dealias)
    params = cfg.model.params()
    tgrid = cfg.time.time_grid(params.alpha)
    phi0 = cfg.initial.field(grid, params.epsilon)
    omegas = cfg.weight_functions()

    (out / "config.json").write_text(cfg.dumps() + "\n")
    try:
        traj = run(phi0, params, tgrid, ws, extrapolate=cfg.model.extrapolate)
    except BlowUp as exc:
        summary = {"passed": False, "blowup_step": exc.step, "error": str(exc)}
        (out / "error.json").write_text(json.dumps(summary, indent=2) + "\n")
        return EXIT_BLOWUP, summary

    report = dissipation_report(traj, omegas, params)
    (out / "energy.csv").write_text(report.to_csv())
    summary = report.summary()
    summary["config_hash"] = cfg.hash()
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")

    snap_dir = out / "snapshots"
    snap_dir.mkdir(exist_ok=True)
    written = ["config.json", "energy.csv", "summary.json"]
    stride = cfg.output.report_stride
    indices = sorted(set(range(0, len(traj), stride)) | {len(traj) - 1})
    for k in indices:
        name = f"snapshots/field_{k:06d}.bin"
        write_snapshot(out / name, grid, float(traj.times[k]), traj.fields[k])
        written.append(name)

    write_manifest(out, cfg.hash(), __version__, time.perf_counter() - started, written)
    return (EXIT_OK if report.passed else EXIT_FLAG), summary


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        cfg = RunConfig.load(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    code, summary = simulate(cfg, args.output)
    if code == EXIT_BLOWUP:
        print(summary["error"], file=sys.stderr)
    else:
        print(json.dumps({"passed": summary["passed"], "E0": summary["E0"], "E_final": summary["E_final"]}))
    return code


# certify --------------------------------------------------------------------


def _parse_points(text: str | None, n_random: int | None, seed: int, lo: float, hi: float) -> np.ndarray:
    if text:
        try:
            pts = np.array([float(v) for v in text.split(",") if v.strip()])
        except ValueError:
            raise ConfigError(f"--points: cannot parse {text!r}") from None
    elif n_random:
        rng = np.random.Generator(np.random.Philox(seed))
        pts = np.sort(rng.uniform(lo, hi, size=n_random))
    else:
        raise ConfigError("need --points or --random")
    if pts.size < 2 or np.any(np.diff(pts) <= 0):
        raise ConfigError("--points: need at least two strictly increasing values")
    return pts


def _default_shift(pts: np.ndarray, hi: float) -> float:
    gap = float(np.min(np.diff(pts)))
    return min(0.5 * gap, 0.5 * (hi - pts[-1]))


def _load_matrix(path: str) -> np.ndarray:
    p = Path(path)
    try:
        if p.suffix == ".json":
            data = json.loads(p.read_text())
            data = data["matrix"] if isinstance(data, dict) else data
            return np.asarray(data, dtype=float)
        return np.atleast_2d(np.loadtxt(p, delimiter="," if p.suffix == ".csv" else None))
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read matrix file {path}: {exc}") from None


def certify(args: argparse.Namespace) -> tuple[int, dict]:
    target = args.target
    result: dict[str, Any] = {"kernel": target}
    scaling = None
    if target == "abel":
        pts = _parse_points(args.points, args.random, args.seed, 0.0, 10.0)
        kernel = abel_kernel(args.scale)
        S = sample_kernel_matrix(kernel, pts)
        result["kernel_conditions"] = verify_kernel_conditions(kernel, pts).to_dict()
    elif target == "kappa-weighted":
        pts = _parse_points(args.points, args.random, args.seed, 0.02, 0.9)
        if not (0 < pts[0] and pts[-1] < 1):
            raise ConfigError("--points: kappa-weighted needs points in (0, 1)")
        omega = named_weight(args.weight, args.alpha)
        shift = args.shift if args.shift is not None else _default_shift(pts, 1.0)
        S, scaling = kappa_weighted_matrix(pts, omega, args.alpha, shift)
        result.update(weight=args.weight, alpha=args.alpha, shift=shift)
        result["kernel_conditions"] = verify_kernel_conditions(
            weighted_monotone_kernel(omega, args.alpha), pts).to_dict()
    elif target == "kappa-energy":
        pts = _parse_points(args.points, args.random, args.seed, 0.02 * args.t, 0.9 * args.t)
        if not (0 < pts[0] and pts[-1] < args.t):
            raise ConfigError("--points: kappa-energy needs points in (0, t)")
        shift = args.shift if args.shift is not None else _default_shift(pts, args.t)
        S, scaling = kappa_energy_matrix(pts, args.t, args.alpha, shift)
        result.update(alpha=args.alpha, t=args.t, shift=shift)
        result["kernel_conditions"] = verify_kernel_conditions(mu_energy_kernel(args.alpha, args.t), pts).to_dict()
    else:
        path = args.matrix if target == "custom-matrix" else target
        if not path:
            raise ConfigError("custom-matrix needs --matrix FILE")
        S = _load_matrix(path)
        pts = None
        result["kernel"] = "custom-matrix"
        result["matrix_file"] = str(path)

    result["points"] = None if pts is None else pts.tolist()
    result["matrix"] = S.tolist()
    try:
        if scaling is None:
            report = check_p_properties(S, args.tol)
        else:
            report = check_p_properties(S / np.outer(scaling, scaling), args.tol)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    result["property_report"] = report.to_dict()
    if not report.all_hold:
        result["certified"] = False
        result["certificate"] = None
        return EXIT_FLAG, result
    try:
        if scaling is None:
            cert = monotone_cholesky(S, args.tol)
        else:
            _, cert = certify_scaled(S, scaling, args.tol)
    except FracPhaseError as exc:
        result["certified"] = False
        result["certificate"] = None
        result["error"] = str(exc)
        return EXIT_FLAG, result
    result["certificate"] = cert.to_dict()
    result["certified"] = bool(cert.valid)
    return (EXIT_OK if cert.valid else EXIT_FLAG), result


def cmd_certify(args: argparse.Namespace) -> int:
    try:
        code, result = certify(args)
    except (ConfigError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(json.dumps(result, indent=2))
    return code


# sweep ----------------------------------------------------------------------


def _set_path(data: dict, dotted: str, value: Any) -> None:
    *parents, leaf = dotted.split(".")
    node = data
    for k in parents:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise ConfigError(f"parameters.{dotted}: {k} is not a section")
    node[leaf] = value


def expand_sweep(data: Any) -> tuple[list[dict], list[str], Path]:
    if not isinstance(data, dict):
        raise ConfigError("sweep config: expected a JSON object")
    unknown = sorted(set(data) - {"schema_version", "base", "parameters", "output"})
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown key")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"schema_version: expected {SCHEMA_VERSION}")
    base = data.get("base")
    params = data.get("parameters")
    if not isinstance(base, dict) or not isinstance(params, dict) or not params:
        raise ConfigError("sweep config needs 'base' and a non-empty 'parameters' object")
    for key, values in params.items():
        if not isinstance(values, list) or not values:
            raise ConfigError(f"parameters.{key}: expected a non-empty list")
    out = data.get("output", {})
    if not isinstance(out, dict) or set(out) - {"directory"}:
        raise ConfigError("output: only 'directory' is allowed")
    root = Path(out.get("directory", "sweep_out"))
    keys = list(params)
    runs = []
    for i, combo in enumerate(itertools.product(*(params[k] for k in keys))):
        cfg = copy.deepcopy(base)
        cfg.setdefault("schema_version", SCHEMA_VERSION)
        for k, v in zip(keys, combo):
            _set_path(cfg, k, v)
        cfg.setdefault("output", {})
        cfg["output"]["directory"] = str(root / f"run_{i:03d}")
        RunConfig.from_dict(cfg)  # fail fast on the whole sweep
        runs.append(cfg)
    return runs, keys, root


def _sweep_worker(cfg_dict: dict) -> tuple[int, dict]:
    cfg = RunConfig.from_dict(cfg_dict)
    return simulate(cfg)


def _lookup(d: dict, dotted: str) -> Any:
    for k in dotted.split("."):
        d = d[k]
    return d


def sweep(data: Any, max_workers: int | None = None) -> int:
    runs, keys, root = expand_sweep(data)
    root.mkdir(parents=True, exist_ok=True)
    if max_workers is None:
        max_workers = int(os.environ.get("FRACPHASE_THREADS", os.cpu_count() or 1))
    max_workers = max(1, min(max_workers, len(runs)))
    if max_workers == 1:
        results = [_sweep_worker(r) for r in runs]
    else:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(_sweep_worker, runs))
    with open(root / "summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["run"] + keys + ["exit_code", "passed", "E0", "E_final"])
        for i, (cfg, (code, summary)) in enumerate(zip(runs, results)):
            writer.writerow([f"run_{i:03d}"] + [_lookup(cfg, k) for k in keys]
                            + [code, summary.get("passed"), summary.get("E0", ""), summary.get("E_final", "")])
    return max(code for code, _ in results)


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        data = json.loads(Path(args.config).read_text())
        return sweep(data)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_INPUT


# entry point ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fracphase", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one configured experiment")
    sim.add_argument("config")
    sim.add_argument("-o", "--output", help="override output.directory")
    sim.set_defaults(func=cmd_simulate)

    cert = sub.add_parser("certify", help="certify positive definiteness of a sampled kernel or matrix")
    cert.add_argument("target", help="abel | kappa-weighted | kappa-energy | custom-matrix | <matrix file>")
    cert.add_argument("--points", help="comma-separated sorted sample points")
    cert.add_argument("--random", type=int, help="draw this many random points instead")
    cert.add_argument("--seed", type=int, default=0)
    cert.add_argument("--alpha", type=float, default=0.5)
    cert.add_argument("--weight", default="beta", choices=["beta", "power", "linear"])
    cert.add_argument("--t", type=float, default=1.0, help="final time for kappa-energy")
    cert.add_argument("--scale", type=float, default=1.0, help="Abel kernel rate")
    cert.add_argument("--shift", type=float, help="diagonal regularization for singular kernels")
    cert.add_argument("--tol", type=float, default=1e-12)
    cert.add_argument("--matrix", help="matrix file for custom-matrix (.json, .csv or whitespace text)")
    cert.set_defaults(func=cmd_certify)

    sw = sub.add_parser("sweep", help="cartesian parameter sweep over a base config")
    sw.add_argument("config")
    sw.set_defaults(func=cmd_sweep)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
