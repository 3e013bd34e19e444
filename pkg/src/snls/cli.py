"""Command-line harness: simulate, diagnose, select, bounds, sweep.

Exit statuses: 0 clean, 2 bad configuration or arguments, 3 blow-up-guard
abort, 4 completed with a boundary-mass breach.  The environment variable
SNLS_RUN_ROOT, when set, resolves relative output directories.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import bounds as bd
from . import checkpoints as ckpt
from . import intervals as iv
from .config import ConfigError, RunConfig
from .evolve import Trajectory, evolve, rebuild_trajectory
from .radial import RadialField

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_BREACH = 4


def _resolve_out(path_str: str) -> Path:
    p = Path(path_str)
    root = os.environ.get("SNLS_RUN_ROOT")
    if root and not p.is_absolute():
        p = Path(root) / p
    return p


def _load_constants(args, cfg: RunConfig | None = None) -> iv.ProofConstants:
    if getattr(args, "constants", None):
        with open(args.constants) as f:
            return iv.ProofConstants(**json.load(f))
    if cfg is not None:
        return cfg.proof_constants()
    return iv.ProofConstants()


def run_simulation(cfg: RunConfig, out_dir: Path, resume: bool = False) -> tuple[Trajectory, int]:
    """Run one cell, streaming crash-safe outputs into out_dir."""
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = out_dir / "manifest.json"
    frames_path = out_dir / "frames.snls"
    csv_path = out_dir / "densities.csv"
    ctl = cfg.controller()
    grid = cfg.grid()
    t_a, t_b = cfg.t_span

    t_start, u_start = t_a, cfg.build_initial_field()
    append = False
    if resume and frames_path.exists():
        manifest = ckpt.read_manifest(manifest_path)
        if manifest["config"] != cfg.to_dict():
            raise ConfigError("resume: config does not match the run directory manifest")
        old_grid, old_times, old_frames = ckpt.read_trajectory_frames(frames_path)
        if old_grid != grid:
            raise ConfigError("resume: grid mismatch in frame log")
        if old_times.size:
            ckpt.truncate_trajectory_frames(frames_path, old_times.size)
            # rebuild the density log deterministically from the intact frames
            rebuilt = rebuild_trajectory(grid, old_times, old_frames, ctl)
            with open(csv_path, "w") as f:
                f.write(ckpt.density_csv_header() + "\n")
                for m, t in enumerate(old_times):
                    stats = {k: rebuilt.densities[k][m] for k in rebuilt.densities}
                    f.write(ckpt.density_csv_row(float(t), stats) + "\n")
            t_start = float(old_times[-1])
            u_start = RadialField(grid, old_frames[-1])
            append = True

    wall_start = time.monotonic()
    manifest = {
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "status": "running",
        "started_at": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    ckpt.write_manifest(manifest_path, manifest)

    writer = ckpt.TrajectoryFrameWriter(frames_path, grid, append=append)
    csv_f = open(csv_path, "a" if append else "w")
    if not append:
        csv_f.write(ckpt.density_csv_header() + "\n")

    def on_frame(t, field, stats):
        if append and t <= t_start + 1e-12 * max(1.0, abs(t_start)):
            return  # initial frame of a resumed segment is already on disk
        writer.append(t, field.values)
        csv_f.write(ckpt.density_csv_row(t, stats) + "\n")
        csv_f.flush()
        ckpt.write_field(out_dir / "checkpoint.snls", field)

    try:
        if t_start >= t_b - 1e-12 * max(1.0, abs(t_b)):
            grid2, times, frames = ckpt.read_trajectory_frames(frames_path)
            traj = rebuild_trajectory(grid2, times, frames, ctl, provenance={"config": cfg.to_dict()})
        else:
            traj = evolve(
                u_start, (t_start, t_b), ctl,
                provenance={"config": cfg.to_dict()},
                on_frame=on_frame,
                snap_anchor=t_a,
            )
            if append:
                grid2, times, frames = ckpt.read_trajectory_frames(frames_path)
                traj = rebuild_trajectory(grid2, times, frames, ctl,
                                          provenance={"config": cfg.to_dict()}, status=traj.status)
    finally:
        writer.close()
        csv_f.close()

    manifest.update({
        "status": traj.status,
        "boundary_breach": traj.boundary_breach,
        "wall_time_s": time.monotonic() - wall_start,
        "n_frames": int(traj.times.size),
    })
    ckpt.write_manifest(manifest_path, manifest)
    if traj.status != "ok":
        return traj, EXIT_BLOWUP
    if traj.boundary_breach:
        return traj, EXIT_BREACH
    return traj, EXIT_OK


def load_run(run_dir: Path) -> tuple[RunConfig, Trajectory]:
    manifest = ckpt.read_manifest(run_dir / "manifest.json")
    cfg = RunConfig.from_dict(manifest["config"])
    grid, times, frames = ckpt.read_trajectory_frames(run_dir / "frames.snls")
    if times.size < 2:
        raise ValueError(f"incomplete trajectory in {run_dir}: {times.size} frame(s)")
    status = manifest.get("status", "ok")
    traj = rebuild_trajectory(grid, times, frames, cfg.controller(),
                              provenance={"config": cfg.to_dict()}, status=status)
    return cfg, traj


def diagnose_trajectory(traj: Trajectory, constants: iv.ProofConstants,
                        e_mode: str = "measure", e_declared: float | None = None) -> dict:
    """The full interval pipeline: partition, classify, scan, select, audit."""
    if e_mode == "declare":
        E = float(e_declared)
    else:
        E = float(traj.densities["H_sc"].max())
    eta = constants.eta(E)
    decomp = iv.partition_trajectory(traj, eta)
    decomp = iv.classify(decomp, traj, constants)

    total = float(np.trapezoid(traj.densities["s_density"], traj.times))
    sum_masses = float(sum(decomp.masses))
    rel_err = abs(total - sum_masses) / max(total, 1e-300)
    n_tail = len(decomp.indices(iv.TAIL))
    J = len(decomp) - n_tail
    B = len(decomp.indices(iv.EXCEPTIONAL))
    G = len(decomp.indices(iv.UNEXCEPTIONAL))

    certs = iv.concentration_scan(traj, decomp, constants)
    lm = decomp.linear_masses
    strich = []
    for m_idx in (traj.frame_index(decomp.span[0]), traj.frame_index(decomp.span[1])):
        tot_lin = float(np.trapezoid(iv.linear_density_series(traj, m_idx), traj.times))
        hsc = float(traj.densities["H_sc"][m_idx])
        strich.append(tot_lin ** (1.0 / 15.0) / max(hsc, 1e-300))

    selection = audit = None
    if G:
        sel = iv.recursive_select(decomp, constants)
        iv.check_selection_invariants(decomp, sel)
        selection = sel.to_json()
        audit = iv.mass_bracketing_audit(traj, decomp, sel, constants, E).to_json()

    return {
        "constants": constants.to_dict(),
        "E": E,
        "e_mode": e_mode,
        "eta": eta,
        "counts": {"J": J, "B": B, "G": G, "tail": n_tail},
        "all_exceptional": G == 0,
        "exceptional_ceiling": float(constants.C * max(E, 1.0) ** 15 / eta**constants.C1),
        "strichartz_ratios": strich,
        "linear_masses": [list(pair) for pair in (lm or [])],
        "reintegration": {
            "total": total,
            "sum_masses": sum_masses,
            "rel_err": rel_err,
            "two_J_eta": 2.0 * max(J, 1) * eta,
        },
        "decomposition": decomp.to_json(),
        "certificates": [vars(c) for c in certs],
        "selection": selection,
        "audit": audit,
        "status": traj.status,
        "boundary_breach": traj.boundary_breach,
    }


def _cmd_simulate(args) -> int:
    try:
        cfg = RunConfig.load(args.config)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = _resolve_out(args.out or cfg.out_dir)
    try:
        traj, code = run_simulation(cfg, out_dir, resume=args.resume)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"simulate: {out_dir} status={traj.status} frames={traj.times.size} "
          f"breach={traj.boundary_breach}")
    return code


def _cmd_diagnose(args) -> int:
    run_dir = Path(args.run_dir)
    try:
        cfg, traj = load_run(run_dir)
    except (OSError, ValueError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    constants = _load_constants(args, cfg)
    report = diagnose_trajectory(traj, constants, cfg.e_mode, cfg.e_declared)
    out = Path(args.out) if args.out else run_dir / "diagnose.json"
    out.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    c = report["counts"]
    print(f"diagnose: J={c['J']} B={c['B']} G={c['G']} eta={report['eta']:.4g} "
          f"reintegration_rel_err={report['reintegration']['rel_err']:.2e} -> {out}")
    return EXIT_OK


def _cmd_select(args) -> int:
    with open(args.instance) as f:
        decomp = iv.IntervalDecomposition.from_json(json.load(f))
    constants = _load_constants(args)
    sel = iv.recursive_select(decomp, constants, removal_span=args.removal_span)
    iv.check_selection_invariants(decomp, sel)
    payload = iv.selection_to_json_str(sel)
    if args.out:
        Path(args.out).write_text(payload + "\n")
    print(payload)
    return EXIT_OK


def _cmd_bounds(args) -> int:
    constants = _load_constants(args)
    report = bd.build_bound_report(args.E, args.M, args.delta, constants)
    payload = json.dumps(report.to_json(), indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(payload + "\n")
    print(payload)
    if args.monitor:
        run_dir = Path(args.monitor)
        cfg, traj = load_run(run_dir)
        plan = report.plan
        records = bd.bootstrap_monitor(
            traj, "theorem1",
            {"log_R0": plan.R0.log_value, "delta": args.delta, "E0": max(args.E, 1.0),
             "m_ceiling": plan.m_ceiling},
            constants,
        )
        trail = run_dir / "monitor.jsonl"
        with open(trail, "w") as f:
            for rec in records:
                f.write(json.dumps(rec, sort_keys=True) + "\n")
        print(f"bootstrap monitor: {len(records)} records -> {trail}", file=sys.stderr)
    return EXIT_OK


def _sweep_cell(payload) -> dict:
    base, overrides, cell_dir = payload
    row = dict(overrides)
    try:
        cfg = RunConfig.from_dict({**base, **overrides, "out_dir": cell_dir})
        traj, code = run_simulation(cfg, Path(cell_dir))
        report = diagnose_trajectory(traj, cfg.proof_constants(), cfg.e_mode, cfg.e_declared)
        row.update({
            "status": traj.status,
            "exit": code,
            "E": report["E"],
            "eta": report["eta"],
            "J": report["counts"]["J"],
            "B": report["counts"]["B"],
            "G": report["counts"]["G"],
            "K": (report["selection"] or {}).get("K", 0),
            "error": "",
        })
    except Exception as exc:  # per-cell isolation: one failure must not kill the grid
        row.update({"status": "error", "exit": -1, "E": "", "eta": "", "J": "",
                    "B": "", "G": "", "K": "", "error": str(exc)})
    return row


def _cmd_sweep(args) -> int:
    try:
        with open(args.config) as f:
            spec = json.load(f)
        base = spec["base"]
        sweep = spec["sweep"]
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: sweep config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = _resolve_out(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    keys = sorted(sweep)
    cells = []
    for combo in itertools.product(*(sweep[k] for k in keys)):
        overrides = dict(zip(keys, combo))
        tag = "_".join(f"{k}={overrides[k]}" for k in keys)
        cells.append((base, overrides, str(out_dir / f"cell_{tag}")))
    cells.sort(key=lambda c: tuple(str(c[1][k]) for k in keys))

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_cell, cells))
    else:
        rows = [_sweep_cell(c) for c in cells]

    cols = keys + ["status", "exit", "E", "eta", "J", "B", "G", "K", "error"]
    csv_path = out_dir / "sweep.csv"
    with open(csv_path, "w") as f:
        f.write(",".join(cols) + "\n")
        for row in rows:
            f.write(",".join(str(row.get(c, "")) for c in cols) + "\n")
    print(f"sweep: {len(rows)} cells -> {csv_path}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="snls", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one evolution cell")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--resume", action="store_true")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("diagnose", help="interval pipeline on a finished run")
    p.add_argument("run_dir")
    p.add_argument("--constants", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_diagnose)

    p = sub.add_parser("select", help="recursive chain selection on an instance file")
    p.add_argument("instance")
    p.add_argument("--constants", default=None)
    p.add_argument("--removal-span", default="window", choices=["window", "left_of_selected"])
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("bounds", help="evaluate the explicit bound formulas")
    p.add_argument("--E", type=float, required=True)
    p.add_argument("--M", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=1e-6)
    p.add_argument("--constants", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--monitor", default=None, metavar="RUN_DIR",
                   help="also stream a bootstrap audit trail for this run as JSON-lines")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("sweep", help="parallel simulate+diagnose over a parameter grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_sweep)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
