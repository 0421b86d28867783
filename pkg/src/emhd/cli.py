"""Batch experiment runner: solver and diagnostics as subcommands.

Exit codes: 0 success, 1 usage/config error, 2 runtime instability (partial
artifacts are kept).  CSV output uses '.' decimals, 17 significant digits,
comma delimiters, and a mandatory header row, so identical configs and seeds
reproduce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time as _time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .configfile import config_hash, load_config, resolved_text
from .diagnostics import (
    budget,
    criterion_norms,
    energy_inequality_residual,
    flux_spectrum,
    generalized_helicity_residual,
    constant_test_function,
    separable_test_function,
    uniqueness_bound_check,
)
from .grid import SpectralField
from .littlewood_paley import BesovSpec, besov_norm, q_max_for, shell_amplitudes
from .mollify import ParameterError
from .regions import ExponentError, classify, parse_exponent
from .snapshots import SnapshotError, read_snapshot, write_snapshot
from .solver import (
    ConfigError,
    InstabilityError,
    SolverConfig,
    evolve,
    evolve_potential,
    random_shell_field,
)


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _write_manifest(out_dir: Path, command: str, digest: str, artifacts: list[str],
                    wall: float) -> None:
    manifest = {
        "command": command,
        "config_hash": digest,
        "artifacts": sorted(artifacts),
        "wall_time_s": wall,
        "tool_version": __version__,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _flags_digest(command: str, flags: dict) -> str:
    import hashlib

    text = f"command = {command}\n" + "".join(
        f"{k} = {flags[k]}\n" for k in sorted(flags)
    )
    return hashlib.sha256(text.encode()).hexdigest()


def _write_run_artifacts(out_dir: Path, traj, cfg: SolverConfig) -> list[str]:
    artifacts = []
    for i, snap in enumerate(traj.snapshots):
        name = f"snapshot_{i:06d}.emhd"
        write_snapshot(out_dir / name, snap, cfg.mu, cfg.d_i)
        artifacts.append(name)
    log = traj.log.as_arrays()
    write_csv(
        out_dir / "steps.csv",
        ["t", "E", "H", "l2", "linf", "grad_l2"],
        zip(log["t"], log["E"], log["H"], log["l2"], log["linf"], log["grad_l2"]),
    )
    artifacts.append("steps.csv")
    records = budget(traj)
    e0 = records[0].energy
    rows = []
    for rec in records:
        resid = 0.0
        if e0 > 0:
            resid = (2.0 * rec.energy + rec.cumulative_dissipation - 2.0 * e0) / (2.0 * e0)
        rows.append(
            (rec.t, rec.energy, rec.helicity, math.sqrt(max(rec.grad_energy, 0.0)),
             rec.cumulative_dissipation, resid)
        )
    write_csv(
        out_dir / "budget.csv",
        ["t", "E", "H", "grad_l2", "cum_dissipation", "energy_ineq_residual"],
        rows,
    )
    artifacts.append("budget.csv")
    return artifacts


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    out_dir = Path(args.out_dir) if args.out_dir else Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = _time.perf_counter()
    try:
        traj = evolve(cfg)
    except InstabilityError as exc:
        print(f"instability: {exc}", file=sys.stderr)
        if exc.trajectory is not None:
            artifacts = _write_run_artifacts(out_dir, exc.trajectory, cfg)
            _write_manifest(out_dir, "run", config_hash(cfg), artifacts,
                            _time.perf_counter() - started)
        return 2
    artifacts = _write_run_artifacts(out_dir, traj, cfg)
    _write_manifest(out_dir, "run", config_hash(cfg), artifacts,
                    _time.perf_counter() - started)
    return 0


def _spectrum_rows(field: SpectralField):
    amps = shell_amplitudes(field)
    for i, q in enumerate(amps.q_values):
        yield (int(q), 2.0 ** float(q), amps.shell_l2[i], amps.shell_l3[i],
               amps.b[i], amps.beta[i])


def cmd_diagnose(args) -> int:
    snap = read_snapshot(args.snapshot)
    out = sys.stdout
    out.write("q,lambda_q,shell_l2,shell_l3,b_q,beta_q\n")
    for row in _spectrum_rows(snap.field):
        out.write(",".join(_fmt(v) for v in row) + "\n")
    if args.besov:
        out.write("s,p,q_besov,value\n")
        for spec_text in args.besov:
            parts = spec_text.split(":")
            if len(parts) != 3:
                raise ExponentError(f"--besov wants s:p:q, got {spec_text!r}")
            s = float(parts[0])
            p = parse_exponent(parts[1])
            qb = parse_exponent(parts[2])
            val = besov_norm(snap.field, BesovSpec(s=s, p=p, q=qb))
            out.write(f"{_fmt(s)},{_fmt(p)},{_fmt(qb)},{_fmt(val)}\n")
    return 0


def cmd_flux(args) -> int:
    snap = read_snapshot(args.snapshot)
    q_top = args.qmax if args.qmax is not None else q_max_for(snap.field.grid)
    started = _time.perf_counter()
    spec = flux_spectrum(snap.field, q_top)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(
        out_dir / "flux.csv",
        ["Q", "H_Q", "Pi_Q", "kernel_bound", "beta_bound"],
        zip(spec.q_values, spec.helicity_flux, spec.energy_flux,
            spec.kernel_bound, spec.beta_bound),
    )
    digest = _flags_digest("flux", {"snapshot": args.snapshot, "qmax": q_top})
    _write_manifest(out_dir, "flux", digest, ["flux.csv"], _time.perf_counter() - started)
    return 0


def cmd_identity(args) -> int:
    cfg = load_config(args.config)
    started = _time.perf_counter()
    traj = evolve_potential(cfg)
    grid = traj.snapshots[0].grid
    if args.testfn == "const":
        phi = constant_test_function(grid)
    elif args.testfn == "separable":
        phi = separable_test_function(grid, cfg.t_end)
    else:
        raise ConfigError(f"unknown test function {args.testfn!r} (flag --testfn)")
    residual = generalized_helicity_residual(traj, phi)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(
        out_dir / "identity.csv",
        ["testfn", "n", "dt", "t_end", "mu", "d_i", "residual"],
        [(args.testfn, cfg.n, cfg.dt, cfg.t_end, cfg.mu, cfg.d_i, residual)],
    )
    _write_manifest(out_dir, "identity", config_hash(cfg), ["identity.csv"],
                    _time.perf_counter() - started)
    return 0


def cmd_uniqueness(args) -> int:
    cfg = load_config(args.config)
    p = parse_exponent(args.p)
    q = parse_exponent(args.q)
    r = float(args.r)
    started = _time.perf_counter()
    base = evolve(cfg)
    b0 = base.snapshots[0]
    crit = criterion_norms(base, p, r)

    def one_seed(seed: int):
        if args.perturb == 0.0:
            b2_init = b0
        else:
            noise = random_shell_field(cfg.grid, args.perturb_shell, args.perturb_shell, seed)
            b2_init = b0 + args.perturb * noise
        pert = evolve(cfg, b0=b2_init)
        return uniqueness_bound_check(base, pert, p, q, r, c_cap=args.c_cap, crit=crit)

    max_workers = int(os.environ.get("EMHD_THREADS", "0")) or (os.cpu_count() or 1)
    seeds = list(range(args.seeds))
    with ThreadPoolExecutor(max_workers=min(max_workers, len(seeds))) as pool:
        reports = list(pool.map(one_seed, seeds))

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = []
    summary_rows = []
    for seed, rep in zip(seeds, reports):
        sub = out_dir / f"seed_{seed:02d}"
        sub.mkdir(exist_ok=True)
        write_csv(
            sub / "uniqueness.csv",
            ["t", "Z_l2_sq", "besov_time_norm", "fitted_C", "bound_ok"],
            (
                (t, z, w, rep.fitted_c, ok)
                for t, z, w, ok in zip(rep.times, rep.z_l2_sq, rep.besov_time_norm, rep.bound_ok)
            ),
        )
        artifacts.append(f"seed_{seed:02d}/uniqueness.csv")
        summary_rows.append((seed, rep.fitted_c, rep.holds_with_cap))
    write_csv(out_dir / "summary.csv", ["seed", "fitted_C", "bound_ok"], summary_rows)
    artifacts.append("summary.csv")
    digest = _flags_digest(
        "uniqueness",
        {"config": resolved_text(cfg), "perturb": args.perturb, "seeds": args.seeds,
         "p": p, "q": q, "r": r},
    )
    _write_manifest(out_dir, "uniqueness", digest, artifacts, _time.perf_counter() - started)
    return 0


def cmd_region(args) -> int:
    p = parse_exponent(args.p)
    q = parse_exponent(args.q)
    r = None if args.r is None else float(args.r)
    triple = classify(p, q, r)
    print(triple.classification)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="emhd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate a configured run, write snapshots and budgets")
    p_run.add_argument("config")
    p_run.add_argument("--out-dir", default=None, help="override the config's out_dir")
    p_run.set_defaults(func=cmd_run)

    p_diag = sub.add_parser("diagnose", help="shell spectrum (and Besov norms) of a snapshot")
    p_diag.add_argument("snapshot")
    p_diag.add_argument("--besov", action="append", metavar="s:p:q",
                        help="Besov exponents, e.g. 0.333333:3:inf (repeatable)")
    p_diag.set_defaults(func=cmd_diagnose)

    p_flux = sub.add_parser("flux", help="truncated flux spectrum of a snapshot")
    p_flux.add_argument("snapshot")
    p_flux.add_argument("--qmax", type=int, default=None)
    p_flux.add_argument("--out-dir", default="emhd_flux")
    p_flux.set_defaults(func=cmd_flux)

    p_ident = sub.add_parser("identity", help="generalized helicity identity residual")
    p_ident.add_argument("config")
    p_ident.add_argument("--testfn", choices=("const", "separable"), default="const")
    p_ident.add_argument("--out-dir", default="emhd_identity")
    p_ident.set_defaults(func=cmd_identity)

    p_uni = sub.add_parser("uniqueness", help="Gronwall bound check over a perturbation ensemble")
    p_uni.add_argument("config")
    p_uni.add_argument("--perturb", type=float, default=1e-3)
    p_uni.add_argument("--perturb-shell", type=int, default=2)
    p_uni.add_argument("--seeds", type=int, default=1)
    p_uni.add_argument("--p", default="3")
    p_uni.add_argument("--q", default="2")
    p_uni.add_argument("--r", default="1")
    p_uni.add_argument("--c-cap", type=float, default=100.0)
    p_uni.add_argument("--out-dir", default="emhd_uniqueness")
    p_uni.set_defaults(func=cmd_uniqueness)

    p_reg = sub.add_parser("region", help="classify uniqueness-criterion exponents")
    p_reg.add_argument("--p", required=True)
    p_reg.add_argument("--q", required=True)
    p_reg.add_argument("--r", default=None)
    p_reg.set_defaults(func=cmd_region)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SnapshotError, ExponentError, ParameterError, ValueError,
            FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InstabilityError as exc:
        print(f"instability: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
