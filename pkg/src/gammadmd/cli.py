"""Command-line front end: data generation, single solves, sweeps, combustor.

Exit codes: 0 success, 2 argument parse failure, 3 invalid input or
validation failure, 4 solver degeneracy, 5 simulation divergence.  The
``GAMMADMD_SEED`` environment variable overrides the default seed (and only
the default; an explicit ``--seed`` always wins).  Every subcommand accepts
``--config FILE`` with a JSON object whose keys mirror the long flag names;
explicit flags take precedence over config values.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import io as gio
from .bench import ExperimentPlan, run_combustor_study, run_trials
from .errors import DegenerateSpectrumError, GammaDmdError, SimulationDivergedError
from .model import ModelConfig, amplitudes
from .solver import alternating_descent, fd_init, full_solve
from .systems import (
    NOISE_PROFILES,
    HiddenConfig,
    PeriodicConfig,
    combustor_config_for_profile,
    gen_hidden,
    gen_periodic,
    simulate_combustor,
)
from .varpro import lm_solve

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_DEGENERATE = 4
EXIT_DIVERGED = 5


def _default_seed() -> int:
    return int(os.environ.get("GAMMADMD_SEED", "0"))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------

def _cmd_gen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.sigma2 < 0:
        raise ValueError("sigma2 must be nonnegative")
    if args.system == "periodic":
        cfg = PeriodicConfig(n=args.n)
        noisy, clean, alpha_exact = gen_periodic(cfg, args.sigma2, args.seed)
        grid = {"dt": cfg.dt}
    else:
        cfg = HiddenConfig(n=args.n)
        noisy, clean, alpha_exact = gen_hidden(cfg, args.sigma2, args.seed)
        grid = {"m": cfg.m, "x_max": cfg.x_max, "t_max": cfg.t_max}
    gio.write_snapshot_csv(out / f"{args.system}_clean.csv", clean)
    gio.write_snapshot_csv(out / f"{args.system}_noisy.csv", noisy)
    meta = {
        "system": args.system,
        "n": args.n,
        "sigma2": args.sigma2,
        "seed": args.seed,
        "alpha_exact": gio.complex_vector_to_json(alpha_exact),
        **grid,
    }
    gio.write_json(out / f"{args.system}_meta.json", meta)
    print(f"wrote {args.system} clean/noisy snapshots and metadata to {out}")
    return EXIT_OK


def _resolve_init(kind: str, h, times, rank):
    if kind == "fd":
        return fd_init(h, times, rank)
    if kind == "ak":
        return lm_solve(h, times, fd_init(h, times, rank)).alpha
    if kind.startswith("file:"):
        payload = gio.read_json(kind[len("file:"):])
        return gio.json_to_complex_vector(payload)
    raise ValueError(f"unknown init {kind!r}")


def _cmd_solve(args) -> int:
    snap = gio.read_snapshot_csv(args.input)
    h, times = snap.data, snap.times
    if not 1 <= args.rank <= snap.n_samples:
        raise ValueError("rank must lie between 1 and the number of snapshots")
    init = args.init or "auto"
    out = Path(args.out)

    payload = {
        "solver": args.solver,
        "rank": args.rank,
        "eta": args.eta,
        "tol": args.tol,
        "init": init,
        "seed": args.seed,
        "input": str(args.input),
    }
    if args.solver == "ak":
        if init == "auto":
            init = "fd"
            payload["init"] = init
        if init == "ak":
            raise ValueError("init 'ak' is circular for the ak solver")
        res = lm_solve(h, times, _resolve_init(init, h, times, args.rank))
        b = amplitudes(h, res.alpha, times)
        payload.update(
            alpha=gio.complex_vector_to_json(res.alpha),
            amplitudes=gio.complex_matrix_to_json(b),
            energy_trace=[0.5 * r * r for r in res.residual_norms],
            final_energy=0.5 * res.residual_norms[-1] ** 2,
            iterations=res.iterations,
            status=res.status,
        )
    else:
        cfg = ModelConfig(rank=args.rank, eta=args.eta, tol=args.tol)
        if init == "auto":
            result = full_solve(h, times, cfg)
        else:
            alpha0 = _resolve_init(init, h, times, args.rank)
            result = alternating_descent(h, times, alpha0, cfg)
        htilde_path = Path(args.htilde_out) if args.htilde_out else out.with_name(
            out.stem + "_htilde.csv"
        )
        gio.write_snapshot_csv(htilde_path, type(snap)(times, result.htilde))
        payload.update(
            alpha=gio.complex_vector_to_json(result.alpha),
            amplitudes=gio.complex_matrix_to_json(result.amplitudes),
            energy_trace=list(result.trace.energies),
            final_energy=result.energy,
            iterations=result.iterations,
            status=result.status,
            htilde_path=str(htilde_path),
        )
        res = result
    gio.write_json(out, payload)
    print(f"wrote {out} (status: {payload['status']})")
    if payload["status"] == "degenerate":
        return EXIT_DEGENERATE
    return EXIT_OK


def _cmd_sweep(args) -> int:
    plan = gio.read_json(args.plan)
    required = {"system", "solvers", "n", "sigma2", "eta", "trials", "base_seed"}
    missing = required - plan.keys()
    if missing:
        raise ValueError(f"sweep plan is missing keys: {sorted(missing)}")
    rows = ["system,n,sigma2,eta,solver,mean,std,trials,failures"]
    for n in plan["n"]:
        for sigma2 in plan["sigma2"]:
            for eta in plan["eta"]:
                for solver in plan["solvers"]:
                    cell = ExperimentPlan(
                        system=plan["system"],
                        solver=solver,
                        n=int(n),
                        sigma2=float(sigma2),
                        eta=float(eta),
                        trials=int(plan["trials"]),
                        base_seed=int(plan["base_seed"]),
                    )
                    stats = run_trials(cell)
                    rows.append(
                        ",".join(
                            [
                                plan["system"],
                                str(n),
                                _fmt(sigma2),
                                _fmt(eta),
                                solver,
                                _fmt(stats.mean),
                                _fmt(stats.sample_std),
                                str(stats.trials),
                                str(stats.failures),
                            ]
                        )
                    )
    Path(args.out).write_text("\n".join(rows) + "\n")
    print(f"wrote {args.out} ({len(rows) - 1} rows)")
    return EXIT_OK


def _cmd_combustor(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = combustor_config_for_profile(args.profile, seed=args.seed)
    run = simulate_combustor(cfg, args.seed)
    from .model import SnapshotSet

    gio.write_snapshot_csv(out / "pressure.csv", SnapshotSet(run.times, run.pressure))
    noise_lines = ["t,d"] + [
        f"{_fmt(t)},{_fmt(d)}" for t, d in zip(run.full_times, run.noise)
    ]
    (out / "noise.csv").write_text("\n".join(noise_lines) + "\n")

    study = run_combustor_study(
        cfg, rank=args.rank, eta=args.eta, seed=args.seed, window_count=args.window_count
    )
    rows = ["segment,t_start,t_end,ak,proposed"]
    for i in range(len(study.t_start)):
        rows.append(
            ",".join(
                [
                    str(i),
                    _fmt(study.t_start[i]),
                    _fmt(study.t_end[i]),
                    _fmt(study.errors["ak"][i]),
                    _fmt(study.errors["proposed"][i]),
                ]
            )
        )
    (out / "recon_errors.csv").write_text("\n".join(rows) + "\n")
    print(f"wrote pressure field, noise trace and reconstruction errors to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser plumbing
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="gammadmd",
        description="Modal decomposition robust to multiplicative noise",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    subparsers = {}

    p = sub.add_parser("gen", help="generate clean and noisy snapshot files")
    p.add_argument("system", choices=["periodic", "hidden"])
    p.add_argument("--n", type=int, required=True, help="number of snapshots")
    p.add_argument("--sigma2", type=float, default=0.0, help="gamma noise variance")
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--config", default=None, help="JSON file with flag defaults")
    p.set_defaults(func=_cmd_gen)
    subparsers["gen"] = p

    p = sub.add_parser("solve", help="run one solver on a snapshot CSV")
    p.add_argument("input", help="snapshot CSV path")
    p.add_argument("--solver", choices=["ak", "proposed"], required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--eta", type=float, default=1e3)
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument(
        "--init",
        default=None,
        help="initial eigenvalues: fd | ak | file:PATH (default: auto)",
    )
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", default="result.json")
    p.add_argument("--htilde-out", default=None, help="denoised-matrix CSV path")
    p.add_argument("--config", default=None)
    p.set_defaults(func=_cmd_solve)
    subparsers["solve"] = p

    p = sub.add_parser("sweep", help="run a Monte-Carlo sweep from a plan file")
    p.add_argument("plan", help="JSON sweep plan")
    p.add_argument("--out", default="sweep.csv")
    p.add_argument("--config", default=None)
    p.set_defaults(func=_cmd_sweep)
    subparsers["sweep"] = p

    p = sub.add_parser("combustor", help="simulate the combustor and fit segments")
    p.add_argument("--profile", choices=sorted(NOISE_PROFILES), required=True)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out-dir", default="combustor_out")
    p.add_argument("--rank", type=int, default=10)
    p.add_argument("--eta", type=float, default=1e3)
    p.add_argument("--window-count", type=int, default=10)
    p.add_argument("--config", default=None)
    p.set_defaults(func=_cmd_combustor)
    subparsers["combustor"] = p

    return parser, subparsers


def _apply_config(argv, parser, subparsers):
    """Use a --config JSON file as defaults for the chosen subcommand."""
    if "--config" not in argv:
        return
    command = next((a for a in argv if not a.startswith("-")), None)
    if command not in subparsers:
        return
    cfg_path = argv[argv.index("--config") + 1]
    values = gio.read_json(cfg_path)
    if not isinstance(values, dict):
        raise ValueError("config file must hold a JSON object")
    sub = subparsers[command]
    known = {a.dest for a in sub._actions}
    mapped = {}
    for key, value in values.items():
        dest = key.replace("-", "_")
        if dest not in known:
            raise ValueError(f"config key {key!r} does not match any flag")
        mapped[dest] = value
    sub.set_defaults(**mapped)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subparsers = build_parser()
    try:
        _apply_config(argv, parser, subparsers)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SimulationDivergedError as exc:
        print(f"error: simulation diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except DegenerateSpectrumError as exc:
        print(f"error: degenerate spectrum: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (GammaDmdError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
