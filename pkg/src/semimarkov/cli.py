"""Command-line entry point: configuration loading, dispatch and file I/O.

Subcommands: validate, analyze, simulate, verify, telegraph.  Every emitted
file starts with a comment line carrying the configuration digest and the
seed; the digest covers only result-affecting fields, so reruns with a
different worker count or output directory emit byte-identical content.
Exit codes: 0 success / all suites passed, 1 verification failure, 2
usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import verify
from .config import (
    ALL_SUITES,
    RunConfig,
    config_digest,
    parse_config,
    parse_grid,
)
from .errors import SchemaError, SemiMarkovError
from .kernel import validate_kernel
from .limits import limit_parameters
from .simulate import sample_markov_renewal, scaled_integral_path
from .telegraph import TelegraphSpec, alternating_poisson_pmf, telegraph_limit, telegraph_state_law

SUBCOMMANDS = ("validate", "analyze", "simulate", "verify", "telegraph")

# Fixed stream labels so each suite gets an independent master seed.
_SUITE_STREAMS = {"clt": 101, "renewal": 102, "ergodic": 103, "residual": 104, "occupancy": 105}


def _suite_seed(master: int, name: str) -> int:
    ss = np.random.SeedSequence(entropy=master, spawn_key=(_SUITE_STREAMS[name],))
    return int(ss.generate_state(1, np.uint64)[0])


def _num(x: float) -> str:
    return format(float(x), ".17g")


def _jsonable(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (np.floating, float)):
        return None if math.isnan(x) else float(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x]
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    return x


def _write(out_dir: Path, name: str, config: RunConfig, body: str) -> Path:
    path = out_dir / name
    header = f"# config={config_digest(config)} seed={config.seed}\n"
    path.write_text(header + body)
    return path


def _write_json(out_dir: Path, name: str, config: RunConfig, obj) -> Path:
    return _write(out_dir, name, config, json.dumps(_jsonable(obj), indent=2) + "\n")


def _summary_text(reports) -> str:
    lines = []
    for rep in reports:
        verdict = "PASS" if rep.passed else "FAIL"
        lines.append(f"{rep.suite_name}: {verdict} (seed={rep.seed}, reps={rep.replication_count})")
        for c in rep.checks:
            cmp = "<=" if c.direction == "leq" else ">="
            lines.append(
                f"  {'ok' if c.passed else 'FAIL':4s} {c.name:28s} "
                f"stat={c.statistic:.6g} {cmp} {c.threshold:.6g}"
            )
    overall = all(r.passed for r in reports)
    lines.append(f"OVERALL: {'PASS' if overall else 'FAIL'}")
    return "\n".join(lines) + "\n"


def _telegraph_spec(config: RunConfig) -> TelegraphSpec:
    k = config.kernel
    if k.n_states != 2 or not np.array_equal(k.P, np.array([[0.0, 1.0], [1.0, 0.0]])):
        raise SchemaError("telegraph: kernel must be the 2-state alternating chain")
    l01, l10 = k.laws[0][1], k.laws[1][0]
    if l01.family != "exponential" or l10.family != "exponential":
        raise SchemaError("telegraph: both sojourn laws must be exponential")
    return TelegraphSpec(
        v1=float(k.states[0]),
        v2=float(k.states[1]),
        lambda1=l01.params[0],
        lambda2=l10.params[0],
        p=config.telegraph_p,
    )


def dispatch(config: RunConfig, subcommand: str) -> int:
    """Run one subcommand, emit its files, return the exit code."""
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    workers = config.workers if config.workers > 0 else (os.cpu_count() or 1)

    if subcommand == "validate":
        s = validate_kernel(config.kernel)
        _write_json(out_dir, "structure.json", config, {
            "irreducible": s.irreducible,
            "period": s.period,
            "pi": s.pi,
            "slem": s.slem,
        })
        return 0

    if subcommand == "analyze":
        s = validate_kernel(config.kernel)
        p = limit_parameters(config.kernel, tol=config.tol)
        _write_json(out_dir, "limit_parameters.json", config, {
            "theta": p.theta,
            "mu": p.mu,
            "gamma2": p.gamma2,
            "diffusion": p.diffusion,
            "method": p.method,
            "slem": s.slem,
            "pi": s.pi,
        })
        if p.method == "cycle":
            from .regen import cycle_summary_rows, harvest_cycles

            cs, _ = harvest_cycles(config.kernel, config.v0, 10_000, seed=config.seed)
            rows = ["cycle_index,length,cycle_sum,cycle_sum_sq"]
            for i, length, total, total_sq in cycle_summary_rows(cs, p.theta, 10_000):
                rows.append(f"{i},{length},{_num(total)},{_num(total_sq)}")
            _write(out_dir, "cycles.csv", config, "\n".join(rows) + "\n")
        return 0

    if subcommand == "simulate":
        grid = parse_grid(config.grid)
        p = limit_parameters(config.kernel, tol=config.tol)
        t_max = float(grid.max())
        traj = sample_markov_renewal(
            config.kernel, 0, until_time=config.lam * t_max, seed=config.seed
        )
        # same seed and mode, hence the same realization as the dumped trajectory
        x = scaled_integral_path(config.kernel, config.lam, p.theta, grid, seed=config.seed)
        rows = ["k,state,xi,S"]
        values = traj.state_values[traj.states]
        xi_all = np.concatenate([[0.0], traj.sojourns])
        for k in range(traj.states.size):
            rows.append(f"{k},{_num(values[k])},{_num(xi_all[k])},{_num(traj.arrivals[k])}")
        _write(out_dir, "trajectory.csv", config, "\n".join(rows) + "\n")
        rows = ["t,X_lambda"]
        for t, v in zip(grid, x):
            rows.append(f"{_num(t)},{_num(v)}")
        _write(out_dir, "scaled_path.csv", config, "\n".join(rows) + "\n")
        return 0

    if subcommand == "verify":
        reports = []
        for name in config.suites:
            seed = _suite_seed(config.seed, name)
            if name == "clt":
                rep = verify.clt_suite(
                    config.kernel, lam=config.lam, t_points=config.t_points,
                    n_reps=config.n_reps, seed=seed, workers=workers,
                )
            elif name == "renewal":
                rep = verify.renewal_suite(
                    config.kernel, n_values=config.n_values, seed=seed, workers=workers
                )
            elif name == "ergodic":
                rep = verify.ergodic_suite(config.kernel, f_tag=config.f_tag, seed=seed)
            elif name == "residual":
                rep = verify.residual_suite(
                    config.kernel, n_values=config.n_values, seed=seed, workers=workers
                )
            else:
                rep = verify.occupancy_suite(config.kernel, T=config.horizon, seed=seed)
            reports.append(rep)
            _write_json(out_dir, f"report_{name}.json", config, rep.to_dict())
        _write(out_dir, "summary.txt", config, _summary_text(reports))
        return 0 if all(r.passed for r in reports) else 1

    if subcommand == "telegraph":
        spec = _telegraph_spec(config)
        drift, diffusion = telegraph_limit(spec)
        _write_json(out_dir, "telegraph.json", config, {
            "v1": spec.v1, "v2": spec.v2,
            "lambda1": spec.lambda1, "lambda2": spec.lambda2, "p": spec.p,
            "drift": drift, "diffusion": diffusion,
        })
        rows = ["t,n,probability"]
        for t in config.telegraph_t_table:
            for n in range(config.telegraph_n_max + 1):
                pr = alternating_poisson_pmf(spec.lambda1, spec.lambda2, t, n)
                rows.append(f"{_num(t)},{n},{_num(pr)}")
        _write(out_dir, "pmf.csv", config, "\n".join(rows) + "\n")
        rows = ["t,prob_v1"]
        for t in config.telegraph_t_table:
            rows.append(f"{_num(t)},{_num(telegraph_state_law(spec, t))}")
        _write(out_dir, "state_law.csv", config, "\n".join(rows) + "\n")
        return 0

    raise ValueError(f"unknown subcommand {subcommand!r}")  # pragma: no cover


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semimarkov",
        description="Markov renewal / semi-Markov diffusion-limit laboratory",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="TOML configuration path")
        p.add_argument("--seed", type=int, default=None, help="override master seed")
        p.add_argument("--workers", type=int, default=None, help="worker pool size (0 = auto)")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--suites", default=None, help="comma-separated suite list")
        p.add_argument("--lambda", dest="lam", type=float, default=None, help="scale parameter")
        p.add_argument("--reps", type=int, default=None, help="replication count")
        p.add_argument("--grid", default=None, help="simulate grid start:stop:step")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = parse_config(Path(args.config).read_text())
        if args.seed is not None:
            config = replace(config, seed=args.seed)
        if args.workers is not None:
            config = replace(config, workers=args.workers)
        if args.out is not None:
            config = replace(config, out_dir=args.out)
        if args.lam is not None:
            config = replace(config, lam=args.lam)
        if args.reps is not None:
            config = replace(config, n_reps=args.reps)
        if args.grid is not None:
            parse_grid(args.grid)
            config = replace(config, grid=args.grid)
        if args.suites is not None:
            suites = tuple(s.strip() for s in args.suites.split(",") if s.strip())
            bad = [s for s in suites if s not in ALL_SUITES]
            if bad:
                raise SchemaError(f"run.suites: unknown suites {bad}")
            config = replace(config, suites=suites)
        return dispatch(config, args.subcommand)
    except (SemiMarkovError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
