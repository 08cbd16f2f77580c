"""Command-line interface.

Exit codes: 0 success, 1 failed pass band / infeasible certificate,
2 usage error (argparse), 3 validation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bbs import BallConfig, DynamicsParams, draw_coin_block
from .exactlin import format_fraction
from .experiments import ExperimentConfig, parse_capacity, parse_eps, run_experiment
from .gaps import build_partition, decompose_trajectory, pushtasep_partition, pushtasep_reflection_columns
from .kernels import gap_trajectory
from .pushtasep import PushTasepState, pushtasep_trajectory
from .reflection import build_reflection, weakly_completely_s
from .rng import RngStream
from .srbm import SrbmSpec, srbm_euler


def _out_stream(path: str | None):
    return open(path, "w", newline="") if path else sys.stdout


def _emit(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_init(raw: str | None, d: int) -> BallConfig:
    """Ball positions as a comma list or a JSON array of integers."""
    if raw is None:
        return BallConfig.adjacent_block(d)
    if raw.lstrip().startswith("["):
        return BallConfig.make(json.loads(raw))
    return BallConfig.make(int(x) for x in raw.split(","))


def _echo_lines(meta: dict) -> str:
    return "".join(f"# {k}={meta[k]}\n" for k in sorted(meta))


def cmd_simulate(args) -> int:
    eps = parse_eps(args.eps)
    cap = parse_capacity(args.capacity)
    init = _parse_init(args.init, args.d)
    d = init.d
    params = DynamicsParams(eps, cap, d)
    gen = RngStream(args.seed).generator()
    coins = draw_coin_block(params, args.steps, gen)
    w0 = np.asarray(init.gaps(), dtype=np.int64) if d > 1 else np.zeros(0, dtype=np.int64)
    W, z1 = gap_trajectory(w0, coins, params.effective_capacity())

    meta = {
        "command": "simulate",
        "eps": str(args.eps),
        "capacity": str(args.capacity),
        "d": d,
        "steps": args.steps,
        "seed": args.seed,
        "init": ",".join(map(str, init.positions)),
        "version": __version__,
    }
    buf = io.StringIO()
    buf.write(_echo_lines(meta))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["t"] + [f"zeta_{i + 1}" for i in range(d)] + [f"eta_{i + 1}" for i in range(d)]
    )
    base = init.positions[0]
    for t in range(args.steps + 1):
        pos = [base + int(z1[t])]
        for g in W[t]:
            pos.append(pos[-1] + int(g) + 1)
        coin_part = [int(c) for c in coins[t]] if t < args.steps else [""] * d
        writer.writerow([t] + pos + coin_part)
    _emit(args.out, buf.getvalue())
    return 0


def cmd_pushtasep(args) -> int:
    init = _parse_init(args.init, args.d)
    state = PushTasepState(init.positions)
    events, states = pushtasep_trajectory(state, args.horizon, RngStream(args.seed))
    meta = {
        "command": "pushtasep",
        "d": state.d,
        "horizon": args.horizon,
        "seed": args.seed,
        "init": ",".join(map(str, init.positions)),
        "version": __version__,
    }
    buf = io.StringIO()
    buf.write(_echo_lines(meta))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["time", "particle"] + [f"xi_{i + 1}" for i in range(state.d)])
    writer.writerow([repr(0.0), ""] + list(state.positions))
    for ev, st in zip(events, states[1:]):
        writer.writerow([repr(ev.time), ev.particle] + list(st.positions))
    _emit(args.out, buf.getvalue())
    return 0


def cmd_partition(args) -> int:
    part = build_partition(args.d, parse_capacity(args.capacity))
    _emit(args.out, json.dumps(part.to_json(), indent=2, sort_keys=True) + "\n")
    return 0


def cmd_reflect(args) -> int:
    cap = parse_capacity(args.capacity)
    params = DynamicsParams(parse_eps(args.eps), cap, args.d)
    data = build_reflection(build_partition(args.d, cap), params)
    _emit(args.out, json.dumps(data.to_json(), indent=2, sort_keys=True) + "\n")
    return 0


def cmd_scertify(args) -> int:
    d = args.d
    if args.model == "pushtasep":
        part = pushtasep_partition(d)
        columns = pushtasep_reflection_columns(part)
    else:
        cap = parse_capacity(args.capacity)
        params = DynamicsParams(parse_eps(args.eps), cap, d)
        part = build_partition(d, cap)
        columns = build_reflection(part, params).columns
    cert = weakly_completely_s(columns, part.f_map(), d)
    _emit(args.out, json.dumps(cert.to_json(), indent=2, sort_keys=True) + "\n")
    return 0 if cert.feasible else 1


def _read_trajectory(path: str):
    meta: dict[str, str] = {}
    rows = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key.strip()] = value.strip()
            else:
                rows.append(line)
    reader = csv.reader(rows)
    header = next(reader)
    d = sum(1 for name in header if name.startswith("zeta_"))
    positions = []
    coins = []
    for row in reader:
        positions.append([int(x) for x in row[1 : 1 + d]])
        tail = row[1 + d : 1 + 2 * d]
        if all(x != "" for x in tail):
            coins.append([int(x) for x in tail])
    return meta, np.array(positions, dtype=np.int64), np.array(coins, dtype=np.int64)


def cmd_decompose(args) -> int:
    meta, positions, coins = _read_trajectory(args.traj)
    eps = parse_eps(args.eps if args.eps is not None else meta["eps"])
    cap = parse_capacity(args.capacity if args.capacity is not None else meta["capacity"])
    d = positions.shape[1]
    if d < 2:
        raise ValueError("decomposition needs d >= 2")
    params = DynamicsParams(eps, cap, d)
    W = positions[:, 1:] - positions[:, :-1] - 1
    part = build_partition(d, cap)
    data = build_reflection(part, params)
    trace = decompose_trajectory(W, coins, part, data.columns)
    trace.validate()

    buf = io.StringIO()
    out_meta = {"command": "decompose", "eps": str(eps), "capacity": str(cap), "d": d, "k": part.k}
    buf.write(_echo_lines(out_meta))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["t"]
        + [f"W_{i + 1}" for i in range(d - 1)]
        + [f"X_{i + 1}" for i in range(d - 1)]
        + [f"Y_{j + 1}" for j in range(part.k)]
        + [f"alpha_{i + 1}" for i in range(d - 1)]
    )
    for t in range(trace.steps + 1):
        writer.writerow(
            [t]
            + [int(x) for x in trace.W[t]]
            + [int(x) for x in trace.X[t]]
            + [int(x) for x in trace.Y[t]]
            + [format_fraction(a) for a in trace.alpha[t]]
        )
    _emit(args.out, buf.getvalue())
    return 0


def cmd_srbm(args) -> int:
    if args.cov:
        cov = np.array([[float(x) for x in row.split(",")] for row in args.cov.split(";")])
        refl = np.array([[float(x) for x in row.split(",")] for row in args.refl.split(";")])
        m = cov.shape[0]
    else:
        from .reflection import standard_matrices

        eps = parse_eps(args.eps)
        cap = parse_capacity(args.capacity)
        sigma_pt, _, hat = standard_matrices(args.d, eps, cap)
        m = args.d - 1
        cov = float(eps) * np.array([[float(x) for x in row] for row in sigma_pt])
        refl = np.array([[float(x) for x in row] for row in hat])
    spec = SrbmSpec(m, cov, refl)
    cert = spec.certify_reflection()
    if not cert.feasible:
        raise ValueError("reflection matrix is not completely-S")
    path = srbm_euler(spec, args.horizon, args.dt, RngStream(args.seed))
    path.validate()
    meta = {
        "command": "srbm",
        "dim": m,
        "horizon": args.horizon,
        "dt": args.dt,
        "seed": args.seed,
        "degenerate_steps": path.degenerate_steps,
        "version": __version__,
    }
    buf = io.StringIO()
    buf.write(_echo_lines(meta))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t"] + [f"w_{i + 1}" for i in range(m)] + [f"y_{i + 1}" for i in range(m)])
    for k in range(path.times.size):
        writer.writerow(
            [repr(float(path.times[k]))]
            + [repr(float(x)) for x in path.states[k]]
            + [repr(float(x)) for x in path.pushing[k]]
        )
    _emit(args.out, buf.getvalue())
    return 0


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.from_json(args.config)
    if args.out:
        cfg.out = args.out
    result = run_experiment(cfg)
    for report in result.reports:
        status = {True: "pass", False: "FAIL", None: "info"}[report.passed]
        line = f"[{status}] {report.name}: estimate={report.estimate:.6g}"
        if report.predicted is not None:
            line += f" predicted={report.predicted:.6g}"
        line += f" ({report.band})"
        print(line)
    if not cfg.out:
        print(json.dumps(result.summary(), indent=2, sort_keys=True))
    return 0 if result.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boxball",
        description="Stochastic box-ball system, PushTASEP, and SRBM gap-process toolkit",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run an SBBS trajectory and emit CSV")
    p.add_argument("--eps", required=True, help="failure probability (decimal or p/q)")
    p.add_argument("--capacity", default="inf", help="carrier capacity (int or 'inf')")
    p.add_argument("--d", type=int, default=2, help="ball count when --init is omitted")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init", help="comma-separated ball positions")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("pushtasep", help="run a PushTASEP trajectory and emit CSV")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init", help="comma-separated particle positions")
    p.add_argument("--out")
    p.set_defaults(func=cmd_pushtasep)

    p = sub.add_parser("partition", help="emit the boundary-cell partition as JSON")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--capacity", default="inf")
    p.add_argument("--out")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("reflect", help="emit R, hatR, Sigma_PT, R_PT as JSON")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--capacity", default="inf")
    p.add_argument("--out")
    p.set_defaults(func=cmd_reflect)

    p = sub.add_parser("scertify", help="emit weakly completely-S certificates")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--eps", default="1/2")
    p.add_argument("--capacity", default="inf")
    p.add_argument("--model", choices=["sbbs", "pushtasep"], default="sbbs")
    p.add_argument("--out")
    p.set_defaults(func=cmd_scertify)

    p = sub.add_parser("decompose", help="Skorokhod-decompose a simulate CSV")
    p.add_argument("--traj", required=True, help="trajectory CSV from 'simulate'")
    p.add_argument("--eps", help="override the eps recorded in the file header")
    p.add_argument("--capacity", help="override the capacity recorded in the file header")
    p.add_argument("--out")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("srbm", help="simulate an SRBM path via the Euler/LCP scheme")
    p.add_argument("--d", type=int, default=3, help="derive (eps Sigma_PT, hatR) for this d")
    p.add_argument("--eps", default="1/2")
    p.add_argument("--capacity", default="inf")
    p.add_argument("--cov", help="explicit covariance, rows ';'-separated")
    p.add_argument("--refl", help="explicit reflection matrix, rows ';'-separated")
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_srbm)

    p = sub.add_parser("experiment", help="run a JSON-configured experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="override the config's output prefix")
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
