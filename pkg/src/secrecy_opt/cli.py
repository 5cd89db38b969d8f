"""Command-line interface.

Exit codes: 0 on success, 2 on solver failure, 3 on invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .channel import AntennaConfig, load_channel, sample_channel
from .errors import (
    InfeasibleConfigError,
    InvalidInputError,
    SecrecyOptError,
    SolverFailureError,
)
from .harness import (
    PRESETS,
    ExperimentConfig,
    emit_results,
    preset,
    run_sweep,
)
from .linalg import gsvd_transform, subspace_dims_oracle
from .mimome import default_initialization, gauss_seidel_solve
from .misome import TwoLayerConfig, misome_secrecy_capacity
from .sdof import positive_sdof_condition, sdof_closed_form, sdof_table_lookup

EXIT_OK = 0
EXIT_SOLVER = 2
EXIT_INVALID = 3


def _add_config_args(parser, defaults=(3, 1, 3, 2)):
    for name, default in zip(("na", "nb", "ne", "nj"), defaults):
        parser.add_argument(f"--{name}", type=int, default=default)


def _add_channel_args(parser, defaults):
    parser.add_argument("--channel", help="channel JSON file")
    parser.add_argument("--seed", type=int, default=0,
                        help="channel draw seed when no file is given")
    parser.add_argument("--snr-db", type=float, default=10.0)
    _add_config_args(parser, defaults)


def _resolve_channel(args):
    if args.channel:
        return load_channel(args.channel)
    config = AntennaConfig(args.na, args.nb, args.ne, args.nj)
    return sample_channel(config, args.seed)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="secrecy-opt",
        description="Secrecy capacity and secure-degrees-of-freedom tools "
                    "for the helper-assisted wiretap channel",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sdof", help="closed-form secure degrees of freedom")
    _add_config_args(p)
    p.add_argument("--table-check", action="store_true",
                   help="cross-check against the lookup-table form")

    p = sub.add_parser("capacity-misome",
                       help="secrecy capacity, single-antenna receiver")
    _add_channel_args(p, (3, 1, 3, 2))
    p.add_argument("--grid", type=int, default=200,
                   help="outer search grid size")

    p = sub.add_parser("solve-mimome",
                       help="alternating secrecy-rate maximization")
    _add_channel_args(p, (3, 3, 3, 4))
    p.add_argument("--tol", type=float, default=1e-2)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--init", choices=("alignment", "isotropic"),
                   default="alignment")

    p = sub.add_parser("sweep", help="Monte-Carlo sweep to CSV/JSON")
    p.add_argument("--preset", choices=PRESETS)
    p.add_argument("--config", help="sweep description JSON file")
    p.add_argument("--trials", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--master-seed", type=int, default=2024)

    p = sub.add_parser("gsvd-check",
                       help="randomized factorization property check")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)

    return parser


def _cmd_sdof(args) -> int:
    config = AntennaConfig(args.na, args.nb, args.ne, args.nj)
    bd = sdof_closed_form(config)
    print(f"d_star={bd.d_star} d0={bd.d0} d1={bd.d1} d2={bd.d2} s={bd.s}")
    print(f"positive={positive_sdof_condition(config)}")
    if args.table_check:
        table = sdof_table_lookup(config)
        agree = table.d_star == bd.d_star
        print(f"table d_star={table.d_star} agree={agree}")
        if not agree:
            return EXIT_SOLVER
    return EXIT_OK


def _cmd_capacity_misome(args) -> int:
    ch = _resolve_channel(args)
    p = 10.0 ** (args.snr_db / 10.0)
    res = misome_secrecy_capacity(ch, p, TwoLayerConfig(grid_points=args.grid))
    d = res.diagnostics
    print(f"cs_bits={res.cs:.6f} rd={res.rd:.6f} re={res.re:.6f}")
    print(f"tau_star={d['tau_star']:.6g} evaluations={d['evaluations']} "
          f"rank_one_ratio={d['rank_one_ratio']:.3e}")
    return EXIT_OK


def _cmd_solve_mimome(args) -> int:
    ch = _resolve_channel(args)
    p = 10.0 ** (args.snr_db / 10.0)
    init = None
    if args.init == "isotropic":
        from .channel import CovariancePair
        na, _, _, nj = ch.config
        init = CovariancePair(qa=(p / 2 / na) * np.eye(na, dtype=complex),
                              qj=(p / 2 / nj) * np.eye(nj, dtype=complex))
    else:
        init = default_initialization(ch, p)
    rep = gauss_seidel_solve(ch, p, init=init, tol=args.tol,
                             max_iters=args.max_iters)
    print(f"cs_bits={rep.final.cs:.6f} rd={rep.final.rd:.6f} "
          f"re={rep.final.re:.6f}")
    print(f"iterations={rep.iterations} converged={rep.converged} "
          f"theta_final={rep.objective_trace[-1]:.6f}")
    if not rep.converged:
        return EXIT_SOLVER
    return EXIT_OK


def _sweep_config_from_file(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read sweep config {path}: {exc}")
    try:
        return ExperimentConfig(
            configs=[AntennaConfig(*map(int, c)) for c in doc["configs"]],
            snr_db_list=[float(v) for v in doc["snr_db_list"]],
            trials=int(doc.get("trials", 50)),
            seed=int(doc.get("seed", 2024)),
            schemes=tuple(doc.get("schemes", ["optimal-misome"])),
            overrides=dict(doc.get("overrides", {})),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed sweep config: {exc}")


def _cmd_sweep(args) -> int:
    if bool(args.preset) == bool(args.config):
        raise InvalidInputError("give exactly one of --preset or --config")
    if args.preset:
        cfg = preset(args.preset, trials=args.trials, seed=args.master_seed)
    else:
        cfg = _sweep_config_from_file(args.config)
        if args.trials:
            cfg.trials = args.trials
    records = run_sweep(cfg)
    emit_results(records, args.format, args.out)
    failed = sum(1 for r in records if r.flags.startswith("error:"))
    print(f"wrote {len(records)} records to {args.out} ({failed} failures)")
    return EXIT_SOLVER if failed else EXIT_OK


def _cmd_gsvd_check(args) -> int:
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(args.trials):
        n, m, k = rng.integers(1, 7, size=3)
        h = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
        g = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
        f = gsvd_transform(h, g)
        if (f.k, f.p, f.r, f.s) != subspace_dims_oracle(h, g):
            print(f"dimension mismatch on shapes n={n} m={m} k={k}")
            return EXIT_SOLVER
        worst = max(
            worst,
            np.linalg.norm(h @ f.psi1 - f.x @ f.d1.conj().T),
            np.linalg.norm(g @ f.psi2 - f.x @ f.d2.conj().T),
            np.linalg.norm(f.d1.conj().T @ f.d1 + f.d2.conj().T @ f.d2
                           - np.eye(f.k)),
        )
    print(f"trials={args.trials} worst_residual={worst:.3e}")
    return EXIT_OK if worst < 1e-8 else EXIT_SOLVER


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage; report invalid input instead
        return EXIT_INVALID if exc.code else EXIT_OK
    handlers = {
        "sdof": _cmd_sdof,
        "capacity-misome": _cmd_capacity_misome,
        "solve-mimome": _cmd_solve_mimome,
        "sweep": _cmd_sweep,
        "gsvd-check": _cmd_gsvd_check,
    }
    try:
        return handlers[args.command](args)
    except (InvalidInputError, InfeasibleConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SolverFailureError, SecrecyOptError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
