"""Command line driver.

Examples
--------
    xxz-gmn boundaries --n 6 --jx 2
    xxz-gmn scan-field --n 6 --jx 2 --grid-min -1.5 --grid-max 1.5 --grid-count 200
    xxz-gmn scan-coupling --n 6 --b -0.8 --grid-min 1.05 --grid-max 6 --grid-count 100
    xxz-gmn analytic-w --n 43
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

from .bell_violation import OptimizerConfig
from .eigensolver import global_ground, sector_boundaries
from .hamiltonian import ChainParams
from .scan import (
    OUTPUTS,
    BoundaryRecord,
    ConfigError,
    SweepConfig,
    emit,
    run_analytic_w,
    run_coupling_sweep,
    run_field_sweep,
    run_point,
)
from .sector_basis import DomainError


def _outputs(text: str) -> frozenset:
    items = frozenset(s.strip() for s in text.split(",") if s.strip())
    bad = items - set(OUTPUTS)
    if bad:
        raise argparse.ArgumentTypeError(f"unknown outputs: {', '.join(sorted(bad))}")
    return items


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--n", type=int, required=True, help="number of sites")
    shared.add_argument("--restarts", type=int, default=OptimizerConfig.restarts)
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--grid-points", type=int, default=OptimizerConfig.grid_points,
                        help="seeding grid points per angle for the violation search")
    shared.add_argument("--format", choices=("csv", "json"), default="csv")
    shared.add_argument("--out", default=None, help="output file (default: standard output)")
    shared.add_argument("--workers", type=int, default=1)

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--grid-min", type=float, required=True)
    grid.add_argument("--grid-max", type=float, required=True)
    grid.add_argument("--grid-count", type=int, required=True)
    grid.add_argument("--outputs", type=_outputs, default=frozenset({"violation", "concurrence"}),
                      help="comma separated subset of " + ",".join(OUTPUTS))

    parser = argparse.ArgumentParser(prog="xxz-gmn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ground-state", parents=[shared], help="global ground state at one point")
    p.add_argument("--jx", type=float, required=True)
    p.add_argument("--b", type=float, required=True)

    for name, what in (("violation", "maximal Bell violation"), ("concurrence", "GME concurrence")):
        p = sub.add_parser(name, parents=[shared], help=f"{what} at one point")
        p.add_argument("--jx", type=float, required=True)
        p.add_argument("--b", type=float, required=True)

    p = sub.add_parser("scan-field", parents=[shared, grid], help="sweep b at fixed jx")
    p.add_argument("--jx", type=float, required=True)

    p = sub.add_parser("scan-coupling", parents=[shared, grid], help="sweep jx at fixed b")
    p.add_argument("--b", type=float, required=True)

    p = sub.add_parser("analytic-w", parents=[shared],
                       help="closed-form single-excitation violation for n_min..n")
    p.add_argument("--n-min", type=int, default=4)

    p = sub.add_parser("boundaries", parents=[shared], help="ground-sector changes along b")
    p.add_argument("--jx", type=float, required=True)
    return parser


def _ground_state(args) -> str:
    g = global_ground(ChainParams(args.n, args.jx, args.b))
    configs = [format(int(s), f"0{args.n}b") for s in g.configs]
    if args.format == "json":
        doc = dict(
            n=args.n, jx=args.jx, b=args.b, sector_k=g.k, degenerate=g.degenerate,
            energy=float(f"{g.energy:.12g}"), gap=float(f"{g.gap:.12g}"),
            configs=configs, amplitudes=[float(f"{a:.12g}") for a in g.amplitudes],
        )
        return json.dumps(doc, indent=2) + "\n"
    lines = ["config,amplitude"] + [f"{c},{a:.12g}" for c, a in zip(configs, g.amplitudes)]
    return "\n".join(lines) + "\n"


def run(args) -> None:
    common = dict(n=args.n, seed=args.seed, restarts=args.restarts,
                  grid_points=args.grid_points, workers=args.workers)
    cmd = args.command
    if cmd == "ground-state":
        text = _ground_state(args)
        if args.out in (None, "-"):
            sys.stdout.write(text)
        else:
            with open(args.out, "w", newline="") as fh:
                fh.write(text)
        return
    if cmd in ("violation", "concurrence"):
        cfg = SweepConfig(mode="point", outputs=frozenset({cmd}), **common)
        records = [run_point(cfg, args.jx, args.b)]
    elif cmd == "scan-field":
        cfg = SweepConfig(mode="field-sweep", fixed=args.jx, outputs=args.outputs,
                          grid=(args.grid_min, args.grid_max, args.grid_count), **common)
        records = run_field_sweep(cfg)
    elif cmd == "scan-coupling":
        cfg = SweepConfig(mode="coupling-sweep", fixed=args.b, outputs=args.outputs,
                          grid=(args.grid_min, args.grid_max, args.grid_count), **common)
        records = run_coupling_sweep(cfg)
    elif cmd == "analytic-w":
        cfg = SweepConfig(mode="analytic-w", n_min=args.n_min, **common)
        records = run_analytic_w(cfg)
    elif cmd == "boundaries":
        p = ChainParams(args.n, args.jx)
        records = [BoundaryRecord(kl, kr, b) for kl, kr, b in sector_boundaries(p)]
    else:  # pragma: no cover - argparse rejects unknown commands
        raise ConfigError(cmd)
    emit(records, args.format, args.out)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    warnings.simplefilter("default")
    try:
        run(args)
    except (ConfigError, DomainError) as exc:
        parser.error(str(exc))
    except OSError as exc:
        print(f"xxz-gmn: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
