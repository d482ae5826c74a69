"""Command-line entry point: jcpm <experiment> [options]."""

from __future__ import annotations

import argparse
import math
import os
import sys

from .device import DeviceParams, load_config, write_default_config
from .errors import JcpmError
from .sweeps import DEFAULT_POINTS, EXPERIMENTS, ExperimentOptions, run_experiment


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jcpm",
        description="Charge-parity-meter simulator: named experiments emit "
                    "CSV data plus a run manifest.")
    sub = parser.add_subparsers(dest="command", required=True)

    cfg = sub.add_parser("default-config",
                         help="write the reference device config as JSON")
    cfg.add_argument("--out", default="jcpm_config.json")

    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", help="JSON device config (default preset "
                                        "when omitted)")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--workers", type=int,
                       default=max(1, os.cpu_count() or 1))
        p.add_argument("--seed", type=int, default=1234)
        p.add_argument("--points", type=int, default=DEFAULT_POINTS,
                       help="points per swept axis")
        p.add_argument("--n-photons", type=float, default=10.0)
        p.add_argument("--kappa-mhz", type=float, default=10.0,
                       help="kappa/2pi in MHz")
        p.add_argument("--eta", type=float, default=1.0)
        p.add_argument("--sigma", type=float, default=0.05,
                       help="relative junction disorder")
        p.add_argument("--n", type=int, default=1000,
                       help="Monte Carlo sample count")
        p.add_argument("--delta-q", type=float, default=1e-6,
                       help="detected charge in e for bandwidth")
        p.add_argument("--theta", type=float, default=math.pi / 8,
                       help="phase-gate angle in rad")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "default-config":
        write_default_config(args.out)
        print(f"wrote {args.out}")
        return 0

    try:
        if args.config:
            device, bias = load_config(args.config)
        else:
            device, bias = DeviceParams.default(), None
        opts = ExperimentOptions(
            points=args.points, workers=args.workers, seed=args.seed,
            n_photons=args.n_photons, kappa_mhz=args.kappa_mhz, eta=args.eta,
            sigma=args.sigma, n_samples=args.n, delta_q=args.delta_q,
            theta=args.theta)
        if bias is not None:
            opts.phi_x = bias.phi_x
        paths, all_ok = run_experiment(device, args.command, args.out, opts)
    except JcpmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in paths:
        print(path)
    if not all_ok:
        print("error: some rows or checks did not pass", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
