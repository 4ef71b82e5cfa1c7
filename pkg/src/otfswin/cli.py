"""Command-line front end for the experiment runner.

Subcommands: mse-sweep, window-response, floor-table, dump-channel.
Exit status 0 on success, 1 with a diagnostic on config rejection.
"""

from __future__ import annotations

import argparse
import sys

from .channel import gen_channel, write_channel_csv
from .harness import (
    WindowSpec,
    default_sim_config,
    parse_config_file,
    resolve_seed,
    run_floor_table,
    run_mse_sweep,
    run_window_response_dump,
    sweep_to_csv,
)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="flat key=value config file")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--out", metavar="CSV", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="otfswin",
        description="Delay-Doppler link simulation, window design, and "
        "embedded-pilot channel estimation experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mse-sweep", help="Monte Carlo estimation-MSE sweep")
    _add_common(p)
    p.add_argument("--frames", type=int, help="frames per sweep cell")
    p.add_argument("--window", choices=["rect", "sine", "dc"], help="TX window kind")
    p.add_argument(
        "--window-side",
        choices=["tx", "rx"],
        default="tx",
        help="which side carries the shaped window (other side stays rect)",
    )
    p.add_argument("--sl-db", type=float, help="DC window sidelobe level in dB")
    p.add_argument("--khat", type=int, help="extra Doppler guard")
    p.add_argument("--pilot-dbw", type=float, help="pilot power in dBW")
    p.add_argument("--snr-db", help="comma-separated SNR list in dB")
    p.add_argument("--sim-path", choices=["dd", "tf"], help="simulation route")
    p.add_argument("--workers", type=int, help="parallel workers")

    p = sub.add_parser("window-response", help="dump |G_N| on a fine offset lattice")
    _add_common(p)
    p.add_argument(
        "--window",
        choices=["rect", "sine", "dc", "ideal"],
        default="rect",
        help="window kind",
    )
    p.add_argument("--sl-db", type=float, default=-40.0)
    p.add_argument("--n-doppler", type=int, default=20)
    p.add_argument("--resolution", type=float, default=0.01, help="lattice step in bins")

    p = sub.add_parser("floor-table", help="analytic error floors across configs")
    _add_common(p)
    p.add_argument("--sl-db", type=float, default=-40.0)
    p.add_argument("--pilot-dbw", help="comma-separated pilot powers in dBW")

    p = sub.add_parser("dump-channel", help="draw one channel and dump its paths")
    _add_common(p)

    return parser


def _overrides_from_args(args: argparse.Namespace) -> dict:
    over: dict = {}
    if args.config:
        over.update(parse_config_file(args.config))
    if args.seed is not None:
        over["master_seed"] = args.seed
    for attr, key in [
        ("frames", "frames"),
        ("khat", "k_hat"),
        ("sl_db", "sl_db"),
        ("snr_db", "snr_db_list"),
        ("sim_path", "sim_path"),
        ("workers", "workers"),
    ]:
        value = getattr(args, attr, None)
        if value is not None:
            over[key] = value
    if getattr(args, "pilot_dbw", None) is not None:
        over["pilot_dbw_list"] = str(args.pilot_dbw)
    if getattr(args, "window", None) is not None:
        side = "tx_window" if getattr(args, "window_side", "tx") == "tx" else "rx_window"
        over[side] = args.window
    return over


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "mse-sweep":
            cfg = default_sim_config(**_overrides_from_args(args))
            _emit(sweep_to_csv(run_mse_sweep(cfg)), args.out)
        elif args.command == "window-response":
            text = run_window_response_dump(
                args.window, args.n_doppler, args.resolution, args.sl_db
            )
            _emit(text, args.out)
        elif args.command == "floor-table":
            over = parse_config_file(args.config) if args.config else {}
            cfg = default_sim_config(**over)
            dbw = (
                tuple(float(v) for v in args.pilot_dbw.split(","))
                if args.pilot_dbw
                else cfg.pilot_dbw_list
            )
            specs = (
                WindowSpec("rect"),
                WindowSpec("sine"),
                WindowSpec("dc", args.sl_db),
            )
            text = run_floor_table(
                cfg.dims,
                cfg.channel.k_max,
                cfg.channel.l_max,
                window_specs=specs,
                pilot_dbw_list=dbw,
            )
            _emit(text, args.out)
        elif args.command == "dump-channel":
            cfg = default_sim_config(**_overrides_from_args(args))
            ch = gen_channel(cfg.dims, cfg.channel, resolve_seed(cfg.master_seed, 0, 0))
            if args.out is None:
                raise ValueError("dump-channel requires --out")
            write_channel_csv(ch, args.out)
    except (ValueError, OSError) as exc:
        print(f"otfswin: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
