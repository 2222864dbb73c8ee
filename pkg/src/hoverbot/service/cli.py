"""Command-line entry point for the ground-control service."""

from __future__ import annotations

import argparse
import logging
import sys
import threading

from hoverbot.service.config import ConfigError
from hoverbot.service.http import BindError, init_service


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hoverbot-service",
        description="Ground-control service for tele-operated hoverbots.",
    )
    parser.add_argument("--config", required=True, help="path to the JSON config file")
    parser.add_argument(
        "--listen", metavar="HOST:PORT", help="override the configured listener address"
    )
    parser.add_argument(
        "--fast-clock",
        action="store_true",
        help="run the simulation clock faster than real time (for tests/demos)",
    )
    parser.add_argument("--log-dir", metavar="PATH", help="directory for command logs")
    parser.add_argument(
        "--console-dir",
        metavar="PATH",
        help="serve a built operator console bundle from /console",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(name)s: %(message)s")
    try:
        handle = init_service(
            args.config,
            listen=args.listen,
            fast_clock=args.fast_clock,
            log_dir=args.log_dir,
            console_dir=args.console_dir,
        )
    except (ConfigError, BindError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    stations = ", ".join(handle.control.station_ids()) or "(none)"
    print(f"listening on {handle.base_url}  stations: {stations}")
    try:
        threading.Event().wait()
    except KeyboardInterrupt:
        pass
    finally:
        handle.shutdown()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
