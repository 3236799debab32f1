"""Headless entry point.

Batch mode loads a scenario, runs it to the duration cutoff, writes every
report into the output directory and prints a one-page summary. Serve
mode exposes the same engine through the live line-JSON control protocol
and starts paused so an operator can inspect the initial topology first.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .engine import Engine
from .report import summary_text, write_reports
from .scenario import Scenario, ScenarioError, load_scenario_file

log = logging.getLogger("llnsim")


@dataclass(frozen=True)
class RunConfig:
    scenario_path: Path
    seed: Optional[int] = None
    duration_s: Optional[float] = None
    out_dir: Optional[Path] = None
    serve_port: Optional[int] = None
    verbosity: int = 0               # -1 quiet, 0 normal, 1 verbose


def _load(config: RunConfig) -> Scenario:
    scenario = load_scenario_file(config.scenario_path)
    if config.seed is not None:
        scenario = dataclasses.replace(scenario, seed=config.seed)
    if config.duration_s is not None:
        if config.duration_s < 0:
            raise ScenarioError("duration override must be >= 0")
        scenario = dataclasses.replace(scenario, duration_s=config.duration_s)
    return scenario


def _out_dir(config: RunConfig) -> Path:
    if config.out_dir is not None:
        return config.out_dir
    return config.scenario_path.parent / f"{config.scenario_path.stem}_out"


def run_batch(config: RunConfig) -> int:
    """Simulate to the duration cutoff, write reports, print the summary."""
    try:
        scenario = _load(config)
    except (OSError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    engine = Engine(scenario)
    fired = engine.run()
    out = _out_dir(config)
    try:
        written = write_reports(engine, out)
    except OSError as exc:
        print(f"error: cannot write reports: {exc}", file=sys.stderr)
        return 2
    log.info("fired %d events, wrote %d report files to %s", fired, len(written), out)
    print(summary_text(engine), end="")
    return 0


def run_serve(config: RunConfig) -> int:
    try:
        scenario = _load(config)
    except (OSError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    port = config.serve_port
    if port is None or not 1024 <= port <= 65535:
        print(f"error: serve port must lie in 1024-65535, got {port}", file=sys.stderr)
        return 2

    import signal

    from .server import Server

    engine = Engine(scenario)
    notes_path = config.scenario_path.with_suffix(".notes.txt")
    server = Server(engine, port=port, notes_path=notes_path)
    try:
        server.start()
    except OSError as exc:
        print(f"error: cannot listen on port {port}: {exc}", file=sys.stderr)
        return 2
    signal.signal(signal.SIGTERM, lambda *_: server.request_stop())
    print(f"serving {scenario.name} on 127.0.0.1:{server.port} (paused)", file=sys.stderr)
    try:
        server.wait()
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
        engine.finalize()
        try:
            write_reports(engine, _out_dir(config))
        except OSError as exc:
            print(f"error: cannot write reports: {exc}", file=sys.stderr)
            return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="llnsim",
        description="Deterministic simulator for low-power lossy mesh networks.",
    )
    parser.add_argument("--scenario", required=True, type=Path, help="scenario JSON path")
    parser.add_argument("--seed", type=int, help="override the scenario seed")
    parser.add_argument("--duration", type=float, metavar="SECONDS", help="override the duration")
    parser.add_argument("--out", type=Path, metavar="DIR", help="report output directory")
    parser.add_argument("--serve", type=int, metavar="PORT", help="serve the live control protocol")
    volume = parser.add_mutually_exclusive_group()
    volume.add_argument("--quiet", action="store_true", help="errors only")
    volume.add_argument("--verbose", action="store_true", help="chatty progress logging")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    verbosity = 1 if args.verbose else (-1 if args.quiet else 0)
    logging.basicConfig(
        level={1: logging.INFO, 0: logging.WARNING, -1: logging.ERROR}[verbosity],
        format="%(levelname)s %(name)s: %(message)s",
    )
    config = RunConfig(
        scenario_path=args.scenario,
        seed=args.seed,
        duration_s=args.duration,
        out_dir=args.out,
        serve_port=args.serve,
        verbosity=verbosity,
    )
    if args.serve is not None:
        return run_serve(config)
    return run_batch(config)


if __name__ == "__main__":
    sys.exit(main())
