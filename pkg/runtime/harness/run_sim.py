#!/usr/bin/env python3
"""Compile an emitted C++ program against the simulator and run it.

    run_sim.py EMITTED.cpp --out TRACE.csv [--schedule S.csv]
               [--horizon MS] [--tick MS] [--build-dir DIR] [--keep-log]

Exit status: 0 clean run (including a cooperative horizon stop), 2 target
compile failure (log on stderr), 3 runtime quit (non-exhaustive match), and
4 for any other nonzero program status.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import tempfile
from pathlib import Path

RUNTIME_INCLUDE = Path(__file__).resolve().parent.parent / "include"
QUIT_EXIT_STATUS = 42


def compile_program(source: Path, build_dir: Path, cxx: str) -> tuple[Path | None, str]:
    build_dir.mkdir(parents=True, exist_ok=True)
    binary = build_dir / (source.stem + ".bin")
    cmd = [
        cxx, "-std=c++17", "-DJUNIPER_SIM", f"-I{RUNTIME_INCLUDE}",
        str(source), "-o", str(binary),
    ]
    result = subprocess.run(cmd, capture_output=True, text=True)
    if result.returncode != 0:
        return None, result.stderr
    return binary, result.stderr


def run(binary: Path, schedule: str | None, trace: str,
        horizon: int | None, tick: int) -> int:
    env = dict(os.environ)
    env["JUNIPER_TICK_MS"] = str(tick)
    env["JUNIPER_TRACE"] = trace
    if horizon is not None:
        env["JUNIPER_HORIZON_MS"] = str(horizon)
    else:
        env.pop("JUNIPER_HORIZON_MS", None)
    if schedule:
        env["JUNIPER_SCHEDULE"] = schedule
    else:
        env.pop("JUNIPER_SCHEDULE", None)
    result = subprocess.run([str(binary)], env=env)
    return result.returncode


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("source", help="emitted .cpp file")
    parser.add_argument("--out", required=True, help="trace CSV output path")
    parser.add_argument("--schedule", help="input schedule CSV")
    parser.add_argument("--horizon", type=int, default=None,
                        help="virtual-time horizon in ms")
    parser.add_argument("--tick", type=int, default=1,
                        help="ms advanced per millis() call")
    parser.add_argument("--build-dir", default=None)
    parser.add_argument("--cxx", default=os.environ.get("CXX", "g++"))
    args = parser.parse_args(argv)

    source = Path(args.source)
    if not source.is_file():
        print(f"run_sim: no such file: {source}", file=sys.stderr)
        return 1
    build_dir = (
        Path(args.build_dir)
        if args.build_dir
        else Path(tempfile.mkdtemp(prefix="juniper-sim-"))
    )
    binary, log = compile_program(source, build_dir, args.cxx)
    if binary is None:
        print("run_sim: target compilation failed:", file=sys.stderr)
        sys.stderr.write(log)
        return 2
    status = run(binary, args.schedule, args.out, args.horizon, args.tick)
    if status == QUIT_EXIT_STATUS:
        print("run_sim: program ended via runtime quit", file=sys.stderr)
        return 3
    if status != 0:
        print(f"run_sim: program exited with status {status}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
