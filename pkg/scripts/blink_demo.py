#!/usr/bin/env python3
"""End-to-end demo: compile the blink program, run it in the interpreter and
(when g++ is available) in the C++ simulator, and diff the traces.

    python scripts/blink_demo.py [--horizon 10000] [--tick 100]
"""

from __future__ import annotations

import argparse
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
BLINK = REPO / "tests" / "corpus" / "Blink.jun"
HARNESS = REPO / "runtime" / "harness" / "run_sim.py"


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--horizon", type=int, default=10_000)
    parser.add_argument("--tick", type=int, default=100)
    args = parser.parse_args()

    work = Path(tempfile.mkdtemp(prefix="blink-demo-"))
    schedule = work / "schedule.csv"
    schedule.write_text("time_ms,pin,level\n")

    emitted = work / "blink.cpp"
    subprocess.run(
        [sys.executable, "-m", "junc", "emit", str(BLINK), "-o", str(emitted)],
        check=True,
    )
    print(f"emitted {emitted} ({emitted.stat().st_size} bytes)")

    interp_trace = work / "interp.csv"
    subprocess.run(
        [
            sys.executable, "-m", "junc", "run-interp", str(BLINK),
            "--schedule", str(schedule), "--tick", str(args.tick),
            "--horizon", str(args.horizon), "-o", str(interp_trace),
        ],
        check=True,
    )
    print("interpreter trace:")
    print(interp_trace.read_text())

    if shutil.which("g++") is None:
        print("g++ not found; skipping the compiled run")
        return 0

    sim_trace = work / "sim.csv"
    subprocess.run(
        [
            sys.executable, str(HARNESS), str(emitted),
            "--out", str(sim_trace), "--schedule", str(schedule),
            "--horizon", str(args.horizon), "--tick", str(args.tick),
        ],
        check=True,
    )
    same = interp_trace.read_bytes() == sim_trace.read_bytes()
    print(f"compiled trace identical to interpreter: {same}")
    return 0 if same else 1


if __name__ == "__main__":
    sys.exit(main())
