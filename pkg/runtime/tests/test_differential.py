"""End-to-end differential: the compiled simulator run must produce traces
byte-identical to the reference interpreter on the same schedules.

The compiler is driven exclusively through its command line (`python -m
junc`); the simulator through the harness script. Nothing here imports
compiler internals.
"""

from __future__ import annotations

import shutil
import subprocess
import sys
import time
from pathlib import Path

import pytest

RUNTIME_DIR = Path(__file__).resolve().parent.parent
REPO_ROOT = RUNTIME_DIR.parent
CORPUS = REPO_ROOT / "tests" / "corpus"
HARNESS = RUNTIME_DIR / "harness" / "run_sim.py"

pytestmark = pytest.mark.skipif(
    shutil.which("g++") is None, reason="no C++ toolchain"
)


def junc(*args: str) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "junc", *args],
        capture_output=True,
        text=True,
        cwd=REPO_ROOT,
    )


def harness(*args: str) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, str(HARNESS), *args], capture_output=True, text=True
    )


def write_schedule(path: Path, rows: list[tuple[int, int, int]]) -> Path:
    lines = ["time_ms,pin,level"] + [f"{t},{p},{l}" for t, p, l in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def differential(tmp_path, label, sources, schedule_rows, horizon, tick):
    schedule = write_schedule(tmp_path / f"{label}_sched.csv", schedule_rows)
    emitted = tmp_path / f"{label}.cpp"
    result = junc("emit", *[str(s) for s in sources], "-o", str(emitted))
    assert result.returncode == 0, result.stderr

    interp_trace = tmp_path / f"{label}_interp.csv"
    result = junc(
        "run-interp", *[str(s) for s in sources],
        "--schedule", str(schedule), "--tick", str(tick),
        "--horizon", str(horizon), "-o", str(interp_trace),
    )
    assert result.returncode == 0, result.stderr

    sim_trace = tmp_path / f"{label}_sim.csv"
    result = harness(
        str(emitted), "--out", str(sim_trace), "--schedule", str(schedule),
        "--horizon", str(horizon), "--tick", str(tick),
        "--build-dir", str(tmp_path / "build"),
    )
    assert result.returncode == 0, result.stderr

    a = interp_trace.read_bytes()
    b = sim_trace.read_bytes()
    assert a == b, f"{label}: interpreter and simulator traces differ"
    return a


def test_blink_and_buttonblink_traces_byte_identical(tmp_path):
    started = time.monotonic()

    blink = differential(
        tmp_path, "blink", [CORPUS / "Blink.jun"],
        schedule_rows=[], horizon=10_000, tick=100,
    )
    # Sanity: the shared trace is the expected blink pattern.
    lines = blink.decode().splitlines()
    assert lines[1:] == [f"{1000 * k},13,{k % 2}" for k in range(1, 11)]

    pressed = differential(
        tmp_path, "buttonblink", [CORPUS / "ButtonBlink.jun"],
        schedule_rows=[(1500, 7, 1), (2500, 7, 0)], horizon=12_000, tick=100,
    )
    rows = [line.split(",") for line in pressed.decode().splitlines()[1:]]
    # After the release-driven toggle the LED is written low only.
    toggle_at = next(int(t) for t, _, lvl in rows if int(t) > 2500)
    assert all(lvl == "0" for t, _, lvl in rows if int(t) >= toggle_at)

    elapsed = time.monotonic() - started
    assert elapsed < 60.0, f"differential runs took {elapsed:.1f} s"
    print(
        f"[PASS] compiled vs interpreter traces byte-identical "
        f"(blink, button+blink; {elapsed:.1f} s incl. compilation)"
    )


def test_kitchen_sink_self_checks_agree(tmp_path):
    # A self-checking program: every assertion writes one pin level, so the
    # trace is 1s-only exactly when fixed-width arithmetic, value semantics,
    # pattern matching, closures, cells, and the combinators agree.
    trace = differential(
        tmp_path, "kitchensink", [CORPUS / "KitchenSink.jun"],
        schedule_rows=[], horizon=100_000, tick=100,
    )
    rows = [line.split(",") for line in trace.decode().splitlines()[1:]]
    assert len(rows) == 34
    assert all(level == "1" for _, _, level in rows)
    print(f"[PASS] kitchen-sink semantics: {len(rows)} checks agree in both backends")


def test_second_press_resumes_blinking(tmp_path):
    # Press/release at 1500/2500 turns the mode off; a second press/release
    # at 5500/6500 turns it back on, and high writes resume.
    trace = differential(
        tmp_path, "twopress", [CORPUS / "ButtonBlink.jun"],
        schedule_rows=[(1500, 7, 1), (2500, 7, 0), (5500, 7, 1), (6500, 7, 0)],
        horizon=12_000, tick=100,
    )
    rows = [line.split(",") for line in trace.decode().splitlines()[1:]]
    led = [(int(t), int(lvl)) for t, pin, lvl in rows if pin == "13"]
    off_window = [lvl for t, lvl in led if 3000 <= t <= 6000]
    assert off_window and all(lvl == 0 for lvl in off_window)
    assert any(lvl == 1 for t, lvl in led if t > 7000), "blinking must resume"


def test_quiet_program_traces_agree(tmp_path):
    # A main that never touches the pins or the clock: both sides terminate
    # on their own and emit the empty trace.
    trace = differential(
        tmp_path, "muta", [CORPUS / "mutation" / "MutA.jun"],
        schedule_rows=[], horizon=1_000, tick=100,
    )
    assert trace.decode().splitlines() == ["time_ms,pin,level"]


def test_simulator_run_is_deterministic(tmp_path):
    first = differential(
        tmp_path, "det1", [CORPUS / "Blink.jun"],
        schedule_rows=[], horizon=5_000, tick=100,
    )
    second = differential(
        tmp_path, "det2", [CORPUS / "Blink.jun"],
        schedule_rows=[], horizon=5_000, tick=100,
    )
    assert first == second


def test_non_exhaustive_match_maps_to_quit_status(tmp_path):
    source = tmp_path / "Fall.jun"
    source.write_text(
        "module Fall\n"
        "open(Prelude)\n"
        "fun main() : unit = (\n"
        "    let m : maybe<int32> = nothing<int32>();\n"
        "    case m of\n"
        "    | just<int32>(v) => ()\n"
        "    end\n"
        ")\n",
        encoding="utf-8",
    )
    emitted = tmp_path / "fall.cpp"
    result = junc("emit", str(source), "-o", str(emitted))
    assert result.returncode == 0, result.stderr

    trace = tmp_path / "fall_trace.csv"
    result = harness(
        str(emitted), "--out", str(trace), "--tick", "1",
        "--build-dir", str(tmp_path / "build"),
    )
    assert result.returncode == 3, (result.returncode, result.stderr)
    assert "runtime quit" in result.stderr
    # The (empty) trace still flushed.
    assert trace.read_text().splitlines()[0] == "time_ms,pin,level"


def test_compile_failure_reported_with_log(tmp_path):
    bad = tmp_path / "broken.cpp"
    bad.write_text("this is not C++\n", encoding="utf-8")
    result = harness(str(bad), "--out", str(tmp_path / "t.csv"),
                     "--build-dir", str(tmp_path / "build"))
    assert result.returncode == 2
    assert "compilation failed" in result.stderr
