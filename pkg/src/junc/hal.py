"""Virtual pin/clock device driving the reference interpreter.

Clock semantics are shared with the C++ simulator so traces diff cleanly:
every clock query advances virtual time by one tick and returns the new
value; digital reads and writes do not advance time. Scheduled input levels
become visible once the clock reaches their timestamp; unscheduled pins read
low. The run stops cooperatively (from inside `now`) when the clock would
pass the horizon, or would reach `budget * tick` when a step budget is set.
"""

from __future__ import annotations

import bisect
import csv
import io
from dataclasses import dataclass, field

INPUT, OUTPUT, INPUT_PULLUP = 0, 1, 2

TRACE_HEADER = "time_ms,pin,level"


class StopRun(Exception):
    """Cooperative end of a simulated run (horizon or budget reached)."""


@dataclass
class VirtualDevice:
    schedule: list[tuple[int, int, int]] = field(default_factory=list)
    tick: int = 1
    horizon: int | None = None
    budget: int | None = None
    clock: int = 0
    steps: int = 0
    trace: list[tuple[int, int, int]] = field(default_factory=list)
    modes: dict[int, int] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.schedule = sorted(self.schedule)
        self._times: dict[int, list[int]] = {}
        self._levels: dict[int, list[int]] = {}
        for t, pin, level in self.schedule:
            self._times.setdefault(pin, []).append(t)
            self._levels.setdefault(pin, []).append(level)

    # -- HostHooks surface ---------------------------------------------------

    def now(self) -> int:
        nxt = self.clock + self.tick
        if self.horizon is not None and nxt > self.horizon:
            raise StopRun()
        if self.budget is not None and nxt >= self.budget * self.tick:
            raise StopRun()
        self.clock = nxt
        self.steps += 1
        return nxt

    def delay(self, ms: int) -> None:
        nxt = self.clock + ms
        if self.horizon is not None and nxt > self.horizon:
            raise StopRun()
        if self.budget is not None and nxt >= self.budget * self.tick:
            raise StopRun()
        self.clock = nxt

    def read_pin(self, pin: int) -> int:
        times = self._times.get(pin)
        if not times:
            return 0
        idx = bisect.bisect_right(times, self.clock) - 1
        if idx < 0:
            return 0
        return self._levels[pin][idx]

    def write_pin(self, pin: int, level: int) -> None:
        if self.modes.get(pin) != OUTPUT:
            self.warnings.append(
                f"write to pin {pin} at {self.clock} ms before pinMode(OUTPUT)"
            )
        self.trace.append((self.clock, pin, level))

    def set_pin_mode(self, pin: int, mode: int) -> None:
        self.modes[pin] = mode


def parse_schedule(text: str) -> list[tuple[int, int, int]]:
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or [c.strip() for c in rows[0]] != ["time_ms", "pin", "level"]:
        raise ValueError("schedule must start with header 'time_ms,pin,level'")
    events = []
    for row in rows[1:]:
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 3:
            raise ValueError(f"malformed schedule row: {row!r}")
        t, pin, level = (int(c.strip()) for c in row)
        if level not in (0, 1):
            raise ValueError(f"schedule level must be 0 or 1, found {level}")
        events.append((t, pin, level))
    return events


def load_schedule(path: str) -> list[tuple[int, int, int]]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_schedule(fh.read())


def format_trace(trace: list[tuple[int, int, int]]) -> str:
    lines = [TRACE_HEADER]
    lines.extend(f"{t},{pin},{level}" for t, pin, level in trace)
    return "\n".join(lines) + "\n"
