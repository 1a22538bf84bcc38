"""Command line driver: `junc check|emit|run-interp`.

Exit status: 0 clean, 1 language errors, 2 I/O or usage faults, 3 runtime
fault in run-interp. Module order on the command line is authoritative; the
bundled stdlib modules are prepended unless --no-stdlib is given.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .codegen import emit_program
from .diagnostics import Diagnostic, InterpFault, render_human
from .hal import VirtualDevice, format_trace, load_schedule
from .interp import run_main
from .parser import parse_program
from .stdlib_loader import stdlib_sources
from .typecheck import TypedProgram, check_program

EXIT_OK = 0
EXIT_LANG = 1
EXIT_IO = 2
EXIT_FAULT = 3


@dataclass
class BuildConfig:
    files: list[str]
    mode: str  # "check" | "emit" | "run-interp"
    output: str | None = None
    use_stdlib: bool = True
    schedule: str | None = None
    budget: int | None = None
    horizon: int | None = None
    tick: int = 1
    diag: str = "human"
    extra_includes: list[str] = field(default_factory=list)

    def validate(self) -> str | None:
        if self.mode == "emit" and not self.output:
            return "emit mode requires an output path (-o)"
        if self.mode == "run-interp" and not self.schedule:
            return "run-interp requires a schedule (--schedule)"
        return None


def _read_sources(cfg: BuildConfig) -> list[tuple[str, str]] | None:
    sources = stdlib_sources() if cfg.use_stdlib else []
    for name in cfg.files:
        try:
            sources.append((name, Path(name).read_text(encoding="utf-8")))
        except OSError as e:
            print(f"junc: cannot read '{name}': {e.strerror}", file=sys.stderr)
            return None
    return sources


def _print_diags(diags: list[Diagnostic], cfg: BuildConfig,
                 sources: dict[str, str]) -> None:
    for d in diags:
        if cfg.diag == "lines":
            print(d.line(), file=sys.stderr)
        else:
            print(render_human(d, sources.get(d.span.file)), file=sys.stderr)


def _frontend(cfg: BuildConfig) -> tuple[TypedProgram | None, int]:
    sources = _read_sources(cfg)
    if sources is None:
        return None, EXIT_IO
    by_name = dict(sources)
    modules, parse_diags = parse_program(sources)
    if parse_diags:
        _print_diags(parse_diags, cfg, by_name)
        if any(d.severity == "error" for d in parse_diags):
            return None, EXIT_LANG
    program, sink = check_program(modules)
    _print_diags(sink.items, cfg, by_name)
    if program is None:
        return None, EXIT_LANG
    return program, EXIT_OK


def cmd_check(cfg: BuildConfig) -> int:
    program, status = _frontend(cfg)
    return status


def cmd_emit(cfg: BuildConfig) -> int:
    program, status = _frontend(cfg)
    if program is None:
        return status
    unit = emit_program(program, tuple(cfg.extra_includes))
    try:
        Path(cfg.output).write_text(unit.text, encoding="utf-8")
    except OSError as e:
        print(f"junc: cannot write '{cfg.output}': {e.strerror}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_run_interp(cfg: BuildConfig) -> int:
    program, status = _frontend(cfg)
    if program is None:
        return status
    try:
        schedule = load_schedule(cfg.schedule)
    except OSError as e:
        print(f"junc: cannot read schedule '{cfg.schedule}': {e.strerror}",
              file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"junc: bad schedule: {e}", file=sys.stderr)
        return EXIT_IO
    device = VirtualDevice(
        schedule=schedule, tick=cfg.tick, horizon=cfg.horizon, budget=cfg.budget
    )
    status = EXIT_OK
    try:
        trace = run_main(program, device)
    except InterpFault as e:
        print(render_human(e.diagnostic()), file=sys.stderr)
        trace = device.trace  # partial trace still flushes
        status = EXIT_FAULT
    text = format_trace(trace)
    if cfg.output:
        try:
            Path(cfg.output).write_text(text, encoding="utf-8")
        except OSError as e:
            print(f"junc: cannot write '{cfg.output}': {e.strerror}",
                  file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)
    return status


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="junc",
        description="Compiler toolchain for the Juniper FRP language",
    )
    sub = parser.add_subparsers(dest="mode", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("files", nargs="*", help=".jun module files, in order")
        p.add_argument("--no-stdlib", action="store_true",
                       help="do not prepend the bundled stdlib modules")
        p.add_argument("--diag", choices=("human", "lines"), default="human",
                       help="diagnostics format")

    p_check = sub.add_parser("check", help="parse and type check only")
    common(p_check)

    p_emit = sub.add_parser("emit", help="compile to a single C++ file")
    common(p_emit)
    p_emit.add_argument("-o", "--output", required=True, help="output .cpp path")
    p_emit.add_argument("--include", action="append", default=[],
                        metavar="HEADER",
                        help="extra #include to emit (e.g. '<FastLED.h>')")

    p_run = sub.add_parser(
        "run-interp", help="run main in the reference interpreter"
    )
    common(p_run)
    p_run.add_argument("-o", "--output", help="trace CSV path (default stdout)")
    p_run.add_argument("--schedule", required=True,
                       help="input schedule CSV (time_ms,pin,level)")
    p_run.add_argument("--budget", type=int, default=None,
                       help="virtual-time budget in ticks; the run halts once "
                            "the clock would reach budget*tick")
    p_run.add_argument("--horizon", type=int, default=None,
                       help="stop once the clock would pass this (virtual ms)")
    p_run.add_argument("--tick", type=int, default=1,
                       help="virtual ms advanced per clock query (default 1)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    cfg = BuildConfig(
        files=args.files,
        mode=args.mode,
        output=getattr(args, "output", None),
        use_stdlib=not args.no_stdlib,
        schedule=getattr(args, "schedule", None),
        budget=getattr(args, "budget", None),
        horizon=getattr(args, "horizon", None),
        tick=getattr(args, "tick", 1),
        diag=args.diag,
        extra_includes=list(getattr(args, "include", [])),
    )
    problem = cfg.validate()
    if problem:
        print(f"junc: {problem}", file=sys.stderr)
        return EXIT_IO
    if cfg.mode == "check":
        return cmd_check(cfg)
    if cfg.mode == "emit":
        return cmd_emit(cfg)
    return cmd_run_interp(cfg)


if __name__ == "__main__":
    sys.exit(main())
