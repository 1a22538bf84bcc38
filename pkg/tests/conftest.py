from __future__ import annotations

import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
CORPUS = TESTS_DIR / "corpus"
REPO_ROOT = TESTS_DIR.parent

sys.path.insert(0, str(TESTS_DIR))

from junc.parser import parse_program
from junc.stdlib_loader import stdlib_sources
from junc.typecheck import TypedProgram, check_program

HOURGLASS_ORDER = [
    "Accelerometer", "Setting", "Timing", "Paused", "Finale", "FastLed",
    "Hourglass",
]


def corpus_sources(*names: str) -> list[tuple[str, str]]:
    out = []
    for name in names:
        path = CORPUS / name
        out.append((path.name, path.read_text(encoding="utf-8")))
    return out


def hourglass_sources() -> list[tuple[str, str]]:
    return corpus_sources(*[f"hourglass/{n}.jun" for n in HOURGLASS_ORDER])


def all_corpus_files() -> list[Path]:
    return sorted(CORPUS.rglob("*.jun"))


def build_program(
    sources: list[tuple[str, str]], stdlib: bool = True
) -> TypedProgram:
    """Parse + check, asserting zero diagnostics; returns the typed program."""
    files = (stdlib_sources() if stdlib else []) + sources
    modules, parse_diags = parse_program(files)
    assert not parse_diags, [d.line() for d in parse_diags]
    program, sink = check_program(modules)
    assert program is not None, [d.line() for d in sink.items]
    assert not sink.errors, [d.line() for d in sink.errors]
    return program


@pytest.fixture(scope="session")
def stdlib_program() -> TypedProgram:
    return build_program([])


@pytest.fixture(scope="session")
def blink_program() -> TypedProgram:
    return build_program(corpus_sources("Blink.jun"))


@pytest.fixture(scope="session")
def buttonblink_program() -> TypedProgram:
    return build_program(corpus_sources("ButtonBlink.jun"))
