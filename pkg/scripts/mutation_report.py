#!/usr/bin/env python3
"""Mutation robustness report: delete each token of the given .jun files and
classify the pipeline outcome (parse error, type error, clean, crash).

    python scripts/mutation_report.py tests/corpus/mutation/*.jun
"""

from __future__ import annotations

import sys
from collections import Counter
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from junc.lexer import TokenKind, tokenize
from junc.parser import parse_file, parse_program
from junc.stdlib_loader import stdlib_sources
from junc.typecheck import check_one_module


def classify(stdlib_modules, name: str, text: str) -> str:
    try:
        module, diags = parse_file(text, name)
        if any(d.severity == "error" for d in diags):
            return "parse-error"
        if module is None:
            return "parse-error"
        sink = check_one_module(stdlib_modules + [module], module)
        return "type-error" if sink.errors else "clean"
    except Exception as exc:  # crash detection is the whole point here
        return f"CRASH({type(exc).__name__})"


def main(paths: list[str]) -> int:
    stdlib_modules, diags = parse_program(stdlib_sources())
    assert not diags
    status = 0
    for arg in paths:
        path = Path(arg)
        text = path.read_text(encoding="utf-8")
        tokens = [
            t for t in tokenize(text, path.name)
            if t.kind is not TokenKind.EOF
        ]
        outcomes: Counter[str] = Counter()
        for tok in tokens:
            mutated = (
                text[: tok.span.offset]
                + text[tok.span.offset + tok.span.length :]
            )
            outcomes[classify(stdlib_modules, path.name, mutated)] += 1
        print(f"{path.name}: {len(tokens)} mutants -> {dict(outcomes)}")
        if outcomes.get("clean") or any(k.startswith("CRASH") for k in outcomes):
            status = 1
    return status


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:] or ["tests/corpus/mutation/MutA.jun",
                                   "tests/corpus/mutation/MutB.jun"]))
