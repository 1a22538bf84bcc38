"""Bundled standard library modules, prepended to user programs by default."""

from __future__ import annotations

from importlib import resources

STDLIB_ORDER = ["Prelude", "Io", "Time", "Signal", "Button"]
STDLIB_MODULES = frozenset(STDLIB_ORDER)


def stdlib_sources() -> list[tuple[str, str]]:
    """(file-name, text) pairs in dependency order."""
    out: list[tuple[str, str]] = []
    for name in STDLIB_ORDER:
        text = resources.files("junc").joinpath(f"stdlib/{name}.jun").read_text(
            encoding="utf-8"
        )
        out.append((f"{name}.jun", text))
    return out
