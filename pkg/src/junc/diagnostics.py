"""Source positions and diagnostics shared by every compiler stage."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True, slots=True)
class Span:
    """Half-open source region: (line, col) are 1-based, offset is 0-based bytes."""

    file: str
    line: int
    col: int
    length: int = 0
    offset: int = 0


DUMMY_SPAN = Span("<builtin>", 1, 1)


@dataclass
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    span: Span

    def line(self) -> str:
        """One-per-line machine readable rendering."""
        s = self.span
        return f"{s.file}:{s.line}:{s.col}: {self.severity}: {self.message}"


class JunError(Exception):
    """Base for positioned compiler errors; carries a ready-made Diagnostic."""

    def __init__(self, message: str, span: Span):
        super().__init__(message)
        self.message = message
        self.span = span

    def diagnostic(self) -> Diagnostic:
        return Diagnostic("error", self.message, self.span)


class LexError(JunError):
    pass


class ParseError(JunError):
    pass


class TypeError_(JunError):
    """Name avoids shadowing the builtin; raised for resolution/type faults."""


class InterpFault(JunError):
    """Runtime fault raised by the reference evaluator."""


@dataclass
class DiagnosticSink:
    """Accumulates diagnostics; `errors` ignores warnings."""

    items: list[Diagnostic] = field(default_factory=list)

    def error(self, message: str, span: Span) -> None:
        self.items.append(Diagnostic("error", message, span))

    def warning(self, message: str, span: Span) -> None:
        self.items.append(Diagnostic("warning", message, span))

    def extend(self, other: DiagnosticSink | list[Diagnostic]) -> None:
        self.items.extend(other.items if isinstance(other, DiagnosticSink) else other)

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.items if d.severity == "error"]

    def ok(self) -> bool:
        return not self.errors


def render_human(diag: Diagnostic, source: str | None = None) -> str:
    """Human format: the machine line plus a source excerpt with a caret."""
    out = [diag.line()]
    if source is not None:
        lines = source.splitlines()
        if 1 <= diag.span.line <= len(lines):
            text = lines[diag.span.line - 1]
            out.append(text)
            out.append(" " * (diag.span.col - 1) + "^" + "~" * max(0, diag.span.length - 1))
    return "\n".join(out)
