"""Lossless lexer for `.jun` sources.

Tokens keep their verbatim text and byte offsets, so the original file can be
reconstructed from the token stream plus the skipped whitespace/comments
(see `reconstruct`). Inline C++ blobs between two `#` marks are captured as a
single opaque token whose text excludes the delimiters.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .diagnostics import LexError, Span


class TokenKind(enum.Enum):
    IDENT = "identifier"
    TYVAR = "type-variable"
    INT = "integer"
    FLOAT = "float"
    STRING = "string"
    KEYWORD = "keyword"
    OPERATOR = "operator"
    PUNCT = "punctuation"
    INLINE = "inline-code"
    EOF = "end-of-file"


KEYWORDS = frozenset(
    """
    module include open export type of let fun mutable
    if then elif else end set ref for in to downto do while
    not fn case true false and or mod array null
    """.split()
)

# Longest match first.
MULTI_OPS = ["~~~", "<<<", ">>>", "&&&", "|||", "==", "!=", "<=", ">=", "=>", "->"]
SINGLE_OPS = "=<>+-*/.:|!"
PUNCT = "()[]{},;_"


@dataclass(frozen=True, slots=True)
class Token:
    kind: TokenKind
    text: str
    span: Span
    value: object = None  # decoded payload: int/float value, unescaped string, blob text

    def is_kw(self, word: str) -> bool:
        return self.kind is TokenKind.KEYWORD and self.text == word

    def is_op(self, op: str) -> bool:
        return self.kind is TokenKind.OPERATOR and self.text == op

    def is_punct(self, p: str) -> bool:
        return self.kind is TokenKind.PUNCT and self.text == p

    def describe(self) -> str:
        if self.kind is TokenKind.EOF:
            return "end of file"
        return f"'{self.text}'"


class _Cursor:
    def __init__(self, source: str, file: str):
        self.src = source
        self.file = file
        self.pos = 0
        self.line = 1
        self.col = 1

    def eof(self) -> bool:
        return self.pos >= len(self.src)

    def peek(self, ahead: int = 0) -> str:
        i = self.pos + ahead
        return self.src[i] if i < len(self.src) else ""

    def span_here(self, length: int) -> Span:
        return Span(self.file, self.line, self.col, length, self.pos)

    def advance(self, n: int = 1) -> str:
        text = self.src[self.pos : self.pos + n]
        for ch in text:
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.pos += n
        return text


def tokenize(source: str, file_name: str = "<input>") -> list[Token]:
    """Lex `source`; raises LexError with a span on the first lexical fault."""
    cur = _Cursor(source, file_name)
    tokens: list[Token] = []

    while not cur.eof():
        ch = cur.peek()

        if ch in " \t\r\n":
            cur.advance()
            continue

        if ch == "/" and cur.peek(1) == "/":
            while not cur.eof() and cur.peek() != "\n":
                cur.advance()
            continue

        if ch == "(" and cur.peek(1) == "*":
            _skip_block_comment(cur)
            continue

        if ch == "#":
            tokens.append(_lex_inline(cur))
            continue

        if ch == '"':
            tokens.append(_lex_string(cur))
            continue

        if ch == "'":
            tokens.append(_lex_tyvar(cur))
            continue

        if ch.isdigit():
            tokens.append(_lex_number(cur))
            continue

        if ch.isalpha() or ch == "_":
            tokens.append(_lex_word(cur))
            continue

        matched = False
        for op in MULTI_OPS:
            if cur.src.startswith(op, cur.pos):
                span = cur.span_here(len(op))
                cur.advance(len(op))
                tokens.append(Token(TokenKind.OPERATOR, op, span))
                matched = True
                break
        if matched:
            continue

        if ch in SINGLE_OPS:
            span = cur.span_here(1)
            cur.advance()
            tokens.append(Token(TokenKind.OPERATOR, ch, span))
            continue

        if ch in PUNCT:
            span = cur.span_here(1)
            cur.advance()
            tokens.append(Token(TokenKind.PUNCT, ch, span))
            continue

        raise LexError(f"illegal character {ch!r}", cur.span_here(1))

    tokens.append(Token(TokenKind.EOF, "", cur.span_here(0)))
    return tokens


def _skip_block_comment(cur: _Cursor) -> None:
    open_span = cur.span_here(2)
    cur.advance(2)
    depth = 1
    while depth > 0:
        if cur.eof():
            raise LexError("unterminated block comment", open_span)
        if cur.peek() == "(" and cur.peek(1) == "*":
            depth += 1
            cur.advance(2)
        elif cur.peek() == "*" and cur.peek(1) == ")":
            depth -= 1
            cur.advance(2)
        else:
            cur.advance()


def _lex_inline(cur: _Cursor) -> Token:
    open_span = cur.span_here(1)
    cur.advance()  # opening '#'
    start = cur.pos
    while not cur.eof() and cur.peek() != "#":
        cur.advance()
    if cur.eof():
        raise LexError("unterminated '#' inline code block", open_span)
    blob = cur.src[start : cur.pos]
    cur.advance()  # closing '#'
    length = cur.pos - open_span.offset
    span = Span(cur.file, open_span.line, open_span.col, length, open_span.offset)
    return Token(TokenKind.INLINE, blob, span, value=blob)


def _lex_string(cur: _Cursor) -> Token:
    open_span = cur.span_here(1)
    start = cur.pos
    cur.advance()  # opening quote
    chars: list[str] = []
    while True:
        if cur.eof() or cur.peek() == "\n":
            raise LexError("unterminated string literal", open_span)
        ch = cur.peek()
        if ch == "\\":
            esc = cur.peek(1)
            if esc not in ('"', "\\"):
                raise LexError(f"unknown escape '\\{esc}' in string", cur.span_here(2))
            chars.append(esc)
            cur.advance(2)
            continue
        cur.advance()
        if ch == '"':
            break
        chars.append(ch)
    text = cur.src[start : cur.pos]
    span = Span(cur.file, open_span.line, open_span.col, len(text), start)
    return Token(TokenKind.STRING, text, span, value="".join(chars))


def _lex_tyvar(cur: _Cursor) -> Token:
    open_span = cur.span_here(1)
    start = cur.pos
    cur.advance()  # the quote
    if not (cur.peek().isalpha() or cur.peek() == "_"):
        raise LexError("expected identifier after ' in type variable", open_span)
    while cur.peek().isalnum() or cur.peek() == "_":
        cur.advance()
    text = cur.src[start : cur.pos]
    span = Span(cur.file, open_span.line, open_span.col, len(text), start)
    return Token(TokenKind.TYVAR, text, span, value=text[1:])


def _lex_number(cur: _Cursor) -> Token:
    start = cur.pos
    open_span = cur.span_here(0)
    while cur.peek().isdigit():
        cur.advance()
    is_float = False
    if cur.peek() == "." and cur.peek(1).isdigit():
        is_float = True
        cur.advance()
        while cur.peek().isdigit():
            cur.advance()
    if cur.peek() in ("e", "E") and (
        cur.peek(1).isdigit() or (cur.peek(1) in "+-" and cur.peek(2).isdigit())
    ):
        is_float = True
        cur.advance()
        if cur.peek() in "+-":
            cur.advance()
        while cur.peek().isdigit():
            cur.advance()
    text = cur.src[start : cur.pos]
    span = Span(cur.file, open_span.line, open_span.col, len(text), start)
    if is_float:
        return Token(TokenKind.FLOAT, text, span, value=float(text))
    return Token(TokenKind.INT, text, span, value=int(text))


def _lex_word(cur: _Cursor) -> Token:
    start = cur.pos
    open_span = cur.span_here(0)
    while cur.peek().isalnum() or cur.peek() == "_":
        cur.advance()
    text = cur.src[start : cur.pos]
    span = Span(cur.file, open_span.line, open_span.col, len(text), start)
    if text == "_":
        return Token(TokenKind.PUNCT, text, span)
    if text in KEYWORDS:
        return Token(TokenKind.KEYWORD, text, span)
    return Token(TokenKind.IDENT, text, span)


def reconstruct(source: str, tokens: list[Token]) -> str:
    """Rebuild the input from token offsets plus the skipped gaps.

    Equality with the original source is the lossless-lexing invariant.
    """
    out: list[str] = []
    prev_end = 0
    for tok in tokens:
        if tok.kind is TokenKind.EOF:
            break
        out.append(source[prev_end : tok.span.offset])
        raw = source[tok.span.offset : tok.span.offset + tok.span.length]
        out.append(raw)
        prev_end = tok.span.offset + tok.span.length
    out.append(source[prev_end:])
    return "".join(out)
