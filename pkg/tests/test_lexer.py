from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import all_corpus_files
from junc.diagnostics import LexError
from junc.lexer import TokenKind, reconstruct, tokenize
from junc.stdlib_loader import stdlib_sources


def kinds_and_texts(source):
    return [
        (t.kind, t.text)
        for t in tokenize(source)
        if t.kind is not TokenKind.EOF
    ]


def test_set_ref_statement():
    assert kinds_and_texts("set ref state0 = state1") == [
        (TokenKind.KEYWORD, "set"),
        (TokenKind.KEYWORD, "ref"),
        (TokenKind.IDENT, "state0"),
        (TokenKind.OPERATOR, "="),
        (TokenKind.IDENT, "state1"),
    ]


def test_empty_input():
    toks = tokenize("")
    assert len(toks) == 1 and toks[0].kind is TokenKind.EOF


def test_inline_code_blob_captured_exclusive():
    toks = tokenize("#x = 1;#")
    assert toks[0].kind is TokenKind.INLINE
    assert toks[0].text == "x = 1;"
    assert toks[0].span.length == len("#x = 1;#")


def test_keywords_distinguished_from_identifiers():
    toks = kinds_and_texts("while whiles mod modx")
    assert toks == [
        (TokenKind.KEYWORD, "while"),
        (TokenKind.IDENT, "whiles"),
        (TokenKind.KEYWORD, "mod"),
        (TokenKind.IDENT, "modx"),
    ]


def test_type_variable_token():
    toks = tokenize("'state")
    assert toks[0].kind is TokenKind.TYVAR
    assert toks[0].text == "'state"
    assert toks[0].value == "state"


def test_multichar_operators_maximal_munch():
    toks = kinds_and_texts("<<< <= < == = => -> ~~~ &&& |||")
    assert [t for _, t in toks] == [
        "<<<", "<=", "<", "==", "=", "=>", "->", "~~~", "&&&", "|||",
    ]


def test_numbers():
    toks = tokenize("42 3.5 1e3 2.5e-2")
    assert toks[0].kind is TokenKind.INT and toks[0].value == 42
    assert toks[1].kind is TokenKind.FLOAT and toks[1].value == 3.5
    assert toks[2].kind is TokenKind.FLOAT and toks[2].value == 1000.0
    assert toks[3].kind is TokenKind.FLOAT and toks[3].value == 0.025


def test_string_escapes():
    toks = tokenize('"\\"header2.h\\""')
    assert toks[0].kind is TokenKind.STRING
    assert toks[0].value == '"header2.h"'


def test_comments_skipped_line_and_block():
    src = "a // comment\n(* block (* nested *) *) b"
    assert [t for _, t in kinds_and_texts(src)] == ["a", "b"]


@pytest.mark.parametrize(
    "source,fragment",
    [
        ("#unterminated", "unterminated '#'"),
        ('"unterminated', "unterminated string"),
        ("a $ b", "illegal character"),
        ("(* no end", "unterminated block comment"),
    ],
)
def test_lexical_errors_have_spans(source, fragment):
    with pytest.raises(LexError) as exc:
        tokenize(source, "bad.jun")
    assert fragment in exc.value.message
    assert exc.value.span.file == "bad.jun"
    assert exc.value.span.line >= 1 and exc.value.span.col >= 1


def test_lossless_over_corpus_and_stdlib():
    sources = stdlib_sources() + [
        (p.name, p.read_text(encoding="utf-8")) for p in all_corpus_files()
    ]
    assert sources
    for name, text in sources:
        toks = tokenize(text, name)
        assert reconstruct(text, toks) == text, f"lossless lexing failed for {name}"


@given(
    st.lists(
        st.one_of(
            st.from_regex(r"[a-z][a-z0-9_]{0,5}", fullmatch=True),
            st.integers(0, 10**6).map(str),
            st.sampled_from(["==", "<=", "->", "+", "(", ")", "ref", "let"]),
        ),
        max_size=30,
    )
)
def test_lossless_on_generated_token_soup(parts):
    source = " ".join(parts)
    toks = tokenize(source)
    assert reconstruct(source, toks) == source


def test_deterministic():
    src = (all_corpus_files()[0]).read_text(encoding="utf-8")
    assert tokenize(src) == tokenize(src)
