from __future__ import annotations

import re
import shutil
import subprocess

import pytest

from conftest import (
    REPO_ROOT,
    build_program,
    corpus_sources,
    hourglass_sources,
)
from junc.codegen import GUID_PREFIX, emit_program

RUNTIME_INCLUDE = REPO_ROOT / "runtime" / "include"


def emit(sources, stdlib=True, includes=()):
    return emit_program(build_program(sources, stdlib=stdlib), tuple(includes))


@pytest.fixture(scope="module")
def blink_unit(blink_program=None):
    return emit(corpus_sources("Blink.jun"))


# -- golden shapes -------------------------------------------------------------------


def adt_block(text, name):
    start = text.index(f"struct {name} {{")
    end = text.index("};", start)
    return text[start:end]


def test_sig_adt_matches_tagged_union_shape(blink_unit):
    text = blink_unit.text
    block = adt_block(text, "sig")
    assert "uint8_t tag;" in block
    assert re.search(r"maybe<a>\s+signal;", block), "payload member named after ctor"
    assert "operator==" in block and "operator!=" in block
    # Factory sets tag 0 inside an immediately-invoked lambda.
    factory = text[text.index("sig<a> signal(") :]
    factory = factory[: factory.index("\n}")]
    assert "ret.tag = 0;" in factory
    assert "ret.signal = data;" in factory
    assert "[&]() -> sig<a>" in factory


def test_nullary_only_adt():
    unit = emit(
        [("M.jun", "module M\ntype mode = on | off\nlet x : mode = on()")]
    )
    block = adt_block(unit.text, "mode")
    assert "uint8_t tag;" in block
    on_factory = unit.text[unit.text.index("mode on()") :]
    on_factory = on_factory[: on_factory.index("\n}")]
    assert "ret.tag = 0;" in on_factory
    off_factory = unit.text[unit.text.index("mode off()") :]
    off_factory = off_factory[: off_factory.index("\n}")]
    assert "ret.tag = 1;" in off_factory


def test_function_payload_types_omit_equality_operators():
    # std::function is not equality-comparable; emitting operator== on a
    # non-template struct holding one would not compile even when unused.
    unit = emit(
        [
            (
                "M.jun",
                "module M\n"
                "type handler = wrap of (int32) -> int32\n"
                "type table = {cb : handler; id : int32}\n"
                "let h : handler = wrap(fn (x : int32) : int32 -> x)",
            )
        ]
    )
    handler_block = adt_block(unit.text, "handler")
    assert "operator==" not in handler_block
    table_start = unit.text.index("struct table {")
    table_block = unit.text[table_start : unit.text.index("};", table_start)]
    assert "operator==" not in table_block
    # Comparable types keep their operators.
    assert "operator==" in adt_block(unit.text, "sig")


def test_single_ctor_equality_reduces_to_payload():
    unit = emit(
        [("M.jun", "module M\ntype boxed = wrap of int32\nlet x : boxed = wrap(1)")]
    )
    block = adt_block(unit.text, "boxed")
    assert "case 0: return this->wrap == rhs.wrap;" in block


def test_map_matches_compiled_shape(blink_unit):
    text = blink_unit.text
    start = text.index("Prelude::sig<b> map(juniper::function<b(a)> f, Prelude::sig<a> s) {")
    body = text[start : text.index("\n}", start)]
    guids = re.findall(rf"{GUID_PREFIX}\d+", body)
    assert guids, "scrutinee must bind to a fresh guid name"
    scrut = guids[0]
    assert f"Prelude::sig<a> {scrut} = s;" in body
    assert f"({scrut}).tag == 0" in body
    assert f"({scrut}).signal).tag == 0" in body
    assert "signal<b>(just<b>(f(val)))" in body
    assert "signal<b>(nothing<b>())" in body
    assert "juniper::quit<Prelude::sig<b>>()" in body
    assert body.index("signal<b>(just<b>(f(val)))") < body.index(
        "juniper::quit"
    ), "abort is the final alternative"


def test_while_loop_is_unit_returning_wrapper():
    unit = emit(
        [("M.jun", "module M\nfun spin() : unit = while true do () end")]
    )
    start = unit.text.index("Prelude::unit spin()")
    body = unit.text[start : unit.text.index("\n}", start)]
    assert "[&]() -> Prelude::unit" in body
    assert "while (true) {" in body
    assert "return {};" in body


def test_case_fallback_typed_at_result():
    unit = emit(
        [
            (
                "M.jun",
                "module M\nopen(Prelude)\n"
                "fun pick(m : maybe<int32>) : int32 = "
                "case m of | just<int32>(v) => v | _ => 0 end",
            )
        ]
    )
    assert "juniper::quit<int32_t>()" in unit.text


def test_inline_code_spliced_verbatim_in_unit_wrapper():
    unit = emit(
        [("M.jun", "module M\nfun poke() : unit = #digitalWrite(13, HIGH);#")]
    )
    start = unit.text.index("Prelude::unit poke()")
    body = unit.text[start : unit.text.index("\n}", start)]
    assert "digitalWrite(13, HIGH);" in body
    assert "[&]() -> Prelude::unit" in body
    assert "return {};" in body


def test_empty_inline_code():
    unit = emit([("M.jun", "module M\nfun nop() : unit = ##")])
    start = unit.text.index("Prelude::unit nop()")
    body = unit.text[start : unit.text.index("\n}", start)]
    assert "return {};" in body


def test_inline_code_mutates_enclosing_local_by_reference():
    # The mutable-local-then-blob-then-read idiom used by foreign wrappers.
    unit = emit(
        [
            (
                "M.jun",
                "module M\nfun grab() : int32 = (\n"
                "    let mutable x : int32 = 0;\n"
                "    #x = external_call();#;\n"
                "    x)",
            )
        ]
    )
    start = unit.text.index("int32_t grab() {")
    body = unit.text[start : unit.text.index("\n}", start)]
    assert "int32_t x = 0;" in body
    assert "x = external_call();" in body
    assert body.index("int32_t x = 0;") < body.index("x = external_call();")
    assert "return x;" in body


def test_integer_literal_emits_verbatim():
    unit = emit([("M.jun", "module M\nfun answer() : int32 = 42")])
    start = unit.text.index("int32_t answer() {")
    body = unit.text[start : unit.text.index("\n}", start)]
    assert "return 42;" in body


def test_capacity_template_parameters():
    unit = emit(
        [("M.jun", "module M\nfun idArr<'a; n>(v : 'a[n]) : 'a[n] = v")]
    )
    assert "template<typename a, int n>" in unit.text
    assert "juniper::array<a, n>" in unit.text.replace("(n)", "n")


# -- structure of the emitted file ------------------------------------------------------


def test_includes_come_before_runtime_header():
    unit = emit(
        [("M.jun", 'module M\ninclude("<FastLED.h>")\nlet x : int32 = 1')]
    )
    text = unit.text
    assert text.index("#include <FastLED.h>") < text.index(
        '#include "juniper_runtime.hpp"'
    )
    assert unit.header_includes == ["<FastLED.h>"]
    assert unit.preamble == '#include "juniper_runtime.hpp"'


def test_namespaces_in_dependency_order(blink_unit):
    text = blink_unit.text
    order = [
        text.index(f"namespace {name} {{")
        for name in ["Prelude", "Io", "Time", "Signal", "Button", "Blink"]
    ]
    assert order == sorted(order)
    assert blink_unit.namespaces[-1] == "Blink"
    assert "Blink::main();" in text
    assert "juniper::run_program" in text


def test_empty_program_is_runtime_plus_entry():
    unit = emit([], stdlib=False)
    assert unit.text.startswith('#include "juniper_runtime.hpp"')
    assert "int main()" in unit.text
    assert unit.namespaces == []


def test_open_becomes_using_directive(blink_unit):
    blink_ns = blink_unit.text[blink_unit.text.index("namespace Blink") :]
    for opened in ["Prelude", "Io", "Time"]:
        assert f"using namespace {opened};" in blink_ns


# -- determinism and the no-mangling invariant -------------------------------------------


def test_emission_is_byte_identical_across_runs():
    a = emit(corpus_sources("ButtonBlink.jun"))
    b = emit(corpus_sources("ButtonBlink.jun"))
    assert a.text == b.text
    assert a.fresh_names_used == b.fresh_names_used


def test_no_mangling_user_names_verbatim(blink_program_fixture=None):
    program = build_program(corpus_sources("ButtonBlink.jun"))
    unit = emit_program(program)
    words = set(re.findall(r"[A-Za-z_][A-Za-z0-9_]*", unit.text))
    user_names = set()
    for module in program.modules:
        user_names.add(module.name)
        for decl in module.declarations:
            name = getattr(decl, "name", None)
            if name:
                user_names.add(name)
    assert user_names <= words, user_names - words


def test_compiler_temporaries_carry_reserved_prefix(blink_unit):
    temps = set(re.findall(rf"\b{GUID_PREFIX}\d+\b", blink_unit.text))
    assert len(temps) <= blink_unit.fresh_names_used
    # No other identifier may start with the reserved prefix.
    all_guidish = set(re.findall(rf"\b{GUID_PREFIX}\w*\b", blink_unit.text))
    assert all_guidish == temps


# -- compilation of the whole corpus -----------------------------------------------------


@pytest.mark.skipif(shutil.which("g++") is None, reason="no C++ toolchain")
@pytest.mark.parametrize(
    "label,sources",
    [
        ("blink", corpus_sources("Blink.jun")),
        ("buttonblink", corpus_sources("ButtonBlink.jun")),
        ("kitchensink", corpus_sources("KitchenSink.jun")),
        ("hourglass", hourglass_sources()),
        (
            "coverage",
            corpus_sources("coverage/CoverData.jun", "coverage/CoverExpr.jun"),
        ),
        ("mutation", corpus_sources("mutation/MutA.jun", "mutation/MutB.jun")),
        ("stdlib-only", []),
    ],
)
def test_corpus_programs_compile(tmp_path, label, sources):
    unit = emit(sources)
    cpp = tmp_path / f"{label}.cpp"
    cpp.write_text(unit.text, encoding="utf-8")
    result = subprocess.run(
        [
            "g++", "-std=c++17", "-DJUNIPER_SIM",
            f"-I{RUNTIME_INCLUDE}", "-c", str(cpp), "-o", str(tmp_path / "out.o"),
        ],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0, result.stderr[:4000]
