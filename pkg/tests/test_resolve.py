from __future__ import annotations

from conftest import corpus_sources
from junc.parser import parse_program
from junc.resolve import resolve_program
from junc.stdlib_loader import stdlib_sources
from junc.typecheck import check_program


def check_sources(files):
    modules, diags = parse_program(files)
    assert not diags, [d.line() for d in diags]
    return check_program(modules)


def errors_of(files):
    _, sink = check_sources(files)
    return [d.message for d in sink.errors]


def test_blink_env_resolves_opened_names():
    files = stdlib_sources() + corpus_sources("Blink.jun")
    modules, _ = parse_program(files)
    envs, sink = resolve_program(modules)
    assert sink.ok()
    blink = envs["Blink"]
    assert blink.opens == ["Prelude", "Io", "Time"]
    # Names from the opened modules are reachable through their exports.
    assert envs["Prelude"].exported_type("sig") is not None
    assert envs["Io"].exported_value("digOut") is not None
    assert envs["Time"].exported_value("every") is not None
    # And the whole program typechecks, which exercises the lookups.
    program, sink = check_program(modules)
    assert program is not None and sink.ok()


def test_unresolved_name_without_open():
    errors = errors_of(
        [("A.jun", "module A\nfun f(s : sig<int32>) : unit = ()")]
    )
    assert any("unknown type 'sig'" in e for e in errors)


def test_unresolved_value_without_open():
    errors = errors_of(
        [
            ("P.jun", "module P\nfun helper() : int32 = 3"),
            ("A.jun", "module A\nlet x : int32 = helper()"),
        ]
    )
    assert any("unresolved name 'helper'" in e for e in errors)


def test_ambiguous_open_requires_qualifier():
    left = "module Left\nfun state() : int32 = 1"
    right = "module Right\nfun state() : int32 = 2"
    use_unqualified = (
        "module Use\nopen(Left, Right)\nlet x : int32 = state()"
    )
    errors = errors_of(
        [("L.jun", left), ("R.jun", right), ("U.jun", use_unqualified)]
    )
    assert any("'state' is ambiguous" in e for e in errors)

    use_qualified = (
        "module Use\nopen(Left, Right)\nlet x : int32 = Right:state()"
    )
    program, sink = check_sources(
        [("L.jun", left), ("R.jun", right), ("U.jun", use_qualified)]
    )
    assert program is not None and sink.ok()


def test_qualified_access_does_not_require_open():
    program, sink = check_sources(
        [
            ("P.jun", "module P\nfun helper() : int32 = 3"),
            ("A.jun", "module A\nlet x : int32 = P:helper()"),
        ]
    )
    assert program is not None and sink.ok()


def test_dependency_order_is_validated():
    errors = errors_of(
        [
            ("A.jun", "module A\nlet x : int32 = B:value()"),
            ("B.jun", "module B\nfun value() : int32 = 1"),
        ]
    )
    assert any("supplied later" in e for e in errors)


def test_dependency_cycle_rejected():
    files = [
        ("A.jun", "module A\nopen(B)"),
        ("B.jun", "module B\nopen(A)"),
    ]
    modules, _ = parse_program(files)
    _, sink = resolve_program(modules)
    assert any("cycles are rejected" in d.message for d in sink.errors)


def test_unknown_module_in_open():
    errors = errors_of([("A.jun", "module A\nopen(Nowhere)")])
    assert any("unknown module 'Nowhere'" in e for e in errors)


def test_export_list_hides_names():
    lib = "module Lib\nexport(shown)\nfun shown() : int32 = 1\nfun hidden() : int32 = 2"
    errors = errors_of(
        [("L.jun", lib), ("U.jun", "module U\nopen(Lib)\nlet x : int32 = hidden()")]
    )
    assert any("unresolved name 'hidden'" in e for e in errors)
    errors = errors_of(
        [("L.jun", lib), ("U.jun", "module U\nlet x : int32 = Lib:hidden()")]
    )
    assert any("not exported" in e for e in errors)
    program, sink = check_sources(
        [("L.jun", lib), ("U.jun", "module U\nopen(Lib)\nlet x : int32 = shown()")]
    )
    assert program is not None


def test_export_defaults_to_everything():
    program, sink = check_sources(
        [
            ("L.jun", "module Lib\nfun anything() : int32 = 1"),
            ("U.jun", "module U\nopen(Lib)\nlet x : int32 = anything()"),
        ]
    )
    assert program is not None


def test_duplicate_values_and_types_rejected():
    errors = errors_of(
        [("A.jun", "module A\nfun f() : int32 = 1\nlet f : int32 = 2")]
    )
    assert any("duplicate value 'f'" in e for e in errors)
    errors = errors_of(
        [("A.jun", "module A\ntype t = a\ntype t = {x : int32}")]
    )
    assert any("duplicate type 't'" in e for e in errors)


def test_builtin_type_shadowing_rejected():
    errors = errors_of([("A.jun", "module A\ntype int32 = wrap of bool")])
    assert any("redefines a builtin" in e for e in errors)
