"""Lower a typed program to one self-contained C++ source file.

Lowering strategy:
  * ADTs become tagged structs (uint8_t tag + one member per payload-carrying
    constructor) with structural `==`/`!=`, plus one factory function per
    constructor that sets the tag inside an immediately-invoked lambda.
  * Every statement-like construct (sequence, loops, `case`, `set`, inline
    C++) lowers to an immediately-invoked lambda expression, so every source
    expression is a target expression.
  * `case` binds its scrutinee to a fresh `guid` name, then emits a
    right-nested conditional chain testing tag equality along each pattern's
    constructor path; the final alternative is `juniper::quit<T>()`.
  * Modules become namespaces in dependency order; `open` becomes a
    using-directive; user identifiers are emitted verbatim (no mangling) and
    every compiler-introduced name carries the reserved `guid` prefix with a
    monotonically assigned counter.

Signed fixed-width arithmetic is emitted through unsigned intermediates so
overflow wraps exactly like the reference interpreter.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast_nodes import *
from .capacity import Poly
from .semtypes import (
    TAdt,
    TArray,
    TBool,
    TFloat,
    TFun,
    TInt,
    TPointer,
    TRecord,
    TRef,
    TTuple,
    TUnit,
    TVar,
    SemType,
)
from .typecheck import TypedProgram, generic_comparable

RUNTIME_HEADER = "juniper_runtime.hpp"
GUID_PREFIX = "guid"

_INT_CPP = {
    (8, True): "int8_t",
    (16, True): "int16_t",
    (32, True): "int32_t",
    (8, False): "uint8_t",
    (16, False): "uint16_t",
    (32, False): "uint32_t",
}


@dataclass
class EmitUnit:
    """One generated C++ file plus its structural index."""

    text: str
    header_includes: list[str]
    preamble: str
    namespaces: list[str]
    fresh_names_used: int


def cap_cpp(poly: Poly) -> str:
    """Render a normalized capacity as a C++ constant expression."""
    if not poly.terms:
        return "0"
    parts: list[str] = []
    for coeff, mono in poly.terms:
        factors: list[str] = []
        for atom, power in mono:
            base = atom if isinstance(atom, str) else (
                f"(({cap_cpp(atom.num)}) / ({cap_cpp(atom.den)}))"
            )
            factors.extend([base] * power)
        if not factors:
            parts.append(str(coeff))
        elif coeff == 1:
            parts.append("*".join(factors))
        else:
            parts.append("*".join([str(coeff)] + factors))
    return "(" + " + ".join(parts) + ")"


def emit_type(t: SemType) -> str:
    if isinstance(t, TUnit):
        return "Prelude::unit"
    if isinstance(t, TBool):
        return "bool"
    if isinstance(t, TInt):
        return _INT_CPP[(t.bits, t.signed)]
    if isinstance(t, TFloat):
        return "float" if t.bits == 32 else "double"
    if isinstance(t, TPointer):
        return "juniper::shared_ptr<void>"
    if isinstance(t, TVar):
        return t.name
    if isinstance(t, TFun):
        params = ", ".join(emit_type(p) for p in t.params)
        return f"juniper::function<{emit_type(t.ret)}({params})>"
    if isinstance(t, (TAdt, TRecord)):
        base = f"{t.module}::{t.name}"
        args = [emit_type(a) for a in t.tyargs] + [cap_cpp(c) for c in t.capargs]
        return base + (f"<{', '.join(args)}>" if args else "")
    if isinstance(t, TRef):
        return f"juniper::refcell<{emit_type(t.inner)}>"
    if isinstance(t, TArray):
        return f"juniper::array<{emit_type(t.inner)}, {cap_cpp(t.cap)}>"
    if isinstance(t, TTuple):
        args = ", ".join(emit_type(i) for i in t.items)
        return f"juniper::tuple{len(t.items)}<{args}>"
    raise AssertionError(f"cannot emit type {t!r}")


class Emitter:
    def __init__(self, program: TypedProgram, extra_includes: tuple[str, ...] = ()):
        self.program = program
        self.envs = program.envs
        self.extra_includes = list(extra_includes)
        self.guid = 0

    def fresh(self) -> str:
        name = f"{GUID_PREFIX}{self.guid}"
        self.guid += 1
        return name

    # -- program --------------------------------------------------------------

    def emit_program(self) -> EmitUnit:
        includes = list(self.program.includes())
        for header in self.extra_includes:
            if header not in includes:
                includes.append(header)
        lines: list[str] = []
        for header in includes:
            lines.append(f"#include {header}")
        preamble = f'#include "{RUNTIME_HEADER}"'
        lines.append(preamble)
        lines.append("")
        namespaces: list[str] = []
        for module in self.program.modules:
            namespaces.append(module.name)
            lines.append(self.emit_module(module))
            lines.append("")
        lines.append(self._emit_entry())
        text = "\n".join(lines) + "\n"
        return EmitUnit(text, includes, preamble, namespaces, self.guid)

    def _emit_entry(self) -> str:
        entry = self.program.entry_module()
        body = f"        {entry}::main();\n" if entry else ""
        return (
            "int main() {\n"
            "    return juniper::run_program([]() {\n"
            f"{body}"
            "    });\n"
            "}"
        )

    def emit_module(self, module: SourceModule) -> str:
        env = self.envs[module.name]
        out: list[str] = [f"namespace {module.name} {{"]
        for opened in env.opens:
            out.append(f"using namespace {opened};")
        out.append("")
        for decl in module.declarations:
            if isinstance(decl, AdtDecl):
                out.append(self.emit_adt(decl, module.name))
                out.append("")
            elif isinstance(decl, RecordDecl):
                out.append(self.emit_record(decl, module.name))
                out.append("")
        forwards = [
            self._fun_header(d, module.name) + ";"
            for d in module.declarations
            if isinstance(d, FunDecl)
        ]
        if forwards:
            out.extend(forwards)
            out.append("")
        for decl in module.declarations:
            if isinstance(decl, LetDecl):
                info = env.values[decl.name]
                ty = emit_type(info.sem_type)
                # Namespace-scope initializers run inside a capture-free
                # wrapper; lambdas with capture-defaults are not allowed at
                # namespace scope.
                value = self.emit_expr(decl.value, 1)
                out.append(
                    f"{ty} {decl.name} = (([]() -> {ty} {{\n"
                    f"    return {value};\n"
                    f"}})());"
                )
                out.append("")
            elif isinstance(decl, FunDecl):
                out.append(self.emit_function(decl, module.name))
                out.append("")
        while out and out[-1] == "":
            out.pop()
        out.append(f"}} // namespace {module.name}")
        return "\n".join(out)

    # -- type declarations -------------------------------------------------------

    def _template_header(self, tyvars: list[str], capvars: list[str]) -> str:
        if not tyvars and not capvars:
            return ""
        params = [f"typename {v}" for v in tyvars] + [f"int {v}" for v in capvars]
        return f"template<{', '.join(params)}>\n"

    def emit_adt(self, decl: AdtDecl, module: str) -> str:
        payloads = [
            (name, self._payload_type(module, name)) for name, _ in decl.ctors
        ]
        header = self._template_header(decl.tyvars, decl.capvars)
        lines = [f"{header}struct {decl.name} {{", "    uint8_t tag;"]
        for name, cpp_ty in payloads:
            if cpp_ty is not None:
                lines.append(f"    {cpp_ty} {name};")
        # Equality is structural; types with a function payload get no
        # operators (the checker rejects comparing them, and std::function
        # is not equality-comparable).
        if generic_comparable(self.envs, module, decl.name):
            lines.append(f"    bool operator==({decl.name} rhs) {{")
            lines.append("        if (this->tag != rhs.tag) { return false; }")
            lines.append("        switch (this->tag) {")
            for tag, (name, cpp_ty) in enumerate(payloads):
                if cpp_ty is None:
                    lines.append(f"        case {tag}: return true;")
                else:
                    lines.append(
                        f"        case {tag}: return this->{name} == rhs.{name};"
                    )
            lines.append("        }")
            lines.append("        return false;")
            lines.append("    }")
            lines.append(
                f"    bool operator!=({decl.name} rhs) {{ return !(*this == rhs); }}"
            )
        lines.append("};")

        # One factory per constructor, mirroring the tag-then-payload shape.
        self_args = list(decl.tyvars) + list(decl.capvars)
        self_ty = decl.name + (f"<{', '.join(self_args)}>" if self_args else "")
        for tag, (name, cpp_ty) in enumerate(payloads):
            params = f"{cpp_ty} data" if cpp_ty is not None else ""
            lines.append("")
            lines.append(f"{self._template_header(decl.tyvars, decl.capvars)}"
                         f"{self_ty} {name}({params}) {{")
            lines.append(f"    return (([&]() -> {self_ty} {{")
            lines.append(f"        {self_ty} ret;")
            lines.append(f"        ret.tag = {tag};")
            if cpp_ty is not None:
                lines.append(f"        ret.{name} = data;")
            lines.append("        return ret;")
            lines.append("    })());")
            lines.append("}")
        return "\n".join(lines)

    def _payload_type(self, module: str, ctor_name: str) -> str | None:
        info = self.envs[module].values[ctor_name]
        payload = getattr(info, "payload_sem", None)
        if payload is None:
            return None
        return emit_type(payload)

    def emit_record(self, decl: RecordDecl, module: str) -> str:
        header = self._template_header(decl.tyvars, decl.capvars)
        info = self.envs[module].types[decl.name]
        fields = [(n, emit_type(t)) for n, t in info.field_sems]
        lines = [f"{header}struct {decl.name} {{"]
        for fname, cpp_ty in fields:
            lines.append(f"    {cpp_ty} {fname};")
        if generic_comparable(self.envs, module, decl.name):
            rhs_checks = " && ".join(f"{n} == rhs.{n}" for n, _ in fields) or "true"
            lines.append(f"    bool operator==({decl.name} rhs) {{")
            lines.append(f"        return {rhs_checks};")
            lines.append("    }")
            lines.append(
                f"    bool operator!=({decl.name} rhs) {{ return !(*this == rhs); }}"
            )
        lines.append("};")
        return "\n".join(lines)

    # -- functions ------------------------------------------------------------------

    def _fun_header(self, decl: FunDecl, module: str) -> str:
        info = self.envs[module].values[decl.name]
        generic: TFun = info.generic
        params = ", ".join(
            f"{emit_type(ty)} {name}"
            for (name, _), ty in zip(decl.params, generic.params)
        )
        return (
            f"{self._template_header(decl.tyvars, decl.capvars)}"
            f"{emit_type(generic.ret)} {decl.name}({params})"
        )

    def emit_function(self, decl: FunDecl, module: str) -> str:
        header = self._fun_header(decl, module)
        body = self.emit_expr(decl.body, 1)
        return f"{header} {{\n    return {body};\n}}"

    # -- expressions -------------------------------------------------------------------

    def emit_expr(self, e: Expr, ind: int) -> str:
        pad = "    " * ind
        inner = "    " * (ind + 1)

        if isinstance(e, UnitLit):
            return "(Prelude::unit{})"
        if isinstance(e, BoolLit):
            return "true" if e.value else "false"
        if isinstance(e, IntLit):
            return e.text
        if isinstance(e, FloatLit):
            return e.text + ("f" if isinstance(e.ty, TFloat) and e.ty.bits == 32 else "")
        if isinstance(e, NullLit):
            return "juniper::shared_ptr<void>()"
        if isinstance(e, InlineCodeExpr):
            blob = e.code.strip("\n")
            return (
                f"(([&]() -> Prelude::unit {{\n"
                f"{inner}{blob}\n"
                f"{inner}return {{}};\n"
                f"{pad}}})())"
            )

        if isinstance(e, SequenceExpr):
            ret = emit_type(e.ty)
            stmts, result = self._emit_block(e.items, ind + 1)
            body = "".join(f"{inner}{s}\n" for s in stmts)
            return (
                f"(([&]() -> {ret} {{\n"
                f"{body}"
                f"{inner}return {result};\n"
                f"{pad}}})())"
            )

        if isinstance(e, LetExpr):
            # A bare let outside a sequence: bindings are invisible, value is
            # the initializer.
            stmts, result = self._emit_block([e], ind + 1)
            ret = emit_type(e.ty)
            body = "".join(f"{inner}{s}\n" for s in stmts)
            return (
                f"(([&]() -> {ret} {{\n"
                f"{body}"
                f"{inner}return {result};\n"
                f"{pad}}})())"
            )

        if isinstance(e, TupleExpr):
            args = ", ".join(self.emit_expr(item, ind) for item in e.items)
            return f"({emit_type(e.ty)}{{{args}}})"

        if isinstance(e, VarRef):
            return self._emit_ref(e)

        if isinstance(e, CallExpr):
            fn = self.emit_expr(e.fn, ind)
            args = ", ".join(self.emit_expr(a, ind) for a in e.args)
            return f"{fn}({args})"

        if isinstance(e, IndexExpr):
            base = self.emit_expr(e.base, ind)
            return f"({base}).data[{self.emit_expr(e.index, ind)}]"

        if isinstance(e, BinopExpr):
            return self._emit_binop(e, ind)

        if isinstance(e, IfExpr):
            text = self.emit_expr(e.orelse, ind)
            for cond, body in reversed(e.arms):
                text = (
                    f"({self.emit_expr(cond, ind)} ? "
                    f"{self.emit_expr(body, ind)} : {text})"
                )
            return text

        if isinstance(e, SetExpr):
            value = self.emit_expr(e.value, ind + 1)
            if e.through_ref:
                target = self.emit_expr(e.target, ind + 1)
                stmt = f"({target}).set({value});"
            else:
                stmt = f"{self._emit_lvalue(e.target, ind + 1)} = {value};"
            return (
                f"(([&]() -> Prelude::unit {{\n"
                f"{inner}{stmt}\n"
                f"{inner}return {{}};\n"
                f"{pad}}})())"
            )

        if isinstance(e, ForExpr):
            var_ty: TInt = e.start.ty
            cty = _INT_CPP[(var_ty.bits, var_ty.signed)]
            step = self._wrap_arith(var_ty, f"{e.var} {'-' if e.downward else '+'} 1")
            cmp = ">=" if e.downward else "<="
            body = self.emit_expr(e.body, ind + 2)
            return (
                f"(([&]() -> Prelude::unit {{\n"
                f"{inner}for ({cty} {e.var} = {self.emit_expr(e.start, ind + 1)}; "
                f"{e.var} {cmp} {self.emit_expr(e.stop, ind + 1)}; "
                f"{e.var} = {step}) {{\n"
                f"{inner}    {body};\n"
                f"{inner}}}\n"
                f"{inner}return {{}};\n"
                f"{pad}}})())"
            )

        if isinstance(e, WhileExpr):
            return (
                f"(([&]() -> Prelude::unit {{\n"
                f"{inner}while ({self.emit_expr(e.cond, ind + 1)}) {{\n"
                f"{inner}    {self.emit_expr(e.body, ind + 2)};\n"
                f"{inner}}}\n"
                f"{inner}return {{}};\n"
                f"{pad}}})())"
            )

        if isinstance(e, DoWhileExpr):
            return (
                f"(([&]() -> Prelude::unit {{\n"
                f"{inner}do {{\n"
                f"{inner}    {self.emit_expr(e.body, ind + 2)};\n"
                f"{inner}}} while ({self.emit_expr(e.cond, ind + 1)});\n"
                f"{inner}return {{}};\n"
                f"{pad}}})())"
            )

        if isinstance(e, NotExpr):
            return f"(!({self.emit_expr(e.operand, ind)}))"

        if isinstance(e, BitNotExpr):
            ty: TInt = e.ty
            return self._wrap_cast(ty, f"~({self.emit_expr(e.operand, ind)})")

        if isinstance(e, FieldAccessExpr):
            return f"({self.emit_expr(e.base, ind)}).{e.field}"

        if isinstance(e, LambdaExpr):
            fn_ty: TFun = e.ty
            params = ", ".join(
                f"{emit_type(t)} {n}" for (n, _), t in zip(e.params, fn_ty.params)
            )
            ret = emit_type(fn_ty.ret)
            body = self.emit_expr(e.body, ind + 1)
            return (
                f"juniper::function<{ret}({', '.join(emit_type(t) for t in fn_ty.params)})>("
                f"[=]({params}) mutable -> {ret} {{\n"
                f"{inner}return {body};\n"
                f"{pad}}})"
            )

        if isinstance(e, CaseExpr):
            return self._emit_case(e, ind)

        if isinstance(e, RecordLitExpr):
            ret = emit_type(e.ty)
            name = self.fresh()
            lines = [f"(([&]() -> {ret} {{", f"    {ret} {name};"]
            for fname, value in e.fields:
                lines.append(f"    {name}.{fname} = {self.emit_expr(value, ind + 1)};")
            lines.append(f"    return {name};")
            lines.append("})())")
            return f"\n{pad}".join(lines)

        if isinstance(e, ArrayLitExpr):
            ret = emit_type(e.ty)
            name = self.fresh()
            lines = [f"(([&]() -> {ret} {{", f"    {ret} {name};"]
            for i, item in enumerate(e.items):
                lines.append(f"    {name}.data[{i}] = {self.emit_expr(item, ind + 1)};")
            lines.append(f"    return {name};")
            lines.append("})())")
            return f"\n{pad}".join(lines)

        if isinstance(e, ArrayOfExpr):
            arr_ty: TArray = e.ty
            ret = emit_type(arr_ty)
            name = self.fresh()
            lines = [f"(([&]() -> {ret} {{", f"    {ret} {name};"]
            if e.fill is not None:
                fill = self.fresh()
                idx = self.fresh()
                lines.append(
                    f"    {emit_type(arr_ty.inner)} {fill} = "
                    f"{self.emit_expr(e.fill, ind + 1)};"
                )
                lines.append(
                    f"    for (int {idx} = 0; {idx} < {cap_cpp(arr_ty.cap)}; "
                    f"{idx}++) {{ {name}.data[{idx}] = {fill}; }}"
                )
            lines.append(f"    return {name};")
            lines.append("})())")
            return f"\n{pad}".join(lines)

        if isinstance(e, RefExpr):
            inner_ty = emit_type(e.ty.inner)
            return f"juniper::refcell<{inner_ty}>({self.emit_expr(e.operand, ind)})"

        if isinstance(e, DerefExpr):
            return f"({self.emit_expr(e.operand, ind)}).get()"

        raise AssertionError(f"cannot emit expression {e!r}")

    # -- reference & operator helpers ----------------------------------------------

    def _emit_ref(self, e: VarRef) -> str:
        binding = getattr(e, "binding", None)
        if binding is not None and binding[0] == "local":
            return e.name
        base = f"{e.module}::{e.name}" if e.module else e.name
        tyargs = getattr(e, "resolved_tyargs", None)
        if tyargs is not None:
            capargs = getattr(e, "resolved_capargs", None) or ()
            args = [emit_type(t) for t in tyargs] + [cap_cpp(c) for c in capargs]
            return f"{base}<{', '.join(args)}>"
        return base

    def _emit_lvalue(self, e: Expr, ind: int) -> str:
        if isinstance(e, VarRef):
            return self._emit_ref(e)
        if isinstance(e, IndexExpr):
            return f"({self._emit_lvalue(e.base, ind)}).data[{self.emit_expr(e.index, ind)}]"
        if isinstance(e, FieldAccessExpr):
            return f"({self._emit_lvalue(e.base, ind)}).{e.field}"
        raise AssertionError(f"invalid assignment target {e!r}")

    def _wrap_cast(self, ty: TInt, expr: str) -> str:
        cty = _INT_CPP[(ty.bits, ty.signed)]
        return f"(({cty}) ({expr}))"

    def _wrap_arith(self, ty: TInt, expr: str) -> str:
        """Wrap-around arithmetic: route 32-bit signed ops through unsigned."""
        if ty.bits == 32 and ty.signed:
            return f"((int32_t) ((uint32_t) ({expr})))"
        return self._wrap_cast(ty, expr)

    def _emit_binop(self, e: BinopExpr, ind: int) -> str:
        op = e.op
        left = self.emit_expr(e.left, ind)
        right = self.emit_expr(e.right, ind)
        if op in ("and", "or"):
            cpp = "&&" if op == "and" else "||"
            return f"({left} {cpp} {right})"
        if op in ("==", "!=", "<", ">", "<=", ">="):
            return f"({left} {op} {right})"
        lty = e.left.ty
        if isinstance(lty, TFloat):
            return f"({left} {op} {right})"
        assert isinstance(lty, TInt)
        if op in ("+", "-", "*"):
            if lty.bits == 32 and lty.signed:
                return (
                    f"((int32_t) ((uint32_t) ({left}) {op} (uint32_t) ({right})))"
                )
            return self._wrap_cast(lty, f"({left}) {op} ({right})")
        cty = _INT_CPP[(lty.bits, lty.signed)]
        if op == "/":
            if lty.signed:
                return f"juniper::idiv(({cty}) ({left}), ({cty}) ({right}))"
            return f"(({left}) / ({right}))"
        if op == "mod":
            if lty.signed:
                return f"juniper::imod(({cty}) ({left}), ({cty}) ({right}))"
            return f"(({left}) % ({right}))"
        if op in ("<<<", ">>>"):
            ucty = _INT_CPP[(lty.bits, False)]
            shift = "<<" if op == "<<<" else ">>"
            return self._wrap_cast(
                lty,
                f"(({ucty}) ({left})) {shift} (({right}) & {lty.bits - 1})",
            )
        if op == "&&&":
            return self._wrap_cast(lty, f"({left}) & ({right})")
        if op == "|||":
            return self._wrap_cast(lty, f"({left}) | ({right})")
        raise AssertionError(op)

    # -- statement blocks (sequences and lets) ------------------------------------------

    def _emit_block(self, items: list[Expr], ind: int) -> tuple[list[str], str]:
        """Lower sequence items to statements; returns (statements, result expr)."""
        stmts: list[str] = []
        if not items:
            return stmts, "(Prelude::unit{})"
        for item in items[:-1]:
            if isinstance(item, LetExpr):
                self._emit_let(item, stmts, ind)
            else:
                stmts.append(f"{self.emit_expr(item, ind)};")
        last = items[-1]
        if isinstance(last, LetExpr):
            return stmts, self._emit_let(last, stmts, ind)
        return stmts, self.emit_expr(last, ind)

    def _emit_let(self, e: LetExpr, stmts: list[str], ind: int) -> str:
        value = self.emit_expr(e.value, ind)
        pat = e.pattern
        if isinstance(pat, VarPat):
            ty = emit_type(e.value.ty)
            stmts.append(f"{ty} {pat.name} = {value};")
            return pat.name
        name = self.fresh()
        ty = emit_type(e.value.ty)
        stmts.append(f"{ty} {name} = {value};")
        cond = self._pattern_cond(pat, name)
        if cond != "true":
            stmts.append(
                f"if (!{cond}) {{ juniper::quit<Prelude::unit>(); }}"
            )
        for bind_name, path in self._pattern_binds(pat, name):
            stmts.append(f"auto {bind_name} = {path};")
        return name

    # -- case lowering ---------------------------------------------------------------------

    def _emit_case(self, e: CaseExpr, ind: int) -> str:
        pad = "    " * ind
        inner = "    " * (ind + 1)
        ret = emit_type(e.ty)
        scrut_ty = emit_type(e.scrutinee.ty)
        name = self.fresh()
        scrut = self.emit_expr(e.scrutinee, ind + 1)

        chain = f"juniper::quit<{ret}>()"
        for pat, body in reversed(e.clauses):
            cond = self._pattern_cond(pat, name)
            arm_inner = "    " * (ind + 2)
            binds = "".join(
                f"{arm_inner}auto {n} = {path};\n"
                for n, path in self._pattern_binds(pat, name)
            )
            arm = (
                f"(([&]() -> {ret} {{\n"
                f"{binds}"
                f"{arm_inner}return {self.emit_expr(body, ind + 2)};\n"
                f"{inner}}})())"
            )
            chain = f"({cond} ? \n{inner}{arm}\n{inner}:\n{inner}{chain})"
        return (
            f"(([&]() -> {ret} {{\n"
            f"{inner}{scrut_ty} {name} = {scrut};\n"
            f"{inner}return {chain};\n"
            f"{pad}}})())"
        )

    def _pattern_cond(self, p: Pattern, path: str) -> str:
        if isinstance(p, (VarPat, WildcardPat)):
            return "true"
        if isinstance(p, (IntPat, FloatPat)):
            return f"(({path}) == {p.text})"
        if isinstance(p, CtorPat):
            info = p.ctor
            if p.inner is None:
                inner = "true"
            else:
                inner = self._pattern_cond(p.inner, f"({path}).{info.name}")
            return f"((({path}).tag == {info.tag}) && {inner})"
        if isinstance(p, RecordPat):
            parts = [
                self._pattern_cond(sub, f"({path}).{fname}")
                for fname, sub in p.fields
            ]
            parts = [c for c in parts if c != "true"]
            return f"({' && '.join(parts)})" if parts else "true"
        if isinstance(p, TuplePat):
            parts = [
                self._pattern_cond(sub, f"({path}).e{i + 1}")
                for i, sub in enumerate(p.items)
            ]
            parts = [c for c in parts if c != "true"]
            return f"({' && '.join(parts)})" if parts else "true"
        raise AssertionError(f"unknown pattern {p!r}")

    def _pattern_binds(self, p: Pattern, path: str) -> list[tuple[str, str]]:
        if isinstance(p, VarPat):
            return [(p.name, path)]
        if isinstance(p, CtorPat) and p.inner is not None:
            return self._pattern_binds(p.inner, f"({path}).{p.ctor.name}")
        if isinstance(p, RecordPat):
            out: list[tuple[str, str]] = []
            for fname, sub in p.fields:
                out.extend(self._pattern_binds(sub, f"({path}).{fname}"))
            return out
        if isinstance(p, TuplePat):
            out = []
            for i, sub in enumerate(p.items):
                out.extend(self._pattern_binds(sub, f"({path}).e{i + 1}"))
            return out
        return []


def emit_program(
    program: TypedProgram, includes: tuple[str, ...] = ()
) -> EmitUnit:
    """Emit the single C++ translation unit for a typed program."""
    return Emitter(program, includes).emit_program()
