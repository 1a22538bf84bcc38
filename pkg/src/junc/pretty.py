"""Render ASTs back to parseable source text.

The contract is `parse(pretty_print(m)) == m` up to spans. Binary `<` gets
both operands parenthesized unconditionally: `a < b` with a bare reference on
the left would otherwise re-parse as a template application.
"""

from __future__ import annotations

from .ast_nodes import *

_RANK_PRIMARY = 100
_RANK_UNARY = 90
_RANK_STMT = 5

_BINOP_RANK = {
    "or": 15,
    "and": 20,
    "==": 25,
    "!=": 25,
    "<": 30,
    ">": 30,
    "<=": 30,
    ">=": 30,
    "|||": 40,
    "&&&": 50,
    "<<<": 60,
    ">>>": 60,
    "+": 70,
    "-": 70,
    "*": 80,
    "/": 80,
    "mod": 80,
}


def pretty_print(module: SourceModule) -> str:
    lines = [f"module {module.name}"]
    for decl in module.declarations:
        lines.append(print_decl(decl))
    return "\n".join(lines) + "\n"


def print_decl(decl: Decl) -> str:
    if isinstance(decl, OpenDecl):
        return f"open({', '.join(decl.names)})"
    if isinstance(decl, ExportDecl):
        return f"export({', '.join(decl.names)})"
    if isinstance(decl, IncludeDecl):
        quoted = ", ".join(_escape_string(h) for h in decl.headers)
        return f"include({quoted})"
    if isinstance(decl, RecordDecl):
        fields = "; ".join(f"{n} : {print_ty(t)}" for n, t in decl.fields)
        return (
            f"type {decl.name}{_template_dec(decl.tyvars, decl.capvars)}"
            f" = {{{fields}}}"
        )
    if isinstance(decl, AdtDecl):
        ctors = " | ".join(
            n if payload is None else f"{n} of {print_ty(payload)}"
            for n, payload in decl.ctors
        )
        return f"type {decl.name}{_template_dec(decl.tyvars, decl.capvars)} = {ctors}"
    if isinstance(decl, LetDecl):
        return f"let {decl.name} : {print_ty(decl.annot)} = {print_expr(decl.value)}"
    if isinstance(decl, FunDecl):
        params = ", ".join(f"{n} : {print_ty(t)}" for n, t in decl.params)
        return (
            f"fun {decl.name}{_template_dec(decl.tyvars, decl.capvars)}"
            f"({params}) : {print_ty(decl.ret)} = {print_expr(decl.body)}"
        )
    raise AssertionError(f"unknown declaration {decl!r}")


def _escape_string(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _template_dec(tyvars: list[str], capvars: list[str]) -> str:
    if not tyvars and not capvars:
        return ""
    inner = ", ".join("'" + v for v in tyvars)
    if capvars:
        inner += "; " + ", ".join(capvars)
    return f"<{inner}>"


def _template_apply(tyargs, capargs) -> str:
    if tyargs is None and capargs is None:
        return ""
    inner = ", ".join(print_ty(t) for t in (tyargs or []))
    if capargs:
        inner += "; " + ", ".join(print_cap(c) for c in capargs)
    return f"<{inner}>"


def _ref(module: str | None, name: str) -> str:
    return f"{module}:{name}" if module else name


# -- types ---------------------------------------------------------------------


def print_ty(ty: TyExpr) -> str:
    if isinstance(ty, TyName):
        return _ref(ty.module, ty.name) + _template_apply(ty.tyargs, ty.capargs)
    if isinstance(ty, TyFun):
        params = ", ".join(print_ty(p) for p in ty.params)
        return f"({params}) -> {print_ty(ty.ret)}"
    if isinstance(ty, TyArray):
        return f"{print_ty(ty.elem)}[{print_cap(ty.capacity)}]"
    if isinstance(ty, TyRefOf):
        return f"{print_ty(ty.inner)} ref"
    if isinstance(ty, TyTuple):
        return "(" + " * ".join(print_ty(t) for t in ty.items) + ")"
    raise AssertionError(f"unknown type expression {ty!r}")


def print_cap(cap: CapExpr) -> str:
    if isinstance(cap, CapName):
        return cap.name
    if isinstance(cap, CapInt):
        return str(cap.value)
    if isinstance(cap, CapBinop):
        return f"{print_cap(cap.left)} {cap.op} {print_cap(cap.right)}"
    raise AssertionError(f"unknown capacity expression {cap!r}")


# -- patterns --------------------------------------------------------------------


def print_pattern(pat: Pattern) -> str:
    if isinstance(pat, VarPat):
        text = ("mutable " if pat.mutable else "") + pat.name
        if pat.annot is not None:
            text += f" : {print_ty(pat.annot)}"
        return text
    if isinstance(pat, (IntPat, FloatPat)):
        return pat.text
    if isinstance(pat, WildcardPat):
        return "_"
    if isinstance(pat, CtorPat):
        head = _ref(pat.module, pat.name) + _template_apply(pat.tyargs, pat.capargs)
        inner = "" if pat.inner is None else print_pattern(pat.inner)
        return f"{head}({inner})"
    if isinstance(pat, RecordPat):
        head = _ref(pat.module, pat.name) + _template_apply(pat.tyargs, pat.capargs)
        fields = ", ".join(f"{n} = {print_pattern(p)}" for n, p in pat.fields)
        return f"{head}{{{fields}}}"
    if isinstance(pat, TuplePat):
        return "(" + ", ".join(print_pattern(p) for p in pat.items) + ")"
    raise AssertionError(f"unknown pattern {pat!r}")


# -- expressions -------------------------------------------------------------------


def print_expr(e: Expr) -> str:
    return _expr(e, 0)


def _rank(e: Expr) -> int:
    if isinstance(e, BinopExpr):
        return _BINOP_RANK[e.op]
    if isinstance(e, (NotExpr, BitNotExpr, DerefExpr, RefExpr)):
        return _RANK_UNARY
    if isinstance(e, (LetExpr, SetExpr, LambdaExpr)):
        return _RANK_STMT
    return _RANK_PRIMARY


def _expr(e: Expr, required: int) -> str:
    text = _expr_raw(e)
    if _rank(e) < required:
        return f"({text})"
    return text


def _expr_raw(e: Expr) -> str:
    if isinstance(e, UnitLit):
        return "()"
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, (IntLit, FloatLit)):
        return e.text
    if isinstance(e, NullLit):
        return "null"
    if isinstance(e, SequenceExpr):
        return "(" + "; ".join(_expr(item, 0) for item in e.items) + ")"
    if isinstance(e, TupleExpr):
        return "(" + ", ".join(_expr(item, 0) for item in e.items) + ")"
    if isinstance(e, VarRef):
        return _ref(e.module, e.name) + _template_apply(e.tyargs, e.capargs)
    if isinstance(e, CallExpr):
        args = ", ".join(_expr(a, 0) for a in e.args)
        return f"{_expr(e.fn, _RANK_PRIMARY)}({args})"
    if isinstance(e, IndexExpr):
        return f"{_expr(e.base, _RANK_PRIMARY)}[{_expr(e.index, 0)}]"
    if isinstance(e, FieldAccessExpr):
        return f"{_expr(e.base, _RANK_PRIMARY)}.{e.field}"
    if isinstance(e, BinopExpr):
        rank = _BINOP_RANK[e.op]
        if e.op == "<":
            # Guard against template-application re-parse of `ref < ty`.
            return f"({_expr(e.left, 0)}) < ({_expr(e.right, 0)})"
        return f"{_expr(e.left, rank)} {e.op} {_expr(e.right, rank + 1)}"
    if isinstance(e, IfExpr):
        parts = []
        for i, (cond, body) in enumerate(e.arms):
            word = "if" if i == 0 else "elif"
            parts.append(f"{word} {_expr(cond, 0)} then {_expr(body, 0)}")
        parts.append(f"else {_expr(e.orelse, 0)} end")
        return " ".join(parts)
    if isinstance(e, LetExpr):
        return f"let {print_pattern(e.pattern)} = {_expr(e.value, 0)}"
    if isinstance(e, SetExpr):
        kw = "set ref" if e.through_ref else "set"
        return f"{kw} {_expr_raw(e.target)} = {_expr(e.value, 0)}"
    if isinstance(e, ForExpr):
        direction = "downto" if e.downward else "to"
        return (
            f"for {e.var} : {print_ty(e.annot)} in {_expr(e.start, 0)} "
            f"{direction} {_expr(e.stop, 0)} do {_expr(e.body, 0)} end"
        )
    if isinstance(e, WhileExpr):
        return f"while {_expr(e.cond, 0)} do {_expr(e.body, 0)} end"
    if isinstance(e, DoWhileExpr):
        return f"do {_expr(e.body, 0)} while {_expr(e.cond, 0)} end"
    if isinstance(e, NotExpr):
        return f"not {_expr(e.operand, _RANK_UNARY)}"
    if isinstance(e, BitNotExpr):
        return f"~~~{_expr(e.operand, _RANK_UNARY)}"
    if isinstance(e, DerefExpr):
        return f"!{_expr(e.operand, _RANK_UNARY)}"
    if isinstance(e, RefExpr):
        return f"ref {_expr(e.operand, _RANK_UNARY)}"
    if isinstance(e, LambdaExpr):
        params = ", ".join(f"{n} : {print_ty(t)}" for n, t in e.params)
        return f"fn ({params}) : {print_ty(e.ret)} -> {_expr(e.body, 0)}"
    if isinstance(e, CaseExpr):
        clauses = " ".join(
            f"| {print_pattern(p)} => {_expr(body, 0)}" for p, body in e.clauses
        )
        return f"case {_expr(e.scrutinee, 0)} of {clauses} end"
    if isinstance(e, RecordLitExpr):
        head = _ref(e.module, e.name) + _template_apply(e.tyargs, e.capargs)
        fields = "; ".join(f"{n} = {_expr(v, 0)}" for n, v in e.fields)
        return f"{head} {{{fields}}}"
    if isinstance(e, ArrayLitExpr):
        return "[" + ", ".join(_expr(item, 0) for item in e.items) + "]"
    if isinstance(e, ArrayOfExpr):
        if e.fill is None:
            return f"array {print_ty(e.annot)} end"
        return f"array {print_ty(e.annot)} of {_expr(e.fill, 0)} end"
    if isinstance(e, InlineCodeExpr):
        return f"#{e.code}#"
    raise AssertionError(f"unknown expression {e!r}")
