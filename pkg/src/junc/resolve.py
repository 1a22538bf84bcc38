"""Module environments: name tables, export lists, dependency validation.

Supplied module order is authoritative; every `open` and every `Mod:`
qualifier must point at an earlier module (or the module itself for
qualifiers). That rules out dependency cycles by construction, so a forward
reference is reported as an ordering/cycle fault.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .ast_nodes import *
from .diagnostics import DiagnosticSink, Span
from .semtypes import BUILTIN_TYPES


@dataclass
class TypeInfo:
    module: str
    name: str
    decl: Decl  # RecordDecl | AdtDecl
    decl_index: int
    field_sems: list = None  # record fields as (name, SemType), checker-filled

    @property
    def is_record(self) -> bool:
        return isinstance(self.decl, RecordDecl)

    @property
    def tyvars(self) -> list[str]:
        return self.decl.tyvars

    @property
    def capvars(self) -> list[str]:
        return self.decl.capvars


@dataclass
class CtorInfo:
    module: str
    adt_name: str
    name: str
    tag: int
    payload: Optional[TyExpr]
    decl: AdtDecl
    decl_index: int
    payload_sem: object = None  # resolved payload SemType, checker-filled


@dataclass
class LetInfo:
    module: str
    name: str
    decl: LetDecl
    decl_index: int
    sem_type: object = None  # filled by the checker


@dataclass
class FunInfo:
    module: str
    name: str
    decl: FunDecl
    decl_index: int
    generic: object = None  # TFun with TVars, filled by the checker

    @property
    def tyvars(self) -> list[str]:
        return self.decl.tyvars

    @property
    def capvars(self) -> list[str]:
        return self.decl.capvars


ValueInfo = CtorInfo | LetInfo | FunInfo


@dataclass
class ModuleEnv:
    name: str
    index: int
    types: dict[str, TypeInfo] = field(default_factory=dict)
    values: dict[str, ValueInfo] = field(default_factory=dict)
    opens: list[str] = field(default_factory=list)
    exports: Optional[set[str]] = None  # None means export everything
    includes: list[str] = field(default_factory=list)

    def exports_name(self, name: str) -> bool:
        return self.exports is None or name in self.exports

    def exported_type(self, name: str) -> Optional[TypeInfo]:
        info = self.types.get(name)
        return info if info is not None and self.exports_name(name) else None

    def exported_value(self, name: str) -> Optional[ValueInfo]:
        info = self.values.get(name)
        return info if info is not None and self.exports_name(name) else None


def resolve_program(
    modules: list[SourceModule],
) -> tuple[dict[str, ModuleEnv], DiagnosticSink]:
    sink = DiagnosticSink()
    envs: dict[str, ModuleEnv] = {}
    order: dict[str, int] = {}

    for index, module in enumerate(modules):
        env = ModuleEnv(module.name, index)
        envs[module.name] = env
        order[module.name] = index
        _populate(module, env, sink)

    for module in modules:
        env = envs[module.name]
        for dep, span, via_open in _references(module):
            if dep == module.name:
                if via_open:
                    sink.error(f"module '{dep}' opens itself", span)
                continue
            if dep not in order:
                sink.error(f"unknown module '{dep}'", span)
                continue
            if order[dep] > order[module.name]:
                sink.error(
                    f"module '{module.name}' depends on '{dep}' which is supplied "
                    "later; module order must be dependency order (cycles are "
                    "rejected)",
                    span,
                )
    return envs, sink


def _populate(module: SourceModule, env: ModuleEnv, sink: DiagnosticSink) -> None:
    for index, decl in enumerate(module.declarations):
        if isinstance(decl, OpenDecl):
            env.opens.extend(decl.names)
        elif isinstance(decl, ExportDecl):
            if env.exports is None:
                env.exports = set(decl.names)
            else:
                env.exports |= set(decl.names)
        elif isinstance(decl, IncludeDecl):
            env.includes.extend(decl.headers)
        elif isinstance(decl, (RecordDecl, AdtDecl)):
            if decl.name in BUILTIN_TYPES:
                sink.error(f"type '{decl.name}' redefines a builtin type", decl.span)
                continue
            if decl.name in env.types:
                sink.error(f"duplicate type '{decl.name}'", decl.span)
                continue
            env.types[decl.name] = TypeInfo(module.name, decl.name, decl, index)
            if isinstance(decl, AdtDecl):
                for tag, (cname, payload) in enumerate(decl.ctors):
                    if cname in env.values:
                        sink.error(
                            f"value constructor '{cname}' collides with an "
                            "existing value",
                            decl.span,
                        )
                        continue
                    env.values[cname] = CtorInfo(
                        module.name, decl.name, cname, tag, payload, decl, index
                    )
        elif isinstance(decl, LetDecl):
            if decl.name in env.values:
                sink.error(f"duplicate value '{decl.name}'", decl.span)
                continue
            env.values[decl.name] = LetInfo(module.name, decl.name, decl, index)
        elif isinstance(decl, FunDecl):
            if decl.name in env.values:
                sink.error(f"duplicate value '{decl.name}'", decl.span)
                continue
            env.values[decl.name] = FunInfo(module.name, decl.name, decl, index)


def _references(module: SourceModule) -> list[tuple[str, Span, bool]]:
    """Every module name this module mentions: opens plus qualifiers."""
    refs: list[tuple[str, Span, bool]] = []

    for decl in module.declarations:
        if isinstance(decl, OpenDecl):
            for name in decl.names:
                refs.append((name, decl.span, True))

    def walk_ty(ty: TyExpr) -> None:
        if isinstance(ty, TyName):
            if ty.module:
                refs.append((ty.module, ty.span, False))
            for arg in ty.tyargs or []:
                walk_ty(arg)
        elif isinstance(ty, TyFun):
            for p in ty.params:
                walk_ty(p)
            walk_ty(ty.ret)
        elif isinstance(ty, TyArray):
            walk_ty(ty.elem)
        elif isinstance(ty, TyRefOf):
            walk_ty(ty.inner)
        elif isinstance(ty, TyTuple):
            for item in ty.items:
                walk_ty(item)

    def walk_pattern(p: Pattern) -> None:
        if isinstance(p, VarPat) and p.annot is not None:
            walk_ty(p.annot)
        elif isinstance(p, (CtorPat, RecordPat)):
            if p.module:
                refs.append((p.module, p.span, False))
            for arg in p.tyargs or []:
                walk_ty(arg)
            if isinstance(p, CtorPat) and p.inner is not None:
                walk_pattern(p.inner)
            if isinstance(p, RecordPat):
                for _, sub in p.fields:
                    walk_pattern(sub)
        elif isinstance(p, TuplePat):
            for sub in p.items:
                walk_pattern(sub)

    def walk_expr(e: Expr) -> None:
        if isinstance(e, VarRef):
            if e.module:
                refs.append((e.module, e.span, False))
            for arg in e.tyargs or []:
                walk_ty(arg)
        elif isinstance(e, SequenceExpr):
            for item in e.items:
                walk_expr(item)
        elif isinstance(e, TupleExpr):
            for item in e.items:
                walk_expr(item)
        elif isinstance(e, CallExpr):
            walk_expr(e.fn)
            for a in e.args:
                walk_expr(a)
        elif isinstance(e, IndexExpr):
            walk_expr(e.base)
            walk_expr(e.index)
        elif isinstance(e, BinopExpr):
            walk_expr(e.left)
            walk_expr(e.right)
        elif isinstance(e, IfExpr):
            for cond, body in e.arms:
                walk_expr(cond)
                walk_expr(body)
            walk_expr(e.orelse)
        elif isinstance(e, LetExpr):
            walk_pattern(e.pattern)
            walk_expr(e.value)
        elif isinstance(e, SetExpr):
            walk_expr(e.target)
            walk_expr(e.value)
        elif isinstance(e, ForExpr):
            walk_ty(e.annot)
            walk_expr(e.start)
            walk_expr(e.stop)
            walk_expr(e.body)
        elif isinstance(e, WhileExpr):
            walk_expr(e.cond)
            walk_expr(e.body)
        elif isinstance(e, DoWhileExpr):
            walk_expr(e.body)
            walk_expr(e.cond)
        elif isinstance(e, (NotExpr, BitNotExpr, DerefExpr, RefExpr)):
            walk_expr(e.operand)
        elif isinstance(e, FieldAccessExpr):
            walk_expr(e.base)
        elif isinstance(e, LambdaExpr):
            for _, ty in e.params:
                walk_ty(ty)
            walk_ty(e.ret)
            walk_expr(e.body)
        elif isinstance(e, CaseExpr):
            walk_expr(e.scrutinee)
            for pat, body in e.clauses:
                walk_pattern(pat)
                walk_expr(body)
        elif isinstance(e, RecordLitExpr):
            if e.module:
                refs.append((e.module, e.span, False))
            for arg in e.tyargs or []:
                walk_ty(arg)
            for _, v in e.fields:
                walk_expr(v)
        elif isinstance(e, ArrayLitExpr):
            for item in e.items:
                walk_expr(item)
        elif isinstance(e, ArrayOfExpr):
            walk_ty(e.annot)
            if e.fill is not None:
                walk_expr(e.fill)

    for decl in module.declarations:
        if isinstance(decl, RecordDecl):
            for _, ty in decl.fields:
                walk_ty(ty)
        elif isinstance(decl, AdtDecl):
            for _, payload in decl.ctors:
                if payload is not None:
                    walk_ty(payload)
        elif isinstance(decl, LetDecl):
            walk_ty(decl.annot)
            walk_expr(decl.value)
        elif isinstance(decl, FunDecl):
            for _, ty in decl.params:
                walk_ty(ty)
            walk_ty(decl.ret)
            walk_expr(decl.body)

    return refs
