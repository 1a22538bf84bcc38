"""Bidirectional type checking against explicit annotations.

There is no unification: polymorphic references require explicit template
application, and the only inference is forward propagation (a local
`let x = e` takes the type of `e`, numeric literals adopt the annotated
context). Every checked expression node gets its resolved type written into
`node.ty`; references additionally get `node.binding` so later stages know
which module a name resolved into.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import capacity
from .ast_nodes import *
from .capacity import Poly
from .diagnostics import DiagnosticSink, Span, TypeError_
from .resolve import (
    CtorInfo,
    FunInfo,
    LetInfo,
    ModuleEnv,
    TypeInfo,
    ValueInfo,
    resolve_program,
)
from .semtypes import *
from .semtypes import is_numeric, render, subst


@dataclass
class TypedProgram:
    modules: list[SourceModule]
    envs: dict[str, ModuleEnv]

    def module_order(self) -> list[str]:
        return [m.name for m in self.modules]

    def entry_module(self) -> str | None:
        """Last module in dependency order that declares `main`."""
        for module in reversed(self.modules):
            for decl in module.declarations:
                if isinstance(decl, FunDecl) and decl.name == "main":
                    return module.name
        return None

    def includes(self) -> list[str]:
        out: list[str] = []
        for module in self.modules:
            for header in self.envs[module.name].includes:
                if header not in out:
                    out.append(header)
        return out


@dataclass
class _Local:
    ty: SemType
    mutable: bool


class Checker:
    def __init__(self, modules: list[SourceModule], envs: dict[str, ModuleEnv]):
        self.modules = modules
        self.envs = envs
        self.sink = DiagnosticSink()
        self._fun_cache: dict[tuple[str, str], TFun] = {}
        self._ctor_cache: dict[tuple[str, str], SemType | None] = {}
        self._field_cache: dict[tuple[str, str], list[tuple[str, SemType]]] = {}
        # current checking context
        self.env: ModuleEnv | None = None
        self.tyvars: frozenset[str] = frozenset()
        self.capvars: frozenset[str] = frozenset()
        self.current_index: int = 10**9
        self.in_let_init = False
        self.scopes: list[dict[str, _Local]] = []

    # -- context helpers -------------------------------------------------------

    def _context(self, env, tyvars=(), capvars=(), index=10**9):
        return _Context(self, env, frozenset(tyvars), frozenset(capvars), index)

    def fail(self, message: str, span: Span):
        raise TypeError_(message, span)

    # -- program driver ----------------------------------------------------------

    def check_program(self) -> TypedProgram:
        for module in self.modules:
            env = self.envs[module.name]
            self._check_module(module, env)
        return TypedProgram(self.modules, self.envs)

    def _check_module(self, module: SourceModule, env: ModuleEnv) -> None:
        # Type declarations first: their bodies may only mention earlier types.
        for index, decl in enumerate(module.declarations):
            if isinstance(decl, (RecordDecl, AdtDecl)):
                with self._context(
                    env, decl.tyvars, decl.capvars, index
                ), _catch(self.sink):
                    self._check_type_decl(decl, env)
        # Signatures next, so bodies may forward-reference functions.
        for index, decl in enumerate(module.declarations):
            with _catch(self.sink):
                if isinstance(decl, FunDecl):
                    info = env.values.get(decl.name)
                    if isinstance(info, FunInfo):
                        self._fun_generic(info)
                elif isinstance(decl, LetDecl):
                    info = env.values.get(decl.name)
                    if isinstance(info, LetInfo):
                        with self._context(env, index=index):
                            info.sem_type = self.resolve_type(decl.annot)
        # Bodies last.
        for index, decl in enumerate(module.declarations):
            with _catch(self.sink):
                self.check_declaration(decl, env, index)

    def check_declaration(self, decl: Decl, env: ModuleEnv, index: int = 10**9):
        if isinstance(decl, LetDecl):
            info = env.values.get(decl.name)
            if not isinstance(info, LetInfo) or info.sem_type is None:
                return
            with self._context(env, index=index):
                self.in_let_init = True
                try:
                    self.check_expr(decl.value, info.sem_type)
                finally:
                    self.in_let_init = False
        elif isinstance(decl, FunDecl):
            info = env.values.get(decl.name)
            if not isinstance(info, FunInfo):
                return
            generic = self._fun_cache.get((info.module, info.name))
            if generic is None:
                return  # signature already failed in the earlier pass
            with self._context(env, decl.tyvars, decl.capvars, index):
                self.scopes = [
                    {
                        name: _Local(ty, mutable=False)
                        for (name, _), ty in zip(decl.params, generic.params)
                    }
                ]
                self.check_expr(decl.body, generic.ret)
                self.scopes = []

    # -- type declaration checking --------------------------------------------

    def _check_type_decl(self, decl, env: ModuleEnv) -> None:
        if isinstance(decl, RecordDecl):
            field_sems = [
                (fname, self.resolve_type(ty, enforce_order=True))
                for fname, ty in decl.fields
            ]
            env.types[decl.name].field_sems = field_sems
            self._field_cache[(env.name, decl.name)] = field_sems
        else:
            for cname, payload in decl.ctors:
                sem = (
                    self.resolve_type(payload, enforce_order=True)
                    if payload is not None
                    else None
                )
                info = env.values.get(cname)
                if isinstance(info, CtorInfo):
                    info.payload_sem = sem
                    self._ctor_cache[(env.name, cname)] = sem

    # -- type resolution ----------------------------------------------------------

    def resolve_type(self, ty: TyExpr, enforce_order: bool = False) -> SemType:
        if isinstance(ty, TyName):
            if ty.name.startswith("'"):
                name = ty.name[1:]
                if name not in self.tyvars:
                    self.fail(f"unknown type variable '{ty.name}", ty.span)
                if ty.tyargs is not None or ty.capargs is not None:
                    self.fail("type variables take no template arguments", ty.span)
                return TVar(name)
            if ty.module is None and ty.name in BUILTIN_TYPES:
                if ty.tyargs is not None or ty.capargs is not None:
                    self.fail(
                        f"builtin type '{ty.name}' takes no template arguments",
                        ty.span,
                    )
                return BUILTIN_TYPES[ty.name]
            info = self.lookup_type(ty.module, ty.name, ty.span)
            if enforce_order and info.module == self.env.name:
                if info.decl_index > self.current_index:
                    self.fail(
                        f"type '{ty.name}' is used before its declaration",
                        ty.span,
                    )
            tyargs, capargs = self._template_args(
                info.tyvars, info.capvars, ty.tyargs, ty.capargs, ty.span,
                f"type '{ty.name}'",
            )
            cls = TRecord if info.is_record else TAdt
            return cls(info.module, info.name, tyargs, capargs)
        if isinstance(ty, TyFun):
            return TFun(
                tuple(self.resolve_type(p, enforce_order) for p in ty.params),
                self.resolve_type(ty.ret, enforce_order),
            )
        if isinstance(ty, TyArray):
            return TArray(
                self.resolve_type(ty.elem, enforce_order),
                self.resolve_cap(ty.capacity),
            )
        if isinstance(ty, TyRefOf):
            return TRef(self.resolve_type(ty.inner, enforce_order))
        if isinstance(ty, TyTuple):
            if len(ty.items) > 8:
                self.fail(
                    "tuples are limited to 8 elements (the runtime provides "
                    "tuple2..tuple8)",
                    ty.span,
                )
            return TTuple(tuple(self.resolve_type(i, enforce_order) for i in ty.items))
        raise AssertionError(f"unknown type expression {ty!r}")

    def resolve_cap(self, cap: CapExpr) -> Poly:
        def validate(c: CapExpr) -> None:
            if isinstance(c, CapName):
                if c.name not in self.capvars:
                    self.fail(f"unknown capacity variable '{c.name}'", c.span)
            elif isinstance(c, CapInt):
                if c.value < 0:
                    self.fail("capacities are non-negative", c.span)
            elif isinstance(c, CapBinop):
                validate(c.left)
                validate(c.right)

        validate(cap)
        try:
            return capacity.normalize(cap)
        except capacity.CapacityError as e:
            self.fail(str(e), cap.span)

    def _template_args(
        self, tyvars, capvars, tyargs_ast, capargs_ast, span, what
    ) -> tuple[tuple[SemType, ...], tuple[Poly, ...]]:
        if not tyvars and not capvars:
            if tyargs_ast is not None or capargs_ast is not None:
                self.fail(f"{what} takes no template arguments", span)
            return (), ()
        if tyargs_ast is None and capargs_ast is None:
            self.fail(
                f"{what} is templated; supply explicit arguments, e.g. "
                f"{what.split()[-1]}<{', '.join(chr(39) + v for v in tyvars)}"
                + ("; " + ", ".join(capvars) if capvars else "")
                + ">",
                span,
            )
        tyargs_ast = tyargs_ast or []
        capargs_ast = capargs_ast or []
        if len(tyargs_ast) != len(tyvars) or len(capargs_ast) != len(capvars):
            self.fail(
                f"{what} expects {len(tyvars)} type argument(s) and "
                f"{len(capvars)} capacity argument(s); found {len(tyargs_ast)} "
                f"and {len(capargs_ast)}",
                span,
            )
        return (
            tuple(self.resolve_type(t) for t in tyargs_ast),
            tuple(self.resolve_cap(c) for c in capargs_ast),
        )

    # -- name lookup ---------------------------------------------------------------

    def lookup_type(self, module: str | None, name: str, span: Span) -> TypeInfo:
        if module is not None:
            env = self.envs.get(module)
            if env is None:
                self.fail(f"unknown module '{module}'", span)
            info = env.types.get(name)
            if info is None:
                self.fail(f"module '{module}' has no type '{name}'", span)
            if module != self.env.name and not env.exports_name(name):
                self.fail(f"type '{module}:{name}' is not exported", span)
            return info
        info = self.env.types.get(name)
        if info is not None:
            return info
        candidates = []
        for opened in self.env.opens:
            env = self.envs.get(opened)
            if env is None:
                continue
            found = env.exported_type(name)
            if found is not None:
                candidates.append(found)
        if not candidates:
            self.fail(f"unknown type '{name}'", span)
        if len(candidates) > 1:
            mods = ", ".join(sorted(c.module for c in candidates))
            self.fail(
                f"type '{name}' is ambiguous (exported by {mods}); qualify it",
                span,
            )
        return candidates[0]

    def lookup_value(self, module: str | None, name: str, span: Span) -> ValueInfo:
        if module is not None:
            env = self.envs.get(module)
            if env is None:
                self.fail(f"unknown module '{module}'", span)
            info = env.values.get(name)
            if info is None:
                self.fail(f"module '{module}' has no value '{name}'", span)
            if module != self.env.name and not env.exports_name(name):
                self.fail(f"'{module}:{name}' is not exported", span)
            return info
        info = self.env.values.get(name)
        if info is not None:
            return info
        candidates = []
        for opened in self.env.opens:
            env = self.envs.get(opened)
            if env is None:
                continue
            found = env.exported_value(name)
            if found is not None:
                candidates.append(found)
        if not candidates:
            self.fail(f"unresolved name '{name}'", span)
        if len(candidates) > 1:
            mods = ", ".join(sorted(c.module for c in candidates))
            self.fail(
                f"'{name}' is ambiguous (exported by {mods}); qualify it, e.g. "
                f"{candidates[0].module}:{name}",
                span,
            )
        return candidates[0]

    # -- generic signatures -----------------------------------------------------------

    def _fun_generic(self, info: FunInfo) -> TFun:
        key = (info.module, info.name)
        cached = self._fun_cache.get(key)
        if cached is not None:
            return cached
        decl = info.decl
        with self._context(
            self.envs[info.module], decl.tyvars, decl.capvars, info.decl_index
        ):
            seen: set[str] = set()
            for pname, _ in decl.params:
                if pname in seen:
                    self.fail(f"duplicate parameter '{pname}'", decl.span)
                seen.add(pname)
            generic = TFun(
                tuple(self.resolve_type(t) for _, t in decl.params),
                self.resolve_type(decl.ret),
            )
        self._fun_cache[key] = generic
        info.generic = generic
        return generic

    def _ctor_payload(self, info: CtorInfo) -> SemType | None:
        key = (info.module, info.name)
        if key in self._ctor_cache:
            return self._ctor_cache[key]
        payload = None
        if info.payload is not None:
            with self._context(
                self.envs[info.module],
                info.decl.tyvars,
                info.decl.capvars,
                info.decl_index,
            ):
                payload = self.resolve_type(info.payload)
        self._ctor_cache[key] = payload
        return payload

    def record_fields(self, info: TypeInfo) -> list[tuple[str, SemType]]:
        key = (info.module, info.name)
        cached = self._field_cache.get(key)
        if cached is None:
            with self._context(
                self.envs[info.module],
                info.decl.tyvars,
                info.decl.capvars,
                info.decl_index,
            ):
                cached = [
                    (fname, self.resolve_type(ft)) for fname, ft in info.decl.fields
                ]
            self._field_cache[key] = cached
        return cached

    def instantiate(
        self,
        tyvars: list[str],
        capvars: list[str],
        generic: SemType,
        tyargs: tuple[SemType, ...],
        capargs: tuple[Poly, ...],
    ) -> SemType:
        tymap = dict(zip(tyvars, tyargs))
        capmap = dict(zip(capvars, capargs))
        return subst(generic, tymap, capmap)

    def comparable(self, t: SemType) -> bool:
        """Structural equality is defined unless a function type is reachable.

        Named types are inspected through their declared contents; type
        variables count as comparable here because their instantiations are
        checked where they are supplied.
        """
        return _sem_comparable(t, self.envs, {})

    def _adt_instance(self, info: CtorInfo) -> TAdt:
        decl = info.decl
        return TAdt(
            info.module,
            decl.name,
            tuple(TVar(v) for v in decl.tyvars),
            tuple(capacity.var_poly(v) for v in decl.capvars),
        )

    # -- expressions ----------------------------------------------------------------------

    def check_expr(self, e: Expr, expected: SemType | None = None) -> SemType:
        ty = self._infer(e, expected)
        e.ty = ty
        return ty

    def _require(self, found: SemType, expected: SemType | None, span: Span) -> SemType:
        if expected is not None and found != expected:
            self.fail(f"expected {render(expected)}, found {render(found)}", span)
        return found

    def _infer(self, e: Expr, expected: SemType | None) -> SemType:
        if isinstance(e, UnitLit):
            return self._require(UNIT, expected, e.span)
        if isinstance(e, BoolLit):
            return self._require(BOOL, expected, e.span)
        if isinstance(e, IntLit):
            if expected is None:
                return INT_TYPES["int32"]
            if isinstance(expected, TInt):
                lo = -(2 ** (expected.bits - 1)) if expected.signed else 0
                hi = 2 ** (expected.bits - 1) - 1 if expected.signed else 2**expected.bits - 1
                if not lo <= e.value <= hi:
                    self.fail(
                        f"integer literal {e.value} out of range for "
                        f"{render(expected)}",
                        e.span,
                    )
                return expected
            self.fail(
                f"expected {render(expected)}, found integer literal", e.span
            )
        if isinstance(e, FloatLit):
            if expected is None:
                return FLOAT_TYPES["double"]
            if isinstance(expected, TFloat):
                return expected
            self.fail(f"expected {render(expected)}, found float literal", e.span)
        if isinstance(e, NullLit):
            return self._require(POINTER, expected, e.span)
        if isinstance(e, InlineCodeExpr):
            return self._require(UNIT, expected, e.span)

        if isinstance(e, SequenceExpr):
            self.scopes.append({})
            try:
                result = UNIT
                for i, item in enumerate(e.items):
                    want = expected if i == len(e.items) - 1 else None
                    if isinstance(item, LetExpr):
                        result = self._check_let(item)
                        if want is not None:
                            self._require(result, want, item.span)
                    else:
                        result = self.check_expr(item, want)
                return result
            finally:
                self.scopes.pop()

        if isinstance(e, LetExpr):
            ty = self._check_let(e)
            return self._require(ty, expected, e.span)

        if isinstance(e, TupleExpr):
            if len(e.items) > 8:
                self.fail(
                    "tuples are limited to 8 elements (the runtime provides "
                    "tuple2..tuple8)",
                    e.span,
                )
            if isinstance(expected, TTuple):
                if len(expected.items) != len(e.items):
                    self.fail(
                        f"expected {render(expected)}, found a tuple of "
                        f"{len(e.items)} elements",
                        e.span,
                    )
                return TTuple(
                    tuple(
                        self.check_expr(item, want)
                        for item, want in zip(e.items, expected.items)
                    )
                )
            ty = TTuple(tuple(self.check_expr(item) for item in e.items))
            return self._require(ty, expected, e.span)

        if isinstance(e, VarRef):
            return self._require(self._check_ref(e), expected, e.span)

        if isinstance(e, CallExpr):
            fn_ty = self.check_expr(e.fn)
            if not isinstance(fn_ty, TFun):
                self.fail(f"cannot call a value of type {render(fn_ty)}", e.span)
            if len(fn_ty.params) != len(e.args):
                self.fail(
                    f"call expects {len(fn_ty.params)} argument(s), "
                    f"found {len(e.args)}",
                    e.span,
                )
            for arg, want in zip(e.args, fn_ty.params):
                self.check_expr(arg, want)
            return self._require(fn_ty.ret, expected, e.span)

        if isinstance(e, IndexExpr):
            base = self.check_expr(e.base)
            if not isinstance(base, TArray):
                self.fail(f"cannot index a value of type {render(base)}", e.span)
            index_ty = self.check_expr(e.index)
            if not isinstance(index_ty, TInt):
                self.fail(
                    f"array index must be an integer, found {render(index_ty)}",
                    e.index.span,
                )
            return self._require(base.inner, expected, e.span)

        if isinstance(e, BinopExpr):
            return self._require(self._check_binop(e, expected), expected, e.span)

        if isinstance(e, IfExpr):
            result = expected
            for cond, body in e.arms:
                self.check_expr(cond, BOOL)
                result = self.check_expr(body, result)
            self.check_expr(e.orelse, result)
            return result

        if isinstance(e, SetExpr):
            self._check_set(e)
            return self._require(UNIT, expected, e.span)

        if isinstance(e, ForExpr):
            loop_ty = self.resolve_type(e.annot)
            if not isinstance(loop_ty, TInt):
                self.fail(
                    f"loop variable must have an integer type, found "
                    f"{render(loop_ty)}",
                    e.span,
                )
            self.check_expr(e.start, loop_ty)
            self.check_expr(e.stop, loop_ty)
            self.scopes.append({e.var: _Local(loop_ty, mutable=False)})
            try:
                self.check_expr(e.body)
            finally:
                self.scopes.pop()
            return self._require(UNIT, expected, e.span)

        if isinstance(e, WhileExpr):
            self.check_expr(e.cond, BOOL)
            self.check_expr(e.body)
            return self._require(UNIT, expected, e.span)

        if isinstance(e, DoWhileExpr):
            self.check_expr(e.body)
            self.check_expr(e.cond, BOOL)
            return self._require(UNIT, expected, e.span)

        if isinstance(e, NotExpr):
            self.check_expr(e.operand, BOOL)
            return self._require(BOOL, expected, e.span)

        if isinstance(e, BitNotExpr):
            ty = self.check_expr(e.operand, expected if isinstance(expected, TInt) else None)
            if not isinstance(ty, TInt):
                self.fail(f"'~~~' needs an integer, found {render(ty)}", e.span)
            return self._require(ty, expected, e.span)

        if isinstance(e, FieldAccessExpr):
            base = self.check_expr(e.base)
            if not isinstance(base, TRecord):
                self.fail(
                    f"cannot access field '{e.field}' on {render(base)}", e.span
                )
            info = self.envs[base.module].types[base.name]
            for fname, fty in self.record_fields(info):
                if fname == e.field:
                    inst = self.instantiate(
                        info.tyvars, info.capvars, fty, base.tyargs, base.capargs
                    )
                    return self._require(inst, expected, e.span)
            self.fail(f"{render(base)} has no field '{e.field}'", e.span)

        if isinstance(e, LambdaExpr):
            params = [(n, self.resolve_type(t)) for n, t in e.params]
            ret = self.resolve_type(e.ret)
            self.scopes.append(
                {n: _Local(t, mutable=False) for n, t in params}
            )
            try:
                self.check_expr(e.body, ret)
            finally:
                self.scopes.pop()
            ty = TFun(tuple(t for _, t in params), ret)
            return self._require(ty, expected, e.span)

        if isinstance(e, CaseExpr):
            scrut = self.check_expr(e.scrutinee)
            result = expected
            for pat, body in e.clauses:
                bindings: dict[str, _Local] = {}
                self.check_pattern(pat, scrut, bindings)
                self.scopes.append(bindings)
                try:
                    result = self.check_expr(body, result)
                finally:
                    self.scopes.pop()
            if not self._exhaustive(e.clauses, scrut):
                self.sink.warning(
                    "non-exhaustive match lowers to a runtime abort", e.span
                )
            return result

        if isinstance(e, RecordLitExpr):
            info = self.lookup_type(e.module, e.name, e.span)
            if not info.is_record:
                self.fail(f"'{e.name}' is not a record type", e.span)
            tyargs, capargs = self._template_args(
                info.tyvars, info.capvars, e.tyargs, e.capargs, e.span,
                f"record '{e.name}'",
            )
            e.type_info = info
            fields = {
                fname: self.instantiate(info.tyvars, info.capvars, fty, tyargs, capargs)
                for fname, fty in self.record_fields(info)
            }
            assigned: set[str] = set()
            for fname, value in e.fields:
                if fname not in fields:
                    self.fail(f"record '{e.name}' has no field '{fname}'", value.span)
                if fname in assigned:
                    self.fail(f"field '{fname}' assigned twice", value.span)
                assigned.add(fname)
                self.check_expr(value, fields[fname])
            missing = [f for f in fields if f not in assigned]
            if missing:
                self.fail(
                    f"record literal is missing field(s): {', '.join(missing)}",
                    e.span,
                )
            ty = TRecord(info.module, info.name, tyargs, capargs)
            return self._require(ty, expected, e.span)

        if isinstance(e, ArrayLitExpr):
            elem_want = expected.inner if isinstance(expected, TArray) else None
            first = self.check_expr(e.items[0], elem_want)
            for item in e.items[1:]:
                self.check_expr(item, first)
            ty = TArray(first, capacity.const_poly(len(e.items)))
            if isinstance(expected, TArray):
                if not capacity.check_capacity(ty.cap, expected.cap):
                    self.fail(
                        f"array literal has {len(e.items)} element(s) but "
                        f"{render(expected)} was expected",
                        e.span,
                    )
                return expected
            return self._require(ty, expected, e.span)

        if isinstance(e, ArrayOfExpr):
            ty = self.resolve_type(e.annot)
            if not isinstance(ty, TArray):
                self.fail(
                    f"'array' expression needs an array type, found {render(ty)}",
                    e.span,
                )
            if e.fill is not None:
                self.check_expr(e.fill, ty.inner)
            return self._require(ty, expected, e.span)

        if isinstance(e, RefExpr):
            if isinstance(expected, TRef):
                inner = self.check_expr(e.operand, expected.inner)
                return TRef(inner)
            return self._require(TRef(self.check_expr(e.operand)), expected, e.span)

        if isinstance(e, DerefExpr):
            ty = self.check_expr(e.operand)
            if not isinstance(ty, TRef):
                self.fail(f"cannot dereference a value of type {render(ty)}", e.span)
            return self._require(ty.inner, expected, e.span)

        raise AssertionError(f"unknown expression {e!r}")

    # -- helpers ---------------------------------------------------------------------------

    def _check_let(self, e: LetExpr) -> SemType:
        pat = e.pattern
        if isinstance(pat, VarPat) and pat.annot is not None:
            want = self.resolve_type(pat.annot)
            value_ty = self.check_expr(e.value, want)
        else:
            value_ty = self.check_expr(e.value)
        bindings: dict[str, _Local] = {}
        self.check_pattern(pat, value_ty, bindings)
        if not self._irrefutable(pat, value_ty):
            # A refutable binding aborts at runtime when it fails to match.
            self.sink.warning(
                "refutable let pattern aborts when the value does not match",
                e.span,
            )
        if self.scopes:
            self.scopes[-1].update(bindings)
        else:
            self.scopes.append(bindings)
        return value_ty

    def _check_ref(self, e: VarRef) -> SemType:
        if e.module is None and e.tyargs is None and e.capargs is None:
            for scope in reversed(self.scopes):
                if e.name in scope:
                    e.binding = ("local", e.name)
                    return scope[e.name].ty
        info = self.lookup_value(e.module, e.name, e.span)
        if isinstance(info, LetInfo):
            if e.tyargs is not None or e.capargs is not None:
                self.fail(f"'{e.name}' takes no template arguments", e.span)
            if (
                self.in_let_init
                and info.module == self.env.name
                and info.decl_index >= self.current_index
            ):
                self.fail(
                    f"'{e.name}' is used before it is initialized", e.span
                )
            if info.sem_type is None:
                self.fail(f"'{e.name}' has no valid type", e.span)
            e.binding = ("let", info.module, info.name)
            return info.sem_type

        if isinstance(info, FunInfo):
            generic = self._fun_generic(info)
            e.binding = ("fun", info.module, info.name)
            if not info.tyvars and not info.capvars:
                if e.tyargs is not None or e.capargs is not None:
                    self.fail(f"'{e.name}' takes no template arguments", e.span)
                return generic
            tyargs, capargs = self._template_args(
                info.tyvars, info.capvars, e.tyargs, e.capargs, e.span,
                f"function '{e.name}'",
            )
            e.resolved_tyargs = tyargs
            e.resolved_capargs = capargs
            return self.instantiate(info.tyvars, info.capvars, generic, tyargs, capargs)

        assert isinstance(info, CtorInfo)
        e.binding = ("ctor", info.module, info.name)
        e.ctor = info
        payload = self._ctor_payload(info)
        instance = self._adt_instance(info)
        generic = TFun((payload,) if payload is not None else (), instance)
        decl = info.decl
        if not decl.tyvars and not decl.capvars:
            if e.tyargs is not None or e.capargs is not None:
                self.fail(f"constructor '{e.name}' takes no template arguments", e.span)
            return generic
        tyargs, capargs = self._template_args(
            decl.tyvars, decl.capvars, e.tyargs, e.capargs, e.span,
            f"constructor '{e.name}'",
        )
        e.resolved_tyargs = tyargs
        e.resolved_capargs = capargs
        return self.instantiate(decl.tyvars, decl.capvars, generic, tyargs, capargs)

    _INT_OPS = {"mod", "<<<", ">>>", "&&&", "|||"}
    _CMP_OPS = {"<", ">", "<=", ">="}
    _ARITH_OPS = {"+", "-", "*", "/"}

    def _check_binop(self, e: BinopExpr, expected: SemType | None = None) -> SemType:
        op = e.op
        if op in ("and", "or"):
            self.check_expr(e.left, BOOL)
            self.check_expr(e.right, BOOL)
            return BOOL

        # Arithmetic results have the operand type, so an annotated context
        # flows into both operands (this is what types `let x : uint8 = 1+2`).
        arith_like = op in self._ARITH_OPS or op in self._INT_OPS
        if arith_like and isinstance(expected, (TInt, TFloat)):
            lt = self.check_expr(e.left, expected)
            rt = self.check_expr(e.right, expected)
        elif isinstance(e.left, (IntLit, FloatLit)) and not isinstance(
            e.right, (IntLit, FloatLit)
        ):
            # Literal operands adopt the other side's type.
            rt = self.check_expr(e.right)
            lt = self.check_expr(e.left, rt)
        else:
            lt = self.check_expr(e.left)
            rt = self.check_expr(e.right, lt)

        if op in ("==", "!="):
            if not self.comparable(lt):
                self.fail(
                    f"equality is undefined for {render(lt)} "
                    "(a function type is involved)",
                    e.span,
                )
            return BOOL
        if op in self._CMP_OPS:
            if not is_numeric(lt):
                self.fail(f"'{op}' needs numeric operands, found {render(lt)}", e.span)
            return BOOL
        if op in self._ARITH_OPS:
            if op == "/" and not is_numeric(lt):
                self.fail(f"'/' needs numeric operands, found {render(lt)}", e.span)
            if op != "/" and not is_numeric(lt):
                self.fail(f"'{op}' needs numeric operands, found {render(lt)}", e.span)
            return lt
        if op in self._INT_OPS:
            if not isinstance(lt, TInt):
                self.fail(f"'{op}' needs integer operands, found {render(lt)}", e.span)
            return lt
        raise AssertionError(f"unknown operator {op!r}")

    def _check_set(self, e: SetExpr) -> None:
        if e.through_ref:
            target_ty = self.check_expr(e.target)
            if not isinstance(target_ty, TRef):
                self.fail(
                    f"'set ref' needs a ref target, found {render(target_ty)}",
                    e.span,
                )
            self.check_expr(e.value, target_ty.inner)
            return
        root = e.target
        while isinstance(root, (IndexExpr, FieldAccessExpr)):
            root = root.base
        if not isinstance(root, VarRef) or root.module is not None:
            self.fail("'set' target must start at a local binding", e.span)
        local = None
        for scope in reversed(self.scopes):
            if root.name in scope:
                local = scope[root.name]
                break
        if local is None:
            if self.env and root.name in self.env.values:
                self.fail(
                    f"cannot assign to module-level binding '{root.name}' "
                    "(use a ref)",
                    e.span,
                )
            self.fail(f"unresolved name '{root.name}'", e.span)
        if not local.mutable:
            self.fail(
                f"cannot assign to immutable binding '{root.name}' "
                "(declare it with 'mutable')",
                e.span,
            )
        target_ty = self.check_expr(e.target)
        self.check_expr(e.value, target_ty)

    # -- patterns -------------------------------------------------------------------------

    def check_pattern(
        self, p: Pattern, scrut: SemType, bindings: dict[str, _Local]
    ) -> None:
        p.ty = scrut
        if isinstance(p, WildcardPat):
            return
        if isinstance(p, VarPat):
            if p.annot is not None:
                want = self.resolve_type(p.annot)
                if want != scrut:
                    self.fail(
                        f"pattern annotation {render(want)} does not match "
                        f"scrutinee type {render(scrut)}",
                        p.span,
                    )
            bindings[p.name] = _Local(scrut, p.mutable)
            return
        if isinstance(p, IntPat):
            if not isinstance(scrut, TInt):
                self.fail(
                    f"integer pattern against non-integer {render(scrut)}", p.span
                )
            return
        if isinstance(p, FloatPat):
            if not isinstance(scrut, TFloat):
                self.fail(f"float pattern against {render(scrut)}", p.span)
            return
        if isinstance(p, CtorPat):
            info = self.lookup_value(p.module, p.name, p.span)
            if not isinstance(info, CtorInfo):
                self.fail(f"'{p.name}' is not a value constructor", p.span)
            if not isinstance(scrut, TAdt) or (
                scrut.module != info.module or scrut.name != info.adt_name
            ):
                self.fail(
                    f"constructor '{p.name}' belongs to {info.adt_name}, not "
                    f"{render(scrut)}",
                    p.span,
                )
            p.ctor = info
            if p.tyargs is not None or p.capargs is not None:
                tyargs, capargs = self._template_args(
                    info.decl.tyvars, info.decl.capvars, p.tyargs, p.capargs,
                    p.span, f"constructor '{p.name}'",
                )
                if tyargs != scrut.tyargs or capargs != scrut.capargs:
                    self.fail(
                        f"pattern instantiates {info.adt_name}"
                        f"<{', '.join(render(t) for t in tyargs)}> but the "
                        f"scrutinee is {render(scrut)}",
                        p.span,
                    )
            payload = self._ctor_payload(info)
            if payload is None:
                if p.inner is not None:
                    self.fail(
                        f"constructor '{p.name}' carries no payload", p.span
                    )
                return
            if p.inner is None:
                self.fail(f"constructor '{p.name}' expects a payload", p.span)
            inst_payload = self.instantiate(
                info.decl.tyvars, info.decl.capvars, payload,
                scrut.tyargs, scrut.capargs,
            )
            self.check_pattern(p.inner, inst_payload, bindings)
            return
        if isinstance(p, RecordPat):
            info = self.lookup_type(p.module, p.name, p.span)
            if not info.is_record:
                self.fail(f"'{p.name}' is not a record type", p.span)
            if not isinstance(scrut, TRecord) or (
                scrut.module != info.module or scrut.name != info.name
            ):
                self.fail(
                    f"record pattern '{p.name}' does not match {render(scrut)}",
                    p.span,
                )
            p.type_info = info
            fields = {
                fname: self.instantiate(
                    info.tyvars, info.capvars, fty, scrut.tyargs, scrut.capargs
                )
                for fname, fty in self.record_fields(info)
            }
            for fname, sub_pat in p.fields:
                if fname not in fields:
                    self.fail(f"record '{p.name}' has no field '{fname}'", p.span)
                self.check_pattern(sub_pat, fields[fname], bindings)
            return
        if isinstance(p, TuplePat):
            if not isinstance(scrut, TTuple) or len(scrut.items) != len(p.items):
                self.fail(
                    f"tuple pattern of {len(p.items)} element(s) against "
                    f"{render(scrut)}",
                    p.span,
                )
            for sub, ty in zip(p.items, scrut.items):
                self.check_pattern(sub, ty, bindings)
            return
        raise AssertionError(f"unknown pattern {p!r}")

    # -- exhaustiveness (best effort, warnings only) -----------------------------------

    def _irrefutable(self, p: Pattern, scrut: SemType) -> bool:
        if isinstance(p, (VarPat, WildcardPat)):
            return True
        if isinstance(p, TuplePat) and isinstance(scrut, TTuple):
            return all(
                self._irrefutable(sub, ty) for sub, ty in zip(p.items, scrut.items)
            )
        if isinstance(p, RecordPat) and isinstance(scrut, TRecord):
            info = getattr(p, "type_info", None)
            if info is None:
                return False
            fields = {
                fname: self.instantiate(
                    info.tyvars, info.capvars, fty, scrut.tyargs, scrut.capargs
                )
                for fname, fty in self.record_fields(info)
            }
            return all(
                fname in fields and self._irrefutable(sub, fields[fname])
                for fname, sub in p.fields
            )
        if isinstance(p, CtorPat) and isinstance(scrut, TAdt):
            info = getattr(p, "ctor", None)
            if info is None or len(info.decl.ctors) != 1:
                return False
            if p.inner is None:
                return True
            payload = self._ctor_payload(info)
            inst = self.instantiate(
                info.decl.tyvars, info.decl.capvars, payload,
                scrut.tyargs, scrut.capargs,
            )
            return self._irrefutable(p.inner, inst)
        return False

    def _exhaustive(self, clauses, scrut: SemType) -> bool:
        for pat, _ in clauses:
            if self._irrefutable(pat, scrut):
                return True
        if isinstance(scrut, TAdt):
            info = self.envs[scrut.module].types[scrut.name]
            covered: set[str] = set()
            for pat, _ in clauses:
                if isinstance(pat, CtorPat):
                    ctor = getattr(pat, "ctor", None)
                    if ctor is None:
                        continue
                    if pat.inner is None:
                        covered.add(pat.name)
                    else:
                        payload = self._ctor_payload(ctor)
                        inst = self.instantiate(
                            ctor.decl.tyvars, ctor.decl.capvars, payload,
                            scrut.tyargs, scrut.capargs,
                        )
                        if self._irrefutable(pat.inner, inst):
                            covered.add(pat.name)
            return covered == {name for name, _ in info.decl.ctors}
        return False


class _Context:
    """Scoped swap of the checker's module/typevar context."""

    def __init__(self, checker: Checker, env, tyvars, capvars, index):
        self.checker = checker
        self.new = (env, tyvars, capvars, index)

    def __enter__(self):
        c = self.checker
        self.old = (c.env, c.tyvars, c.capvars, c.current_index, c.scopes, c.in_let_init)
        c.env, c.tyvars, c.capvars, c.current_index = self.new
        c.scopes = []
        c.in_let_init = False
        return self

    def __exit__(self, *exc):
        c = self.checker
        (c.env, c.tyvars, c.capvars, c.current_index, c.scopes, c.in_let_init) = self.old
        return False


class _catch:
    """Convert a TypeError_ raised while checking one declaration into a
    diagnostic, so later declarations still get checked."""

    def __init__(self, sink: DiagnosticSink):
        self.sink = sink

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None and issubclass(exc_type, TypeError_):
            self.sink.items.append(exc.diagnostic())
            return True
        return False


def check_program(
    modules: list[SourceModule],
) -> tuple[TypedProgram | None, DiagnosticSink]:
    """Resolve and type check; the TypedProgram is None when errors exist."""
    envs, sink = resolve_program(modules)
    if not sink.ok():
        return None, sink
    checker = Checker(modules, envs)
    program = checker.check_program()
    sink.extend(checker.sink)
    if not sink.ok():
        return None, sink
    return program, sink


def generic_comparable(envs: dict, module: str, name: str, _memo=None) -> bool:
    """Whether a declared ADT/record supports structural equality for every
    instantiation of its own type variables (no concrete function type is
    reachable through its payloads/fields)."""
    memo = {} if _memo is None else _memo
    key = (module, name)
    if key in memo:
        return memo[key]
    memo[key] = True  # declaration order forbids cycles; guard regardless
    env = envs.get(module)
    info = env.types.get(name) if env is not None else None
    ok = True
    if info is not None:
        if info.is_record:
            parts = [ty for _, ty in (info.field_sems or [])]
        else:
            parts = []
            for cname, _ in info.decl.ctors:
                cinfo = env.values.get(cname)
                payload = getattr(cinfo, "payload_sem", None)
                if payload is not None:
                    parts.append(payload)
        ok = all(_sem_comparable(p, envs, memo) for p in parts)
    memo[key] = ok
    return ok


def _sem_comparable(t: SemType, envs: dict, memo: dict) -> bool:
    if isinstance(t, TFun):
        return False
    if isinstance(t, TVar):
        return True  # checked again wherever concrete arguments are supplied
    if isinstance(t, (TAdt, TRecord)):
        if not generic_comparable(envs, t.module, t.name, memo):
            return False
        return all(_sem_comparable(a, envs, memo) for a in t.tyargs)
    if isinstance(t, (TRef, TArray)):
        return _sem_comparable(t.inner, envs, memo)
    if isinstance(t, TTuple):
        return all(_sem_comparable(i, envs, memo) for i in t.items)
    return True


def check_one_module(
    modules: list[SourceModule], target: SourceModule
) -> DiagnosticSink:
    """Check only `target` against the full module list.

    Signatures from the other modules resolve lazily on demand, so this is
    cheap when the context modules are large and already known to be clean
    (e.g. mutation testing a user file against the stdlib).
    """
    envs, sink = resolve_program(modules)
    if not sink.ok():
        return sink
    checker = Checker(modules, envs)
    checker._check_module(target, envs[target.name])
    sink.extend(checker.sink)
    return sink
