"""Reference tree-walking evaluator for typed programs.

The evaluator is the semantics oracle: strict left-to-right evaluation,
fixed-width integer arithmetic that wraps like the compiled output, and value
semantics everywhere except ref cells (the single mutable runtime object).
Inline C++ blobs are not executed; the four stdlib hardware primitives that
contain them (`Io:digWrite`, `Io:digRead`, `Io:setPinMode`, `Time:now`) are
intercepted by name and routed to the host device hooks instead.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from .ast_nodes import *
from .diagnostics import DUMMY_SPAN, InterpFault, Span
from .resolve import CtorInfo, FunInfo
from .semtypes import TArray, TInt
from .typecheck import TypedProgram


# -- runtime values --------------------------------------------------------------


class Value:
    pass


class UnitVal(Value):
    _instance: "UnitVal" = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "()"

    def __eq__(self, other):
        return isinstance(other, UnitVal)

    def __hash__(self):
        return 0


UNIT_VAL = UnitVal()


@dataclass(frozen=True)
class BoolVal(Value):
    v: bool


@dataclass(frozen=True)
class IntVal(Value):
    bits: int
    signed: bool
    v: int


@dataclass(frozen=True)
class FloatVal(Value):
    bits: int
    v: float


@dataclass(frozen=True)
class AdtVal(Value):
    module: str
    adt: str
    tag: int
    ctor: str = field(compare=False)
    payload: Optional[Value] = None

    def __repr__(self):
        if self.payload is None:
            return f"{self.ctor}()"
        return f"{self.ctor}({self.payload!r})"


@dataclass(frozen=True)
class RecordVal(Value):
    module: str
    name: str
    fields: tuple  # tuple[(field, Value), ...] in declaration order


@dataclass(frozen=True)
class TupleVal(Value):
    items: tuple


@dataclass(frozen=True)
class ArrayVal(Value):
    items: tuple


class RefCellVal(Value):
    """The one mutable runtime object; equality compares current contents."""

    __slots__ = ("contents",)

    def __init__(self, contents: Value):
        self.contents = contents

    def __eq__(self, other):
        return isinstance(other, RefCellVal) and self.contents == other.contents

    def __repr__(self):
        return f"ref {self.contents!r}"


class PtrVal(Value):
    """Foreign handle: a shared slot holding an opaque host object (or None)."""

    __slots__ = ("slot",)

    def __init__(self, obj: Any = None):
        self.slot = [obj]

    def __eq__(self, other):
        return isinstance(other, PtrVal) and self.slot[0] is other.slot[0]

    def __repr__(self):
        return "pointer"


@dataclass
class ClosureVal(Value):
    params: list[str]
    body: Expr
    scopes: list[dict]

    def __eq__(self, other):
        return self is other


@dataclass
class FunVal(Value):
    module: str
    name: str
    decl: FunDecl

    def __eq__(self, other):
        return (
            isinstance(other, FunVal)
            and (self.module, self.name) == (other.module, other.name)
        )


@dataclass
class CtorVal(Value):
    info: CtorInfo


@dataclass
class HostFunVal(Value):
    """Host-supplied callable, used by tests to inject functions as values."""

    fn: Callable


# -- arithmetic helpers ------------------------------------------------------------


def wrap_int(bits: int, signed: bool, v: int) -> int:
    m = v & ((1 << bits) - 1)
    if signed and m >= 1 << (bits - 1):
        m -= 1 << bits
    return m


def make_int(ty: TInt, v: int) -> IntVal:
    return IntVal(ty.bits, ty.signed, wrap_int(ty.bits, ty.signed, v))


def round_float(bits: int, v: float) -> float:
    if bits == 32:
        return struct.unpack("f", struct.pack("f", v))[0]
    return v


def trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return -q if (a < 0) != (b < 0) else q


# -- host hooks --------------------------------------------------------------------


class HostHooks:
    """Callback surface the evaluator needs for Io/Time primitives."""

    def now(self) -> int:
        raise NotImplementedError

    def read_pin(self, pin: int) -> int:
        raise NotImplementedError

    def write_pin(self, pin: int, level: int) -> None:
        raise NotImplementedError

    def set_pin_mode(self, pin: int, mode: int) -> None:
        raise NotImplementedError

    def delay(self, ms: int) -> None:
        raise NotImplementedError


class NullHooks(HostHooks):
    """For pure programs; faults on any hardware access."""

    def now(self) -> int:
        raise InterpFault("clock access without a device", DUMMY_SPAN)

    def read_pin(self, pin: int) -> int:
        raise InterpFault("pin read without a device", DUMMY_SPAN)

    def write_pin(self, pin: int, level: int) -> None:
        raise InterpFault("pin write without a device", DUMMY_SPAN)

    def set_pin_mode(self, pin: int, mode: int) -> None:
        pass

    def delay(self, ms: int) -> None:
        raise InterpFault("delay without a device", DUMMY_SPAN)


# -- the evaluator -------------------------------------------------------------------


class Interp:
    def __init__(self, program: TypedProgram, hooks: HostHooks | None = None):
        self.program = program
        self.envs = program.envs
        self.hooks = hooks or NullHooks()
        self.module_values: dict[str, dict[str, Value]] = {}
        self._initialized = False

    # hardware primitives intercepted by qualified name
    _PRIMITIVES = {("Io", "digWrite"), ("Io", "digRead"), ("Io", "setPinMode"),
                   ("Time", "now")}

    def init_modules(self) -> None:
        if self._initialized:
            return
        self._initialized = True
        for module in self.program.modules:
            values: dict[str, Value] = {}
            self.module_values[module.name] = values
            for decl in module.declarations:
                if isinstance(decl, LetDecl):
                    values[decl.name] = self.eval(decl.value, [])

    def call_function(self, module: str, name: str, args: list[Value]) -> Value:
        self.init_modules()
        info = self.envs[module].values[name]
        assert isinstance(info, FunInfo)
        return self._call(FunVal(module, name, info.decl), args, info.decl.span)

    # -- calls ------------------------------------------------------------------

    def _call(self, fn: Value, args: list[Value], span: Span) -> Value:
        if isinstance(fn, FunVal):
            key = (fn.module, fn.name)
            if key in self._PRIMITIVES:
                return self._primitive(key, args, span)
            frame = dict(zip((n for n, _ in fn.decl.params), args))
            return self.eval(fn.decl.body, [frame])
        if isinstance(fn, ClosureVal):
            frame = dict(zip(fn.params, args))
            return self.eval(fn.body, fn.scopes + [frame])
        if isinstance(fn, CtorVal):
            payload = args[0] if args else None
            info = fn.info
            return AdtVal(info.module, info.adt_name, info.tag, info.name, payload)
        if isinstance(fn, HostFunVal):
            return fn.fn(*args)
        raise InterpFault(f"cannot call {fn!r}", span)

    def _primitive(self, key: tuple[str, str], args: list[Value], span: Span) -> Value:
        if key == ("Io", "digWrite"):
            pin, level = args
            self.hooks.write_pin(pin.v, level.tag)
            return UNIT_VAL
        if key == ("Io", "digRead"):
            (pin,) = args
            level = self.hooks.read_pin(pin.v)
            return self._pin_state(level)
        if key == ("Io", "setPinMode"):
            pin, mode = args
            self.hooks.set_pin_mode(pin.v, mode.tag)
            return UNIT_VAL
        if key == ("Time", "now"):
            return IntVal(32, False, wrap_int(32, False, self.hooks.now()))
        raise AssertionError(key)

    def _pin_state(self, level: int) -> AdtVal:
        return AdtVal("Io", "pinState", 1 if level else 0,
                      "high" if level else "low")

    # -- evaluation --------------------------------------------------------------

    def eval(self, e: Expr, scopes: list[dict]) -> Value:
        if isinstance(e, UnitLit):
            return UNIT_VAL
        if isinstance(e, BoolLit):
            return BoolVal(e.value)
        if isinstance(e, IntLit):
            assert isinstance(e.ty, TInt), "untyped integer literal"
            return make_int(e.ty, e.value)
        if isinstance(e, FloatLit):
            return FloatVal(e.ty.bits, round_float(e.ty.bits, e.value))
        if isinstance(e, NullLit):
            return PtrVal(None)
        if isinstance(e, InlineCodeExpr):
            raise InterpFault(
                "inline C++ is not executable in the interpreter", e.span
            )

        if isinstance(e, SequenceExpr):
            frame: dict = {}
            inner = scopes + [frame]
            result: Value = UNIT_VAL
            for item in e.items:
                if isinstance(item, LetExpr):
                    result = self._eval_let(item, inner, frame)
                else:
                    result = self.eval(item, inner)
            return result

        if isinstance(e, LetExpr):
            frame: dict = {}
            return self._eval_let(e, scopes + [frame], frame)

        if isinstance(e, TupleExpr):
            return TupleVal(tuple(self.eval(item, scopes) for item in e.items))

        if isinstance(e, VarRef):
            return self._ref_value(e, scopes)

        if isinstance(e, CallExpr):
            fn = self.eval(e.fn, scopes)
            args = [self.eval(a, scopes) for a in e.args]
            return self._call(fn, args, e.span)

        if isinstance(e, IndexExpr):
            base = self.eval(e.base, scopes)
            index = self.eval(e.index, scopes)
            if not 0 <= index.v < len(base.items):
                raise InterpFault(
                    f"array index {index.v} out of bounds for capacity "
                    f"{len(base.items)}",
                    e.span,
                )
            return base.items[index.v]

        if isinstance(e, BinopExpr):
            return self._binop(e, scopes)

        if isinstance(e, IfExpr):
            for cond, body in e.arms:
                if self.eval(cond, scopes).v:
                    return self.eval(body, scopes)
            return self.eval(e.orelse, scopes)

        if isinstance(e, SetExpr):
            if e.through_ref:
                cell = self.eval(e.target, scopes)
                cell.contents = self.eval(e.value, scopes)
                return UNIT_VAL
            return self._set_plain(e, scopes)

        if isinstance(e, ForExpr):
            loop_ty = e.annot_sem if hasattr(e, "annot_sem") else None
            start = self.eval(e.start, scopes)
            stop = self.eval(e.stop, scopes)
            bits, signed = start.bits, start.signed
            i = start.v
            frame: dict = {}
            inner = scopes + [frame]
            while (i >= stop.v) if e.downward else (i <= stop.v):
                frame[e.var] = IntVal(bits, signed, i)
                self.eval(e.body, inner)
                i = wrap_int(bits, signed, i + (-1 if e.downward else 1))
            return UNIT_VAL

        if isinstance(e, WhileExpr):
            while self.eval(e.cond, scopes).v:
                self.eval(e.body, scopes)
            return UNIT_VAL

        if isinstance(e, DoWhileExpr):
            while True:
                self.eval(e.body, scopes)
                if not self.eval(e.cond, scopes).v:
                    break
            return UNIT_VAL

        if isinstance(e, NotExpr):
            return BoolVal(not self.eval(e.operand, scopes).v)

        if isinstance(e, BitNotExpr):
            v = self.eval(e.operand, scopes)
            return IntVal(v.bits, v.signed, wrap_int(v.bits, v.signed, ~v.v))

        if isinstance(e, FieldAccessExpr):
            base = self.eval(e.base, scopes)
            for fname, value in base.fields:
                if fname == e.field:
                    return value
            raise InterpFault(f"record has no field '{e.field}'", e.span)

        if isinstance(e, LambdaExpr):
            return ClosureVal([n for n, _ in e.params], e.body, list(scopes))

        if isinstance(e, CaseExpr):
            scrutinee = self.eval(e.scrutinee, scopes)
            for pat, body in e.clauses:
                bindings = match(pat, scrutinee)
                if bindings is not None:
                    return self.eval(body, scopes + [bindings])
            raise InterpFault("no pattern matched the value", e.span)

        if isinstance(e, RecordLitExpr):
            info = e.type_info
            assigned = {name: self.eval(v, scopes) for name, v in e.fields}
            ordered = tuple((n, assigned[n]) for n, _ in info.decl.fields)
            return RecordVal(info.module, info.name, ordered)

        if isinstance(e, ArrayLitExpr):
            return ArrayVal(tuple(self.eval(item, scopes) for item in e.items))

        if isinstance(e, ArrayOfExpr):
            ty = e.ty
            assert isinstance(ty, TArray)
            cap = ty.cap.const_value() if ty.cap.is_const() else None
            if cap is None:
                raise InterpFault(
                    "array capacity is not a constant at run time", e.span
                )
            if e.fill is not None:
                fill = self.eval(e.fill, scopes)
            else:
                fill = self._default(ty.inner, e.span)
            return ArrayVal(tuple([fill] * cap))

        if isinstance(e, RefExpr):
            return RefCellVal(self.eval(e.operand, scopes))

        if isinstance(e, DerefExpr):
            cell = self.eval(e.operand, scopes)
            return cell.contents

        raise AssertionError(f"unknown expression {e!r}")

    # -- pieces ------------------------------------------------------------------

    def _eval_let(self, e: LetExpr, scopes: list[dict], frame: dict) -> Value:
        value = self.eval(e.value, scopes)
        bindings = match(e.pattern, value)
        if bindings is None:
            raise InterpFault("let pattern did not match the value", e.span)
        frame.update(bindings)
        return value

    def _ref_value(self, e: VarRef, scopes: list[dict]) -> Value:
        binding = getattr(e, "binding", None)
        if binding is None:
            raise InterpFault(f"unresolved reference '{e.name}'", e.span)
        if binding[0] == "local":
            for scope in reversed(scopes):
                if binding[1] in scope:
                    return scope[binding[1]]
            raise InterpFault(f"unbound local '{e.name}'", e.span)
        if binding[0] == "let":
            _, module, name = binding
            values = self.module_values.get(module, {})
            if name not in values:
                raise InterpFault(
                    f"'{module}:{name}' is used before initialization", e.span
                )
            return values[name]
        if binding[0] == "fun":
            _, module, name = binding
            info = self.envs[module].values[name]
            return FunVal(module, name, info.decl)
        if binding[0] == "ctor":
            return CtorVal(e.ctor)
        raise AssertionError(binding)

    def _binop(self, e: BinopExpr, scopes: list[dict]) -> Value:
        op = e.op
        if op == "and":
            left = self.eval(e.left, scopes)
            return self.eval(e.right, scopes) if left.v else BoolVal(False)
        if op == "or":
            left = self.eval(e.left, scopes)
            return BoolVal(True) if left.v else self.eval(e.right, scopes)

        left = self.eval(e.left, scopes)
        right = self.eval(e.right, scopes)

        if op == "==":
            return BoolVal(left == right)
        if op == "!=":
            return BoolVal(left != right)
        if op in ("<", ">", "<=", ">="):
            table = {
                "<": left.v < right.v,
                ">": left.v > right.v,
                "<=": left.v <= right.v,
                ">=": left.v >= right.v,
            }
            return BoolVal(table[op])

        if isinstance(left, FloatVal):
            if op == "+":
                out = left.v + right.v
            elif op == "-":
                out = left.v - right.v
            elif op == "*":
                out = left.v * right.v
            elif op == "/":
                if right.v == 0.0:
                    out = float("inf") if left.v > 0 else (float("-inf") if left.v < 0 else float("nan"))
                else:
                    out = left.v / right.v
            else:
                raise InterpFault(f"'{op}' undefined for floats", e.span)
            return FloatVal(left.bits, round_float(left.bits, out))

        bits, signed = left.bits, left.signed
        a, b = left.v, right.v
        if op == "+":
            out = a + b
        elif op == "-":
            out = a - b
        elif op == "*":
            out = a * b
        elif op in ("/", "mod"):
            if b == 0:
                raise InterpFault("division by zero", e.span)
            q = trunc_div(a, b)
            out = q if op == "/" else a - q * b
        elif op == "<<<":
            out = a << (b & (bits - 1))
        elif op == ">>>":
            out = (a & ((1 << bits) - 1)) >> (b & (bits - 1))
        elif op == "&&&":
            out = a & b
        elif op == "|||":
            out = a | b
        else:
            raise AssertionError(op)
        return IntVal(bits, signed, wrap_int(bits, signed, out))

    def _set_plain(self, e: SetExpr, scopes: list[dict]) -> Value:
        chain: list[tuple] = []
        node = e.target
        while isinstance(node, (IndexExpr, FieldAccessExpr)):
            if isinstance(node, IndexExpr):
                chain.append(("index", self.eval(node.index, scopes).v, node.span))
            else:
                chain.append(("field", node.field, node.span))
            node = node.base
        assert isinstance(node, VarRef)
        chain.reverse()
        for scope in reversed(scopes):
            if node.name in scope:
                scope[node.name] = self._updated(
                    scope[node.name], chain, self.eval(e.value, scopes)
                )
                return UNIT_VAL
        raise InterpFault(f"unbound local '{node.name}'", e.span)

    def _updated(self, old: Value, chain: list[tuple], new: Value) -> Value:
        if not chain:
            return new
        kind, key, span = chain[0]
        if kind == "field":
            fields = tuple(
                (n, self._updated(v, chain[1:], new) if n == key else v)
                for n, v in old.fields
            )
            return RecordVal(old.module, old.name, fields)
        if not 0 <= key < len(old.items):
            raise InterpFault(
                f"array index {key} out of bounds for capacity {len(old.items)}",
                span,
            )
        items = tuple(
            self._updated(v, chain[1:], new) if i == key else v
            for i, v in enumerate(old.items)
        )
        return ArrayVal(items)

    def _default(self, ty, span: Span) -> Value:
        from .semtypes import TBool, TFloat, TPointer, TTuple, TUnit

        if isinstance(ty, TUnit):
            return UNIT_VAL
        if isinstance(ty, TBool):
            return BoolVal(False)
        if isinstance(ty, TInt):
            return IntVal(ty.bits, ty.signed, 0)
        if isinstance(ty, TFloat):
            return FloatVal(ty.bits, 0.0)
        if isinstance(ty, TPointer):
            return PtrVal(None)
        if isinstance(ty, TTuple):
            return TupleVal(tuple(self._default(i, span) for i in ty.items))
        if isinstance(ty, TArray):
            if not ty.cap.is_const():
                raise InterpFault("array capacity is not constant", span)
            return ArrayVal(
                tuple([self._default(ty.inner, span)] * ty.cap.const_value())
            )
        raise InterpFault(
            f"cannot default-initialize a value of this type", span
        )


# -- pattern matching -----------------------------------------------------------------


def match(p: Pattern, v: Value) -> Optional[dict]:
    if isinstance(p, WildcardPat):
        return {}
    if isinstance(p, VarPat):
        return {p.name: v}
    if isinstance(p, IntPat):
        return {} if isinstance(v, IntVal) and v.v == p.value else None
    if isinstance(p, FloatPat):
        return {} if isinstance(v, FloatVal) and v.v == p.value else None
    if isinstance(p, CtorPat):
        info = p.ctor
        if not isinstance(v, AdtVal) or v.tag != info.tag:
            return None
        if p.inner is None:
            return {}
        return match(p.inner, v.payload)
    if isinstance(p, RecordPat):
        if not isinstance(v, RecordVal):
            return None
        values = dict(v.fields)
        out: dict = {}
        for fname, sub in p.fields:
            inner = match(sub, values[fname])
            if inner is None:
                return None
            out.update(inner)
        return out
    if isinstance(p, TuplePat):
        if not isinstance(v, TupleVal) or len(v.items) != len(p.items):
            return None
        out = {}
        for sub, item in zip(p.items, v.items):
            inner = match(sub, item)
            if inner is None:
                return None
            out.update(inner)
        return out
    raise AssertionError(f"unknown pattern {p!r}")


# -- program entry ------------------------------------------------------------------------


def run_main(
    program: TypedProgram,
    hooks: HostHooks,
    step_budget: int | None = None,
) -> list[tuple[int, int, int]]:
    """Run the program's `main` against `hooks`, returning the write trace.

    The budget (when given) is applied on top of whatever horizon the hooks
    already enforce. Interpreter faults propagate; the partial trace stays
    available on the hooks object.
    """
    from .hal import StopRun, VirtualDevice

    if step_budget is not None and isinstance(hooks, VirtualDevice):
        hooks.budget = step_budget
    entry = program.entry_module()
    if entry is None:
        raise InterpFault("program has no 'main' function", DUMMY_SPAN)
    interp = Interp(program, hooks)
    try:
        interp.init_modules()
        interp.call_function(entry, "main", [])
    except StopRun:
        pass
    return list(getattr(hooks, "trace", []))
