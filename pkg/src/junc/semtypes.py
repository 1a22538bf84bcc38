"""Resolved semantic types and substitution over them."""

from __future__ import annotations

from dataclasses import dataclass

from . import capacity
from .capacity import Poly


@dataclass(frozen=True)
class SemType:
    pass


@dataclass(frozen=True)
class TUnit(SemType):
    pass


@dataclass(frozen=True)
class TBool(SemType):
    pass


@dataclass(frozen=True)
class TInt(SemType):
    bits: int  # 8 | 16 | 32
    signed: bool


@dataclass(frozen=True)
class TFloat(SemType):
    bits: int  # 32 | 64


@dataclass(frozen=True)
class TPointer(SemType):
    """Foreign handle backed by an untyped reference-counted cell."""


@dataclass(frozen=True)
class TVar(SemType):
    name: str  # without the leading quote


@dataclass(frozen=True)
class TFun(SemType):
    params: tuple[SemType, ...]
    ret: SemType


@dataclass(frozen=True)
class TAdt(SemType):
    module: str
    name: str
    tyargs: tuple[SemType, ...] = ()
    capargs: tuple[Poly, ...] = ()


@dataclass(frozen=True)
class TRecord(SemType):
    module: str
    name: str
    tyargs: tuple[SemType, ...] = ()
    capargs: tuple[Poly, ...] = ()


@dataclass(frozen=True)
class TRef(SemType):
    inner: SemType


@dataclass(frozen=True)
class TArray(SemType):
    inner: SemType
    cap: Poly


@dataclass(frozen=True)
class TTuple(SemType):
    items: tuple[SemType, ...]


UNIT = TUnit()
BOOL = TBool()
POINTER = TPointer()

INT_TYPES = {
    "int8": TInt(8, True),
    "int16": TInt(16, True),
    "int32": TInt(32, True),
    "uint8": TInt(8, False),
    "uint16": TInt(16, False),
    "uint32": TInt(32, False),
}
FLOAT_TYPES = {"float": TFloat(32), "double": TFloat(64)}

BUILTIN_TYPES: dict[str, SemType] = {
    "unit": UNIT,
    "bool": BOOL,
    "pointer": POINTER,
    **INT_TYPES,
    **FLOAT_TYPES,
}

_INT_NAMES = {v: k for k, v in INT_TYPES.items()}
_FLOAT_NAMES = {v: k for k, v in FLOAT_TYPES.items()}


def is_numeric(t: SemType) -> bool:
    return isinstance(t, (TInt, TFloat))


def render(t: SemType) -> str:
    if isinstance(t, TUnit):
        return "unit"
    if isinstance(t, TBool):
        return "bool"
    if isinstance(t, TInt):
        return _INT_NAMES[t]
    if isinstance(t, TFloat):
        return _FLOAT_NAMES[t]
    if isinstance(t, TPointer):
        return "pointer"
    if isinstance(t, TVar):
        return f"'{t.name}"
    if isinstance(t, TFun):
        params = ", ".join(render(p) for p in t.params)
        return f"({params}) -> {render(t.ret)}"
    if isinstance(t, (TAdt, TRecord)):
        if not t.tyargs and not t.capargs:
            return t.name
        inner = ", ".join(render(a) for a in t.tyargs)
        if t.capargs:
            inner += "; " + ", ".join(capacity.render(c) for c in t.capargs)
        return f"{t.name}<{inner}>"
    if isinstance(t, TRef):
        return f"{render(t.inner)} ref"
    if isinstance(t, TArray):
        return f"{render(t.inner)}[{capacity.render(t.cap)}]"
    if isinstance(t, TTuple):
        return "(" + " * ".join(render(i) for i in t.items) + ")"
    raise AssertionError(f"unknown type {t!r}")


def render_scheme(tyvars: tuple[str, ...], capvars: tuple[str, ...], t: SemType) -> str:
    if not tyvars and not capvars:
        return render(t)
    quantified = ", ".join([f"'{v}" for v in tyvars] + list(capvars))
    return f"∀{quantified}. {render(t)}"


def subst(t: SemType, tymap: dict[str, SemType], capmap: dict[str, Poly]) -> SemType:
    """Apply a substitution. Arguments are closed in the variables they replace,
    so plain structural replacement is capture-avoiding here."""
    if isinstance(t, TVar):
        return tymap.get(t.name, t)
    if isinstance(t, TFun):
        return TFun(
            tuple(subst(p, tymap, capmap) for p in t.params),
            subst(t.ret, tymap, capmap),
        )
    if isinstance(t, TAdt):
        return TAdt(
            t.module,
            t.name,
            tuple(subst(a, tymap, capmap) for a in t.tyargs),
            tuple(capacity.subst(c, capmap) for c in t.capargs),
        )
    if isinstance(t, TRecord):
        return TRecord(
            t.module,
            t.name,
            tuple(subst(a, tymap, capmap) for a in t.tyargs),
            tuple(capacity.subst(c, capmap) for c in t.capargs),
        )
    if isinstance(t, TRef):
        return TRef(subst(t.inner, tymap, capmap))
    if isinstance(t, TArray):
        return TArray(subst(t.inner, tymap, capmap), capacity.subst(t.cap, capmap))
    if isinstance(t, TTuple):
        return TTuple(tuple(subst(i, tymap, capmap) for i in t.items))
    return t


def free_tyvars(t: SemType) -> set[str]:
    if isinstance(t, TVar):
        return {t.name}
    if isinstance(t, TFun):
        out = free_tyvars(t.ret)
        for p in t.params:
            out |= free_tyvars(p)
        return out
    if isinstance(t, (TAdt, TRecord)):
        out = set()
        for a in t.tyargs:
            out |= free_tyvars(a)
        return out
    if isinstance(t, TRef):
        return free_tyvars(t.inner)
    if isinstance(t, TArray):
        return free_tyvars(t.inner)
    if isinstance(t, TTuple):
        out = set()
        for i in t.items:
            out |= free_tyvars(i)
        return out
    return set()


def contains_function(t: SemType) -> bool:
    """True when equality is undefined for the type (a function lurks inside)."""
    if isinstance(t, TFun):
        return True
    if isinstance(t, (TAdt, TRecord)):
        return any(contains_function(a) for a in t.tyargs)
    if isinstance(t, TRef):
        return contains_function(t.inner)
    if isinstance(t, TArray):
        return contains_function(t.inner)
    if isinstance(t, TTuple):
        return any(contains_function(i) for i in t.items)
    return False
