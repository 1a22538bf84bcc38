"""AST dataclasses produced by the parser.

Spans never participate in structural equality, so `parse(pretty(m)) == m`
can be asserted directly. The checker fills the `ty` slot on expressions and
patterns in place; it is likewise excluded from equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .diagnostics import DUMMY_SPAN, Span


@dataclass
class Node:
    span: Span = field(default=DUMMY_SPAN, compare=False, repr=False, kw_only=True)


@dataclass
class Decl(Node):
    pass


@dataclass
class Expr(Node):
    ty: object = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass
class Pattern(Node):
    ty: object = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass
class TyExpr(Node):
    pass


@dataclass
class CapExpr(Node):
    pass


# -- type and capacity expressions -------------------------------------------


@dataclass
class TyName(TyExpr):
    """Named type reference, optionally module-qualified and template-applied."""

    module: Optional[str]
    name: str
    tyargs: Optional[list[TyExpr]] = None
    capargs: Optional[list[CapExpr]] = None


@dataclass
class TyFun(TyExpr):
    params: list[TyExpr]
    ret: TyExpr


@dataclass
class TyArray(TyExpr):
    elem: TyExpr
    capacity: CapExpr


@dataclass
class TyRefOf(TyExpr):
    inner: TyExpr


@dataclass
class TyTuple(TyExpr):
    items: list[TyExpr]


@dataclass
class CapName(CapExpr):
    name: str


@dataclass
class CapInt(CapExpr):
    value: int


@dataclass
class CapBinop(CapExpr):
    op: str  # one of + - * /
    left: CapExpr
    right: CapExpr


# -- patterns -----------------------------------------------------------------


@dataclass
class VarPat(Pattern):
    mutable: bool
    name: str
    annot: Optional[TyExpr] = None


@dataclass
class IntPat(Pattern):
    text: str
    value: int


@dataclass
class FloatPat(Pattern):
    text: str
    value: float


@dataclass
class WildcardPat(Pattern):
    pass


@dataclass
class CtorPat(Pattern):
    module: Optional[str]
    name: str
    tyargs: Optional[list[TyExpr]]
    capargs: Optional[list[CapExpr]]
    inner: Optional[Pattern]


@dataclass
class RecordPat(Pattern):
    module: Optional[str]
    name: str
    tyargs: Optional[list[TyExpr]]
    capargs: Optional[list[CapExpr]]
    fields: list[tuple[str, Pattern]]


@dataclass
class TuplePat(Pattern):
    items: list[Pattern]


# -- expressions --------------------------------------------------------------


@dataclass
class UnitLit(Expr):
    pass


@dataclass
class BoolLit(Expr):
    value: bool


@dataclass
class IntLit(Expr):
    text: str
    value: int


@dataclass
class FloatLit(Expr):
    text: str
    value: float


@dataclass
class NullLit(Expr):
    """Fresh foreign pointer aimed at NULL; grammar extension for `pointer`."""


@dataclass
class SequenceExpr(Expr):
    """Parenthesized `;` chain; single-element groupings collapse in the parser."""

    items: list[Expr]


@dataclass
class TupleExpr(Expr):
    items: list[Expr]


@dataclass
class VarRef(Expr):
    """Bare identifier, `Mod:name` qualifier, or template-applied reference."""

    module: Optional[str]
    name: str
    tyargs: Optional[list[TyExpr]] = None
    capargs: Optional[list[CapExpr]] = None


@dataclass
class CallExpr(Expr):
    fn: Expr
    args: list[Expr]


@dataclass
class IndexExpr(Expr):
    base: Expr
    index: Expr


@dataclass
class BinopExpr(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass
class IfExpr(Expr):
    """`if/elif.../else` kept as an arm list so the chain round-trips."""

    arms: list[tuple[Expr, Expr]]
    orelse: Expr


@dataclass
class LetExpr(Expr):
    pattern: Pattern
    value: Expr


@dataclass
class SetExpr(Expr):
    through_ref: bool
    target: Expr  # left-assign chain: VarRef / IndexExpr / FieldAccessExpr
    value: Expr


@dataclass
class ForExpr(Expr):
    var: str
    annot: TyExpr
    start: Expr
    stop: Expr
    downward: bool
    body: Expr


@dataclass
class WhileExpr(Expr):
    cond: Expr
    body: Expr


@dataclass
class DoWhileExpr(Expr):
    body: Expr
    cond: Expr


@dataclass
class NotExpr(Expr):
    operand: Expr


@dataclass
class BitNotExpr(Expr):
    operand: Expr


@dataclass
class FieldAccessExpr(Expr):
    base: Expr
    field: str


@dataclass
class LambdaExpr(Expr):
    params: list[tuple[str, TyExpr]]
    ret: TyExpr
    body: Expr


@dataclass
class CaseExpr(Expr):
    scrutinee: Expr
    clauses: list[tuple[Pattern, Expr]]


@dataclass
class RecordLitExpr(Expr):
    module: Optional[str]
    name: str
    tyargs: Optional[list[TyExpr]]
    capargs: Optional[list[CapExpr]]
    fields: list[tuple[str, Expr]]


@dataclass
class ArrayLitExpr(Expr):
    items: list[Expr]


@dataclass
class RefExpr(Expr):
    operand: Expr


@dataclass
class DerefExpr(Expr):
    operand: Expr


@dataclass
class ArrayOfExpr(Expr):
    """`array T[n] of e end`, or default-initialized `array T[n] end`."""

    annot: TyExpr
    fill: Optional[Expr]


@dataclass
class InlineCodeExpr(Expr):
    code: str


# -- declarations -------------------------------------------------------------


@dataclass
class OpenDecl(Decl):
    names: list[str]


@dataclass
class ExportDecl(Decl):
    names: list[str]


@dataclass
class IncludeDecl(Decl):
    headers: list[str]  # verbatim header spellings, e.g. '<FastLED.h>' or '"x.h"'


@dataclass
class RecordDecl(Decl):
    name: str
    tyvars: list[str]
    capvars: list[str]
    fields: list[tuple[str, TyExpr]]


@dataclass
class AdtDecl(Decl):
    name: str
    tyvars: list[str]
    capvars: list[str]
    ctors: list[tuple[str, Optional[TyExpr]]]


@dataclass
class LetDecl(Decl):
    name: str
    annot: TyExpr
    value: Expr


@dataclass
class FunDecl(Decl):
    name: str
    tyvars: list[str]
    capvars: list[str]
    params: list[tuple[str, TyExpr]]
    ret: TyExpr
    body: Expr


@dataclass
class SourceModule(Node):
    name: str
    declarations: list[Decl]


LeftAssign = Union[VarRef, IndexExpr, FieldAccessExpr]
