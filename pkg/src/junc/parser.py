"""Recursive-descent parser for `.jun` modules.

Backtracking is used in exactly two places where the grammar needs lookahead:
deciding whether `<` after a reference starts a template application, and
deciding between constructor/record patterns and annotated variable patterns.
Operator precedence (tightest first):

    postfix (call, index, field)
    unary (`not`, `~~~`, `!`, `ref`)
    `*` `/` `mod`
    `+` `-`
    `<<<` `>>>`
    `&&&`
    `|||`
    `<` `>` `<=` `>=`
    `==` `!=`
    `and`
    `or`

with every binary level left-associative. `let`, `set`, and `fn` parse at the
loosest level, so their right-hand sides absorb full expressions.
"""

from __future__ import annotations

from .ast_nodes import *
from .diagnostics import Diagnostic, ParseError, Span
from .lexer import LexError, Token, TokenKind, tokenize

_DECL_START = ("open", "export", "include", "type", "fun", "let")

_BINOP_LEVELS: list[tuple[str, ...]] = [
    ("or",),
    ("and",),
    ("==", "!="),
    ("<", ">", "<=", ">="),
    ("|||",),
    ("&&&",),
    ("<<<", ">>>"),
    ("+", "-"),
    ("*", "/", "mod"),
]


class Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token plumbing -------------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        i = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[i]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind is not TokenKind.EOF:
            self.pos += 1
        return tok

    def at_kw(self, word: str) -> bool:
        return self.peek().is_kw(word)

    def at_op(self, op: str) -> bool:
        return self.peek().is_op(op)

    def at_punct(self, p: str) -> bool:
        return self.peek().is_punct(p)

    def accept_kw(self, word: str) -> bool:
        if self.at_kw(word):
            self.next()
            return True
        return False

    def accept_op(self, op: str) -> bool:
        if self.at_op(op):
            self.next()
            return True
        return False

    def accept_punct(self, p: str) -> bool:
        if self.at_punct(p):
            self.next()
            return True
        return False

    def expect_kw(self, word: str) -> Token:
        if not self.at_kw(word):
            self.fail(f"expected '{word}'")
        return self.next()

    def expect_op(self, op: str) -> Token:
        if not self.at_op(op):
            self.fail(f"expected '{op}'")
        return self.next()

    def expect_punct(self, p: str) -> Token:
        if not self.at_punct(p):
            self.fail(f"expected '{p}'")
        return self.next()

    def expect_ident(self, what: str = "identifier") -> Token:
        if self.peek().kind is not TokenKind.IDENT:
            self.fail(f"expected {what}")
        return self.next()

    def fail(self, expected: str) -> None:
        tok = self.peek()
        raise ParseError(f"{expected}, found {tok.describe()}", tok.span)

    def attempt(self, fn):
        """Run `fn`, restoring the cursor and returning None if it raises."""
        saved = self.pos
        try:
            return fn()
        except ParseError:
            self.pos = saved
            return None

    # -- module and declarations ----------------------------------------------

    def parse_module(self) -> tuple[SourceModule | None, list[Diagnostic]]:
        diags: list[Diagnostic] = []
        try:
            kw = self.expect_kw("module")
            name = self.expect_ident("module name")
        except ParseError as e:
            return None, [e.diagnostic()]

        decls: list[Decl] = []
        while self.peek().kind is not TokenKind.EOF:
            if self.at_kw("module"):
                diags.append(
                    Diagnostic(
                        "error",
                        "each file holds exactly one module; found a second 'module' header",
                        self.peek().span,
                    )
                )
                break
            try:
                decls.append(self.declaration())
            except ParseError as e:
                if not diags:
                    diags.append(e.diagnostic())
                self._resync()
        module = SourceModule(name.text, decls, span=kw.span)
        return module, diags

    def _resync(self) -> None:
        """Skip to the next plausible declaration start (or EOF)."""
        self.next()
        while self.peek().kind is not TokenKind.EOF:
            tok = self.peek()
            if tok.kind is TokenKind.KEYWORD and tok.text in _DECL_START + ("module",):
                return
            self.next()

    def declaration(self) -> Decl:
        tok = self.peek()
        if self.accept_kw("open"):
            return OpenDecl(self._ident_list(), span=tok.span)
        if self.accept_kw("export"):
            return ExportDecl(self._ident_list(), span=tok.span)
        if self.accept_kw("include"):
            return IncludeDecl(self._string_list(), span=tok.span)
        if self.accept_kw("type"):
            return self._type_decl(tok.span)
        if self.accept_kw("fun"):
            return self._fun_decl(tok.span)
        if self.accept_kw("let"):
            name = self.expect_ident("binding name")
            self.expect_op(":")
            annot = self.ty_expr()
            self.expect_op("=")
            value = self.expr()
            return LetDecl(name.text, annot, value, span=tok.span)
        self.fail("expected declaration (open, export, include, type, fun, or let)")

    def _ident_list(self) -> list[str]:
        self.expect_punct("(")
        names: list[str] = []
        if not self.at_punct(")"):
            names.append(self.expect_ident().text)
            while self.accept_punct(","):
                names.append(self.expect_ident().text)
        self.expect_punct(")")
        return names

    def _string_list(self) -> list[str]:
        self.expect_punct("(")
        headers: list[str] = []
        if not self.at_punct(")"):
            headers.append(self._string())
            while self.accept_punct(","):
                headers.append(self._string())
        self.expect_punct(")")
        return headers

    def _string(self) -> str:
        if self.peek().kind is not TokenKind.STRING:
            self.fail("expected string literal")
        return self.next().value  # unescaped payload

    def _type_decl(self, span: Span) -> Decl:
        name = self.expect_ident("type name")
        tyvars, capvars = self._template_dec()
        self.expect_op("=")
        if self.accept_punct("{"):
            fields: list[tuple[str, TyExpr]] = []
            if not self.at_punct("}"):
                fields.append(self._record_field())
                while self.accept_punct(";"):
                    fields.append(self._record_field())
            self.expect_punct("}")
            seen: set[str] = set()
            for fname, _ in fields:
                if fname in seen:
                    raise ParseError(f"duplicate record field '{fname}'", span)
                seen.add(fname)
            return RecordDecl(name.text, tyvars, capvars, fields, span=span)
        ctors = [self._value_ctor()]
        while self.accept_op("|"):
            ctors.append(self._value_ctor())
        seen = set()
        for cname, _ in ctors:
            if cname in seen:
                raise ParseError(f"duplicate value constructor '{cname}'", span)
            seen.add(cname)
        return AdtDecl(name.text, tyvars, capvars, ctors, span=span)

    def _record_field(self) -> tuple[str, TyExpr]:
        fname = self.expect_ident("field name")
        self.expect_op(":")
        return fname.text, self.ty_expr()

    def _value_ctor(self) -> tuple[str, TyExpr | None]:
        cname = self.expect_ident("value constructor name")
        payload = self.ty_expr() if self.accept_kw("of") else None
        return cname.text, payload

    def _fun_decl(self, span: Span) -> FunDecl:
        name = self.expect_ident("function name")
        tyvars, capvars = self._template_dec()
        params = self._param_list()
        self.expect_op(":")
        ret = self.ty_expr()
        self.expect_op("=")
        body = self.expr()
        return FunDecl(name.text, tyvars, capvars, params, ret, body, span=span)

    def _param_list(self) -> list[tuple[str, TyExpr]]:
        self.expect_punct("(")
        params: list[tuple[str, TyExpr]] = []
        if not self.at_punct(")"):
            params.append(self._param())
            while self.accept_punct(","):
                params.append(self._param())
        self.expect_punct(")")
        return params

    def _param(self) -> tuple[str, TyExpr]:
        name = self.expect_ident("parameter name")
        self.expect_op(":")
        return name.text, self.ty_expr()

    def _template_dec(self) -> tuple[list[str], list[str]]:
        if not self.at_op("<"):
            return [], []
        self.next()
        tyvars: list[str] = []
        capvars: list[str] = []
        if self.peek().kind is TokenKind.TYVAR:
            tyvars.append(self.next().value)
            while self.accept_punct(","):
                if self.peek().kind is not TokenKind.TYVAR:
                    self.fail("expected type variable")
                tyvars.append(self.next().value)
        if self.accept_punct(";"):
            capvars.append(self.expect_ident("capacity variable").text)
            while self.accept_punct(","):
                capvars.append(self.expect_ident("capacity variable").text)
        self.expect_op(">")
        if not tyvars and not capvars:
            raise ParseError("empty template declaration", self.peek().span)
        return tyvars, capvars

    # -- type expressions -------------------------------------------------------

    def ty_expr(self) -> TyExpr:
        ty = self._ty_primary()
        while True:
            if self.at_punct("["):
                self.next()
                cap = self.capacity_expr()
                self.expect_punct("]")
                ty = TyArray(ty, cap, span=ty.span)
            elif self.at_kw("ref"):
                self.next()
                ty = TyRefOf(ty, span=ty.span)
            else:
                return ty

    def _ty_primary(self) -> TyExpr:
        tok = self.peek()
        if tok.kind is TokenKind.TYVAR:
            self.next()
            return TyName(None, tok.text, span=tok.span)
        if tok.kind is TokenKind.IDENT:
            module, name = self._declaration_ref()
            tyargs, capargs = None, None
            if self.at_op("<"):
                applied = self.attempt(self._template_apply)
                if applied is not None:
                    tyargs, capargs = applied
            return TyName(module, name, tyargs, capargs, span=tok.span)
        if self.at_punct("("):
            self.next()
            if self.accept_punct(")"):
                self.expect_op("->")
                return TyFun([], self.ty_expr(), span=tok.span)
            first = self.ty_expr()
            if self.at_op("*"):
                items = [first]
                while self.accept_op("*"):
                    items.append(self.ty_expr())
                self.expect_punct(")")
                return TyTuple(items, span=tok.span)
            params = [first]
            while self.accept_punct(","):
                params.append(self.ty_expr())
            self.expect_punct(")")
            self.expect_op("->")
            return TyFun(params, self.ty_expr(), span=tok.span)
        self.fail("expected type")

    def _declaration_ref(self) -> tuple[str | None, str]:
        first = self.expect_ident()
        if self.at_op(":") and self.peek(1).kind is TokenKind.IDENT:
            self.next()
            second = self.next()
            return first.text, second.text
        return None, first.text

    def _template_apply(self) -> tuple[list[TyExpr], list[CapExpr]]:
        self.expect_op("<")
        tyargs: list[TyExpr] = []
        capargs: list[CapExpr] = []
        if not self.at_op(">") and not self.at_punct(";"):
            tyargs.append(self.ty_expr())
            while self.accept_punct(","):
                tyargs.append(self.ty_expr())
        if self.accept_punct(";"):
            capargs.append(self.capacity_expr())
            while self.accept_punct(","):
                capargs.append(self.capacity_expr())
        self.expect_op(">")
        return tyargs, (capargs if capargs else None)

    def capacity_expr(self) -> CapExpr:
        left = self._capacity_term()
        while self.at_op("+") or self.at_op("-"):
            op = self.next().text
            left = CapBinop(op, left, self._capacity_term(), span=left.span)
        return left

    def _capacity_term(self) -> CapExpr:
        left = self._capacity_atom()
        while self.at_op("*") or self.at_op("/"):
            op = self.next().text
            left = CapBinop(op, left, self._capacity_atom(), span=left.span)
        return left

    def _capacity_atom(self) -> CapExpr:
        tok = self.peek()
        if tok.kind is TokenKind.INT:
            self.next()
            return CapInt(tok.value, span=tok.span)
        if tok.kind is TokenKind.IDENT:
            self.next()
            return CapName(tok.text, span=tok.span)
        self.fail("expected capacity expression")

    # -- patterns ---------------------------------------------------------------

    def pattern(self) -> Pattern:
        tok = self.peek()
        if self.at_punct("("):
            self.next()
            items = [self.pattern()]
            self.expect_punct(",")
            items.append(self.pattern())
            while self.accept_punct(","):
                items.append(self.pattern())
            self.expect_punct(")")
            return TuplePat(items, span=tok.span)
        if self.at_punct("_"):
            self.next()
            return WildcardPat(span=tok.span)
        if tok.kind is TokenKind.INT:
            self.next()
            return IntPat(tok.text, tok.value, span=tok.span)
        if tok.kind is TokenKind.FLOAT:
            self.next()
            return FloatPat(tok.text, tok.value, span=tok.span)
        if self.accept_kw("mutable"):
            name = self.expect_ident("pattern variable")
            annot = self.ty_expr() if self.accept_op(":") else None
            return VarPat(True, name.text, annot, span=tok.span)
        if tok.kind is TokenKind.IDENT:
            structured = self.attempt(self._ctor_or_record_pattern)
            if structured is not None:
                return structured
            name = self.next()
            annot = self.ty_expr() if self.accept_op(":") else None
            return VarPat(False, name.text, annot, span=tok.span)
        self.fail("expected pattern")

    def _ctor_or_record_pattern(self) -> Pattern:
        tok = self.peek()
        module, name = self._declaration_ref()
        tyargs, capargs = None, None
        if self.at_op("<"):
            applied = self.attempt(self._template_apply)
            if applied is not None:
                tyargs, capargs = applied
        if self.accept_punct("("):
            inner = None if self.at_punct(")") else self.pattern()
            self.expect_punct(")")
            return CtorPat(module, name, tyargs, capargs, inner, span=tok.span)
        if self.accept_punct("{"):
            fields: list[tuple[str, Pattern]] = []
            if not self.at_punct("}"):
                fields.append(self._field_pattern())
                while self.accept_punct(","):
                    fields.append(self._field_pattern())
            self.expect_punct("}")
            return RecordPat(module, name, tyargs, capargs, fields, span=tok.span)
        self.fail("expected '(' or '{' in constructor pattern")

    def _field_pattern(self) -> tuple[str, Pattern]:
        fname = self.expect_ident("field name")
        self.expect_op("=")
        return fname.text, self.pattern()

    def _check_linear(self, pattern: Pattern) -> None:
        seen: set[str] = set()

        def walk(p: Pattern) -> None:
            if isinstance(p, VarPat):
                if p.name in seen:
                    raise ParseError(
                        f"pattern binds '{p.name}' more than once", p.span
                    )
                seen.add(p.name)
            elif isinstance(p, CtorPat) and p.inner is not None:
                walk(p.inner)
            elif isinstance(p, RecordPat):
                for _, sub in p.fields:
                    walk(sub)
            elif isinstance(p, TuplePat):
                for sub in p.items:
                    walk(sub)

        walk(pattern)

    # -- expressions --------------------------------------------------------------

    def expr(self) -> Expr:
        tok = self.peek()
        if self.at_kw("let"):
            self.next()
            pat = self.pattern()
            self._check_linear(pat)
            self.expect_op("=")
            return LetExpr(pat, self.expr(), span=tok.span)
        if self.at_kw("set"):
            self.next()
            through_ref = bool(self.accept_kw("ref"))
            target = self._left_assign()
            self.expect_op("=")
            return SetExpr(through_ref, target, self.expr(), span=tok.span)
        if self.at_kw("fn"):
            self.next()
            params = self._param_list()
            self.expect_op(":")
            ret = self.ty_expr()
            self.expect_op("->")
            return LambdaExpr(params, ret, self.expr(), span=tok.span)
        return self._binop(0)

    def _left_assign(self) -> Expr:
        tok = self.peek()
        module, name = self._declaration_ref()
        target: Expr = VarRef(module, name, span=tok.span)
        while True:
            if self.accept_punct("["):
                index = self.expr()
                self.expect_punct("]")
                target = IndexExpr(target, index, span=tok.span)
            elif self.accept_op("."):
                fname = self.expect_ident("field name")
                target = FieldAccessExpr(target, fname.text, span=tok.span)
            else:
                return target

    def _binop(self, level: int) -> Expr:
        if level >= len(_BINOP_LEVELS):
            return self._unary()
        ops = _BINOP_LEVELS[level]
        left = self._binop(level + 1)
        while True:
            tok = self.peek()
            text = tok.text
            hit = (
                (tok.kind is TokenKind.OPERATOR or tok.kind is TokenKind.KEYWORD)
                and text in ops
            )
            if not hit:
                return left
            self.next()
            right = self._binop(level + 1)
            left = BinopExpr(text, left, right, span=tok.span)

    def _unary(self) -> Expr:
        tok = self.peek()
        if self.accept_kw("not"):
            return NotExpr(self._unary(), span=tok.span)
        if self.accept_op("~~~"):
            return BitNotExpr(self._unary(), span=tok.span)
        if self.accept_op("!"):
            return DerefExpr(self._unary(), span=tok.span)
        if self.accept_kw("ref"):
            return RefExpr(self._unary(), span=tok.span)
        return self._postfix()

    def _postfix(self) -> Expr:
        e = self._primary()
        while True:
            tok = self.peek()
            if self.at_punct("("):
                self.next()
                args: list[Expr] = []
                if not self.at_punct(")"):
                    args.append(self.expr())
                    while self.accept_punct(","):
                        args.append(self.expr())
                self.expect_punct(")")
                e = CallExpr(e, args, span=tok.span)
            elif self.at_punct("["):
                self.next()
                index = self.expr()
                self.expect_punct("]")
                e = IndexExpr(e, index, span=tok.span)
            elif self.at_op(".") :
                self.next()
                fname = self.expect_ident("field name")
                e = FieldAccessExpr(e, fname.text, span=tok.span)
            else:
                return e

    def _primary(self) -> Expr:
        tok = self.peek()

        if self.at_punct("("):
            self.next()
            if self.accept_punct(")"):
                return UnitLit(span=tok.span)
            first = self.expr()
            if self.at_punct(";"):
                items = [first]
                while self.accept_punct(";"):
                    items.append(self.expr())
                self.expect_punct(")")
                return SequenceExpr(items, span=tok.span)
            if self.at_punct(","):
                items = [first]
                while self.accept_punct(","):
                    items.append(self.expr())
                self.expect_punct(")")
                return TupleExpr(items, span=tok.span)
            self.expect_punct(")")
            return first  # plain grouping collapses

        if self.accept_kw("true"):
            return BoolLit(True, span=tok.span)
        if self.accept_kw("false"):
            return BoolLit(False, span=tok.span)
        if self.accept_kw("null"):
            return NullLit(span=tok.span)
        if tok.kind is TokenKind.INT:
            self.next()
            return IntLit(tok.text, tok.value, span=tok.span)
        if tok.kind is TokenKind.FLOAT:
            self.next()
            return FloatLit(tok.text, tok.value, span=tok.span)
        if tok.kind is TokenKind.INLINE:
            self.next()
            return InlineCodeExpr(tok.value, span=tok.span)

        if self.accept_kw("if"):
            arms = [self._if_arm()]
            while self.accept_kw("elif"):
                arms.append(self._if_arm())
            self.expect_kw("else")
            orelse = self.expr()
            self.expect_kw("end")
            return IfExpr(arms, orelse, span=tok.span)

        if self.accept_kw("case"):
            scrutinee = self.expr()
            self.expect_kw("of")
            self.expect_op("|")
            clauses = [self._case_clause()]
            while self.accept_op("|"):
                clauses.append(self._case_clause())
            self.expect_kw("end")
            return CaseExpr(scrutinee, clauses, span=tok.span)

        if self.accept_kw("while"):
            cond = self.expr()
            self.expect_kw("do")
            body = self.expr()
            self.expect_kw("end")
            return WhileExpr(cond, body, span=tok.span)

        if self.accept_kw("do"):
            body = self.expr()
            self.expect_kw("while")
            cond = self.expr()
            self.expect_kw("end")
            return DoWhileExpr(body, cond, span=tok.span)

        if self.accept_kw("for"):
            var = self.expect_ident("loop variable")
            self.expect_op(":")
            annot = self.ty_expr()
            self.expect_kw("in")
            start = self.expr()
            if self.accept_kw("to"):
                downward = False
            elif self.accept_kw("downto"):
                downward = True
            else:
                self.fail("expected 'to' or 'downto'")
            stop = self.expr()
            self.expect_kw("do")
            body = self.expr()
            self.expect_kw("end")
            return ForExpr(var.text, annot, start, stop, downward, body, span=tok.span)

        if self.accept_kw("array"):
            annot = self.ty_expr()
            fill = None
            if self.accept_kw("of"):
                fill = self.expr()
            self.expect_kw("end")
            return ArrayOfExpr(annot, fill, span=tok.span)

        if self.at_punct("["):
            self.next()
            items = [self.expr()]
            while self.accept_punct(","):
                items.append(self.expr())
            self.expect_punct("]")
            return ArrayLitExpr(items, span=tok.span)

        if tok.kind is TokenKind.IDENT:
            module, name = self._declaration_ref()
            tyargs, capargs = None, None
            if self.at_op("<"):
                applied = self.attempt(self._template_apply)
                if applied is not None:
                    tyargs, capargs = applied
            if self.at_punct("{"):
                self.next()
                fields: list[tuple[str, Expr]] = []
                if not self.at_punct("}"):
                    fields.append(self._field_assign())
                    while self.accept_punct(";"):
                        fields.append(self._field_assign())
                self.expect_punct("}")
                return RecordLitExpr(
                    module, name, tyargs, capargs, fields, span=tok.span
                )
            return VarRef(module, name, tyargs, capargs, span=tok.span)

        self.fail("expected expression")

    def _if_arm(self) -> tuple[Expr, Expr]:
        cond = self.expr()
        self.expect_kw("then")
        return cond, self.expr()

    def _case_clause(self) -> tuple[Pattern, Expr]:
        pat = self.pattern()
        self._check_linear(pat)
        self.expect_op("=>")
        return pat, self.expr()

    def _field_assign(self) -> tuple[str, Expr]:
        fname = self.expect_ident("field name")
        self.expect_op("=")
        return fname.text, self.expr()


def parse_module(tokens: list[Token]) -> tuple[SourceModule | None, list[Diagnostic]]:
    """Parse one module from a finished token stream."""
    return Parser(tokens).parse_module()


def parse_file(source: str, file_name: str) -> tuple[SourceModule | None, list[Diagnostic]]:
    try:
        tokens = tokenize(source, file_name)
    except LexError as e:
        return None, [e.diagnostic()]
    return parse_module(tokens)


def parse_program(
    files: list[tuple[str, str]],
) -> tuple[list[SourceModule], list[Diagnostic]]:
    """Parse an ordered set of (file-name, text) pairs, one module per file."""
    modules: list[SourceModule] = []
    diags: list[Diagnostic] = []
    seen: dict[str, str] = {}
    for name, text in files:
        module, file_diags = parse_file(text, name)
        diags.extend(file_diags)
        if module is None:
            continue
        if module.name in seen:
            diags.append(
                Diagnostic(
                    "error",
                    f"duplicate module name '{module.name}' "
                    f"(already declared in {seen[module.name]})",
                    module.span,
                )
            )
            continue
        seen[module.name] = name
        modules.append(module)
    return modules, diags
