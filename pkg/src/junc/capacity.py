"""Canonical forms for compile-time capacity arithmetic.

A capacity is normalized to a sum of products: a sorted tuple of
(coefficient, monomial) terms, where a monomial is a sorted tuple of
(atom, power) pairs. Atoms are variable names or symbolic divisions.
Constant subexpressions fold; division stays symbolic unless both operands
are constants. Normalization is idempotent because normal forms are already
fixed points of every operation used to build them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast_nodes import CapBinop, CapExpr, CapInt, CapName

Monomial = tuple  # tuple[tuple[Atom, int], ...] sorted by atom key
Term = tuple  # (coeff: int, Monomial)


@dataclass(frozen=True)
class Poly:
    terms: tuple  # tuple[Term, ...] sorted, coefficients nonzero

    def is_const(self) -> bool:
        return all(mono == () for _, mono in self.terms)

    def const_value(self) -> int:
        assert self.is_const()
        return sum(c for c, _ in self.terms)


@dataclass(frozen=True)
class Div:
    """Symbolic division atom; kept opaque until both sides are constant."""

    num: Poly
    den: Poly


class CapacityError(ValueError):
    pass


def _atom_key(atom):
    if isinstance(atom, str):
        return (0, atom)
    return (1, _poly_key(atom.num), _poly_key(atom.den))


def _mono_key(mono: Monomial):
    return tuple((_atom_key(a), p) for a, p in mono)


def _poly_key(poly: Poly):
    return tuple((_mono_key(m), c) for c, m in poly.terms)


def _make(terms: dict) -> Poly:
    cleaned = [(c, m) for m, c in terms.items() if c != 0]
    cleaned.sort(key=lambda t: _mono_key(t[1]))
    return Poly(tuple(cleaned))


def const_poly(value: int) -> Poly:
    return _make({(): value})


def var_poly(name: str) -> Poly:
    return _make({((name, 1),): 1})


def add(a: Poly, b: Poly) -> Poly:
    terms: dict = {m: c for c, m in a.terms}
    for c, m in b.terms:
        terms[m] = terms.get(m, 0) + c
    return _make(terms)


def neg(a: Poly) -> Poly:
    return _make({m: -c for c, m in a.terms})


def sub(a: Poly, b: Poly) -> Poly:
    return add(a, neg(b))


def _mul_mono(m1: Monomial, m2: Monomial) -> Monomial:
    powers: dict = {}
    for atom, p in list(m1) + list(m2):
        key = atom
        powers[key] = powers.get(key, 0) + p
    items = [(a, p) for a, p in powers.items() if p != 0]
    items.sort(key=lambda ap: _atom_key(ap[0]))
    return tuple(items)


def mul(a: Poly, b: Poly) -> Poly:
    terms: dict = {}
    for c1, m1 in a.terms:
        for c2, m2 in b.terms:
            m = _mul_mono(m1, m2)
            terms[m] = terms.get(m, 0) + c1 * c2
    return _make(terms)


def div(a: Poly, b: Poly) -> Poly:
    if a.is_const() and b.is_const():
        d = b.const_value()
        if d == 0:
            raise CapacityError("capacity division by zero")
        n = a.const_value()
        q = abs(n) // abs(d)
        if (n < 0) != (d < 0):
            q = -q
        return const_poly(q)
    return _make({((Div(a, b), 1),): 1})


def normalize(cap: CapExpr) -> Poly:
    if isinstance(cap, CapInt):
        return const_poly(cap.value)
    if isinstance(cap, CapName):
        return var_poly(cap.name)
    if isinstance(cap, CapBinop):
        left = normalize(cap.left)
        right = normalize(cap.right)
        if cap.op == "+":
            return add(left, right)
        if cap.op == "-":
            return sub(left, right)
        if cap.op == "*":
            return mul(left, right)
        if cap.op == "/":
            return div(left, right)
    raise AssertionError(f"unknown capacity expression {cap!r}")


def subst(poly: Poly, mapping: dict[str, Poly]) -> Poly:
    """Replace variables via `mapping`, re-normalizing the result."""
    total = const_poly(0)
    for coeff, mono in poly.terms:
        factor = const_poly(coeff)
        for atom, power in mono:
            if isinstance(atom, str):
                repl = mapping.get(atom, var_poly(atom))
            else:
                repl = div(subst(atom.num, mapping), subst(atom.den, mapping))
            for _ in range(power):
                factor = mul(factor, repl)
        total = add(total, factor)
    return total


def check_capacity(a: Poly, b: Poly) -> bool:
    """Provable equality: identical canonical normal forms."""
    return a == b


def evaluate(poly: Poly, env: dict[str, int]) -> int:
    """Integer value under an assignment; division truncates toward zero."""
    total = 0
    for coeff, mono in poly.terms:
        value = coeff
        for atom, power in mono:
            if isinstance(atom, str):
                base = env[atom]
            else:
                n = evaluate(atom.num, env)
                d = evaluate(atom.den, env)
                if d == 0:
                    raise CapacityError("capacity division by zero")
                base = abs(n) // abs(d)
                if (n < 0) != (d < 0):
                    base = -base
            value *= base**power
        total += value
    return total


def free_vars(poly: Poly) -> set[str]:
    out: set[str] = set()
    for _, mono in poly.terms:
        for atom, _ in mono:
            if isinstance(atom, str):
                out.add(atom)
            else:
                out |= free_vars(atom.num)
                out |= free_vars(atom.den)
    return out


def render(poly: Poly) -> str:
    if not poly.terms:
        return "0"
    parts: list[str] = []
    for coeff, mono in poly.terms:
        factors = []
        for atom, power in mono:
            base = atom if isinstance(atom, str) else f"({render(atom.num)})/({render(atom.den)})"
            factors.extend([base] * power)
        if not factors:
            parts.append(str(coeff))
        elif coeff == 1:
            parts.append("*".join(factors))
        elif coeff == -1:
            parts.append("-" + "*".join(factors))
        else:
            parts.append("*".join([str(coeff)] + factors))
    text = parts[0]
    for p in parts[1:]:
        text += p if p.startswith("-") else "+" + p
    return text
