"""Terms: variable references (plain, primed, next-shifted), constants, and
applications of the fixed function-symbol table."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .errors import TypeMismatch
from .types import BOOL, INT, REAL, EnumType, SemType, Var, base_type, is_numeric

Value = Union[bool, int, Fraction, float, str, tuple]


class Term:
    pass


@dataclass(frozen=True)
class VarRef(Term):
    var: Var


@dataclass(frozen=True)
class PrimedRef(Term):
    """Next-state occurrence of a state variable inside a transition formula."""

    var: Var


@dataclass(frozen=True)
class NextRef(Term):
    """Next-step value of a term inside a temporal formula."""

    arg: Term


@dataclass(frozen=True)
class Const(Term):
    value: Value
    ty: SemType


@dataclass(frozen=True)
class App(Term):
    symbol: str
    args: tuple[Term, ...]


TRUE = Const(True, BOOL)
FALSE = Const(False, BOOL)

# symbol -> arity; result typing is handled in type_of
FUNCTIONS = {
    "+": 2,
    "-": 2,
    "*": 2,
    "/": 2,
    "neg": 1,
    "ite": 3,
}

PREDICATES = {"=", "!=", "<", "<=", ">", ">="}


def var(name: str, ty: SemType) -> VarRef:
    return VarRef(Var(name, ty))


def intc(value: int) -> Const:
    return Const(value, INT)


def realc(value) -> Const:
    return Const(Fraction(value), REAL)


def enumc(value: str, ty: EnumType) -> Const:
    if value not in ty.values:
        raise TypeMismatch(f"{value} is not a value of {ty.short()}")
    return Const(value, ty)


def app(symbol: str, *args: Term) -> App:
    if symbol not in FUNCTIONS:
        raise TypeMismatch(f"unknown function symbol {symbol!r}")
    if len(args) != FUNCTIONS[symbol]:
        raise TypeMismatch(f"{symbol} expects {FUNCTIONS[symbol]} arguments")
    return App(symbol, tuple(args))


def add(a: Term, b: Term) -> App:
    return app("+", a, b)


def sub(a: Term, b: Term) -> App:
    return app("-", a, b)


def mul(a: Term, b: Term) -> App:
    return app("*", a, b)


def div(a: Term, b: Term) -> App:
    return app("/", a, b)


def ite(c, a: Term, b: Term) -> App:
    return App("ite", (c, a, b))


def type_of(t: Term) -> SemType:
    """Result type of a term; raises TypeMismatch on ill-typed applications.

    Arithmetic over range-refined integers widens to unbounded int: ranges
    constrain storage slots, not expression results.
    """
    if isinstance(t, VarRef) or isinstance(t, PrimedRef):
        return base_type(t.var.ty)
    if isinstance(t, NextRef):
        return type_of(t.arg)
    if isinstance(t, Const):
        return base_type(t.ty)
    if isinstance(t, App):
        if t.symbol == "ite":
            cty = type_of(t.args[0])
            if cty != BOOL:
                raise TypeMismatch("ite condition must be boolean")
            a, b = type_of(t.args[1]), type_of(t.args[2])
            return _join_numeric(a, b, "ite")
        if t.symbol == "neg":
            a = type_of(t.args[0])
            if not is_numeric(a):
                raise TypeMismatch("negation needs a numeric argument")
            return a
        if t.symbol in ("+", "-", "*", "/"):
            a, b = (type_of(x) for x in t.args)
            if not (is_numeric(a) and is_numeric(b)):
                raise TypeMismatch(f"{t.symbol} needs numeric arguments")
            return _join_numeric(a, b, t.symbol)
        raise TypeMismatch(f"unknown function symbol {t.symbol!r}")
    raise TypeMismatch(f"not a term: {t!r}")


def _join_numeric(a: SemType, b: SemType, context: str) -> SemType:
    if a == b:
        return a
    if {a, b} == {INT, REAL}:
        return REAL
    raise TypeMismatch(f"{context}: incompatible argument types {a.short()} / {b.short()}")


def term_vars(t: Term, out=None, primed=None):
    """Collect plain and primed variable occurrences of a term."""
    if out is None:
        out, primed = set(), set()
    if isinstance(t, VarRef):
        out.add(t.var)
    elif isinstance(t, PrimedRef):
        primed.add(t.var)
    elif isinstance(t, NextRef):
        term_vars(t.arg, out, primed)
    elif isinstance(t, App):
        for a in t.args:
            term_vars(a, out, primed)
    return out, primed


def has_next(t: Term) -> bool:
    if isinstance(t, NextRef):
        return True
    if isinstance(t, App):
        return any(has_next(a) for a in t.args)
    return False


def subst_term(t: Term, sigma: Mapping[Var, Term], primed_sigma: Mapping[Var, Term] = None) -> Term:
    """Simultaneous substitution on a term.

    `sigma` replaces plain occurrences, `primed_sigma` primed ones; both are
    checked for type agreement against the replaced variable.
    """
    if isinstance(t, VarRef):
        if t.var in sigma:
            return _checked(sigma[t.var], t.var)
        return t
    if isinstance(t, PrimedRef):
        if primed_sigma and t.var in primed_sigma:
            return _checked(primed_sigma[t.var], t.var)
        return t
    if isinstance(t, NextRef):
        return NextRef(subst_term(t.arg, sigma, primed_sigma))
    if isinstance(t, App):
        return App(t.symbol, tuple(subst_term(a, sigma, primed_sigma) for a in t.args))
    return t


def _checked(replacement: Term, v: Var) -> Term:
    want = base_type(v.ty)
    got = type_of(replacement)
    if got != want:
        raise TypeMismatch(
            f"cannot substitute {v.name}:{v.ty.short()} by a term of type {got.short()}"
        )
    return replacement
