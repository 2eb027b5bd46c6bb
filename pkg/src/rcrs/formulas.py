"""First-order formulas with primed variables and linear-temporal operators,
plus the symbolic manipulations everything else is built from: free-variable
analysis, capture-avoiding substitution, next-shifting, and a terminating
rewrite-based simplifier."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import PrimedInTemporal, TypeMismatch
from .terms import (
    App,
    Const,
    NextRef,
    PREDICATES,
    Term,
    VarRef,
    has_next,
    subst_term,
    term_vars,
    type_of,
)
from .types import Var, base_type, is_numeric


class Formula:
    pass


@dataclass(frozen=True)
class TrueC(Formula):
    pass


@dataclass(frozen=True)
class FalseC(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    pred: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: Var
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: Var
    body: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Leads(Formula):
    """phi L psi: whenever phi holds continuously up to step n-1, psi holds at n."""

    left: Formula
    right: Formula


@dataclass(frozen=True)
class Globally(Formula):
    arg: Formula


@dataclass(frozen=True)
class Finally(Formula):
    arg: Formula


TRUEC = TrueC()
FALSEC = FalseC()


def atom(pred: str, *args: Term) -> Atom:
    if pred not in PREDICATES:
        raise TypeMismatch(f"unknown predicate symbol {pred!r}")
    tys = [type_of(a) for a in args]
    if pred in ("=", "!="):
        if base_type(tys[0]) != base_type(tys[1]) and not all(is_numeric(t) for t in tys):
            raise TypeMismatch(f"{pred} on incompatible types {tys[0].short()} / {tys[1].short()}")
    else:
        if not all(is_numeric(t) for t in tys):
            raise TypeMismatch(f"{pred} needs numeric arguments")
    return Atom(pred, tuple(args))


def eq(a: Term, b: Term) -> Atom:
    return atom("=", a, b)


def conj(fs: Iterable[Formula]) -> Formula:
    fs = list(fs)
    if not fs:
        return TRUEC
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def disj(fs: Iterable[Formula]) -> Formula:
    fs = list(fs)
    if not fs:
        return FALSEC
    out = fs[0]
    for f in fs[1:]:
        out = Or(out, f)
    return out


def conjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


def forall_many(vs: Iterable[Var], body: Formula) -> Formula:
    for v in reversed(list(vs)):
        body = Forall(v, body)
    return body


def exists_many(vs: Iterable[Var], body: Formula) -> Formula:
    for v in reversed(list(vs)):
        body = Exists(v, body)
    return body


@dataclass(frozen=True)
class FreeVars:
    vars: frozenset[Var]
    uses_primed: bool
    uses_temporal: bool


def free_vars(f: Formula) -> FreeVars:
    """Free variables of a formula; primed occurrences report the underlying
    variable with the uses_primed flag set."""
    plain: set[Var] = set()
    primed: set[Var] = set()
    temporal = [False]

    def walk(g: Formula, bound: frozenset[Var]):
        if isinstance(g, (TrueC, FalseC)):
            return
        if isinstance(g, Atom):
            for t in g.args:
                if has_next(t):
                    temporal[0] = True
                p, pr = term_vars(t)
                plain.update(v for v in p if v not in bound)
                primed.update(v for v in pr if v not in bound)
            return
        if isinstance(g, Not):
            walk(g.arg, bound)
            return
        if isinstance(g, (And, Or, Implies, Iff)):
            walk(g.left, bound)
            walk(g.right, bound)
            return
        if isinstance(g, (Forall, Exists)):
            walk(g.body, bound | {g.var})
            return
        if isinstance(g, (Until, Leads)):
            temporal[0] = True
            walk(g.left, bound)
            walk(g.right, bound)
            return
        if isinstance(g, (Globally, Finally)):
            temporal[0] = True
            walk(g.arg, bound)
            return
        raise TypeError(f"not a formula: {g!r}")

    walk(f, frozenset())
    return FreeVars(frozenset(plain | primed), bool(primed), temporal[0])


def is_temporal(f: Formula) -> bool:
    return free_vars(f).uses_temporal


def uses_primed(f: Formula) -> bool:
    """True if any primed reference occurs, bound or not."""
    if isinstance(f, Atom):
        return any(term_vars(t)[1] for t in f.args)
    if isinstance(f, Not):
        return uses_primed(f.arg)
    if isinstance(f, (And, Or, Implies, Iff, Until, Leads)):
        return uses_primed(f.left) or uses_primed(f.right)
    if isinstance(f, (Globally, Finally)):
        return uses_primed(f.arg)
    if isinstance(f, (Forall, Exists)):
        return uses_primed(f.body)
    return False


def fresh_var(base: Var, avoid: set[Var]) -> Var:
    """A variable with base's type whose name collides with nothing in avoid."""
    names = {v.name for v in avoid}
    if base.name not in names:
        return base
    stem = base.name.rstrip("0123456789")
    if not stem:
        stem = base.name
    for i in itertools.count():
        cand = f"{stem}{i}"
        if cand not in names:
            return Var(cand, base.ty)
    raise AssertionError


def substitute(
    f: Formula,
    sigma: Mapping[Var, Term],
    primed_sigma: Mapping[Var, Term] = None,
) -> Formula:
    """Capture-avoiding simultaneous substitution of free occurrences.

    Plain occurrences are replaced per sigma, primed occurrences per
    primed_sigma.  Bound variables are renamed when a replacement term would
    otherwise capture them.
    """
    sigma = dict(sigma)
    primed_sigma = dict(primed_sigma or {})

    range_vars: set[Var] = set()
    for t in list(sigma.values()) + list(primed_sigma.values()):
        p, pr = term_vars(t)
        range_vars |= p | pr

    def walk(g: Formula, sig: dict, psig: dict) -> Formula:
        if isinstance(g, (TrueC, FalseC)):
            return g
        if isinstance(g, Atom):
            return Atom(g.pred, tuple(subst_term(t, sig, psig) for t in g.args))
        if isinstance(g, Not):
            return Not(walk(g.arg, sig, psig))
        if isinstance(g, (And, Or, Implies, Iff, Until, Leads)):
            return type(g)(walk(g.left, sig, psig), walk(g.right, sig, psig))
        if isinstance(g, (Globally, Finally)):
            return type(g)(walk(g.arg, sig, psig))
        if isinstance(g, (Forall, Exists)):
            sig2 = {k: v for k, v in sig.items() if k != g.var}
            psig2 = {k: v for k, v in psig.items() if k != g.var}
            v, body = g.var, g.body
            if v in range_vars and (sig2 or psig2):
                fv = free_vars(body).vars | range_vars
                v2 = fresh_var(v, fv)
                body = walk(body, {v: VarRef(v2)}, {})
                v = v2
            return type(g)(v, walk(body, sig2, psig2))
        raise TypeError(f"not a formula: {g!r}")

    return walk(f, sigma, primed_sigma)


def substitute_primed(f: Formula, sigma: Mapping[Var, Term]) -> Formula:
    """Replace primed occurrences only: f[v' := sigma[v]]."""
    return substitute(f, {}, sigma)


def apply_next(f: Formula) -> Formula:
    """Shift a temporal formula one step: every free variable occurrence x
    becomes next(x), including under existing next operators."""
    if uses_primed(f):
        raise PrimedInTemporal("cannot next-shift a formula with primed references")

    def shift_term(t: Term, bound: frozenset[Var]) -> Term:
        if isinstance(t, VarRef):
            return t if t.var in bound else NextRef(t)
        if isinstance(t, NextRef):
            return NextRef(shift_term(t.arg, bound))
        if isinstance(t, App):
            return App(t.symbol, tuple(shift_term(a, bound) for a in t.args))
        return t

    def walk(g: Formula, bound: frozenset[Var]) -> Formula:
        if isinstance(g, (TrueC, FalseC)):
            return g
        if isinstance(g, Atom):
            return Atom(g.pred, tuple(shift_term(t, bound) for t in g.args))
        if isinstance(g, Not):
            return Not(walk(g.arg, bound))
        if isinstance(g, (And, Or, Implies, Iff, Until, Leads)):
            return type(g)(walk(g.left, bound), walk(g.right, bound))
        if isinstance(g, (Globally, Finally)):
            return type(g)(walk(g.arg, bound))
        if isinstance(g, (Forall, Exists)):
            return type(g)(g.var, walk(g.body, bound | {g.var}))
        raise TypeError(f"not a formula: {g!r}")

    return walk(f, frozenset())


# --- simplification -------------------------------------------------------

_MAX_PASSES = 200


def simplify(f: Formula) -> Formula:
    """Rewrite to a fixed point with semantics-preserving rules: boolean
    identities, the one-point rule, quantifier miniscoping, and the L/G
    rewrites (side conditions checked syntactically).  Purely syntactic;
    no solver calls."""
    for _ in range(_MAX_PASSES):
        g = _pass(f)
        if g == f:
            return g
        f = g
    return f


def _pass(f: Formula) -> Formula:
    if isinstance(f, (TrueC, FalseC, Atom)):
        return _ground_atom(f) if isinstance(f, Atom) else f
    if isinstance(f, Not):
        return _simp_not(_pass(f.arg))
    if isinstance(f, And):
        return _simp_and(_pass(f.left), _pass(f.right))
    if isinstance(f, Or):
        return _simp_or(_pass(f.left), _pass(f.right))
    if isinstance(f, Implies):
        return _simp_implies(_pass(f.left), _pass(f.right))
    if isinstance(f, Iff):
        return _simp_iff(_pass(f.left), _pass(f.right))
    if isinstance(f, Forall):
        return _simp_forall(f.var, _pass(f.body))
    if isinstance(f, Exists):
        return _simp_exists(f.var, _pass(f.body))
    if isinstance(f, Until):
        return _simp_until(_pass(f.left), _pass(f.right))
    if isinstance(f, Leads):
        return _simp_leads(_pass(f.left), _pass(f.right))
    if isinstance(f, Globally):
        return _simp_globally(_pass(f.arg))
    if isinstance(f, Finally):
        return _simp_finally(_pass(f.arg))
    raise TypeError(f"not a formula: {f!r}")


def _ground_atom(f: Atom) -> Formula:
    """Fold atoms over literal constants or syntactically equal arguments."""
    if f.args[0] == f.args[1]:
        return TRUEC if f.pred in ("=", "<=", ">=") else FALSEC
    vals = []
    for t in f.args:
        if not isinstance(t, Const):
            return f
        vals.append(t.value)
    a, b = vals
    try:
        res = {
            "=": a == b,
            "!=": a != b,
            "<": a < b,
            "<=": a <= b,
            ">": a > b,
            ">=": a >= b,
        }[f.pred]
    except TypeError:
        return f
    return TRUEC if res else FALSEC


def _simp_not(a: Formula) -> Formula:
    if isinstance(a, TrueC):
        return FALSEC
    if isinstance(a, FalseC):
        return TRUEC
    if isinstance(a, Not):
        return a.arg
    return Not(a)


def _simp_and(a: Formula, b: Formula) -> Formula:
    if isinstance(a, FalseC) or isinstance(b, FalseC):
        return FALSEC
    if isinstance(a, TrueC):
        return b
    if isinstance(b, TrueC):
        return a
    if a == b:
        return a
    if set(conjuncts(b)) <= set(conjuncts(a)):
        return a
    parts = conjuncts(a) + conjuncts(b)
    seen = set(parts)
    for p in parts:
        if complement_atom(p) in seen:
            return FALSEC
    return And(a, b)


_COMPLEMENT = {"=": "!=", "!=": "=", "<": ">=", ">=": "<", ">": "<=", "<=": ">"}


def complement_atom(f: Formula) -> Formula:
    if isinstance(f, Atom):
        return Atom(_COMPLEMENT[f.pred], f.args)
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def _simp_or(a: Formula, b: Formula) -> Formula:
    if isinstance(a, TrueC) or isinstance(b, TrueC):
        return TRUEC
    if isinstance(a, FalseC):
        return b
    if isinstance(b, FalseC):
        return a
    if a == b:
        return a
    # excluded middle over the total orders of the value types
    parts = _disjuncts(a) + _disjuncts(b)
    seen = set(parts)
    for p in parts:
        if complement_atom(p) in seen:
            return TRUEC
    # factor shared conjuncts out of a pair of disjuncts; the enclosing
    # fixed-point loop re-simplifies the result
    for i in range(len(parts)):
        ci = conjuncts(parts[i])
        for j in range(i + 1, len(parts)):
            cj = conjuncts(parts[j])
            shared = [c for c in ci if c in cj]
            if shared:
                rest_i = conj([c for c in ci if c not in shared])
                rest_j = conj([c for c in cj if c not in shared])
                merged = _simp_and(conj(shared), _simp_or(rest_i, rest_j))
                rest = [p for k, p in enumerate(parts) if k not in (i, j)]
                return disj([merged] + rest)
    return Or(a, b)


def _simp_implies(a: Formula, b: Formula) -> Formula:
    if isinstance(a, FalseC) or isinstance(b, TrueC):
        return TRUEC
    if isinstance(a, TrueC):
        return b
    if isinstance(b, FalseC):
        return _simp_not(a)
    if a == b or set(conjuncts(b)) <= set(conjuncts(a)):
        return TRUEC
    return Implies(a, b)


def _simp_iff(a: Formula, b: Formula) -> Formula:
    if isinstance(a, TrueC):
        return b
    if isinstance(b, TrueC):
        return a
    if isinstance(a, FalseC):
        return _simp_not(b)
    if isinstance(b, FalseC):
        return _simp_not(a)
    if a == b:
        return TRUEC
    return Iff(a, b)


def _one_point_target(v: Var, cand: Formula):
    """If cand is an equation defining v by a term not containing v, return it."""
    if not isinstance(cand, Atom) or cand.pred != "=":
        return None
    lhs, rhs = cand.args
    for a, b in ((lhs, rhs), (rhs, lhs)):
        if isinstance(a, VarRef) and a.var == v:
            plain, primed = term_vars(b)
            if v not in plain and v not in primed and base_type(type_of(b)) == base_type(v.ty):
                return b
    return None


def _simp_exists(v: Var, body: Formula) -> Formula:
    if isinstance(body, (TrueC, FalseC)):
        return body
    fv = free_vars(body)
    if v not in fv.vars:
        return body
    # one-point: exists v: v = e /\ rest  ->  rest[v := e]
    if not fv.uses_temporal:
        parts = conjuncts(body)
        for i, part in enumerate(parts):
            e = _one_point_target(v, part)
            if e is not None:
                rest = conj(parts[:i] + parts[i + 1 :])
                return _pass(substitute(rest, {v: e}))
    # pull conjuncts not mentioning v out of the quantifier
    if isinstance(body, And):
        ins, outs = _split_on_var(conjuncts(body), v)
        if outs:
            return _simp_and(conj(outs), _simp_exists(v, conj(ins)))
    # exists v: G phi  ->  G (exists v: phi)   (phi non-temporal)
    if isinstance(body, Globally) and not is_temporal(body.arg):
        return _simp_globally(_simp_exists(v, body.arg))
    if isinstance(body, Or):
        return _simp_or(_simp_exists(v, body.left), _simp_exists(v, body.right))
    return Exists(v, body)


def _simp_forall(v: Var, body: Formula) -> Formula:
    if isinstance(body, (TrueC, FalseC)):
        return body
    fv = free_vars(body)
    if v not in fv.vars:
        return body
    # one-point: forall v: v = e -> rest  becomes  rest[v := e]
    if isinstance(body, Implies) and not fv.uses_temporal:
        parts = conjuncts(body.left)
        for i, part in enumerate(parts):
            e = _one_point_target(v, part)
            if e is not None:
                ante = conj(parts[:i] + parts[i + 1 :])
                rest = _simp_implies(ante, body.right)
                return _pass(substitute(rest, {v: e}))
    # forall v: (exists v': phi) L psi  <- the Lemma pull-out, applied inward:
    # forall v: (phi L psi) -> (exists v: phi) L psi  when phi non-temporal
    # and v not free in psi.
    if (
        isinstance(body, Leads)
        and not is_temporal(body.left)
        and v not in free_vars(body.right).vars
    ):
        return _simp_leads(_simp_exists(v, body.left), body.right)
    if isinstance(body, And):
        return _simp_and(_simp_forall(v, body.left), _simp_forall(v, body.right))
    if isinstance(body, Or):
        ins, outs = _split_on_var(_disjuncts(body), v)
        if outs:
            return _simp_or(disj(outs), _simp_forall(v, disj(ins)))
    if isinstance(body, Implies) and v not in free_vars(body.left).vars:
        return _simp_implies(body.left, _simp_forall(v, body.right))
    return Forall(v, body)


def _disjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, Or):
        return _disjuncts(f.left) + _disjuncts(f.right)
    return [f]


def _split_on_var(parts: list[Formula], v: Var):
    ins = [p for p in parts if v in free_vars(p).vars]
    outs = [p for p in parts if v not in free_vars(p).vars]
    return ins, outs


def _simp_until(a: Formula, b: Formula) -> Formula:
    if isinstance(b, TrueC):
        return TRUEC
    if isinstance(b, FalseC):
        return FALSEC
    if isinstance(a, FalseC):
        return b
    if isinstance(a, TrueC):
        return _simp_finally(b)
    return Until(a, b)


def _simp_leads(a: Formula, b: Formula) -> Formula:
    if isinstance(b, TrueC):
        return TRUEC
    if isinstance(b, FalseC):
        return FALSEC
    if isinstance(a, TrueC):
        return _simp_globally(b)
    if a == b:
        return _simp_globally(b)
    return Leads(a, b)


def _simp_globally(a: Formula) -> Formula:
    if isinstance(a, (TrueC, FalseC)):
        return a
    if isinstance(a, Globally):
        return a
    return Globally(a)


def _simp_finally(a: Formula) -> Formula:
    if isinstance(a, (TrueC, FalseC)):
        return a
    if isinstance(a, Finally):
        return a
    return Finally(a)
