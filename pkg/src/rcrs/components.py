"""Atomic components of the five kinds, composite component terms, signatures,
well-formedness, and alpha normalization."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import EmptyFeedbackSignature, PrimedInTemporal, TypeMismatch
from .formulas import (
    And,
    Atom,
    Exists,
    Finally,
    Forall,
    Formula,
    Globally,
    Iff,
    Implies,
    Leads,
    Not,
    Or,
    Until,
    free_vars,
    substitute,
    uses_primed,
)
from .terms import Const, PrimedRef, Term, VarRef, has_next, subst_term, term_vars, type_of
from .types import SemType, UnitType, Var, base_type


@dataclass(frozen=True)
class Signature:
    """Ordered, flat list of named typed slots with pairwise-distinct names."""

    slots: tuple[Var, ...]

    def __post_init__(self):
        names = [v.name for v in self.slots]
        if len(set(names)) != len(names):
            raise TypeMismatch(f"duplicate slot names in signature: {names}")

    def __len__(self):
        return len(self.slots)

    def __iter__(self):
        return iter(self.slots)

    def __getitem__(self, i):
        return self.slots[i]

    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.slots)

    def types(self) -> tuple[SemType, ...]:
        return tuple(v.ty for v in self.slots)

    def vars(self) -> tuple[Var, ...]:
        return self.slots

    def short(self) -> str:
        return "(" + ", ".join(f"{v.name}:{v.ty.short()}" for v in self.slots) + ")"


def sig(*pairs) -> Signature:
    return Signature(tuple(Var(n, t) for n, t in pairs))


EMPTY_SIG = Signature(())


class Kind(enum.Enum):
    STATELESS_DET = "stateless_det"
    DET = "det"
    STATELESS = "stateless"
    STS = "sts"
    QLTL = "qltl"


class AtomicComponent:
    """Base class of the five syntactic component kinds."""

    inputs: Signature

    def kind(self) -> Kind:
        raise NotImplementedError

    def all_vars(self) -> set[Var]:
        raise NotImplementedError


def _check_free(f: Formula, allowed_plain, allowed_primed, what: str, temporal_ok=False):
    fv = free_vars(f)
    if fv.uses_temporal and not temporal_ok:
        raise TypeMismatch(f"{what} must not contain temporal operators")
    if temporal_ok and uses_primed(f):
        raise PrimedInTemporal(f"{what} must not contain primed references")
    allowed = set(allowed_plain)
    allowed_pr = set(allowed_primed)
    plain_used: set[Var] = set()
    primed_used: set[Var] = set()

    def walk(g, bound):
        if isinstance(g, Atom):
            for t in g.args:
                pl, pr = term_vars(t)
                plain_used.update(v for v in pl if v not in bound)
                primed_used.update(v for v in pr if v not in bound)
        elif isinstance(g, Not):
            walk(g.arg, bound)
        elif isinstance(g, (And, Or, Implies, Iff, Until, Leads)):
            walk(g.left, bound)
            walk(g.right, bound)
        elif isinstance(g, (Globally, Finally)):
            walk(g.arg, bound)
        elif isinstance(g, (Forall, Exists)):
            walk(g.body, bound | {g.var})

    walk(f, frozenset())
    for v in primed_used:
        if v not in allowed_pr:
            raise TypeMismatch(f"{what}: primed reference to non-state variable {v.name}")
    for v in plain_used:
        if v not in allowed:
            raise TypeMismatch(f"{what}: variable {v.name} is not declared")


@dataclass(frozen=True)
class Sts(AtomicComponent):
    """General component: init over states, transition formula over
    states + inputs + primed states + outputs."""

    inputs: Signature
    outputs: Signature
    states: Signature
    init: Formula
    trs: Formula

    def __post_init__(self):
        _check_names_disjoint(self.inputs, self.outputs, self.states)
        _check_free(self.init, self.states.vars(), (), "init")
        _check_free(
            self.trs,
            set(self.states.vars()) | set(self.inputs.vars()) | set(self.outputs.vars()),
            self.states.vars(),
            "transition formula",
        )

    def kind(self) -> Kind:
        return Kind.STS

    def all_vars(self) -> set[Var]:
        return set(self.inputs) | set(self.outputs) | set(self.states)


@dataclass(frozen=True)
class Stateless(AtomicComponent):
    inputs: Signature
    outputs: Signature
    io: Formula

    def __post_init__(self):
        _check_names_disjoint(self.inputs, self.outputs)
        _check_free(self.io, set(self.inputs.vars()) | set(self.outputs.vars()), (), "contract")

    def kind(self) -> Kind:
        return Kind.STATELESS

    def all_vars(self) -> set[Var]:
        return set(self.inputs) | set(self.outputs)


@dataclass(frozen=True)
class Det(AtomicComponent):
    """Deterministic component: a legal-input predicate, a next-state term
    tuple, and an output term tuple; the output signature is derived."""

    inputs: Signature
    states: Signature
    init_vals: tuple[Const, ...]
    inpt: Formula
    next: tuple[Term, ...]
    out: tuple[Term, ...]

    def __post_init__(self):
        _check_names_disjoint(self.inputs, self.states)
        if len(self.init_vals) != len(self.states) or len(self.next) != len(self.states):
            raise TypeMismatch("state arity mismatch between states, initial values, and next")
        for c, v in zip(self.init_vals, self.states.vars()):
            if base_type(c.ty) != base_type(v.ty):
                raise TypeMismatch(f"initial value for {v.name} has type {c.ty.short()}")
        scope = set(self.inputs.vars()) | set(self.states.vars())
        _check_free(self.inpt, scope, (), "legal-input predicate")
        for t in self.next + self.out:
            _check_term_scope(t, scope)

    def kind(self) -> Kind:
        return Kind.DET

    @property
    def outputs(self) -> Signature:
        names = _fresh_output_names(len(self.out), self.all_vars())
        return Signature(tuple(Var(n, type_of(t)) for n, t in zip(names, self.out)))

    def all_vars(self) -> set[Var]:
        return set(self.inputs) | set(self.states)


@dataclass(frozen=True)
class StatelessDet(AtomicComponent):
    inputs: Signature
    inpt: Formula
    out: tuple[Term, ...]

    def __post_init__(self):
        scope = set(self.inputs.vars())
        _check_free(self.inpt, scope, (), "legal-input predicate")
        for t in self.out:
            _check_term_scope(t, scope)

    def kind(self) -> Kind:
        return Kind.STATELESS_DET

    @property
    def outputs(self) -> Signature:
        names = _fresh_output_names(len(self.out), self.all_vars())
        return Signature(tuple(Var(n, type_of(t)) for n, t in zip(names, self.out)))

    def all_vars(self) -> set[Var]:
        return set(self.inputs)


@dataclass(frozen=True)
class Qltl(AtomicComponent):
    inputs: Signature
    outputs: Signature
    phi: Formula

    def __post_init__(self):
        _check_names_disjoint(self.inputs, self.outputs)
        _check_free(
            self.phi,
            set(self.inputs.vars()) | set(self.outputs.vars()),
            (),
            "temporal contract",
            temporal_ok=True,
        )

    def kind(self) -> Kind:
        return Kind.QLTL

    def all_vars(self) -> set[Var]:
        return set(self.inputs) | set(self.outputs)


def _check_names_disjoint(*sigs: Signature):
    seen: dict[str, SemType] = {}
    for s in sigs:
        for v in s:
            if v.name in seen:
                raise TypeMismatch(f"variable name {v.name} declared twice")
            seen[v.name] = v.ty


def _check_term_scope(t: Term, scope: set[Var]):
    if has_next(t):
        raise PrimedInTemporal("next operators are not allowed in deterministic payload terms")
    plain, primed = term_vars(t)
    if primed:
        raise TypeMismatch("primed references are not allowed in deterministic payload terms")
    for v in plain:
        if v not in scope:
            raise TypeMismatch(f"term variable {v.name} is not declared")
    type_of(t)


def _fresh_output_names(n: int, avoid: set[Var]) -> list[str]:
    names = {v.name for v in avoid}
    out = []
    i = 0
    while len(out) < n:
        cand = f"y{i}"
        if cand not in names:
            out.append(cand)
            names.add(cand)
        i += 1
    return out


# --- composite terms ------------------------------------------------------


class Component:
    pass


@dataclass(frozen=True)
class Atomic(Component):
    atom: AtomicComponent


@dataclass(frozen=True)
class Serial(Component):
    left: Component
    right: Component


@dataclass(frozen=True)
class Parallel(Component):
    left: Component
    right: Component


@dataclass(frozen=True)
class Fdbk(Component):
    child: Component


def as_component(c) -> Component:
    if isinstance(c, AtomicComponent):
        return Atomic(c)
    if isinstance(c, Component):
        return c
    raise TypeError(f"not a component: {c!r}")


def subterms(c: Component, path=()) -> Iterable[tuple[tuple, Component]]:
    yield path, c
    if isinstance(c, (Serial, Parallel)):
        yield from subterms(c.left, path + ("left",))
        yield from subterms(c.right, path + ("right",))
    elif isinstance(c, Fdbk):
        yield from subterms(c.child, path + ("child",))


def sigma_in(c: Component) -> Signature:
    """Input signature, computed per the structural recursion; composite
    signatures carry generated slot names."""
    c = as_component(c)
    if isinstance(c, Atomic):
        return c.atom.inputs
    if isinstance(c, Serial):
        return sigma_in(c.left)
    if isinstance(c, Parallel):
        tys = sigma_in(c.left).types() + sigma_in(c.right).types()
        return _generated("x", tys)
    if isinstance(c, Fdbk):
        inner = sigma_in(c.child)
        if len(inner) == 0:
            raise EmptyFeedbackSignature("feedback child has no input slot")
        return _generated("x", inner.types()[1:])
    raise TypeError(f"not a component: {c!r}")


def sigma_out(c: Component) -> Signature:
    c = as_component(c)
    if isinstance(c, Atomic):
        return c.atom.outputs
    if isinstance(c, Serial):
        return sigma_out(c.right)
    if isinstance(c, Parallel):
        tys = sigma_out(c.left).types() + sigma_out(c.right).types()
        return _generated("y", tys)
    if isinstance(c, Fdbk):
        inner = sigma_out(c.child)
        if len(inner) == 0:
            raise EmptyFeedbackSignature("feedback child has no output slot")
        return _generated("y", inner.types()[1:])
    raise TypeError(f"not a component: {c!r}")


def _generated(prefix: str, tys: tuple[SemType, ...]) -> Signature:
    return Signature(tuple(Var(f"{prefix}{i}", t) for i, t in enumerate(tys)))


@dataclass(frozen=True)
class WfResult:
    ok: bool
    reason: Optional[str] = None

    def __bool__(self):
        return self.ok


def wf(c: Component) -> WfResult:
    """Well-formedness: serial stages agree positionally on types, feedback
    loops a slot of matching non-unit type."""
    c = as_component(c)
    if isinstance(c, Atomic):
        return WfResult(True)
    if isinstance(c, Serial):
        for part in (c.left, c.right):
            r = wf(part)
            if not r:
                return r
        left_out = sigma_out(c.left).types()
        right_in = sigma_in(c.right).types()
        if len(left_out) != len(right_in):
            return WfResult(
                False,
                f"serial arity mismatch: {len(left_out)} outputs vs {len(right_in)} inputs",
            )
        for i, (a, b) in enumerate(zip(left_out, right_in)):
            if a != b:
                return WfResult(
                    False,
                    f"serial type mismatch at slot {i + 1}: {a.short()} vs {b.short()}",
                )
        return WfResult(True)
    if isinstance(c, Parallel):
        for part in (c.left, c.right):
            r = wf(part)
            if not r:
                return r
        return WfResult(True)
    if isinstance(c, Fdbk):
        r = wf(c.child)
        if not r:
            return r
        try:
            ins = sigma_in(c.child)
            outs = sigma_out(c.child)
        except EmptyFeedbackSignature as e:
            return WfResult(False, str(e))
        if len(ins) == 0 or len(outs) == 0:
            return WfResult(False, "feedback child lacks an input or output slot")
        if ins.types()[0] != outs.types()[0]:
            return WfResult(
                False,
                f"feedback type mismatch: first input {ins.types()[0].short()} "
                f"vs first output {outs.types()[0].short()}",
            )
        if isinstance(ins.types()[0], UnitType):
            return WfResult(False, "feedback over a unit-typed slot is rejected")
        return WfResult(True)
    raise TypeError(f"not a component: {c!r}")


# --- alpha normalization ----------------------------------------------------


class NameGen:
    """Deterministic fresh-name source; one instance per renaming scope."""

    def __init__(self, avoid: Iterable[str] = ()):
        self._avoid = set(avoid)
        self._counters: dict[str, int] = {}

    def fresh(self, prefix: str, ty: SemType) -> Var:
        i = self._counters.get(prefix, 0)
        while f"{prefix}{i}" in self._avoid:
            i += 1
        self._counters[prefix] = i + 1
        self._avoid.add(f"{prefix}{i}")
        return Var(f"{prefix}{i}", ty)


def rename_formula(f: Formula, mapping: dict[Var, Var]) -> Formula:
    """Rename free plain and primed occurrences per the variable mapping."""
    sigma = {v: VarRef(w) for v, w in mapping.items()}
    primed = {v: PrimedRef(w) for v, w in mapping.items()}
    return substitute(f, sigma, primed)


def rename_term(t: Term, mapping: dict[Var, Var]) -> Term:
    sigma = {v: VarRef(w) for v, w in mapping.items()}
    primed = {v: PrimedRef(w) for v, w in mapping.items()}
    return subst_term(t, sigma, primed)


def rename_atomic(c: AtomicComponent, mapping: dict[Var, Var]) -> AtomicComponent:
    def rsig(s: Signature) -> Signature:
        return Signature(tuple(mapping.get(v, v) for v in s))

    if isinstance(c, Sts):
        return Sts(
            rsig(c.inputs),
            rsig(c.outputs),
            rsig(c.states),
            rename_formula(c.init, mapping),
            rename_formula(c.trs, mapping),
        )
    if isinstance(c, Stateless):
        return Stateless(rsig(c.inputs), rsig(c.outputs), rename_formula(c.io, mapping))
    if isinstance(c, Det):
        return Det(
            rsig(c.inputs),
            rsig(c.states),
            c.init_vals,
            rename_formula(c.inpt, mapping),
            tuple(rename_term(t, mapping) for t in c.next),
            tuple(rename_term(t, mapping) for t in c.out),
        )
    if isinstance(c, StatelessDet):
        return StatelessDet(
            rsig(c.inputs),
            rename_formula(c.inpt, mapping),
            tuple(rename_term(t, mapping) for t in c.out),
        )
    if isinstance(c, Qltl):
        return Qltl(rsig(c.inputs), rsig(c.outputs), rename_formula(c.phi, mapping))
    raise TypeError(f"not an atomic component: {c!r}")


def canonical_atomic(c: AtomicComponent) -> AtomicComponent:
    """Rename local variables to the canonical x0.., y0.., s0.. scheme and
    canonicalize quantifier-bound names."""
    mapping: dict[Var, Var] = {}
    for i, v in enumerate(c.inputs):
        mapping[v] = Var(f"x{i}", v.ty)
    if isinstance(c, (Sts, Stateless, Qltl)):
        for i, v in enumerate(c.outputs):
            mapping[v] = Var(f"y{i}", v.ty)
    if isinstance(c, (Sts, Det)):
        for i, v in enumerate(c.states):
            mapping[v] = Var(f"s{i}", v.ty)
    renamed = rename_atomic(c, mapping)
    return _canonical_bound(renamed)


def _canonical_bound(c: AtomicComponent) -> AtomicComponent:
    counter = itertools.count()

    def canon(f: Formula) -> Formula:
        if isinstance(f, (Forall, Exists)):
            nv = Var(f"b{next(counter)}", f.var.ty)
            body = substitute(f.body, {f.var: VarRef(nv)})
            return type(f)(nv, canon(body))
        if isinstance(f, Not):
            return Not(canon(f.arg))
        if isinstance(f, (And, Or, Implies, Iff, Until, Leads)):
            return type(f)(canon(f.left), canon(f.right))
        if isinstance(f, (Globally, Finally)):
            return type(f)(canon(f.arg))
        return f

    if isinstance(c, Sts):
        return Sts(c.inputs, c.outputs, c.states, canon(c.init), canon(c.trs))
    if isinstance(c, Stateless):
        return Stateless(c.inputs, c.outputs, canon(c.io))
    if isinstance(c, Det):
        return Det(c.inputs, c.states, c.init_vals, canon(c.inpt), c.next, c.out)
    if isinstance(c, StatelessDet):
        return StatelessDet(c.inputs, canon(c.inpt), c.out)
    if isinstance(c, Qltl):
        return Qltl(c.inputs, c.outputs, canon(c.phi))
    raise TypeError


def alpha_normalize(c) -> Component:
    """Canonical renaming of all local variables; alpha-equivalent components
    become structurally equal."""
    c = as_component(c)
    if isinstance(c, Atomic):
        return Atomic(canonical_atomic(c.atom))
    if isinstance(c, (Serial, Parallel)):
        return type(c)(alpha_normalize(c.left), alpha_normalize(c.right))
    if isinstance(c, Fdbk):
        return Fdbk(alpha_normalize(c.child))
    raise TypeError(f"not a component: {c!r}")


def alpha_equivalent(a, b) -> bool:
    return alpha_normalize(as_component(a)) == alpha_normalize(as_component(b))
