"""Symbolic composition: serial, parallel, and feedback on atomic components,
the determinism / output-input dependency / loop-freeness analyses, and the
simplification of arbitrary composite terms to a single atomic component."""

from __future__ import annotations

from .components import (
    Atomic,
    AtomicComponent,
    Component,
    Det,
    Fdbk,
    Kind,
    NameGen,
    Parallel,
    Qltl,
    Serial,
    Signature,
    Stateless,
    StatelessDet,
    Sts,
    as_component,
    rename_atomic,
    sigma_in,
    sigma_out,
    wf,
)
from .errors import (
    FeedbackOnNonDecomposable,
    KindError,
    NotDecomposable,
    NotDeterministic,
    WfError,
)
from .formulas import (
    And,
    Implies,
    simplify,
    substitute,
    exists_many,
    forall_many,
)
from .lattice import join_kind, lift_to, quantify_primed
from .terms import subst_term, term_vars
from .types import Var


def _names_of(c: AtomicComponent) -> set[str]:
    return {v.name for v in c.all_vars()}


def _rename_classes(c: AtomicComponent, in_names, out_names=None, state_names=None):
    mapping = {}
    for v, n in zip(c.inputs.vars(), in_names):
        mapping[v] = Var(n, v.ty)
    if out_names is not None and isinstance(c, (Sts, Stateless, Qltl)):
        for v, n in zip(c.outputs.vars(), out_names):
            mapping[v] = Var(n, v.ty)
    if state_names is not None and isinstance(c, (Sts, Det)):
        for v, n in zip(c.states.vars(), state_names):
            mapping[v] = Var(n, v.ty)
    return rename_atomic(c, mapping)


def _prepare_serial(l: AtomicComponent, r: AtomicComponent):
    """Rename the two operands apart, unifying l's outputs with r's inputs
    under shared mid names."""
    n_mid = len(r.inputs)
    l2 = _rename_classes(
        l,
        [f"x{i}" for i in range(len(l.inputs))],
        [f"m{i}" for i in range(n_mid)],
        [f"u{i}" for i in range(len(l.states))] if isinstance(l, (Sts, Det)) else None,
    )
    r2 = _rename_classes(
        r,
        [f"m{i}" for i in range(n_mid)],
        [f"z{i}" for i in range(len(r.outputs))],
        [f"v{i}" for i in range(len(r.states))] if isinstance(r, (Sts, Det)) else None,
    )
    mids = r2.inputs.vars()
    return l2, r2, mids


def serial(l: AtomicComponent, r: AtomicComponent) -> AtomicComponent:
    """Symbolic serial composition; mixed kinds are lifted to the join kind
    first, then the same-kind formula applies."""
    res = wf(Serial(Atomic(l), Atomic(r)))
    if not res:
        raise WfError(res.reason)
    k = join_kind(l.kind(), r.kind())
    l, r = lift_to(l, k), lift_to(r, k)
    if k == Kind.QLTL:
        return _serial_qltl(*_prepare_serial(l, r)[:3])
    if k == Kind.STS:
        return _serial_sts(*_prepare_serial(l, r)[:3])
    if k == Kind.STATELESS:
        return _serial_stateless(*_prepare_serial(l, r)[:3])
    if k == Kind.DET:
        return _serial_det(*_prepare_serial(l, r)[:3])
    if k == Kind.STATELESS_DET:
        return _serial_stateless_det(*_prepare_serial(l, r)[:3])
    raise KindError(f"unhandled kind {k}")


def _serial_qltl(l: Qltl, r: Qltl, mids) -> Qltl:
    receptive = forall_many(mids, Implies(l.phi, exists_many(r.outputs.vars(), r.phi)))
    chained = exists_many(mids, And(l.phi, r.phi))
    return Qltl(l.inputs, r.outputs, simplify(And(receptive, chained)))


def _serial_sts(l: Sts, r: Sts, mids) -> Sts:
    gen = NameGen(_names_of(l) | _names_of(r))
    some_step = quantify_primed(l.states.vars(), l.trs, gen, extra=mids, exists=True)
    step_feeds = forall_many(
        list(mids),
        Implies(
            l.trs,
            quantify_primed(r.states.vars(), r.trs, gen, extra=r.outputs.vars(), exists=True),
        ),
    )
    step_feeds = quantify_primed(l.states.vars(), step_feeds, gen, exists=False)
    chained = exists_many(mids, And(l.trs, r.trs))
    trs = simplify(And(And(some_step, step_feeds), chained))
    init = simplify(And(l.init, r.init))
    states = Signature(l.states.vars() + r.states.vars())
    return Sts(l.inputs, r.outputs, states, init, trs)


def _serial_stateless(l: Stateless, r: Stateless, mids) -> Stateless:
    receptive = forall_many(mids, Implies(l.io, exists_many(r.outputs.vars(), r.io)))
    chained = exists_many(mids, And(l.io, r.io))
    return Stateless(l.inputs, r.outputs, simplify(And(receptive, chained)))


def _out_subst(mids, out_terms) -> dict:
    return {v: t for v, t in zip(mids, out_terms)}


def _serial_det(l: Det, r: Det, mids) -> Det:
    sub = _out_subst(mids, l.out)
    inpt = simplify(And(l.inpt, substitute(r.inpt, sub)))
    nxt = l.next + tuple(subst_term(t, sub) for t in r.next)
    out = tuple(subst_term(t, sub) for t in r.out)
    states = Signature(l.states.vars() + r.states.vars())
    return Det(l.inputs, states, l.init_vals + r.init_vals, inpt, nxt, out)


def _serial_stateless_det(l: StatelessDet, r: StatelessDet, mids) -> StatelessDet:
    sub = _out_subst(mids, l.out)
    inpt = simplify(And(l.inpt, substitute(r.inpt, sub)))
    out = tuple(subst_term(t, sub) for t in r.out)
    return StatelessDet(l.inputs, inpt, out)


def _prepare_parallel(l: AtomicComponent, r: AtomicComponent):
    ni, mi = len(l.inputs), len(l.outputs)
    si = len(l.states) if isinstance(l, (Sts, Det)) else 0
    l2 = _rename_classes(
        l,
        [f"x{i}" for i in range(ni)],
        [f"y{i}" for i in range(mi)],
        [f"s{i}" for i in range(si)] if isinstance(l, (Sts, Det)) else None,
    )
    r2 = _rename_classes(
        r,
        [f"x{ni + i}" for i in range(len(r.inputs))],
        [f"y{mi + i}" for i in range(len(r.outputs))],
        [f"s{si + i}" for i in range(len(r.states))] if isinstance(r, (Sts, Det)) else None,
    )
    return l2, r2


def parallel(l: AtomicComponent, r: AtomicComponent) -> AtomicComponent:
    """Symbolic parallel composition: concatenated signatures, conjoined
    contracts."""
    k = join_kind(l.kind(), r.kind())
    l, r = lift_to(l, k), lift_to(r, k)
    l, r = _prepare_parallel(l, r)
    ins = Signature(l.inputs.vars() + r.inputs.vars())
    if k == Kind.QLTL:
        outs = Signature(l.outputs.vars() + r.outputs.vars())
        return Qltl(ins, outs, simplify(And(l.phi, r.phi)))
    if k == Kind.STS:
        outs = Signature(l.outputs.vars() + r.outputs.vars())
        states = Signature(l.states.vars() + r.states.vars())
        return Sts(ins, outs, states, simplify(And(l.init, r.init)), simplify(And(l.trs, r.trs)))
    if k == Kind.STATELESS:
        outs = Signature(l.outputs.vars() + r.outputs.vars())
        return Stateless(ins, outs, simplify(And(l.io, r.io)))
    if k == Kind.DET:
        states = Signature(l.states.vars() + r.states.vars())
        return Det(
            ins,
            states,
            l.init_vals + r.init_vals,
            simplify(And(l.inpt, r.inpt)),
            l.next + r.next,
            l.out + r.out,
        )
    if k == Kind.STATELESS_DET:
        return StatelessDet(ins, simplify(And(l.inpt, r.inpt)), l.out + r.out)
    raise KindError(f"unhandled kind {k}")


def decomposable(c: AtomicComponent) -> bool:
    """True when the first output expression does not mention the first input,
    so feedback can be resolved by substitution."""
    if not isinstance(c, (Det, StatelessDet)):
        raise KindError("decomposability is defined for deterministic components only")
    if len(c.inputs) == 0 or len(c.out) == 0:
        return False
    x1 = c.inputs.vars()[0]
    plain, _ = term_vars(c.out[0])
    return x1 not in plain


def feedback(c: AtomicComponent) -> AtomicComponent:
    """Close the loop from the first output to the first input of a
    decomposable deterministic component."""
    if not isinstance(c, (Det, StatelessDet)):
        raise KindError("symbolic feedback is defined for deterministic components only")
    if not decomposable(c):
        raise NotDecomposable("first output depends on first input")
    x1 = c.inputs.vars()[0]
    e1 = c.out[0]
    sub = {x1: e1}
    ins = Signature(c.inputs.vars()[1:])
    inpt = simplify(substitute(c.inpt, sub))
    out = tuple(subst_term(t, sub) for t in c.out[1:])
    if isinstance(c, Det):
        nxt = tuple(subst_term(t, sub) for t in c.next)
        return Det(ins, c.states, c.init_vals, inpt, nxt, out)
    return StatelessDet(ins, inpt, out)


def determ(c) -> bool:
    """True when every atomic leaf is deterministic."""
    c = as_component(c)
    if isinstance(c, Atomic):
        return isinstance(c.atom, (Det, StatelessDet))
    if isinstance(c, (Serial, Parallel)):
        return determ(c.left) and determ(c.right)
    if isinstance(c, Fdbk):
        return determ(c.child)
    raise TypeError(f"not a component: {c!r}")


OIRelation = frozenset


def oi(c) -> OIRelation:
    """Output-input dependency relation, 1-based positional indices."""
    c = as_component(c)
    if not determ(c):
        raise NotDeterministic("the dependency relation is defined for deterministic components")
    return _oi(c)


def _oi(c: Component) -> frozenset:
    if isinstance(c, Atomic):
        a = c.atom
        xs = a.inputs.vars()
        pairs = set()
        for i, e in enumerate(a.out, start=1):
            plain, _ = term_vars(e)
            for j, x in enumerate(xs, start=1):
                if x in plain:
                    pairs.add((i, j))
        return frozenset(pairs)
    if isinstance(c, Serial):
        left, right = _oi(c.left), _oi(c.right)
        return frozenset(
            (i, j) for (i, k) in right for (k2, j) in left if k == k2
        )
    if isinstance(c, Parallel):
        left, right = _oi(c.left), _oi(c.right)
        n = len(sigma_in(c.left))
        m = len(sigma_out(c.left))
        return frozenset(left | {(i + m, j + n) for (i, j) in right})
    if isinstance(c, Fdbk):
        inner = _oi(c.child)
        m = len(sigma_out(c.child)) - 1
        n = len(sigma_in(c.child)) - 1
        return frozenset(
            (i, j)
            for i in range(1, m + 1)
            for j in range(1, n + 1)
            if (i + 1, j + 1) in inner
            or ((i + 1, 1) in inner and (1, j + 1) in inner)
        )
    raise TypeError(f"not a component: {c!r}")


def loop_free(c) -> bool:
    """True when no feedback loop closes a same-step dependency."""
    c = as_component(c)
    if not determ(c):
        raise NotDeterministic("loop-freeness is defined for deterministic components")
    return _loop_free(c)


def _loop_free(c: Component) -> bool:
    if isinstance(c, Atomic):
        return True
    if isinstance(c, (Serial, Parallel)):
        return _loop_free(c.left) and _loop_free(c.right)
    if isinstance(c, Fdbk):
        return _loop_free(c.child) and (1, 1) not in _oi(c.child)
    raise TypeError(f"not a component: {c!r}")


def atomic(c) -> AtomicComponent:
    """Collapse a composite component term into an equivalent atomic one.

    Fails (FeedbackOnNonDecomposable) exactly when a feedback is applied over
    a component whose first output still depends on its first input.
    """
    c = as_component(c)
    res = wf(c)
    if not res:
        raise WfError(res.reason)
    return _atomic(c, ())


def _atomic(c: Component, path: tuple) -> AtomicComponent:
    if isinstance(c, Atomic):
        return c.atom
    if isinstance(c, Serial):
        return serial(_atomic(c.left, path + ("left",)), _atomic(c.right, path + ("right",)))
    if isinstance(c, Parallel):
        return parallel(_atomic(c.left, path + ("left",)), _atomic(c.right, path + ("right",)))
    if isinstance(c, Fdbk):
        inner = _atomic(c.child, path + ("child",))
        if not isinstance(inner, (Det, StatelessDet)) or not decomposable(inner):
            where = "/".join(path) or "root"
            raise FeedbackOnNonDecomposable(
                f"feedback over a non-decomposable {inner.kind().value} component at {where}",
                path=path,
            )
        return feedback(inner)
    raise TypeError(f"not a component: {c!r}")
