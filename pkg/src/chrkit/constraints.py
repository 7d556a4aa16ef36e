"""Built-in constraint store: conjunctions of equalities over finite trees.

The built-in language is fixed to true, false and =. A store is either FAILED
or a satisfiable conjunction, kept both as the list of equations conjoined so
far and as an idempotent solved form. Entailment of existentially quantified
equations is decided by unification against the solved form with every
non-quantified variable frozen; for equality over finite trees this is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .terms import (
    Equation,
    FalseConstraint,
    Subst,
    Var,
    apply_subst,
    rename_vars,
    resolve,
    solved_form,
    unify,
    vars_of,
)


@dataclass(frozen=True)
class Store:
    """Immutable built-in store; use conjoin() to grow it."""

    equations: tuple = ()
    failed: bool = False
    _solved: Optional[dict] = field(default=None, compare=False, repr=False)

    def solved(self) -> Subst:
        if self.failed:
            raise ValueError("failed store has no solved form")
        if self._solved is None:
            sub = unify([(e.lhs, e.rhs) for e in self.equations])
            assert sub is not None, "unsatisfiable store not marked failed"
            object.__setattr__(self, "_solved", solved_form(sub))
        return self._solved


TRUE = Store()
FAILED = Store(failed=True)


def conjoin(store: Store, items: Iterable) -> Store:
    """Add built-in constraints to a store; FAILED is absorbing."""
    items = tuple(items)
    if store.failed or any(isinstance(i, FalseConstraint) for i in items):
        return FAILED
    eqs = store.equations + tuple(i for i in items if isinstance(i, Equation))
    if unify([(e.lhs, e.rhs) for e in eqs]) is None:
        return FAILED
    return Store(eqs)


def satisfiable(store: Store) -> bool:
    return not store.failed


def entailment_witness(store: Store, exvars, eqs: Sequence[Equation]):
    """Witness for: store implies exists(exvars). /\\ eqs.

    Returns the witness substitution (bindings for exvars only) when the
    entailment holds, else None. A failed store entails everything.
    """
    if store.failed:
        return {}
    sigma = store.solved()
    inst = [apply_subst(e, sigma) for e in eqs]
    exvars = frozenset(exvars)
    frozen = frozenset(vars_of(inst)) - exvars
    sub = unify([(e.lhs, e.rhs) for e in inst], frozen=frozen, prefer=exvars)
    if sub is None:
        return None
    return solved_form(sub)


def entails_exists(store: Store, exvars, eqs: Sequence[Equation]) -> bool:
    return entailment_witness(store, exvars, eqs) is not None


def entails_eq(store: Store, eq: Equation) -> bool:
    return entails_exists(store, (), [eq])


def equations_satisfiable(eqs: Sequence[Equation], frozen=frozenset()) -> bool:
    """Satisfiability of a conjunction, treating ``frozen`` vars as constants."""
    return unify([(e.lhs, e.rhs) for e in eqs], frozen=frozenset(frozen)) is not None


def stores_equivalent(a: Store, b: Store) -> bool:
    """Logical equivalence of two stores (mutual entailment)."""
    if a.failed or b.failed:
        return a.failed == b.failed
    bind_a = [Equation(v, t) for v, t in a.solved().items()]
    bind_b = [Equation(v, t) for v, t in b.solved().items()]
    return all(entails_eq(a, e) for e in bind_b) and all(
        entails_eq(b, e) for e in bind_a
    )


def guards_equivalent(guard_a: Sequence[Equation], guard_b: Sequence[Equation]) -> bool:
    """CT-equivalence of two guards given as equation conjunctions."""
    return stores_equivalent(conjoin(TRUE, guard_a), conjoin(TRUE, guard_b))


def project(store: Store, keep) -> tuple:
    """Equations equivalent to the store with everything outside ``keep``
    existentially quantified, as far as equations can express it.

    Variables not in ``keep`` are eliminated when possible (bound ones are
    substituted out, pure links between keep variables surface as keep=keep
    equations). Non-eliminable locals remain, canonically renamed to _L1,
    _L2, ... in order of appearance; they read as existentially quantified.
    """
    if store.failed:
        return (FalseConstraint(),)
    keep = frozenset(keep)
    local = frozenset(vars_of(store.equations)) - keep
    sub = unify(
        [(e.lhs, e.rhs) for e in store.equations], prefer=local
    )
    sigma = solved_form(sub)
    out = []
    for v in sorted(keep & set(sigma), key=lambda v: v.name):
        t = sigma[v]
        if isinstance(t, Var) and t in keep and t.name < v.name:
            out.append(Equation(v, t))
        elif isinstance(t, Var) and t in keep:
            out.append(Equation(t, v))
        else:
            out.append(Equation(v, t))
    # keep-to-keep equations may come out doubled or reversed; normalize
    seen = set()
    uniq = []
    for e in out:
        key = (e.lhs, e.rhs)
        if key not in seen and e.lhs != e.rhs:
            seen.add(key)
            uniq.append(e)
    return canonical_locals(tuple(uniq), keep)


def canonical_locals(obj, keep, prefix: str = "_L"):
    """Rename all variables outside ``keep`` to _L1, _L2, ... by first
    appearance (term order within the object)."""
    mapping: Subst = {}

    def visit(t):
        if isinstance(t, Var):
            if t not in keep and t not in mapping:
                mapping[t] = Var(f"{prefix}{len(mapping) + 1}")
        else:
            for a in getattr(t, "args", ()):
                visit(a)

    def visit_obj(o):
        if isinstance(o, (Var,)) or hasattr(o, "functor"):
            visit(o)
        elif isinstance(o, Equation):
            visit(o.lhs)
            visit(o.rhs)
        elif isinstance(o, FalseConstraint):
            pass
        elif isinstance(o, (tuple, list)):
            for x in o:
                visit_obj(x)
        elif hasattr(o, "map_terms"):
            o.map_terms(lambda t: (visit_obj(t), t)[1])
        else:
            raise TypeError(f"cannot canonicalize {o!r}")

    visit_obj(obj)
    return rename_vars(obj, mapping)
