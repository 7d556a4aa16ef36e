"""Built-in store operations checked against the frozen brute-force oracles."""

import pytest
from hypothesis import given, settings, strategies as st

from chrkit.constraints import (
    FAILED,
    TRUE,
    Store,
    canonical_locals,
    conjoin,
    entailment_witness,
    entails_eq,
    entails_exists,
    equations_satisfiable,
    guards_equivalent,
    project,
    satisfiable,
    stores_equivalent,
)
from chrkit.terms import Compound, Equation, Var, const, vars_of

from oracles import (
    oracle_entails,
    oracle_equivalent,
    oracle_satisfiable,
    oracle_unifiable,
    universe,
)

X, Y, Z, W = Var("X"), Var("Y"), Var("Z"), Var("W")
a, b = const("a"), const("b")


def f(t):
    return Compound("f", (t,))


def eq(lhs, rhs):
    return Equation(lhs, rhs)


# ----------------------------------------------------------------- store


def test_conjoin_accumulates_equations():
    s = conjoin(TRUE, [eq(X, a)])
    s = conjoin(s, [eq(Y, X)])
    assert satisfiable(s)
    assert entails_eq(s, eq(Y, a))


def test_conjoin_detects_inconsistency():
    s = conjoin(TRUE, [eq(X, a), eq(X, b)])
    assert s is FAILED
    # FAILED is absorbing
    assert conjoin(s, [eq(Y, Y)]) is FAILED


def test_failed_store_entails_everything():
    assert entails_eq(FAILED, eq(a, b))


def test_entails_exists_examples():
    s = conjoin(TRUE, [eq(X, a)])
    assert entails_exists(s, {Z}, [eq(Z, X)])
    assert entails_exists(s, (), [eq(X, a)])
    assert not entails_exists(s, (), [eq(X, b)])
    # an unconstrained variable is not equal to anything in particular
    assert not entails_exists(TRUE, (), [eq(Y, a)])
    # ... but exists Y. Y=a holds
    assert entails_exists(TRUE, {Y}, [eq(Y, a)])


def test_entailment_witness_binds_only_exvars():
    s = conjoin(TRUE, [eq(X, f(Y))])
    w = entailment_witness(s, {Z}, [eq(X, f(Z))])
    assert w is not None
    assert set(w) <= {Z}


def test_occurs_check_blocks_entailment():
    assert not entails_exists(TRUE, {Z}, [eq(Z, f(Z))])


def test_equations_satisfiable_frozen_vars():
    assert equations_satisfiable([eq(X, a)])
    assert not equations_satisfiable([eq(X, a)], frozen={X})
    assert equations_satisfiable([eq(X, Y)], frozen={Y})
    assert not equations_satisfiable([eq(X, Y)], frozen={X, Y})


def test_stores_equivalent_examples():
    s1 = conjoin(TRUE, [eq(X, Y), eq(Y, a)])
    s2 = conjoin(TRUE, [eq(X, a), eq(Y, a)])
    assert stores_equivalent(s1, s2)
    assert not stores_equivalent(conjoin(TRUE, [eq(X, a)]), TRUE)
    assert stores_equivalent(FAILED, FAILED)
    assert not stores_equivalent(FAILED, TRUE)


def test_guards_equivalent_examples():
    assert guards_equivalent([eq(X, Y)], [eq(Y, X)])
    assert not guards_equivalent([eq(Y, a)], [])


# ------------------------------------------------------------- projection


def test_project_substitutes_locals_out():
    s = conjoin(TRUE, [eq(X, Z), eq(Z, a)])
    assert project(s, {X}) == (eq(X, a),)


def test_project_drops_pure_local_links():
    s = conjoin(TRUE, [eq(X, Z)])
    assert project(s, {X}) == ()


def test_project_surfaces_keep_to_keep_links():
    s = conjoin(TRUE, [eq(X, Z), eq(Z, Y)])
    out = project(s, {X, Y})
    assert guards_equivalent(out, [eq(X, Y)])
    assert vars_of(out) <= {X, Y}


def test_project_keeps_unremovable_locals_canonically():
    s = conjoin(TRUE, [eq(X, f(Z))])
    out = project(s, {X})
    assert out == (eq(X, f(Var("_L1"))),)


def test_canonical_locals_renames_by_first_appearance():
    obj = (eq(Var("Q"), f(Var("P"))), eq(Var("P"), Y))
    got = canonical_locals(obj, keep={Y})
    assert got == (eq(Var("_L1"), f(Var("_L2"))), eq(Var("_L2"), Y))


def test_canonical_locals_handles_colliding_names():
    # the mapping here swaps _L1 and _L2; a naive sequential rewrite of
    # the two entries would conflate them
    obj = (Var("_L2"), Var("_L1"))
    got = canonical_locals(obj, keep=())
    assert got == (Var("_L1"), Var("_L2"))


# ------------------------------------------------- oracle-backed properties

VARS = (X, Y, Z, W)

terms_st = st.recursive(
    st.sampled_from(VARS + (a, b)),
    lambda inner: st.builds(f, inner),
    max_leaves=2,
)
eqs_st = st.lists(st.builds(Equation, terms_st, terms_st), max_size=3)


@given(eqs_st, st.sets(st.sampled_from(VARS)))
def test_satisfiability_matches_oracle(eqs, frozen):
    assert equations_satisfiable(eqs, frozen) == oracle_satisfiable(eqs, frozen)


@given(eqs_st)
def test_store_failure_matches_oracle(eqs):
    assert satisfiable(conjoin(TRUE, eqs)) == oracle_unifiable(eqs)


# Entailment instances keep the universally quantified side small (X, Y)
# so the oracle's ground enumeration stays cheap; Z and W are existential.
outer_terms_st = st.recursive(
    st.sampled_from((X, Y, a, b)),
    lambda inner: st.builds(f, inner),
    max_leaves=2,
)
inner_terms_st = st.recursive(
    st.sampled_from(VARS + (a, b)),
    lambda inner: st.builds(f, inner),
    max_leaves=2,
)

UNIVERSE = universe(depth=3)


@settings(deadline=None)
@given(
    st.lists(st.builds(Equation, outer_terms_st, outer_terms_st), max_size=2),
    st.lists(st.builds(Equation, inner_terms_st, inner_terms_st),
             min_size=1, max_size=2),
)
def test_entailment_matches_oracle(store_eqs, query):
    got = entails_exists(conjoin(TRUE, store_eqs), {Z, W}, query)
    want = oracle_entails(store_eqs, {Z, W}, query, terms=UNIVERSE)
    assert got == want


@settings(deadline=None)
@given(
    st.lists(st.builds(Equation, outer_terms_st, outer_terms_st), max_size=2),
    st.lists(st.builds(Equation, outer_terms_st, outer_terms_st), max_size=2),
)
def test_store_equivalence_matches_oracle(eqs_a, eqs_b):
    sa, sb = conjoin(TRUE, eqs_a), conjoin(TRUE, eqs_b)
    if sa.failed or sb.failed:
        # oracle_equivalent has no failed-store notion; compare solvability
        assert stores_equivalent(sa, sb) == (sa.failed == sb.failed)
        return
    keep = vars_of(tuple(eqs_a)) | vars_of(tuple(eqs_b))
    got = stores_equivalent(sa, sb)
    want = oracle_equivalent(eqs_a, eqs_b, keep, terms=UNIVERSE)
    assert got == want
