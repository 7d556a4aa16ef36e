"""Equivalence checks between execution states.

Three gradations are used throughout the toolkit:

* ``states_equivalent``: identical user-constraint stores (identifiers
  ignored), equivalent built-in stores, and equal cleaned token stores.
* ``states_equivalent_mod``: like the above but modulo a bijective renaming
  of the variables outside a protected set and of the atom identifiers.
  This is the comparison used for answers, cycle detection and confluence.
* ``configs_correspond``: the structural correspondence between a state of
  the two-store semantics (goal kept separate) and one of the fused-store
  semantics, used by the lockstep runner.

All checks are decision procedures by backtracking; the state sizes this
toolkit deals in are small.
"""

from __future__ import annotations

from typing import Dict, Iterable, Optional

from .constraints import Store, stores_equivalent
from .terms import Compound, Equation, FalseConstraint, Var, rename_vars, vars_of
from .syntax import IdAtom, Token, clean_tokens


def _match_term(ta, tb, rho: Dict, fixed) -> Optional[Dict]:
    """Extend the injective variable map rho so that ta renamed equals tb."""
    if isinstance(ta, Var) and isinstance(tb, Var):
        if ta in fixed or tb in fixed:
            return rho if ta == tb else None
        if ta in rho:
            return rho if rho[ta] == tb else None
        if tb in rho.values():
            return None
        out = dict(rho)
        out[ta] = tb
        return out
    if isinstance(ta, Compound) and isinstance(tb, Compound):
        if ta.functor != tb.functor or len(ta.args) != len(tb.args):
            return None
        for x, y in zip(ta.args, tb.args):
            rho = _match_term(x, y, rho, fixed)
            if rho is None:
                return None
        return rho
    return None


def _match_atom_sets(todo, avail, fixed, rho, idmap):
    """Yield (rho, idmap) pairs matching the IdAtom multiset todo onto avail."""
    if not todo:
        yield rho, idmap
        return
    first = todo[0]
    for j, cand in enumerate(avail):
        r2 = _match_term(first.atom, cand.atom, rho, fixed)
        if r2 is None:
            continue
        im = dict(idmap)
        im[first.ident] = cand.ident
        yield from _match_atom_sets(todo[1:], avail[:j] + avail[j + 1:], fixed, r2, im)


def _tokens_correspond(tok_a, tok_b, idmap) -> bool:
    mapped = set()
    for t in tok_a:
        if not all(i in idmap for i in t.idents):
            return False
        mapped.add(Token(t.rule_name, tuple(idmap[i] for i in t.idents)))
    return mapped == set(tok_b)


def _constrained_vars(store: Store):
    out = set()
    for v, t in store.solved().items():
        out.add(v)
        out |= vars_of(t)
    return out


def _stores_equivalent_mod(sa: Store, sb: Store, rho, fixed) -> bool:
    """Can rho be extended over the leftover variables so the stores are
    equivalent theories?"""
    if sa.failed or sb.failed:
        return sa.failed and sb.failed
    la = sorted(_constrained_vars(sa) - set(rho) - fixed, key=lambda v: v.name)
    lb = _constrained_vars(sb) - set(rho.values()) - fixed
    if len(la) != len(lb):
        return False
    sig_a = sa.solved()
    sig_b = sb.solved()

    def leaf(full_rho):
        renamed = tuple(rename_vars(e, full_rho) for e in sa.equations)
        return stores_equivalent(Store(renamed), sb)

    def rec(i, rho, avail):
        if i == len(la):
            return leaf(rho)
        v = la[i]
        bound = sig_a.get(v)
        for w in sorted(avail, key=lambda x: x.name):
            if bound is not None and not vars_of(bound):
                if sig_b.get(w) != bound:
                    continue
            r2 = dict(rho)
            r2[v] = w
            if rec(i + 1, r2, avail - {w}):
                return True
        return False

    return rec(0, dict(rho), lb)


def _shape_key(a: IdAtom):
    return (a.atom.functor, len(a.atom.args))


def states_equivalent(chr_a, builtins_a, tokens_a, chr_b, builtins_b, tokens_b) -> bool:
    """Strict comparison: equal atom multisets, equivalent built-in stores,
    equal cleaned token stores (identifiers compared literally)."""
    if builtins_a.failed or builtins_b.failed:
        return builtins_a.failed and builtins_b.failed
    ma = sorted((a.atom for a in chr_a), key=repr)
    mb = sorted((b.atom for b in chr_b), key=repr)
    if ma != mb:
        return False
    if clean_tokens(tokens_a, chr_a) != clean_tokens(tokens_b, chr_b):
        return False
    return stores_equivalent(builtins_a, builtins_b)


def states_equivalent_mod(
    chr_a, builtins_a, tokens_a, chr_b, builtins_b, tokens_b, fixed_vars
) -> bool:
    """Comparison modulo renaming of variables outside fixed_vars and of
    atom identifiers. Failed states are all identified with each other."""
    if builtins_a.failed or builtins_b.failed:
        return builtins_a.failed and builtins_b.failed
    if len(chr_a) != len(chr_b):
        return False
    if sorted(map(_shape_key, chr_a)) != sorted(map(_shape_key, chr_b)):
        return False
    fixed = frozenset(fixed_vars)
    ta = clean_tokens(tokens_a, chr_a)
    tb = clean_tokens(tokens_b, chr_b)
    if len(ta) != len(tb):
        return False
    todo = sorted(chr_a, key=lambda a: (_shape_key(a), a.ident))
    avail = sorted(chr_b, key=lambda a: (_shape_key(a), a.ident))
    for rho, idmap in _match_atom_sets(todo, avail, fixed, {}, {}):
        if not _tokens_correspond(ta, tb, idmap):
            continue
        if _stores_equivalent_mod(builtins_a, builtins_b, rho, fixed):
            return True
    return False


def _multiset_equal(xs, ys) -> bool:
    return sorted(xs, key=repr) == sorted(ys, key=repr)


def _id_bijections(atoms_a, atoms_b):
    """Bijections between two IdAtom collections whose atoms are equal as
    terms (no renaming)."""
    if not atoms_a:
        if not atoms_b:
            yield {}
        return
    first = atoms_a[0]
    for j, cand in enumerate(atoms_b):
        if cand.atom != first.atom:
            continue
        for rest in _id_bijections(atoms_a[1:], atoms_b[:j] + atoms_b[j + 1:]):
            out = dict(rest)
            out[first.ident] = cand.ident
            yield out


def configs_correspond(
    goal,
    std_store,
    std_builtins,
    std_tokens,
    std_counter,
    fused_store,
    fused_builtins,
    fused_tokens,
    fused_counter,
) -> bool:
    """Does a two-store state and a fused-store state describe the same
    computation point?

    The fused store must contain, for each not-yet-introduced user constraint
    of the goal (left to right), the same atom pre-stamped with the exact
    identifier the two-store side is about to hand out, untouched by any
    token; the remaining fused atoms must match the introduced store under an
    identifier bijection that carries the token store across. Pending
    built-ins and the built-in stores must agree, and the counters coincide
    once the pending introductions are accounted for.
    """
    goal_atoms = [g for g in goal if isinstance(g, Compound)]
    goal_builtins = [g for g in goal if isinstance(g, (Equation, FalseConstraint))]
    fused_atoms = [x for x in fused_store if isinstance(x, IdAtom)]
    fused_pending = [x for x in fused_store if not isinstance(x, IdAtom)]
    # tokens whose atoms are gone can never fire and carry no information
    std_tokens = clean_tokens(std_tokens, std_store)
    fused_tokens = clean_tokens(fused_tokens, fused_atoms)
    if std_counter + len(goal_atoms) != fused_counter + 1:
        return False
    if not _multiset_equal(goal_builtins, fused_pending):
        return False
    if not stores_equivalent(std_builtins, fused_builtins):
        return False
    if len(fused_atoms) != len(goal_atoms) + len(std_store):
        return False
    by_id = {a.ident: a for a in fused_atoms}
    k1_ids = set()
    for j, atom in enumerate(goal_atoms):
        ia = by_id.get(std_counter + j)
        if ia is None or ia.atom != atom:
            return False
        k1_ids.add(ia.ident)
    token_ids = {i for t in fused_tokens for i in t.idents}
    if k1_ids & token_ids:
        return False
    k2 = [a for a in fused_atoms if a.ident not in k1_ids]
    for idmap in _id_bijections(list(std_store), k2):
        mapped = set()
        ok = True
        for t in std_tokens:
            if not all(i in idmap for i in t.idents):
                ok = False
                break
            mapped.add(Token(t.rule_name, tuple(idmap[i] for i in t.idents)))
        if ok and mapped == set(fused_tokens):
            return True
    return False


def rules_isomorphic(ra, rb) -> bool:
    """Same rule modulo variable renaming and identifier renaming; head,
    guard and body parts are compared as multisets."""
    if ra.name != rb.name:
        return False
    if (
        len(ra.kept) != len(rb.kept)
        or len(ra.removed) != len(rb.removed)
        or len(ra.guard) != len(rb.guard)
        or len(ra.body) != len(rb.body)
        or len(ra.tokens) != len(rb.tokens)
    ):
        return False

    def eq_pairs(e):
        return (e.lhs, e.rhs)

    def match_lists(pairs_a, pairs_b, rho, unordered_eq=False):
        """pairs are lists of terms or of 2-tuples; multiset matching."""
        if not pairs_a:
            yield rho
            return
        first = pairs_a[0]
        for j, cand in enumerate(pairs_b):
            orientations = [cand]
            if unordered_eq and isinstance(cand, tuple):
                orientations.append((cand[1], cand[0]))
            for o in orientations:
                if isinstance(first, tuple):
                    r2 = _match_term(first[0], o[0], rho, frozenset())
                    if r2 is not None:
                        r2 = _match_term(first[1], o[1], r2, frozenset())
                else:
                    r2 = _match_term(first, o, rho, frozenset())
                if r2 is None:
                    continue
                yield from match_lists(
                    pairs_a[1:], pairs_b[:j] + pairs_b[j + 1:], r2, unordered_eq
                )

    body_atoms_a = [b for b in ra.body if isinstance(b, IdAtom)]
    body_atoms_b = [b for b in rb.body if isinstance(b, IdAtom)]
    body_bi_a = [eq_pairs(b) for b in ra.body if isinstance(b, Equation)]
    body_bi_b = [eq_pairs(b) for b in rb.body if isinstance(b, Equation)]
    false_a = sum(1 for b in ra.body if isinstance(b, FalseConstraint))
    false_b = sum(1 for b in rb.body if isinstance(b, FalseConstraint))
    if (
        len(body_atoms_a) != len(body_atoms_b)
        or len(body_bi_a) != len(body_bi_b)
        or false_a != false_b
    ):
        return False

    for rho1 in match_lists(list(ra.kept), list(rb.kept), {}):
        for rho2 in match_lists(list(ra.removed), list(rb.removed), rho1):
            for rho3 in match_lists(
                [eq_pairs(g) for g in ra.guard],
                [eq_pairs(g) for g in rb.guard],
                rho2,
                unordered_eq=True,
            ):
                for rho4 in match_lists(
                    body_bi_a, body_bi_b, rho3, unordered_eq=True
                ):
                    for rho5, idmap in _match_atom_sets(
                        body_atoms_a, body_atoms_b, frozenset(), rho4, {}
                    ):
                        if _tokens_correspond(ra.tokens, rb.tokens, idmap):
                            return True
    return False
