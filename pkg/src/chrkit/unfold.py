"""Unfolding: replace part of a rule body by the body of a matching rule.

Given annotated rules r and v in the same program, an unfold site is an
injective assignment of v's head positions (kept, then removed) to user
constraints in r's body such that, assuming r's guard and the built-ins in
r's body, the heads of a renamed copy of v match the assigned atoms under a
substitution theta that binds only v's variables. The unfolded rule keeps
r's heads, conjoins r's guard with the non-entailed part of v's guard
instantiated by theta, replaces the atoms matched by v's removed head with
v's body (identifiers shifted past r's largest one), records the matching
equations, and updates the token store so that a rule that removes nothing
is never used twice on the same atoms.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Dict, List, Optional

from .constraints import TRUE, conjoin, entails_exists, entailment_witness, satisfiable
from .equivalence import rules_isomorphic
from .syntax import IdAtom, Program, Rule, Token, clean_tokens
from .terms import Equation, FreshSupply, apply_subst, rename_apart, vars_of
from .semantics.annotated import shift_identifiers


@dataclass(frozen=True)
class UnfoldSite:
    target_index: int
    source_index: int
    idents: tuple
    theta: tuple  # sorted (var, term) pairs, for reporting
    rule: Rule


def _dedup_equations(eqs) -> tuple:
    out = []
    seen = set()
    for e in eqs:
        if e.lhs == e.rhs:
            continue
        key = frozenset((repr(e.lhs), repr(e.rhs)))
        if key in seen:
            continue
        seen.add(key)
        out.append(e)
    return tuple(out)


def _body_split(rule: Rule):
    atoms = [b for b in rule.body if isinstance(b, IdAtom)]
    builtins = [b for b in rule.body if not isinstance(b, IdAtom)]
    return atoms, builtins


def unfold_at(program: Program, target_index: int, source_index: int,
              idents, fresh: Optional[FreshSupply] = None,
              track_tokens: bool = True) -> Optional[UnfoldSite]:
    """Unfold the target rule with the source rule at the body atoms with
    the given identifiers (source's kept positions first). None if the site
    does not satisfy the side conditions.

    track_tokens=False drops all token bookkeeping (no blocking, nothing
    recorded). That produces wrong rules on propagation sources; it exists
    so tests can demonstrate the divergence the bookkeeping prevents.
    """
    r = program.rules[target_index]
    fresh = fresh or FreshSupply("_U")
    v, _ = rename_apart(program.rules[source_index], fresh=fresh)
    body_atoms, body_builtins = _body_split(r)
    by_id = {a.ident: a for a in body_atoms}
    heads = v.kept + v.removed
    if len(idents) != len(heads) or len(set(idents)) != len(idents):
        return None
    try:
        matched = [by_id[i] for i in idents]
    except KeyError:
        return None
    if any(
        a.atom.functor != h.functor or len(a.atom.args) != len(h.args)
        for a, h in zip(matched, heads)
    ):
        return None
    token = Token(program.rules[source_index].name, tuple(idents))
    if track_tokens and token in r.tokens:
        return None
    assumed = conjoin(TRUE, r.guard + tuple(body_builtins))
    if assumed.failed:
        return None
    eqs = tuple(
        Equation(a.atom.args[i], h.args[i])
        for a, h in zip(matched, heads)
        for i in range(len(h.args))
    )
    theta = entailment_witness(assumed, vars_of((v.kept, v.removed)), eqs)
    if theta is None:
        return None
    residue = tuple(
        apply_subst(c, theta)
        for c in v.guard
        if not entails_exists(assumed, frozenset(), [apply_subst(c, theta)])
    )
    new_guard = r.guard + residue
    if not satisfiable(conjoin(TRUE, new_guard)):
        return None
    top = max((a.ident for a in body_atoms), default=0)
    inst_body, inst_tokens = shift_identifiers(v.body, v.tokens, top)
    n_kept = len(v.kept)
    kept_matched = matched[:n_kept]
    other_atoms = tuple(a for a in body_atoms if a.ident not in set(idents))
    new_body = (
        other_atoms
        + tuple(kept_matched)
        + inst_body
        + tuple(body_builtins)
        + _dedup_equations(eqs)
    )
    survivors = other_atoms + tuple(kept_matched)
    if track_tokens:
        new_tokens = clean_tokens(r.tokens, survivors) | inst_tokens
        if not v.removed:
            new_tokens = new_tokens | {
                Token(token.rule_name, tuple(a.ident for a in kept_matched))
            }
    else:
        new_tokens = frozenset()
    unfolded = Rule(r.name, r.kept, r.removed, new_guard, new_body, new_tokens)
    unfolded.validate(annotated=True)
    return UnfoldSite(
        target_index,
        source_index,
        tuple(idents),
        tuple(sorted(theta.items(), key=lambda kv: kv[0].name)),
        unfolded,
    )


def unfold_sites(program: Program, target_index: int) -> List[UnfoldSite]:
    """Every unfold site of the target rule, in source-rule order and then
    by the identifier sequence used."""
    if not program.annotated:
        raise ValueError("unfolding works on annotated programs")
    r = program.rules[target_index]
    body_atoms, _ = _body_split(r)
    ordered = sorted(body_atoms, key=lambda a: a.ident)
    out: List[UnfoldSite] = []
    for si, v in enumerate(program.rules):
        width = len(v.kept) + len(v.removed)
        if width > len(ordered):
            continue
        for combo in permutations(ordered, width):
            fresh = FreshSupply("_U")
            site = unfold_at(
                program, target_index, si, tuple(a.ident for a in combo), fresh
            )
            if site is not None:
                out.append(site)
    return out


def unfold_all(program: Program, target_index: int) -> List[Rule]:
    """The set of rules obtainable by unfolding the target rule once,
    without duplicates (modulo variable and identifier renaming)."""
    out: List[Rule] = []
    for site in unfold_sites(program, target_index):
        if not any(rules_isomorphic(site.rule, seen) for seen in out):
            out.append(site.rule)
    return out
