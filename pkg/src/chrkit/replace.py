"""Replacing a rule by its unfolded versions, with safety analysis.

A rule can be taken out of a program and stood in for by everything its body
unfolds to. That is only sound when the body cannot react in ways the
unfolder did not see. Two families of hazards are detected:

* unify-only: some rule could fire on the body atoms at run time given a
  strong enough built-in store, but no unfold site exists for it (the match
  needs bindings that only a computation can supply, or the guard cannot be
  discharged at transformation time);
* partial-head: some multi-headed rule could consume body atoms together
  with atoms from elsewhere (the goal or other rule bodies), a reaction the
  unfolder can never capture.

The strict criterion demands no hazards, at least one unfold site, and
every unfolded guard equivalent to the original. The weak criterion only
demands some unfolded version with an equivalent guard; it is meant for
programs already known to terminate and be confluent under the normal
strategy. ``force`` skips the checks, which is how the known counter
examples are reproduced.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import List, Optional, Tuple

from .constraints import equations_satisfiable, guards_equivalent
from .syntax import IdAtom, Program, Rule, Token
from .terms import Equation, FreshSupply, rename_apart, vars_of
from .unfold import unfold_all, unfold_sites


@dataclass(frozen=True)
class Hazard:
    kind: str  # "unify-only" or "partial-head"
    target_index: int
    source_index: int
    source_name: str
    idents: tuple
    positions: tuple
    detail: str


def unfoldable_pairs(program: Program, target_index: int) -> List[Tuple[int, tuple]]:
    """(source rule index, identifier sequence) for every unfold site of the
    target rule."""
    return [
        (s.source_index, s.idents) for s in unfold_sites(program, target_index)
    ]


def _head_fits(atom: IdAtom, head) -> bool:
    return atom.atom.functor == head.functor and len(atom.atom.args) == len(head.args)


def _position_equations(assigned) -> tuple:
    return tuple(
        Equation(a.atom.args[i], h.args[i])
        for a, h in assigned
        for i in range(len(h.args))
    )


def deletion_hazards(program: Program, target_index: int) -> List[Hazard]:
    """Rules whose run-time firings on the target's body atoms are not
    covered by any unfold site."""
    if not program.annotated:
        raise ValueError("hazard analysis works on annotated programs")
    r = program.rules[target_index]
    body_atoms = sorted(
        (b for b in r.body if isinstance(b, IdAtom)), key=lambda a: a.ident
    )
    covered = set(unfoldable_pairs(program, target_index))
    out: List[Hazard] = []
    for si, source in enumerate(program.rules):
        v, _ = rename_apart(source, fresh=FreshSupply("_H"))
        heads = v.kept + v.removed
        frozen = vars_of((v.guard, v.body)) - vars_of((v.kept, v.removed))
        width = len(heads)

        # run-time match on the whole head that no unfold site covers
        for combo in permutations(body_atoms, width):
            if not all(_head_fits(a, h) for a, h in zip(combo, heads)):
                continue
            ids = tuple(a.ident for a in combo)
            if Token(source.name, ids) in r.tokens:
                continue
            if (si, ids) in covered:
                continue
            eqs = _position_equations(zip(combo, heads))
            if equations_satisfiable(r.guard + eqs + v.guard, frozen):
                out.append(
                    Hazard(
                        "unify-only",
                        target_index,
                        si,
                        source.name,
                        ids,
                        tuple(range(width)),
                        f"{source.name} could fire on body atoms {ids} of "
                        f"{r.name} given a stronger store, but no unfold "
                        "site covers that firing",
                    )
                )

        # mixed firings: some head positions from the body, some from outside
        if width < 2:
            continue
        position_sets = [
            subset
            for size in range(1, width)
            for subset in combinations(range(width), size)
        ]
        for subset in position_sets:
            for combo in permutations(body_atoms, len(subset)):
                pairs = [(a, heads[p]) for a, p in zip(combo, subset)]
                if not all(_head_fits(a, h) for a, h in pairs):
                    continue
                eqs = _position_equations(pairs)
                if equations_satisfiable(r.guard + eqs + v.guard, frozen):
                    out.append(
                        Hazard(
                            "partial-head",
                            target_index,
                            si,
                            source.name,
                            tuple(a.ident for a in combo),
                            tuple(subset),
                            f"{source.name} could consume body atoms "
                            f"{tuple(a.ident for a in combo)} of {r.name} "
                            "together with atoms from outside the rule",
                        )
                    )
    return out


@dataclass
class ReplacementVerdict:
    ok: bool
    mode: str
    sites: List[Tuple[int, tuple]]
    hazards: List[Hazard]
    guard_mismatches: List[Rule]
    reasons: List[str]


def check_replacement(program: Program, target_index: int, mode: str = "safe") -> ReplacementVerdict:
    """Decide whether the target rule may be replaced by its unfolded
    versions under the strict or the weak criterion."""
    r = program.rules[target_index]
    sites = unfoldable_pairs(program, target_index)
    unfolded = unfold_all(program, target_index)
    reasons: List[str] = []
    if mode == "safe":
        hazards = deletion_hazards(program, target_index)
        mismatches = [
            u for u in unfolded if not guards_equivalent(r.guard, u.guard)
        ]
        if hazards:
            reasons.append(f"{len(hazards)} hazard(s) against rule {r.name}")
        if not sites:
            reasons.append(f"rule {r.name} has no unfold site")
        if mismatches:
            reasons.append(
                f"{len(mismatches)} unfolded version(s) of {r.name} change the guard"
            )
        return ReplacementVerdict(
            not reasons, mode, sites, hazards, mismatches, reasons
        )
    if mode == "weak":
        keeps_guard = [u for u in unfolded if guards_equivalent(r.guard, u.guard)]
        if not keeps_guard:
            reasons.append(
                f"no unfolded version of {r.name} keeps the guard equivalent"
            )
        return ReplacementVerdict(not reasons, mode, sites, [], [], reasons)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass
class ReplaceReport:
    verdict: Optional[ReplacementVerdict]
    replaced: Rule
    added: List[Rule]


def replace_rule(
    program: Program, target_index: int, mode: str = "safe"
) -> Tuple[Program, ReplaceReport]:
    """Replace the target rule in place by all its unfolded versions.

    mode "safe" and "weak" enforce the respective criteria and raise
    ValueError when they fail; "force" performs the replacement untested.
    """
    r = program.rules[target_index]
    verdict = None
    if mode in ("safe", "weak"):
        verdict = check_replacement(program, target_index, mode)
        if not verdict.ok:
            raise ValueError(
                f"rule {r.name} cannot be replaced ({mode}): "
                + "; ".join(verdict.reasons)
            )
    elif mode != "force":
        raise ValueError(f"unknown mode {mode!r}")
    added = unfold_all(program, target_index)
    rules = (
        program.rules[:target_index]
        + tuple(added)
        + program.rules[target_index + 1:]
    )
    out = Program(rules, annotated=True).validate()
    return out, ReplaceReport(verdict, r, added)
