"""Verifiers built on the fused-store search.

All three checkers are bounded: they explore derivation trees up to the
given budgets and answer definitely only when the exploration was
exhaustive. Cycle detection compares states through a live view: the store's
bindings are resolved into the atoms, and the built-in store is restricted
to the variables still reachable from the goal or the atoms. A branch that
repeats an ancestor's view (modulo renaming away from the goal variables)
can be replayed forever, since rule applicability only ever consults that
part of the state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .constraints import Store, project
from .equivalence import states_equivalent_mod
from .semantics import annotated
from .semantics.search import (
    AnswerSet,
    _fit_program,
    final_states_equivalent,
    qualified_answers,
)
from .syntax import IdAtom, print_item
from .terms import FreshSupply, apply_subst, vars_of


def _live_view(atoms, builtins: Store, tokens, goal_vars):
    if not builtins.failed:
        sigma = builtins.solved()
        atoms = tuple(
            IdAtom(apply_subst(a.atom, sigma), a.ident) for a in atoms
        )
    keep = set(goal_vars) | vars_of(atoms)
    return atoms, Store(project(builtins, keep)), tokens


def _views_equivalent(va, vb, goal_vars) -> bool:
    return states_equivalent_mod(
        va[0], va[1], va[2], vb[0], vb[1], vb[2], goal_vars
    )


@dataclass
class Cycle:
    trace: tuple
    first_depth: int
    repeat_depth: int


@dataclass
class TerminationReport:
    status: str  # "terminates" | "diverges" | "unknown"
    cycle: Optional[Cycle]
    expanded: int
    truncated: bool


def check_normal_termination(
    program, goal, max_applies: int = 30, max_states: int = 5000
) -> TerminationReport:
    """Do all normal derivations from the goal terminate?

    Explores the normal-scheduler tree of the fused-store reading. A branch
    whose built-in-free state repeats an ancestor's (modulo renaming, on the
    live restriction) witnesses divergence. Exhaustive exploration without a
    repeat proves termination; hitting a budget leaves the question open.
    """
    program = _fit_program(program, "annotated")
    goal_vars = frozenset(vars_of(tuple(goal)))
    fresh = FreshSupply("_R")
    expanded = 0
    truncated = False
    stack = [(annotated.initial(goal), (), 0, ())]
    while stack:
        cfg, history, applies, trace = stack.pop()
        expanded += 1
        if expanded > max_states:
            truncated = True
            break
        cfg, _ = annotated.drain(cfg)
        if cfg.failed:
            continue
        view = _live_view(annotated.chr_atoms(cfg), cfg.builtins, cfg.tokens, goal_vars)
        for depth, old in enumerate(history):
            if _views_equivalent(old, view, goal_vars):
                return TerminationReport(
                    "diverges", Cycle(trace, depth, applies), expanded, truncated
                )
        succ = annotated.successors(program, cfg, fresh)
        if not succ:
            continue
        if applies >= max_applies:
            truncated = True
            continue
        for firing, child in reversed(succ):
            step = (firing.rule.name, firing.idents)
            stack.append((child, history + (view,), applies + 1, trace + (step,)))
    if truncated:
        return TerminationReport("unknown", None, expanded, True)
    return TerminationReport("terminates", None, expanded, False)


@dataclass
class ConfluenceReport:
    status: str  # "confluent" | "not-confluent" | "unknown"
    classes: int
    witness: Optional[Tuple]
    truncated: bool


def check_normal_confluence(
    program, goal, max_applies: int = 30, max_states: int = 5000
) -> ConfluenceReport:
    """Are all terminal states of normal derivations from the goal pairwise
    equivalent modulo renaming away from the goal variables?"""
    ans = qualified_answers(
        program, goal, semantics="annotated",
        max_applies=max_applies, max_states=max_states,
    )
    classes = len(ans.finals)
    if classes > 1:
        return ConfluenceReport(
            "not-confluent", classes, (ans.answers[0].text, ans.answers[1].text),
            ans.truncated,
        )
    if ans.truncated:
        return ConfluenceReport("unknown", classes, None, True)
    return ConfluenceReport("confluent", classes, None, False)


@dataclass
class ProbeReport:
    cycle_found: bool
    cycle: Optional[Cycle]
    expanded: int
    truncated: bool


def probe_solve_orders(
    program, goal, max_steps: int = 20, max_states: int = 20000
) -> ProbeReport:
    """Search all interleavings of solve and apply steps for a loop.

    Unlike the normal scheduler, built-ins may be solved in any order or
    deferred; this catches divergence that only shows up when solving is
    lazy. After every firing the state's view through the live restriction
    (pending built-ins set aside) is recorded; a branch that revisits a view
    reports the loop. The probe is a bug finder: exhausting the budgets
    without a hit does not certify termination of every strategy.
    """
    program = _fit_program(program, "annotated")
    goal_vars = frozenset(vars_of(tuple(goal)))
    fresh = FreshSupply("_R")
    expanded = 0
    truncated = False
    stack = [(annotated.initial(goal), (), 0, 0, ())]
    while stack:
        cfg, history, steps, applies, trace = stack.pop()
        expanded += 1
        if expanded > max_states:
            truncated = True
            break
        if cfg.failed:
            continue
        if steps >= max_steps:
            truncated = True
            continue
        children = []
        for i in annotated.solve_indices(cfg):
            label = ("solve", print_item(cfg.store[i]))
            children.append((annotated.solve_at(cfg, i), history, label, applies))
        for firing, child in annotated.successors(program, cfg, fresh):
            label = ("apply", firing.rule.name, firing.idents)
            view = _live_view(
                annotated.chr_atoms(child), child.builtins, child.tokens, goal_vars
            )
            for depth, old in enumerate(history):
                if _views_equivalent(old, view, goal_vars):
                    return ProbeReport(
                        True,
                        Cycle(trace + (label,), depth, applies + 1),
                        expanded,
                        truncated,
                    )
            children.append((child, history + (view,), label, applies + 1))
        for child, hist, label, app in reversed(children):
            stack.append((child, hist, steps + 1, app, trace + (label,)))
    return ProbeReport(False, None, expanded, truncated)


@dataclass
class AnswerDiff:
    equal: bool
    only_left: List[str]
    only_right: List[str]
    truncated: bool


def diff_answer_sets(left: AnswerSet, right: AnswerSet) -> AnswerDiff:
    """Match the two answer sets' terminal states one-to-one modulo renaming
    away from the goal variables and report the leftovers."""
    if set(left.goal_vars) != set(right.goal_vars):
        raise ValueError("answer sets come from different goals")
    unmatched = list(range(len(right.finals)))
    only_left = []
    for i, fl in enumerate(left.finals):
        hit = None
        for j in unmatched:
            if final_states_equivalent(fl, right.finals[j], left.goal_vars):
                hit = j
                break
        if hit is None:
            only_left.append(left.answers[i].text)
        else:
            unmatched.remove(hit)
    only_right = [right.answers[j].text for j in unmatched]
    return AnswerDiff(
        not only_left and not only_right,
        only_left,
        only_right,
        left.truncated or right.truncated,
    )
