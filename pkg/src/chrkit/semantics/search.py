"""Derivation search: normal scheduling, answer extraction, lockstep runs.

The normal scheduler drains built-ins (and, in the two-store reading,
introductions) eagerly and branches only on rule firings at built-in-free
points. Answers are read off the terminal states: failure collapses to
``false``, success keeps the remaining user constraints together with the
built-in store restricted to the variables worth showing. Terminal states
are deduplicated modulo renaming away from the goal variables.

Budgets make every search total: ``max_applies`` bounds the firing depth of
a branch and ``max_states`` the number of expanded nodes. Exceeding either
sets the ``truncated`` flag instead of producing wrong answers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

from ..constraints import Store, canonical_locals, project
from ..equivalence import configs_correspond, states_equivalent_mod
from ..syntax import annotate, print_item, strip_annotations
from ..terms import FreshSupply, apply_subst, unify, vars_of
from . import annotated, standard

_MODES = {"standard": standard, "annotated": annotated}


@dataclass(frozen=True)
class FinalState:
    atoms: tuple
    builtins: Store
    tokens: frozenset
    failed: bool
    solve_count: int
    apply_count: int
    rule_trace: tuple


@dataclass
class ExploreResult:
    finals: List[FinalState]
    truncated: bool
    expanded: int
    goal_vars: frozenset


def _fit_program(program, semantics: str):
    if semantics == "annotated":
        return program if program.annotated else annotate(program)
    return strip_annotations(program) if program.annotated else program


def explore(
    program,
    goal,
    semantics: str = "annotated",
    max_applies: int = 30,
    max_states: int = 5000,
    dedup: bool = True,
    fresh: Optional[FreshSupply] = None,
) -> ExploreResult:
    mod = _MODES[semantics]
    program = _fit_program(program, semantics)
    fresh = fresh or FreshSupply("_R")
    goal_vars = frozenset(vars_of(tuple(goal)))
    finals: List[FinalState] = []
    truncated = False
    expanded = 0
    visited: List = []
    stack = [(mod.initial(goal), 0, 0, ())]
    while stack:
        cfg, solves, applies, trace = stack.pop()
        expanded += 1
        if expanded > max_states:
            truncated = True
            break
        cfg, n = mod.drain(cfg)
        solves += n
        if cfg.failed:
            finals.append(
                FinalState((), cfg.builtins, frozenset(), True, solves, applies, trace)
            )
            continue
        atoms = mod.chr_atoms(cfg)
        if dedup:
            if any(
                states_equivalent_mod(
                    atoms, cfg.builtins, cfg.tokens, va, vb, vt, goal_vars
                )
                for va, vb, vt in visited
            ):
                continue
            visited.append((atoms, cfg.builtins, cfg.tokens))
        succ = mod.successors(program, cfg, fresh)
        if not succ:
            finals.append(
                FinalState(
                    atoms, cfg.builtins, cfg.tokens, False, solves, applies, trace
                )
            )
            continue
        if applies >= max_applies:
            truncated = True
            continue
        for firing, child in reversed(succ):
            step = (firing.rule.name, firing.idents)
            stack.append((child, solves, applies + 1, trace + (step,)))
    return ExploreResult(finals, truncated, expanded, goal_vars)


@dataclass(frozen=True)
class QualifiedAnswer:
    atoms: tuple
    builtins: tuple
    failed: bool

    @property
    def text(self) -> str:
        if self.failed:
            return "false"
        parts = [print_item(a) for a in self.atoms] + [print_item(e) for e in self.builtins]
        return ", ".join(parts) if parts else "true"


@dataclass
class AnswerSet:
    answers: tuple
    finals: tuple
    truncated: bool
    goal_vars: frozenset

    @property
    def texts(self) -> tuple:
        return tuple(a.text for a in self.answers)


def render_answer(final: FinalState, goal_vars) -> QualifiedAnswer:
    if final.failed:
        return QualifiedAnswer((), (), True)
    locals_first = vars_of(final.builtins.equations) - set(goal_vars)
    sub = unify(
        [(e.lhs, e.rhs) for e in final.builtins.equations], prefer=locals_first
    )
    atoms = tuple(apply_subst(a.atom, sub) for a in final.atoms)
    keep = set(goal_vars) | vars_of(atoms)
    eqs = project(final.builtins, keep)
    atoms, eqs = canonical_locals((tuple(sorted(atoms, key=print_item)), eqs), goal_vars)
    return QualifiedAnswer(atoms, eqs, False)


def final_states_equivalent(a: FinalState, b: FinalState, goal_vars) -> bool:
    return states_equivalent_mod(
        a.atoms, a.builtins, a.tokens, b.atoms, b.builtins, b.tokens, goal_vars
    )


def qualified_answers(
    program,
    goal,
    semantics: str = "annotated",
    max_applies: int = 30,
    max_states: int = 5000,
    fresh: Optional[FreshSupply] = None,
) -> AnswerSet:
    res = explore(
        program,
        goal,
        semantics=semantics,
        max_applies=max_applies,
        max_states=max_states,
        fresh=fresh,
    )
    reps: List[FinalState] = []
    for fs in res.finals:
        if not any(final_states_equivalent(fs, r, res.goal_vars) for r in reps):
            reps.append(fs)
    rendered = [(render_answer(fs, res.goal_vars), fs) for fs in reps]
    rendered.sort(key=lambda pair: pair[0].text)
    return AnswerSet(
        tuple(a for a, _ in rendered),
        tuple(fs for _, fs in rendered),
        res.truncated,
        res.goal_vars,
    )


@dataclass
class LockstepReport:
    aligned: bool
    mismatch: Optional[str]
    nodes: int
    finals: int
    solve_count: int
    apply_count: int
    truncated: bool


def lockstep_run(
    program, goal, max_applies: int = 30, max_states: int = 5000
) -> LockstepReport:
    """Run both readings over the same derivation tree and check that they
    stay in correspondence node by node.

    The plain program drives the two-store semantics while its annotated
    version drives the fused one; sharing the fresh-variable sequence keeps
    the renamed rules syntactically identical on both sides.
    """
    prog_std = _fit_program(program, "standard")
    prog_ann = annotate(prog_std)
    fresh_s = FreshSupply("_R")
    fresh_a = FreshSupply("_R")

    def corresponds(cs, ca) -> bool:
        return configs_correspond(
            cs.goal,
            cs.store,
            cs.builtins,
            cs.tokens,
            cs.counter,
            ca.store,
            ca.builtins,
            ca.tokens,
            ca.counter,
        )

    nodes = finals = solve_count = apply_count = 0
    truncated = False
    stack = [(standard.initial(goal), annotated.initial(goal), 0)]
    while stack:
        cs, ca, applies = stack.pop()
        nodes += 1
        if nodes > max_states:
            truncated = True
            break
        if not corresponds(cs, ca):
            return LockstepReport(
                False, f"states diverged entering node {nodes}", nodes, finals,
                solve_count, apply_count, truncated,
            )
        cs, ns = standard.drain(cs)
        ca, na = annotated.drain(ca)
        if ns != na:
            return LockstepReport(
                False, f"solve counts differ at node {nodes}: {ns} vs {na}",
                nodes, finals, solve_count, apply_count, truncated,
            )
        solve_count += ns
        if cs.failed or ca.failed:
            if cs.failed != ca.failed:
                return LockstepReport(
                    False, f"only one side failed at node {nodes}", nodes, finals,
                    solve_count, apply_count, truncated,
                )
            finals += 1
            continue
        if not corresponds(cs, ca):
            return LockstepReport(
                False, f"states diverged after draining node {nodes}", nodes,
                finals, solve_count, apply_count, truncated,
            )
        succ_s = standard.successors(prog_std, cs, fresh_s)
        succ_a = annotated.successors(prog_ann, ca, fresh_a)
        sig_s = [(f.rule_index, f.idents) for f, _ in succ_s]
        sig_a = [(f.rule_index, f.idents) for f, _ in succ_a]
        if sig_s != sig_a:
            return LockstepReport(
                False, f"firings differ at node {nodes}: {sig_s} vs {sig_a}",
                nodes, finals, solve_count, apply_count, truncated,
            )
        if not succ_s:
            finals += 1
            continue
        if applies >= max_applies:
            truncated = True
            continue
        apply_count += len(succ_s)
        for (_, child_s), (_, child_a) in zip(reversed(succ_s), reversed(succ_a)):
            stack.append((child_s, child_a, applies + 1))
    return LockstepReport(
        True, None, nodes, finals, solve_count, apply_count, truncated
    )
