"""Cost-optimal plan search over totally ordered decomposition problems.

The searcher is a depth-first branch-and-bound progression: it consumes the
task network left to right, applying primitive actions and branching over
method candidates at the first abstract task. Incumbent solutions prune the
remainder of the space, and every strict improvement can be reported through
an anytime callback. A separate unpruned enumerator serves as an oracle for
desk-sized problems.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

from .htn import (
    AbstractTask,
    DecompositionTrace,
    Plan,
    PlanningError,
    PlanningProblem,
    PrimitiveAction,
    State,
    TaskNetwork,
    TraceChild,
    TraceNode,
    apply_action,
    is_applicable,
)

__all__ = [
    "NoSolution",
    "DepthExceeded",
    "BudgetExceeded",
    "SearchConfig",
    "Solution",
    "plan",
    "exhaustive_optimal",
]


class NoSolution(PlanningError):
    """Every derivation dies on an inapplicable action (or was pruned away)."""


class DepthExceeded(NoSolution):
    """The only unexplored derivations were cut off by the depth guard."""


class BudgetExceeded(PlanningError):
    """The enumeration oracle hit its leaf budget before finishing."""


@dataclass(frozen=True)
class SearchConfig:
    """Search knobs.

    cost_bound is an exclusive initial upper bound: only plans strictly
    cheaper are returned. max_depth guards against runaway recursive methods
    and counts decompositions along one derivation. heuristic, when given,
    must be admissible (never overestimate the remaining cost) or optimality
    is lost. prune=False disables branch-and-bound entirely; it exists so
    pruning soundness can be checked, the answer must not change.
    """

    cost_bound: float | None = None
    max_depth: int = 10_000
    anytime: Callable[[Plan], None] | None = None
    heuristic: Callable[[State], float] | None = None
    prune: bool = True


@dataclass(frozen=True)
class Solution:
    """A plan, the derivation tree that witnesses it, and an optimality flag.

    optimal is True iff the search space was exhausted; it only goes False
    when the depth guard cut branches off.
    """

    plan: Plan
    trace: DecompositionTrace
    optimal: bool


def _build_trace(
    problem: PlanningProblem,
    choices: list[tuple[AbstractTask, int]],
    actions: list[PrimitiveAction],
) -> DecompositionTrace:
    """Rebuild the derivation tree from the pre-order choice record."""
    choice_iter = iter(choices)
    action_iter = iter(actions)

    def grow(entry) -> TraceChild:
        if isinstance(entry, PrimitiveAction):
            return next(action_iter)
        task, index = next(choice_iter)
        candidate = problem.candidates_for(task)[index]
        return TraceNode(task=task, candidate_index=index, children=tuple(grow(e) for e in candidate))

    return DecompositionTrace(roots=tuple(grow(e) for e in problem.initial_network))


def plan(problem: PlanningProblem, config: SearchConfig | None = None) -> Solution:
    """Find a cheapest plan for ``problem``.

    Candidates are explored in declaration order and an incumbent is replaced
    only by a strictly cheaper plan, so ties resolve to the earliest candidate
    combination deterministically. Raises NoSolution when every derivation
    dies, or DepthExceeded when the depth guard is what killed the rest.
    """
    cfg = config or SearchConfig()
    heuristic = cfg.heuristic

    best_cost = cfg.cost_bound if cfg.cost_bound is not None else float("inf")
    best_actions: list[PrimitiveAction] | None = None
    best_states: tuple[State, ...] | None = None
    best_choices: list[tuple[AbstractTask, int]] | None = None
    guard_hit = False

    # Undo logs shared across the explicit DFS stack.
    prefix: list[tuple[PrimitiveAction, State]] = []
    choices: list[tuple[AbstractTask, int]] = []

    EXPAND, CHOICE, UNCHOICE, UNDO = 0, 1, 2, 3
    stack: list[tuple] = [(EXPAND, problem.initial_state, problem.initial_network, 0.0, 0)]

    while stack:
        item = stack.pop()
        tag = item[0]

        if tag == CHOICE:
            choices.append(item[1])
            continue
        if tag == UNCHOICE:
            choices.pop()
            continue
        if tag == UNDO:
            del prefix[item[1] :]
            continue

        _, state, network, cost, depth = item
        mark = len(prefix)
        size = len(network)
        dead = False
        position = 0
        while position < size:
            entry = network[position]
            if not isinstance(entry, PrimitiveAction):
                break
            if not is_applicable(state, entry):
                dead = True
                break
            cost += problem.cost(state, entry)
            state = apply_action(state, entry)
            prefix.append((entry, state))
            position += 1
            if cfg.prune and cost + (heuristic(state) if heuristic else 0.0) >= best_cost:
                dead = True
                break

        if dead:
            del prefix[mark:]
            continue

        if position >= size:
            if cost < best_cost:
                best_cost = cost
                best_actions = [action for action, _ in prefix]
                best_states = (problem.initial_state,) + tuple(s for _, s in prefix)
                best_choices = list(choices)
                if cfg.anytime is not None:
                    cfg.anytime(
                        Plan(actions=tuple(best_actions), state_trace=best_states, total_cost=cost)
                    )
            del prefix[mark:]
            continue

        task = network[position]
        if depth >= cfg.max_depth:
            guard_hit = True
            del prefix[mark:]
            continue

        rest = network[position + 1 :]
        stack.append((UNDO, mark))
        candidates = problem.candidates_for(task)
        for index in range(len(candidates) - 1, -1, -1):
            stack.append((UNCHOICE,))
            stack.append((EXPAND, state, tuple(candidates[index]) + rest, cost, depth + 1))
            stack.append((CHOICE, (task, index)))

    if best_actions is None or best_states is None or best_choices is None:
        if guard_hit:
            raise DepthExceeded("no plan found below the depth guard")
        raise NoSolution("every derivation dies on an inapplicable action or the cost bound")

    found = Plan(actions=tuple(best_actions), state_trace=best_states, total_cost=best_cost)
    trace = _build_trace(problem, best_choices, best_actions)
    return Solution(plan=found, trace=trace, optimal=not guard_hit)


def exhaustive_optimal(problem: PlanningProblem, leaf_budget: int = 10_000_000) -> float:
    """Minimum plan cost by unpruned enumeration of every derivation.

    Intended as an independent oracle for small problems; every terminated
    derivation (dead or complete) counts against ``leaf_budget`` and going
    over raises BudgetExceeded. Raises NoSolution when no derivation yields
    an executable plan.
    """
    leaves = 0
    best: float | None = None

    def spend() -> None:
        nonlocal leaves
        leaves += 1
        if leaves > leaf_budget:
            raise BudgetExceeded(f"derivation tree exceeds {leaf_budget} leaves")

    def walk(state: State, network: TaskNetwork, cost: float) -> None:
        nonlocal best
        while network and isinstance(network[0], PrimitiveAction):
            action = network[0]
            if not is_applicable(state, action):
                spend()
                return
            cost += problem.cost(state, action)
            state = apply_action(state, action)
            network = network[1:]
        if not network:
            spend()
            if best is None or cost < best:
                best = cost
            return
        task = network[0]
        candidates = problem.candidates_for(task)
        if not candidates:
            spend()
            return
        for candidate in candidates:
            walk(state, tuple(candidate) + network[1:], cost)

    walk(problem.initial_state, problem.initial_network, 0.0)
    if best is None:
        raise NoSolution("no derivation yields an executable plan")
    return best
