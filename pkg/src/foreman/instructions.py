"""Instruction planning model layered over construction.

Instruction actions are the speech acts of the guide: ins-block points at a
single cell, ins-object delegates a whole part in one utterance (legal only
once the listener knows that object kind), and the teach bracket wraps a
worked example, with the closing bracket adding the knows fact. Which mix is
cheapest is decided entirely by the cost profile, not by extra control flow.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Callable

from .construction import (
    BLOCK_FACT,
    block_fact,
    build_task,
    construction_methods,
    initial_state,
    put_block,
)
from .htn import (
    AbstractTask,
    Fact,
    Method,
    Plan,
    PlanningProblem,
    PrimitiveAction,
    RegisterUpdate,
    State,
)
from .world import (
    Coord,
    ObjectInstance,
    ObjectKind,
    Scenario,
    all_instances,
    cells,
    parts,
    target_shape,
)

if TYPE_CHECKING:
    from .strategies import CostProfile, Strategy

__all__ = [
    "LASTBLOCK_REGISTER",
    "KNOWS_FACT",
    "INS_BLOCK",
    "INS_OBJECT",
    "INS_TEACH_START",
    "INS_TEACH_END",
    "INSTRUCTION_NAMES",
    "knows_fact",
    "ins_block",
    "ins_object",
    "teach_start",
    "teach_end",
    "instructed_instance",
    "taught_kind",
    "display_name",
    "instruction_methods",
    "build_instruction_problem",
    "instruction_actions",
    "remaining_cells_heuristic",
]

LASTBLOCK_REGISTER = "lastblock"
KNOWS_FACT = "knows"

INS_BLOCK = "ins-block"
INS_OBJECT = "ins-object"
INS_TEACH_START = "ins-teach-start"
INS_TEACH_END = "ins-teach-end"
INSTRUCTION_NAMES = (INS_BLOCK, INS_OBJECT, INS_TEACH_START, INS_TEACH_END)


def knows_fact(kind: ObjectKind) -> Fact:
    return Fact(KNOWS_FACT, (kind.value,))


def ins_block(coord: Coord) -> PrimitiveAction:
    """Tell the follower to place one block; remembers it for adjacency."""
    return PrimitiveAction(
        INS_BLOCK,
        (coord.x, coord.y, coord.z),
        register_update=RegisterUpdate(LASTBLOCK_REGISTER, coord),
    )


def ins_object(instance: ObjectInstance) -> PrimitiveAction:
    """Delegate a whole object; only legal once its kind is known.

    Clears the lastblock register: after an object-level instruction there is
    no previous block the next pointing utterance could lean on.
    """
    return PrimitiveAction(
        INS_OBJECT,
        (instance,),
        positive_pre=frozenset((knows_fact(instance.kind),)),
        register_update=RegisterUpdate(LASTBLOCK_REGISTER, None),
    )


def teach_start(kind: ObjectKind) -> PrimitiveAction:
    return PrimitiveAction(INS_TEACH_START, (kind.value,))


def teach_end(kind: ObjectKind) -> PrimitiveAction:
    return PrimitiveAction(
        INS_TEACH_END, (kind.value,), add_facts=frozenset((knows_fact(kind),))
    )


def instructed_instance(action: PrimitiveAction) -> ObjectInstance:
    return action.args[0]


def taught_kind(action: PrimitiveAction) -> ObjectKind:
    return ObjectKind(action.args[0])


def display_name(action: PrimitiveAction) -> str:
    """Listing name carrying the object kind, e.g. ins-railing."""
    if action.name == INS_OBJECT:
        return f"ins-{instructed_instance(action).kind.value}"
    if action.name in (INS_TEACH_START, INS_TEACH_END):
        return f"{action.name}-{action.args[0]}"
    return action.name


def _ins_build_task(instance: ObjectInstance) -> AbstractTask:
    return AbstractTask("ins-build", (instance,))


def _ins_block_task(coord: Coord) -> AbstractTask:
    return AbstractTask("ins-build-block", (coord.x, coord.y, coord.z))


def instruction_methods(scenario: Scenario) -> tuple[Method, ...]:
    """Methods for instructing each object, plus the construction methods.

    Every non-root object offers three candidates in fixed order: block by
    block (the object's parts, instructed recursively), as one object-level
    utterance followed by silent construction, or as a teach bracket around
    the block-by-block body. Scenario roots are only ever built part by part.
    """
    occupied_at_start = scenario.world.occupied

    def expand_ins_build(task: AbstractTask):
        instance: ObjectInstance = task.args[0]
        body: list = []
        for part in parts(instance):
            if isinstance(part, ObjectInstance):
                body.append(_ins_build_task(part))
            elif part not in occupied_at_start:
                body.append(_ins_block_task(part))
        step_by_step = tuple(body)
        if instance.kind.is_root:
            return (step_by_step,)
        kind = instance.kind
        return (
            step_by_step,
            (ins_object(instance), build_task(instance)),
            (teach_start(kind),) + step_by_step + (teach_end(kind),),
        )

    def expand_ins_block(task: AbstractTask):
        coord = Coord(*task.args)
        return ((ins_block(coord), put_block(coord)),)

    return (
        Method("ins-build", expand_ins_build),
        Method("ins-build-block", expand_ins_block),
    ) + construction_methods(scenario)


def build_instruction_problem(scenario: Scenario, strategy: "Strategy") -> PlanningProblem:
    """The planning problem one strategy induces for one scenario."""
    base = initial_state(scenario)
    knowledge = frozenset(knows_fact(kind) for kind in strategy.initial_knowledge)
    return PlanningProblem(
        methods=instruction_methods(scenario),
        initial_network=(_ins_build_task(scenario.root),),
        initial_state=State(facts=base.facts | knowledge),
        cost=strategy.cost_function(),
    )


def instruction_actions(plan: Plan) -> tuple[PrimitiveAction, ...]:
    """The spoken part of a plan: everything except silent put-block steps."""
    return tuple(a for a in plan.actions if a.name in INSTRUCTION_NAMES)


def remaining_cells_heuristic(
    scenario: Scenario, profile: "CostProfile"
) -> Callable[[State], float]:
    """Lower bound on the remaining instruction cost, from unbuilt cells.

    Every still-empty target cell must be covered by either its own ins-block
    (at least the adjacency rate) or one object-level utterance covering at
    most the largest part, so each cell is worth at least the smaller of the
    two rates. A cell whose block instruction was already uttered (it sits in
    the focus register awaiting its world change) is not charged again.

    The bound is exact at quiescent states, where no uttered instruction is
    still waiting for world changes. Mid-way through an object's block
    placements it can briefly overestimate, since the object was paid for
    up front; with the default profiles the slack is far smaller than any
    real cost difference, but searches that must be provably optimal should
    run without a heuristic (the default).
    """
    total = len(target_shape(scenario))
    largest = max(
        len(cells(instance))
        for instance in all_instances(scenario.root)
        if not instance.kind.is_root
    )
    per_cell = min(profile.block_adjacent, profile.object / largest)
    target = frozenset(target_shape(scenario))

    def bound(state: State) -> float:
        placed = sum(1 for fact in state.facts if fact.name == BLOCK_FACT)
        remaining = max(0, total - placed)
        focus = state.register(LASTBLOCK_REGISTER)
        if remaining and focus in target and block_fact(focus) not in state.facts:
            remaining -= 1
        return per_cell * remaining

    return bound
