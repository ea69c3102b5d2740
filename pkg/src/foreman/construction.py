"""Construction planning model: block facts, put-block steps, build tasks.

The world state is one block(x, y, z) fact per occupied cell. put-block
actions carry no precondition: the task hierarchy only ever schedules them
for free, reachable cells, so executability never constrains construction.
Every build task has exactly one candidate decomposition, which is what
makes the build order canonical.
"""

from __future__ import annotations

from .htn import (
    AbstractTask,
    Fact,
    Method,
    PlanningProblem,
    PrimitiveAction,
    State,
)
from .world import Coord, ObjectInstance, ObjectKind, Scenario, parts

__all__ = [
    "BLOCK_FACT",
    "PUT_BLOCK",
    "block_fact",
    "put_block",
    "action_coord",
    "build_task",
    "construction_methods",
    "zero_cost",
    "initial_state",
    "build_construction_problem",
]

BLOCK_FACT = "block"
PUT_BLOCK = "put-block"


def block_fact(coord: Coord) -> Fact:
    return Fact(BLOCK_FACT, (coord.x, coord.y, coord.z))


def put_block(coord: Coord) -> PrimitiveAction:
    return PrimitiveAction(
        PUT_BLOCK, (coord.x, coord.y, coord.z), add_facts=frozenset((block_fact(coord),))
    )


def action_coord(action: PrimitiveAction) -> Coord:
    """The cell a put-block or ins-block action talks about."""
    x, y, z = action.args
    return Coord(x, y, z)


def build_task(instance: ObjectInstance) -> AbstractTask:
    return AbstractTask(f"build-{instance.kind.value}", (instance,))


def construction_methods(scenario: Scenario) -> tuple[Method, ...]:
    """One single-candidate method per build task kind.

    Cells that are occupied before the session starts (the marker corners)
    are skipped, so a fully pre-occupied row decomposes to the empty network.
    """
    occupied_at_start = scenario.world.occupied

    def expand(task: AbstractTask):
        instance: ObjectInstance = task.args[0]
        body: list = []
        for part in parts(instance):
            if isinstance(part, ObjectInstance):
                body.append(build_task(part))
            elif part not in occupied_at_start:
                body.append(put_block(part))
        return (tuple(body),)

    return tuple(Method(f"build-{kind.value}", expand) for kind in ObjectKind)


def zero_cost(state: State, action: PrimitiveAction) -> float:
    return 0.0


def initial_state(scenario: Scenario) -> State:
    return State(facts=frozenset(block_fact(c) for c in scenario.world.occupied))


def build_construction_problem(scenario: Scenario) -> PlanningProblem:
    """Pure construction: decompose the root object into its put-block order."""
    return PlanningProblem(
        methods=construction_methods(scenario),
        initial_network=(build_task(scenario.root),),
        initial_state=initial_state(scenario),
        cost=zero_cost,
    )
