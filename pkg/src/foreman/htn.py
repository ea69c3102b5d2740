"""Totally ordered hierarchical task network planning core.

A state is a finite set of ground facts plus a small register bank. Primitive
actions carry conjunctive preconditions (positive and negated literals) and
add/delete effects. Abstract tasks are rewritten into task sequences by
decomposition methods, and a plan is witnessed by the derivation tree that
produced it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterator, Sequence, Union

__all__ = [
    "PlanningError",
    "PreconditionViolation",
    "NotAbstract",
    "Fact",
    "State",
    "RegisterUpdate",
    "PrimitiveAction",
    "AbstractTask",
    "Task",
    "TaskNetwork",
    "CostFunction",
    "Method",
    "PlanningProblem",
    "Plan",
    "TraceNode",
    "DecompositionTrace",
    "ValidationReport",
    "is_applicable",
    "apply_action",
    "decompose",
    "validate_plan",
]


class PlanningError(Exception):
    """Base class for planning faults."""


class PreconditionViolation(PlanningError):
    """An action was applied in a state that does not satisfy its precondition."""


class NotAbstract(PlanningError):
    """Decomposition was attempted at a position holding a primitive action."""


@dataclass(frozen=True)
class Fact:
    """A ground propositional state feature, e.g. ``block(0, 1, 2)``."""

    name: str
    args: tuple[Hashable, ...] = ()

    def __repr__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({', '.join(repr(a) for a in self.args)})"


@dataclass(frozen=True)
class State:
    """The set of facts that currently hold, plus named scalar registers.

    Registers live outside the fact set: they never take part in precondition
    checks and exist only so cost functions can see bookkeeping such as the
    most recently mentioned coordinate. An absent register reads as None.
    """

    facts: frozenset[Fact] = frozenset()
    registers: tuple[tuple[str, Hashable], ...] = ()

    def register(self, name: str) -> Hashable | None:
        for key, value in self.registers:
            if key == name:
                return value
        return None

    def __contains__(self, fact: Fact) -> bool:
        return fact in self.facts


@dataclass(frozen=True)
class RegisterUpdate:
    """Register assignment performed when an action is applied.

    A value of None clears the slot.
    """

    name: str
    value: Hashable | None


@dataclass(frozen=True)
class PrimitiveAction:
    """An executable step: conjunctive precondition, add/delete effects."""

    name: str
    args: tuple[Hashable, ...] = ()
    positive_pre: frozenset[Fact] = frozenset()
    negative_pre: frozenset[Fact] = frozenset()
    add_facts: frozenset[Fact] = frozenset()
    del_facts: frozenset[Fact] = frozenset()
    register_update: RegisterUpdate | None = None

    def __post_init__(self) -> None:
        overlap = self.add_facts & self.del_facts
        if overlap:
            raise ValueError(f"add and delete effects overlap: {sorted(map(repr, overlap))}")

    def __repr__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({', '.join(repr(a) for a in self.args)})"


@dataclass(frozen=True)
class AbstractTask:
    """A task that must be decomposed before it can run."""

    name: str
    args: tuple[Hashable, ...] = ()

    def __repr__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({', '.join(repr(a) for a in self.args)})"


Task = Union[AbstractTask, PrimitiveAction]

# A totally ordered task sequence; the empty network is valid and solved.
TaskNetwork = tuple[Task, ...]

# cost(state, action) evaluated in the state the action is applied in.
CostFunction = Callable[[State, PrimitiveAction], float]


@dataclass(frozen=True)
class Method:
    """Rewrite rule producing candidate task sequences for one task name.

    ``expand`` sees only the task instance, never the state, so decomposition
    legality stays purely syntactic; executability is settled later by action
    preconditions. Candidate order is the tie-break order used by search.
    """

    task_name: str
    expand: Callable[[AbstractTask], Sequence[TaskNetwork]]


@dataclass(frozen=True)
class PlanningProblem:
    """Methods, the initial task network, the initial state, and a cost model."""

    methods: tuple[Method, ...]
    initial_network: TaskNetwork
    initial_state: State
    cost: CostFunction

    def candidates_for(self, task: AbstractTask) -> tuple[TaskNetwork, ...]:
        """All candidate decompositions of ``task`` in declaration order."""
        found = False
        candidates: list[TaskNetwork] = []
        for method in self.methods:
            if method.task_name == task.name:
                found = True
                candidates.extend(tuple(c) for c in method.expand(task))
        if not found:
            raise PlanningError(f"no method declared for abstract task {task.name!r}")
        return tuple(candidates)


@dataclass(frozen=True)
class Plan:
    """A primitive action sequence with its state trace and summed cost.

    state_trace[0] is the initial state and state_trace[i + 1] the state after
    actions[i]; total_cost sums the per-action costs evaluated along the trace.
    """

    actions: tuple[PrimitiveAction, ...]
    state_trace: tuple[State, ...]
    total_cost: float


TraceChild = Union["TraceNode", PrimitiveAction]


@dataclass(frozen=True)
class TraceNode:
    """Internal derivation node: an abstract task and the candidate chosen."""

    task: AbstractTask
    candidate_index: int
    children: tuple[TraceChild, ...]


@dataclass(frozen=True)
class DecompositionTrace:
    """Derivation tree: how the initial network rewrote into the plan.

    Roots align one to one with the initial network; the left-to-right leaf
    frontier is exactly the plan's action sequence.
    """

    roots: tuple[TraceChild, ...]

    def leaf_actions(self) -> Iterator[PrimitiveAction]:
        def walk(node: TraceChild) -> Iterator[PrimitiveAction]:
            if isinstance(node, PrimitiveAction):
                yield node
            else:
                for child in node.children:
                    yield from walk(child)

        for root in self.roots:
            yield from walk(root)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of checking a plan against a problem (and optionally a trace)."""

    executable: bool
    derivable: bool | None
    recomputed_cost: float
    messages: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.executable and self.derivable is not False


def is_applicable(state: State, action: PrimitiveAction) -> bool:
    """True iff every positive literal holds and no negated literal does."""
    return action.positive_pre <= state.facts and not (action.negative_pre & state.facts)


def _write_register(
    registers: tuple[tuple[str, Hashable], ...], update: RegisterUpdate
) -> tuple[tuple[str, Hashable], ...]:
    kept = tuple(item for item in registers if item[0] != update.name)
    if update.value is None:
        return kept
    return tuple(sorted(kept + ((update.name, update.value),)))


def apply_action(state: State, action: PrimitiveAction) -> State:
    """Successor state: (facts minus deletes) union adds, then register write."""
    if not is_applicable(state, action):
        missing = action.positive_pre - state.facts
        present = action.negative_pre & state.facts
        raise PreconditionViolation(
            f"{action!r} inapplicable: missing {sorted(map(repr, missing))}, "
            f"forbidden {sorted(map(repr, present))}"
        )
    facts = (state.facts - action.del_facts) | action.add_facts
    registers = state.registers
    if action.register_update is not None:
        registers = _write_register(registers, action.register_update)
    return State(facts=facts, registers=registers)


def decompose(network: TaskNetwork, index: int, candidate: TaskNetwork) -> TaskNetwork:
    """Replace the abstract task at ``index`` by ``candidate`` in place."""
    entry = network[index]
    if not isinstance(entry, AbstractTask):
        raise NotAbstract(f"network position {index} holds primitive {entry!r}")
    return network[:index] + tuple(candidate) + network[index + 1 :]


def _check_trace(
    problem: PlanningProblem, plan: Plan, trace: DecompositionTrace
) -> tuple[bool, list[str]]:
    messages: list[str] = []

    if len(trace.roots) != len(problem.initial_network):
        return False, [
            f"trace has {len(trace.roots)} roots, initial network has "
            f"{len(problem.initial_network)} entries"
        ]

    def matches(child: TraceChild, entry: Task) -> bool:
        if isinstance(entry, PrimitiveAction):
            return isinstance(child, PrimitiveAction) and child == entry
        return isinstance(child, TraceNode) and child.task == entry

    def walk(node: TraceChild) -> bool:
        if isinstance(node, PrimitiveAction):
            return True
        try:
            candidates = problem.candidates_for(node.task)
        except PlanningError as exc:
            messages.append(str(exc))
            return False
        if not 0 <= node.candidate_index < len(candidates):
            messages.append(
                f"{node.task!r} chose candidate {node.candidate_index} of {len(candidates)}"
            )
            return False
        chosen = candidates[node.candidate_index]
        if len(node.children) != len(chosen) or not all(
            matches(child, entry) for child, entry in zip(node.children, chosen)
        ):
            messages.append(f"children of {node.task!r} do not match its chosen candidate")
            return False
        return all(walk(child) for child in node.children if isinstance(child, TraceNode))

    for root, entry in zip(trace.roots, problem.initial_network):
        if not matches(root, entry):
            messages.append(f"trace root {root!r} does not match network entry {entry!r}")
            return False, messages
    if not all(walk(root) for root in trace.roots):
        return False, messages

    frontier = tuple(trace.leaf_actions())
    if frontier != plan.actions:
        messages.append("trace leaf frontier differs from the plan's action sequence")
        return False, messages
    return True, messages


def validate_plan(
    problem: PlanningProblem, plan: Plan, trace: DecompositionTrace | None = None
) -> ValidationReport:
    """Replay a plan from the initial state and optionally audit its derivation.

    Executability means no precondition is violated along the way; the cost is
    recomputed independently of plan.total_cost. When a trace is supplied,
    derivability additionally requires that every internal node used a declared
    method candidate and that the leaf frontier equals the action sequence.
    """
    messages: list[str] = []
    executable = True
    cost = 0.0
    state = problem.initial_state
    for position, action in enumerate(plan.actions):
        if not is_applicable(state, action):
            executable = False
            messages.append(f"action {position} ({action!r}) violates its precondition")
            break
        cost += problem.cost(state, action)
        state = apply_action(state, action)

    derivable: bool | None = None
    if trace is not None:
        derivable, trace_messages = _check_trace(problem, plan, trace)
        messages.extend(trace_messages)

    return ValidationReport(
        executable=executable,
        derivable=derivable,
        recomputed_cost=cost,
        messages=tuple(messages),
    )
