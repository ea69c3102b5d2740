"""Plan files: a canonical JSON form for computed instruction plans.

A plan file pins everything needed to replay or audit a planning run: the
scenario, the strategy and its cost profile, the action sequence with
per-step costs, the total, and a digest of the decomposition tree that
produced it. Serialization is canonical (sorted keys, fixed separators), so
serializing, parsing, and serializing again yields the identical string.

The stored sentence hints are context-free glosses of each action, not the
sentences a session would utter; realized sentences depend on discourse
state and are produced at session time.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .construction import PUT_BLOCK, action_coord, put_block
from .htn import Plan, PrimitiveAction, State, TraceNode, apply_action
from .instructions import (
    INS_BLOCK,
    INS_OBJECT,
    INS_TEACH_END,
    INS_TEACH_START,
    build_instruction_problem,
    ins_block,
    ins_object,
    instructed_instance,
    taught_kind,
    teach_end,
    teach_start,
)
from .realizer import _absolute
from .search import Solution
from .strategies import CostProfile, Strategy, default_strategy
from .world import Coord, ObjectInstance, ObjectKind, Scenario, scenario_from_json, scenario_to_json

__all__ = ["InvalidPlanFile", "PlanFile", "plan_file", "trace_digest"]


class InvalidPlanFile(ValueError):
    """The JSON document is not a well-formed plan file."""


def _canonical(document) -> str:
    return json.dumps(document, sort_keys=True, separators=(",", ":"))


def _instance_json(instance: ObjectInstance) -> dict:
    return {
        "kind": instance.kind.value,
        "origin": {"x": instance.origin.x, "y": instance.origin.y, "z": instance.origin.z},
        "length": instance.length,
        "width": instance.width,
        "height": instance.height,
        "orientation": instance.orientation,
    }


def _instance_from_json(doc: dict) -> ObjectInstance:
    try:
        origin = doc["origin"]
        return ObjectInstance(
            kind=ObjectKind(doc["kind"]),
            origin=Coord(int(origin["x"]), int(origin["y"]), int(origin["z"])),
            length=int(doc["length"]),
            width=int(doc["width"]),
            height=int(doc["height"]),
            orientation=doc["orientation"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidPlanFile(f"bad object instance: {exc}") from exc


def _sentence_hint(action: PrimitiveAction) -> str:
    if action.name == INS_BLOCK:
        return f"Put a block at {_absolute(action_coord(action))}."
    if action.name == PUT_BLOCK:
        return f"A block appears at {_absolute(action_coord(action))}."
    if action.name == INS_OBJECT:
        return f"Build a {instructed_instance(action).kind.value}."
    if action.name == INS_TEACH_START:
        return f"Now I will teach you how to build a {taught_kind(action).value}."
    if action.name == INS_TEACH_END:
        return f"That is how you build a {taught_kind(action).value}."
    raise InvalidPlanFile(f"unknown action {action.name!r}")


def _action_json(action: PrimitiveAction, cost: float) -> dict:
    if action.name in (INS_BLOCK, PUT_BLOCK):
        coord = action_coord(action)
        params = {"x": coord.x, "y": coord.y, "z": coord.z}
    elif action.name == INS_OBJECT:
        params = {"instance": _instance_json(instructed_instance(action))}
    elif action.name in (INS_TEACH_START, INS_TEACH_END):
        params = {"kind": taught_kind(action).value}
    else:
        raise InvalidPlanFile(f"unknown action {action.name!r}")
    return {
        "kind": action.name,
        "params": params,
        "cost": cost,
        "sentenceHint": _sentence_hint(action),
    }


def _action_from_json(doc: dict) -> PrimitiveAction:
    try:
        kind = doc["kind"]
        params = doc["params"]
    except (KeyError, TypeError) as exc:
        raise InvalidPlanFile(f"bad action entry: {exc}") from exc
    if kind in (INS_BLOCK, PUT_BLOCK):
        try:
            coord = Coord(int(params["x"]), int(params["y"]), int(params["z"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidPlanFile(f"bad coordinates for {kind}: {exc}") from exc
        return ins_block(coord) if kind == INS_BLOCK else put_block(coord)
    if kind == INS_OBJECT:
        if "instance" not in params:
            raise InvalidPlanFile("ins-object action lacks an instance")
        return ins_object(_instance_from_json(params["instance"]))
    if kind in (INS_TEACH_START, INS_TEACH_END):
        try:
            taught = ObjectKind(params["kind"])
        except (KeyError, ValueError) as exc:
            raise InvalidPlanFile(f"bad taught kind: {exc}") from exc
        return teach_start(taught) if kind == INS_TEACH_START else teach_end(taught)
    raise InvalidPlanFile(f"unknown action kind {kind!r}")


def _trace_json(node) -> dict:
    if isinstance(node, PrimitiveAction):
        return {"action": {"name": node.name, "args": _task_args_json(node.args)}}
    head = {"name": node.task.name, "args": _task_args_json(node.task.args)}
    return {
        "task": head,
        "candidate": node.candidate_index,
        "children": [_trace_json(child) for child in node.children],
    }


def _task_args_json(args: tuple) -> list:
    out = []
    for arg in args:
        if isinstance(arg, ObjectInstance):
            out.append(_instance_json(arg))
        elif isinstance(arg, Coord):
            out.append({"x": arg.x, "y": arg.y, "z": arg.z})
        else:
            out.append(arg)
    return out


def trace_digest(trace) -> str:
    """Hex sha256 over the canonical JSON form of a decomposition trace."""
    document = [_trace_json(root) for root in trace.roots]
    return hashlib.sha256(_canonical(document).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class PlanFile:
    """A plan plus the context it was computed in, ready for JSON."""

    scenario: Scenario
    strategy_name: str
    profile: CostProfile
    actions: tuple[PrimitiveAction, ...]
    costs: tuple[float, ...]
    total_cost: float
    digest: str

    def to_json(self) -> str:
        document = {
            "scenario": scenario_to_json(self.scenario),
            "strategy": self.strategy_name,
            "costProfile": {
                "block": self.profile.block,
                "blockAdjacent": self.profile.block_adjacent,
                "object": self.profile.object,
                "teach": self.profile.teach,
            },
            "actions": [
                _action_json(action, cost) for action, cost in zip(self.actions, self.costs)
            ],
            "totalCost": self.total_cost,
            "traceDigest": self.digest,
        }
        return _canonical(document)

    @classmethod
    def from_json(cls, text: str) -> "PlanFile":
        try:
            document = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidPlanFile(f"not valid JSON: {exc}") from exc
        if not isinstance(document, dict):
            raise InvalidPlanFile("plan file must be a JSON object")
        expected = {"scenario", "strategy", "costProfile", "actions", "totalCost", "traceDigest"}
        missing = expected - document.keys()
        extra = document.keys() - expected
        if missing:
            raise InvalidPlanFile(f"missing fields: {sorted(missing)}")
        if extra:
            raise InvalidPlanFile(f"unknown fields: {sorted(extra)}")
        try:
            scenario = scenario_from_json(document["scenario"])
        except (TypeError, ValueError) as exc:
            raise InvalidPlanFile(f"bad scenario: {exc}") from exc
        profile_doc = document["costProfile"]
        try:
            profile = CostProfile(
                block=float(profile_doc["block"]),
                block_adjacent=float(profile_doc["blockAdjacent"]),
                object=float(profile_doc["object"]),
                teach=float(profile_doc["teach"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidPlanFile(f"bad cost profile: {exc}") from exc
        entries = document["actions"]
        if not isinstance(entries, list):
            raise InvalidPlanFile("actions must be a list")
        actions = tuple(_action_from_json(entry) for entry in entries)
        try:
            costs = tuple(float(entry["cost"]) for entry in entries)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidPlanFile(f"bad action cost: {exc}") from exc
        return cls(
            scenario=scenario,
            strategy_name=document["strategy"],
            profile=profile,
            actions=actions,
            costs=costs,
            total_cost=float(document["totalCost"]),
            digest=document["traceDigest"],
        )

    def strategy(self) -> Strategy:
        """The strategy this plan was computed under, profile included."""
        return default_strategy(self.strategy_name).with_profile(self.profile)

    def to_plan(self) -> Plan:
        """Rebuild a replayable Plan by executing the actions from scratch."""
        problem = build_instruction_problem(self.scenario, self.strategy())
        state = problem.initial_state
        trace: list[State] = [state]
        for action in self.actions:
            state = apply_action(state, action)
            trace.append(state)
        return Plan(actions=self.actions, state_trace=tuple(trace), total_cost=self.total_cost)


def plan_file(scenario: Scenario, strategy: Strategy, solution: Solution) -> PlanFile:
    """Package a solved planning run as a PlanFile."""
    plan = solution.plan
    costs = []
    cost_fn = strategy.cost_function()
    for state, action in zip(plan.state_trace, plan.actions):
        costs.append(cost_fn(state, action))
    return PlanFile(
        scenario=scenario,
        strategy_name=strategy.name,
        profile=strategy.profile,
        actions=plan.actions,
        costs=tuple(costs),
        total_cost=plan.total_cost,
        digest=trace_digest(solution.trace),
    )
