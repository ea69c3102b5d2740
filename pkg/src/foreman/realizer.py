"""Template realization of instruction actions into English sentences.

Block references prefer a relation to the previously instructed block, then a
relation to a colored marker block, then an absolute cell address; object
references anchor both endpoints the same way. Directions are fixed compass
words (x east, z south), not viewer-relative, and every template is invertible
so a generated reference can be resolved back to exactly its coordinate.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .construction import PUT_BLOCK, action_coord
from .htn import PrimitiveAction
from .instructions import (
    INS_BLOCK,
    INS_OBJECT,
    INS_TEACH_END,
    INS_TEACH_START,
    instructed_instance,
    taught_kind,
)
from .world import Coord, ObjectKind, Scenario, WorldGrid, endpoints, face_adjacent

__all__ = [
    "UnrealizableAction",
    "DiscourseState",
    "ReferringExpression",
    "FEEDBACK_KINDS",
    "realize",
    "realize_feedback",
    "greeting",
    "object_reference",
    "resolve_instruction",
    "resolve_reference",
]


class UnrealizableAction(ValueError):
    """The action has no surface template (e.g. silent put-block steps)."""


@dataclass(frozen=True)
class DiscourseState:
    """What the realizer may lean on: the previous block, markers, taught kinds."""

    world: WorldGrid
    last_instructed_block: Coord | None = None
    taught_kinds: frozenset[ObjectKind] = frozenset()


@dataclass(frozen=True)
class ReferringExpression:
    """A generated reference and the single cell it denotes."""

    text: str
    denotation: Coord


_DIRECTION_PHRASES: tuple[tuple[tuple[int, int, int], str], ...] = (
    ((0, 1, 0), "on top of"),
    ((0, -1, 0), "underneath"),
    ((0, 0, 1), "in front of"),
    ((0, 0, -1), "behind"),
    ((1, 0, 0), "to the right of"),
    ((-1, 0, 0), "to the left of"),
)

_PHRASE_TO_DELTA = {phrase: delta for delta, phrase in _DIRECTION_PHRASES}
_DIRECTION_ALTERNATION = "|".join(phrase for _, phrase in _DIRECTION_PHRASES)


def _delta_phrase(anchor: Coord, target: Coord) -> str | None:
    delta = (target.x - anchor.x, target.y - anchor.y, target.z - anchor.z)
    for candidate, phrase in _DIRECTION_PHRASES:
        if delta == candidate:
            return phrase
    return None


def _absolute(coord: Coord) -> str:
    return f"column {coord.x}, row {coord.z}, height {coord.y}"


def _block_sentence(coord: Coord, discourse: DiscourseState) -> str:
    previous = discourse.last_instructed_block
    if previous is not None:
        phrase = _delta_phrase(previous, coord)
        if phrase is not None:
            return f"Put a block {phrase} the previous block."
    for color, marker in discourse.world.markers:
        phrase = _delta_phrase(marker, coord)
        if phrase is not None:
            return f"Put a block {phrase} the {color} block."
    return f"Put a block at {_absolute(coord)}."


def object_reference(coord: Coord, discourse: DiscourseState) -> ReferringExpression:
    """Noun phrase for a cell, anchored to a marker when one is adjacent."""
    for color, marker in discourse.world.markers:
        if coord == marker:
            return ReferringExpression(f"the {color} block", coord)
    for color, marker in discourse.world.markers:
        if coord == Coord(marker.x, marker.y + 1, marker.z):
            return ReferringExpression(f"the top of the {color} block", coord)
    for color, marker in discourse.world.markers:
        phrase = _delta_phrase(marker, coord)
        if phrase is not None:
            return ReferringExpression(f"the cell {phrase} the {color} block", coord)
    return ReferringExpression(f"the cell at {_absolute(coord)}", coord)


def realize(action: PrimitiveAction, discourse: DiscourseState) -> str:
    """The sentence the guide says for one instruction action."""
    if action.name == INS_BLOCK:
        return _block_sentence(action_coord(action), discourse)
    if action.name == INS_OBJECT:
        instance = instructed_instance(action)
        first, last = endpoints(instance)
        return (
            f"Build a {instance.kind.value} from "
            f"{object_reference(first, discourse).text} to "
            f"{object_reference(last, discourse).text}."
        )
    if action.name == INS_TEACH_START:
        return f"Now I will teach you how to build a {taught_kind(action).value}."
    if action.name == INS_TEACH_END:
        return f"That is how you build a {taught_kind(action).value}."
    if action.name == PUT_BLOCK:
        raise UnrealizableAction("put-block steps are silent")
    raise UnrealizableAction(f"no template for action {action.name!r}")


_FEEDBACK_TEMPLATES = {
    "wrong-block-remove": "That block is not correct. Please remove it.",
    "replace-removed": "That block was correct. Please put it back.",
    "object-complete": "Great, that part is done.",
    "all-done": "Perfect! The structure is complete. Thank you!",
}

FEEDBACK_KINDS: tuple[str, ...] = tuple(_FEEDBACK_TEMPLATES)


def realize_feedback(kind: str) -> str:
    if kind not in _FEEDBACK_TEMPLATES:
        raise UnrealizableAction(f"no feedback template {kind!r}")
    return _FEEDBACK_TEMPLATES[kind]


def greeting(scenario: Scenario) -> str:
    noun = scenario.name.replace("-", " ")
    return f"Welcome! I will try to instruct you to build a {noun}."


_PUT_RELATIVE = re.compile(
    rf"^Put a block ({_DIRECTION_ALTERNATION}) the ([a-z]+) block\.$"
)
_PUT_ABSOLUTE = re.compile(r"^Put a block at column (-?\d+), row (-?\d+), height (-?\d+)\.$")
_BUILD_OBJECT = re.compile(r"^Build a ([a-z]+) from (.+)\.$")
_REF_MARKER = re.compile(r"^the ([a-z]+) block$")
_REF_TOP = re.compile(r"^the top of the ([a-z]+) block$")
_REF_RELATIVE = re.compile(rf"^the cell ({_DIRECTION_ALTERNATION}) the ([a-z]+) block$")
_REF_ABSOLUTE = re.compile(r"^the cell at column (-?\d+), row (-?\d+), height (-?\d+)$")


def _shift(anchor: Coord, phrase: str) -> Coord:
    dx, dy, dz = _PHRASE_TO_DELTA[phrase]
    return Coord(anchor.x + dx, anchor.y + dy, anchor.z + dz)


def resolve_instruction(
    text: str, discourse: DiscourseState
) -> Coord | tuple[Coord, Coord] | None:
    """Invert an instruction sentence: a cell for block instructions, an
    endpoint pair for object instructions, None when nothing matches."""
    match = _PUT_RELATIVE.match(text)
    if match:
        phrase, anchor_name = match.groups()
        if anchor_name == "previous":
            if discourse.last_instructed_block is None:
                return None
            return _shift(discourse.last_instructed_block, phrase)
        marker = discourse.world.marker_map.get(anchor_name)
        return _shift(marker, phrase) if marker is not None else None
    match = _PUT_ABSOLUTE.match(text)
    if match:
        x, z, y = (int(g) for g in match.groups())
        return Coord(x, y, z)
    match = _BUILD_OBJECT.match(text)
    if match:
        # Endpoint phrases may themselves contain " to ", so try every split
        # of the span; the template grammar makes at most one work.
        span = match.group(2)
        pieces = span.split(" to ")
        for cut in range(1, len(pieces)):
            first = resolve_reference(" to ".join(pieces[:cut]), discourse)
            second = resolve_reference(" to ".join(pieces[cut:]), discourse)
            if first is not None and second is not None:
                return (first, second)
    return None


def resolve_reference(text: str, discourse: DiscourseState) -> Coord | None:
    """Invert an object endpoint reference back to its cell."""
    markers = discourse.world.marker_map
    match = _REF_MARKER.match(text)
    if match:
        return markers.get(match.group(1))
    match = _REF_TOP.match(text)
    if match:
        marker = markers.get(match.group(1))
        return Coord(marker.x, marker.y + 1, marker.z) if marker is not None else None
    match = _REF_RELATIVE.match(text)
    if match:
        phrase, color = match.groups()
        marker = markers.get(color)
        return _shift(marker, phrase) if marker is not None else None
    match = _REF_ABSOLUTE.match(text)
    if match:
        x, z, y = (int(g) for g in match.groups())
        return Coord(x, y, z)
    return None
