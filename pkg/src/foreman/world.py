"""Voxel world model: coordinates, occupancy grids, buildable objects, scenarios.

The coordinate frame is x east, y up, z south. Buildable objects are described
by a kind plus anchor geometry; their cell sets and canonical build order
derive from a single parts() decomposition so that planners, validators, and
the interactive session all agree on what goes where.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Mapping, NamedTuple, Union

__all__ = [
    "InvalidGeometry",
    "Coord",
    "FACE_DELTAS",
    "face_adjacent",
    "neighbors",
    "ORIENTATIONS",
    "turned",
    "rotate_offset",
    "place",
    "ObjectKind",
    "NON_ROOT_KINDS",
    "ObjectInstance",
    "parts",
    "cells",
    "endpoints",
    "all_instances",
    "WorldGrid",
    "Scenario",
    "BUILTIN_SCENARIOS",
    "builtin_scenario",
    "target_shape",
    "scenario_from_json",
    "scenario_to_json",
]


class InvalidGeometry(ValueError):
    """A shape, scenario, or override does not describe valid geometry."""


class Coord(NamedTuple):
    x: int
    y: int
    z: int


FACE_DELTAS: tuple[tuple[int, int, int], ...] = (
    (1, 0, 0),
    (-1, 0, 0),
    (0, 1, 0),
    (0, -1, 0),
    (0, 0, 1),
    (0, 0, -1),
)


def face_adjacent(a: Coord, b: Coord) -> bool:
    """True iff the two cells share a face (6-neighborhood)."""
    return abs(a.x - b.x) + abs(a.y - b.y) + abs(a.z - b.z) == 1


def neighbors(c: Coord) -> Iterator[Coord]:
    for dx, dy, dz in FACE_DELTAS:
        yield Coord(c.x + dx, c.y + dy, c.z + dz)


ORIENTATIONS: tuple[str, ...] = ("north", "east", "south", "west")


def turned(orientation: str, quarter_turns: int) -> str:
    return ORIENTATIONS[(ORIENTATIONS.index(orientation) + quarter_turns) % 4]


def rotate_offset(dx: int, dz: int, quarter_turns: int) -> tuple[int, int]:
    """Rotate a ground-plane offset by quarter turns (north -> east -> ...)."""
    for _ in range(quarter_turns % 4):
        dx, dz = -dz, dx
    return dx, dz


def place(origin: Coord, orientation: str, offset: tuple[int, int, int]) -> Coord:
    """Anchor a canonical (north-frame) offset at origin under an orientation."""
    dx, dz = rotate_offset(offset[0], offset[2], ORIENTATIONS.index(orientation))
    return Coord(origin.x + dx, origin.y + offset[1], origin.z + dz)


class ObjectKind(str, Enum):
    ROW = "row"
    FLOOR = "floor"
    WALL = "wall"
    RAILING = "railing"
    BRIDGE = "bridge"
    HOUSE = "house"

    @property
    def is_root(self) -> bool:
        return self in (ObjectKind.BRIDGE, ObjectKind.HOUSE)


NON_ROOT_KINDS: tuple[ObjectKind, ...] = (
    ObjectKind.ROW,
    ObjectKind.FLOOR,
    ObjectKind.WALL,
    ObjectKind.RAILING,
)


@dataclass(frozen=True)
class ObjectInstance:
    """One concrete buildable object, anchored at origin.

    Canonical geometry is described in the north frame and rotated by the
    orientation: a row extends along +z from its origin, a floor spans
    width (+x) by length (+z), a wall is a row stack height tall, a railing
    is a post at each end of an edge plus a handrail row one level above
    (origin sits at the first post), a bridge is a floor one level above its
    origin with railings along both long edges, and a house is four pinwheel
    walls of length 4 and height 2 around a 5x5 footprint plus a flat 4x4
    roof. The house has fixed size; bridges need length and width >= 2.
    """

    kind: ObjectKind
    origin: Coord
    length: int = 1
    width: int = 1
    height: int = 1
    orientation: str = "north"

    @property
    def axis(self) -> str:
        """Ground-plane axis the object's length runs along."""
        return "z" if ORIENTATIONS.index(self.orientation) % 2 == 0 else "x"


Part = Union[ObjectInstance, Coord]

HOUSE_SIDE = 5
HOUSE_WALL_HEIGHT = 2
# Pinwheel: corner offset in the footprint plus extra quarter turns for the
# wall run, chosen so each wall is the previous one rotated a quarter turn.
HOUSE_WALL_ANCHORS: tuple[tuple[tuple[int, int, int], int], ...] = (
    ((0, 1, 0), 3),
    ((HOUSE_SIDE - 1, 1, 0), 0),
    ((HOUSE_SIDE - 1, 1, HOUSE_SIDE - 1), 1),
    ((0, 1, HOUSE_SIDE - 1), 2),
)


def _check(instance: ObjectInstance) -> None:
    if instance.length < 1 or instance.width < 1 or instance.height < 1:
        raise InvalidGeometry(f"non-positive dimensions: {instance}")
    if instance.kind is ObjectKind.BRIDGE and (instance.length < 2 or instance.width < 2):
        raise InvalidGeometry("a bridge needs length >= 2 and width >= 2")


@functools.lru_cache(maxsize=None)
def parts(instance: ObjectInstance) -> tuple[Part, ...]:
    """Ordered sub-parts of an object, fixing the canonical build order.

    Rows decompose straight to coordinates; everything else decomposes to
    sub-objects (floors near-to-far rows, walls bottom-up rows, railings as
    post / handrail row / post, bridges as floor then both railings, houses
    as the four walls then the roof rows front-to-back).
    """
    _check(instance)
    kind = instance.kind
    origin = instance.origin
    orient = instance.orientation

    if kind is ObjectKind.ROW:
        return tuple(place(origin, orient, (0, 0, i)) for i in range(instance.length))

    if kind is ObjectKind.FLOOR:
        return tuple(
            ObjectInstance(
                ObjectKind.ROW,
                place(origin, orient, (i, 0, 0)),
                length=instance.length,
                orientation=orient,
            )
            for i in range(instance.width)
        )

    if kind is ObjectKind.WALL:
        return tuple(
            ObjectInstance(
                ObjectKind.ROW,
                place(origin, orient, (0, level, 0)),
                length=instance.length,
                orientation=orient,
            )
            for level in range(instance.height)
        )

    if kind is ObjectKind.RAILING:
        handrail = ObjectInstance(
            ObjectKind.ROW,
            place(origin, orient, (0, 1, 0)),
            length=instance.length,
            orientation=orient,
        )
        return (origin, handrail, place(origin, orient, (0, 0, instance.length - 1)))

    if kind is ObjectKind.BRIDGE:
        floor = ObjectInstance(
            ObjectKind.FLOOR,
            place(origin, orient, (0, 1, 0)),
            length=instance.length,
            width=instance.width,
            orientation=orient,
        )
        rails = tuple(
            ObjectInstance(
                ObjectKind.RAILING,
                place(origin, orient, (edge, 2, 0)),
                length=instance.length,
                orientation=orient,
            )
            for edge in (0, instance.width - 1)
        )
        return (floor,) + rails

    if kind is ObjectKind.HOUSE:
        walls = tuple(
            ObjectInstance(
                ObjectKind.WALL,
                place(origin, orient, corner),
                length=HOUSE_SIDE - 1,
                height=HOUSE_WALL_HEIGHT,
                orientation=turned(orient, extra),
            )
            for corner, extra in HOUSE_WALL_ANCHORS
        )
        roof = tuple(
            ObjectInstance(
                ObjectKind.ROW,
                place(origin, orient, (0, HOUSE_WALL_HEIGHT + 1, j)),
                length=HOUSE_SIDE - 1,
                orientation=turned(orient, 3),
            )
            for j in range(HOUSE_SIDE - 1)
        )
        return walls + roof

    raise InvalidGeometry(f"unknown object kind: {kind}")


@functools.lru_cache(maxsize=None)
def cells(instance: ObjectInstance) -> frozenset[Coord]:
    """All cells the object occupies when complete."""
    out: set[Coord] = set()
    for part in parts(instance):
        if isinstance(part, ObjectInstance):
            out |= cells(part)
        else:
            out.add(part)
    return frozenset(out)


def endpoints(instance: ObjectInstance) -> tuple[Coord, Coord]:
    """The two anchor cells used when referring to the object as a whole."""
    kind = instance.kind
    if kind is ObjectKind.ROW:
        row = parts(instance)
        return row[0], row[-1]
    if kind is ObjectKind.RAILING:
        post1, _, post2 = parts(instance)
        return post1, post2
    if kind is ObjectKind.FLOOR:
        far = (instance.width - 1, 0, instance.length - 1)
        return instance.origin, place(instance.origin, instance.orientation, far)
    if kind is ObjectKind.WALL:
        far = (0, 0, instance.length - 1)
        return instance.origin, place(instance.origin, instance.orientation, far)
    raise InvalidGeometry(f"{kind.value} objects are never referred to by endpoints")


def all_instances(instance: ObjectInstance) -> Iterator[ObjectInstance]:
    """The object and every sub-object under it, pre-order."""
    yield instance
    for part in parts(instance):
        if isinstance(part, ObjectInstance):
            yield from all_instances(part)


@dataclass(frozen=True)
class WorldGrid:
    """Occupancy snapshot plus colored marker cells (markers are occupied)."""

    occupied: frozenset[Coord] = frozenset()
    markers: tuple[tuple[str, Coord], ...] = ()

    def __post_init__(self) -> None:
        colors = [color for color, _ in self.markers]
        coords = [coord for _, coord in self.markers]
        if len(set(colors)) != len(colors) or len(set(coords)) != len(coords):
            raise InvalidGeometry("marker colors and cells must be unique")
        missing = [c for c in coords if c not in self.occupied]
        if missing:
            raise InvalidGeometry(f"marker cells must be occupied: {missing}")
        # Canonical marker order, so that equal worlds compare equal however
        # their markers were listed, and referring expressions that pick the
        # first applicable marker do so deterministically.
        ordered = tuple(sorted(self.markers, key=lambda m: self._marker_rank(m[0])))
        object.__setattr__(self, "markers", ordered)

    @staticmethod
    def _marker_rank(color: str) -> tuple[int, str]:
        try:
            return (MARKER_COLORS.index(color), color)
        except ValueError:
            return (len(MARKER_COLORS), color)

    @property
    def marker_map(self) -> dict[str, Coord]:
        return dict(self.markers)

    def color_at(self, coord: Coord) -> str | None:
        for color, cell in self.markers:
            if cell == coord:
                return color
        return None


@dataclass(frozen=True)
class Scenario:
    """A named target object, its initial world, and where it sits."""

    name: str
    root: ObjectInstance
    world: WorldGrid

    def __post_init__(self) -> None:
        stray = self.world.occupied - cells(self.root)
        if stray:
            raise InvalidGeometry(f"initially occupied cells outside the target: {sorted(stray)}")

    @property
    def origin(self) -> Coord:
        return self.root.origin

    @property
    def orientation(self) -> str:
        return self.root.orientation

    @property
    def bounding_box(self) -> tuple[Coord, Coord]:
        points = cells(self.root) | self.world.occupied
        xs = [p.x for p in points]
        ys = [p.y for p in points]
        zs = [p.z for p in points]
        return Coord(min(xs), min(ys), min(zs)), Coord(max(xs), max(ys), max(zs))


def target_shape(scenario: Scenario) -> frozenset[Coord]:
    """Every cell the finished structure occupies (markers included)."""
    return cells(scenario.root)


# Marker color order doubles as the deterministic corner naming: origin
# corner, far corner along width, far corner along length, opposite corner.
MARKER_COLORS: tuple[str, ...] = ("blue", "yellow", "red", "black")

BUILTIN_SCENARIOS: tuple[str, ...] = ("bridge", "mini-bridge", "house")


def _corner_markers(
    origin: Coord, orientation: str, width: int, length: int, level: int
) -> tuple[tuple[str, Coord], ...]:
    offsets = (
        (0, level, 0),
        (width - 1, level, 0),
        (0, level, length - 1),
        (width - 1, level, length - 1),
    )
    return tuple(
        (color, place(origin, orientation, offset))
        for color, offset in zip(MARKER_COLORS, offsets)
    )


def builtin_scenario(
    name: str,
    *,
    origin: Coord = Coord(0, 0, 0),
    orientation: str = "north",
    length: int | None = None,
    width: int | None = None,
    markers: Mapping[str, Coord] | None = None,
) -> Scenario:
    """Construct one of the bundled scenarios, optionally resized or re-marked.

    Bridges accept length/width overrides (both >= 2); the house is fixed
    geometry and rejects them. Marker overrides are absolute coordinates and
    must lie inside the target shape.
    """
    if orientation not in ORIENTATIONS:
        raise InvalidGeometry(f"unknown orientation {orientation!r}")
    origin = Coord(*origin)

    if name in ("bridge", "mini-bridge"):
        mini = name == "mini-bridge"
        span = length if length is not None else (3 if mini else 5)
        breadth = width if width is not None else (2 if mini else 3)
        root = ObjectInstance(
            ObjectKind.BRIDGE, origin, length=span, width=breadth, orientation=orientation
        )
        default_markers = _corner_markers(origin, orientation, breadth, span, level=1)
    elif name == "house":
        if length is not None or width is not None:
            raise InvalidGeometry("the house scenario has fixed geometry")
        root = ObjectInstance(ObjectKind.HOUSE, origin, length=HOUSE_SIDE, width=HOUSE_SIDE, orientation=orientation)
        default_markers = _corner_markers(origin, orientation, HOUSE_SIDE, HOUSE_SIDE, level=1)
    else:
        raise InvalidGeometry(f"unknown scenario {name!r} (expected one of {BUILTIN_SCENARIOS})")

    marked = (
        tuple((color, Coord(*coord)) for color, coord in markers.items())
        if markers is not None
        else default_markers
    )
    shape = cells(root)
    outside = [coord for _, coord in marked if coord not in shape]
    if outside:
        raise InvalidGeometry(f"marker cells outside the target shape: {outside}")
    world = WorldGrid(occupied=frozenset(coord for _, coord in marked), markers=marked)
    return Scenario(name=name, root=root, world=world)


def scenario_to_json(scenario: Scenario) -> dict:
    """Scenario definition as a JSON-ready dict (see scenario_from_json)."""
    data: dict = {
        "name": scenario.name,
        "origin": list(scenario.origin),
        "orientation": scenario.orientation,
        "markers": {color: list(coord) for color, coord in scenario.world.markers},
    }
    if scenario.root.kind is ObjectKind.BRIDGE:
        data["length"] = scenario.root.length
        data["width"] = scenario.root.width
    return data


def scenario_from_json(data: Mapping) -> Scenario:
    """Build a scenario from its JSON definition.

    Schema: {"name": one of bridge|mini-bridge|house, "origin": [x, y, z],
    "orientation": north|east|south|west, "length": int?, "width": int?,
    "markers": {color: [x, y, z], ...}?}. Only "name" is required.
    """
    if "name" not in data:
        raise InvalidGeometry('scenario definition needs a "name"')
    unknown = set(data) - {"name", "origin", "orientation", "length", "width", "markers"}
    if unknown:
        raise InvalidGeometry(f"unknown scenario fields: {sorted(unknown)}")
    markers = None
    if "markers" in data:
        markers = {color: Coord(*coord) for color, coord in data["markers"].items()}
    return builtin_scenario(
        data["name"],
        origin=Coord(*data.get("origin", (0, 0, 0))),
        orientation=data.get("orientation", "north"),
        length=data.get("length"),
        width=data.get("width"),
        markers=markers,
    )
