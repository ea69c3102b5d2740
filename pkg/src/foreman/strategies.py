"""Cost profiles and instruction strategies.

A strategy is nothing but an initial knowledge assumption plus four prices:
pointing at a block, pointing at a block right next to the previous one,
delegating a whole object, and each half of a teach bracket. Low-level
guidance prices object talk out of the market, high-level guidance assumes
the listener already knows every part kind, and the teaching strategy makes
demonstrations cheap enough to pay off exactly when a kind recurs.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from functools import partial

from .construction import action_coord
from .htn import CostFunction, PrimitiveAction, State
from .instructions import (
    INS_BLOCK,
    INS_OBJECT,
    INS_TEACH_END,
    INS_TEACH_START,
    LASTBLOCK_REGISTER,
)
from .world import NON_ROOT_KINDS, ObjectKind, face_adjacent

__all__ = [
    "UnknownStrategy",
    "CostProfile",
    "cost_of",
    "Strategy",
    "STRATEGY_NAMES",
    "default_strategy",
]


class UnknownStrategy(ValueError):
    """No bundled strategy goes by that name."""


@dataclass(frozen=True)
class CostProfile:
    """Per-action prices; construction steps themselves are free."""

    block: float = 10.0
    block_adjacent: float = 5.0
    object: float = 2.0
    teach: float = 1.0

    def __post_init__(self) -> None:
        for name in ("block", "block_adjacent", "object", "teach"):
            if getattr(self, name) < 0:
                raise ValueError(f"negative cost {name}")
        if self.block_adjacent > self.block:
            raise ValueError("the adjacency discount cannot exceed the base block cost")

    def scaled(self, factor: float) -> "CostProfile":
        return CostProfile(
            block=self.block * factor,
            block_adjacent=self.block_adjacent * factor,
            object=self.object * factor,
            teach=self.teach * factor,
        )

    def replace(self, **overrides: float) -> "CostProfile":
        return dataclasses.replace(self, **overrides)


def cost_of(profile: CostProfile, state: State, action: PrimitiveAction) -> float:
    """Price of one action in its application state.

    A block instruction gets the discount iff the target cell shares a face
    with the previously instructed block (the lastblock register); everything
    non-verbal is free.
    """
    name = action.name
    if name == INS_BLOCK:
        last = state.register(LASTBLOCK_REGISTER)
        if last is not None and face_adjacent(last, action_coord(action)):
            return profile.block_adjacent
        return profile.block
    if name == INS_OBJECT:
        return profile.object
    if name in (INS_TEACH_START, INS_TEACH_END):
        return profile.teach
    return 0.0


@dataclass(frozen=True)
class Strategy:
    """Initial knowledge plus the prices that shape the optimal plan."""

    name: str
    initial_knowledge: frozenset[ObjectKind]
    profile: CostProfile

    def cost_function(self) -> CostFunction:
        return partial(cost_of, self.profile)

    def with_profile(self, profile: CostProfile) -> "Strategy":
        return dataclasses.replace(self, profile=profile)


STRATEGY_NAMES: tuple[str, ...] = ("low-level", "teaching", "high-level")

# Prohibitively expensive object talk forces block-by-block guidance.
_PROHIBITIVE = 1000.0


def default_strategy(name: str) -> Strategy:
    """One of the bundled strategies by name."""
    if name == "low-level":
        return Strategy(
            name=name,
            initial_knowledge=frozenset(),
            profile=CostProfile(object=_PROHIBITIVE, teach=_PROHIBITIVE),
        )
    if name == "teaching":
        return Strategy(name=name, initial_knowledge=frozenset(), profile=CostProfile())
    if name == "high-level":
        return Strategy(
            name=name,
            initial_knowledge=frozenset(NON_ROOT_KINDS),
            profile=CostProfile(),
        )
    raise UnknownStrategy(f"unknown strategy {name!r} (expected one of {STRATEGY_NAMES})")
