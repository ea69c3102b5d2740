"""Interactive guidance sessions: issue instructions, watch placements, recover.

One session walks a precomputed instruction plan against a live follower. The
current instruction opens a scope (the cells it asks for), placements inside
the scope are accepted in any order, and a placement outside it is a mistake:
the guide requests removal of exactly that block and then returns to the
original plan. Removing a block that was correctly placed gets a replacement
request instead. Teach utterances carry no scope and advance by themselves.

Event log and wire traffic are separate streams: SessionEvents record what
happened (for metrics and JSONL logs), outbox messages are what a client
renders (instruction text, feedback banners, world snapshots).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Mapping

from .construction import PUT_BLOCK, action_coord
from .htn import Plan, validate_plan
from .instructions import (
    INS_BLOCK,
    INS_OBJECT,
    INS_TEACH_END,
    INS_TEACH_START,
    build_instruction_problem,
    display_name,
    instructed_instance,
    instruction_actions,
    taught_kind,
)
from .realizer import DiscourseState, greeting, realize, realize_feedback
from .strategies import Strategy
from .world import Coord, Scenario, cells, neighbors, target_shape

__all__ = [
    "SessionTerminated",
    "InvalidPlan",
    "NonTermination",
    "SessionEvent",
    "Metrics",
    "Session",
    "FollowerScript",
    "start_session",
    "handle_event",
    "run_scripted",
    "metrics",
    "event_log_lines",
]


class SessionTerminated(RuntimeError):
    """An event arrived after the session already ended."""


class InvalidPlan(ValueError):
    """The supplied plan does not validate against the scenario and strategy."""


class NonTermination(RuntimeError):
    """A scripted follower exceeded its event budget without finishing."""


CORRECT_TEXT = "Correct!"
REPEAT_REMOVAL_TEXT = "Please remove the incorrect block first."
TIMEOUT_TEXT = "Time is up. Thank you for building with me!"


@dataclass(frozen=True)
class SessionEvent:
    """One timestamped log entry; payload is JSON-ready."""

    ts: float
    kind: str
    payload: dict


@dataclass(frozen=True)
class Metrics:
    """Aggregates of one finished (or abandoned) session."""

    successful: bool
    duration_steps: float
    mistakes: int
    per_object_steps: dict[str, float]
    placements: int
    injected_errors: int = 0


def _coord_payload(coord: Coord) -> dict:
    return {"x": coord.x, "y": coord.y, "z": coord.z}


def _object_labels(queue: tuple) -> dict[int, str]:
    """Human label per scoped instruction: 'floor', 'railing 2', 'block 7'."""
    kind_totals: dict[str, int] = {}
    block_total = 0
    for action in queue:
        if action.name == INS_OBJECT:
            kind = instructed_instance(action).kind.value
            kind_totals[kind] = kind_totals.get(kind, 0) + 1
        elif action.name == INS_BLOCK:
            block_total += 1
    labels: dict[int, str] = {}
    kind_seen: dict[str, int] = {}
    block_seen = 0
    for index, action in enumerate(queue):
        if action.name == INS_OBJECT:
            kind = instructed_instance(action).kind.value
            kind_seen[kind] = kind_seen.get(kind, 0) + 1
            labels[index] = kind if kind_totals[kind] == 1 else f"{kind} {kind_seen[kind]}"
        elif action.name == INS_BLOCK:
            block_seen += 1
            labels[index] = f"block {block_seen}" if block_total > 1 else "block"
    return labels


class Session:
    """Live state of one guidance episode.

    The constructor validates the plan, emits the opening world snapshot, and
    issues the greeting plus the first instruction. Placements and removals
    come in through handle_place / handle_remove, which return the wire
    messages produced by that event.
    """

    def __init__(
        self,
        scenario: Scenario,
        strategy: Strategy,
        solution,
        *,
        clock: Callable[[], float] | None = None,
        max_events: int | None = None,
        max_seconds: float | None = None,
        validate: bool = True,
    ) -> None:
        plan: Plan = getattr(solution, "plan", solution)
        trace = getattr(solution, "trace", None)
        if validate:
            problem = build_instruction_problem(scenario, strategy)
            report = validate_plan(problem, plan, trace)
            if not report.executable or report.derivable is False:
                raise InvalidPlan("; ".join(report.messages) or "plan failed validation")
            if abs(report.recomputed_cost - plan.total_cost) > 1e-9:
                raise InvalidPlan(
                    f"plan cost {plan.total_cost} but recomputed {report.recomputed_cost}"
                )
        built = set(scenario.world.occupied)
        for action in plan.actions:
            if action.name == PUT_BLOCK:
                built.add(action_coord(action))
        if built != set(target_shape(scenario)):
            raise InvalidPlan("plan does not build exactly the target shape")

        self.scenario = scenario
        self.strategy = strategy
        self.plan = plan
        self.queue = instruction_actions(plan)
        self.cursor = 0
        self.scope: set[Coord] = set()
        self.occupied: set[Coord] = set(scenario.world.occupied)
        self.target = frozenset(target_shape(scenario))
        self.pending_removal: Coord | None = None
        self.mistakes = 0
        self.terminated = False
        self.succeeded = False
        self.events: list[SessionEvent] = []
        self.outbox: list[dict] = []

        self._strays: set[Coord] = set()
        self._labels = _object_labels(self.queue)
        self._issue_ts: dict[int, float] = {}
        self._timings: dict[str, float] = {}
        self._last_instructed: Coord | None = None
        self._clock = clock
        self._tick = 0
        self._max_events = max_events
        self._max_seconds = max_seconds
        self._handled = 0
        self._started = self._now()

        self._send_world()
        self._advance(greet=True)

    # -- time and bookkeeping -------------------------------------------------

    def _now(self) -> float:
        return self._clock() if self._clock is not None else float(self._tick)

    def _log(self, kind: str, payload: dict | None = None) -> None:
        self.events.append(SessionEvent(ts=self._now(), kind=kind, payload=payload or {}))
        self._tick += 1

    def _send(self, message: dict) -> None:
        self.outbox.append(message)

    def _send_world(self) -> None:
        blocks = [
            {**_coord_payload(c), "color": self.scenario.world.color_at(c) or "none"}
            for c in sorted(self.occupied)
        ]
        self._send({"type": "world", "blocks": blocks})

    def _send_feedback(self, kind: str, text: str) -> None:
        self._send({"type": "feedback", "kind": kind, "text": text})

    # -- instruction flow ------------------------------------------------------

    def _discourse(self) -> DiscourseState:
        return DiscourseState(
            world=self.scenario.world, last_instructed_block=self._last_instructed
        )

    def _issue(self, greet: bool = False) -> None:
        action = self.queue[self.cursor]
        text = realize(action, self._discourse())
        if greet:
            text = f"{greeting(self.scenario)} {text}"
        if action.name == INS_BLOCK:
            self._last_instructed = action_coord(action)
        elif action.name == INS_OBJECT:
            self._last_instructed = None
        self._issue_ts.setdefault(self.cursor, self._now())
        self._log(
            "instruction-issued",
            {"index": self.cursor, "action": display_name(action), "text": text},
        )
        self._send({"type": "instruction", "id": self.cursor, "text": text})

    def _scope_of(self, action) -> set[Coord]:
        if action.name == INS_BLOCK:
            wanted = {action_coord(action)}
        else:
            wanted = set(cells(instructed_instance(action)))
        return wanted - self.occupied

    def _advance(self, greet: bool = False) -> None:
        """Issue instructions until one opens a scope, then wait for blocks."""
        while self.cursor < len(self.queue):
            action = self.queue[self.cursor]
            if action.name in (INS_TEACH_START, INS_TEACH_END):
                self._issue(greet)
                greet = False
                self.cursor += 1
                continue
            self._issue(greet)
            greet = False
            scope = self._scope_of(action)
            if scope:
                self.scope = scope
                return
            self._finish_instruction(final=self.cursor + 1 >= len(self.queue))
        self._terminal_check()

    def _terminal_check(self) -> None:
        if self.occupied == self.target:
            self._succeed()
        else:
            self._promote_stray()

    def _finish_instruction(self, final: bool) -> None:
        label = self._labels.get(self.cursor)
        duration = self._now() - self._issue_ts[self.cursor]
        if label is not None:
            self._timings[label] = duration
        self._log("object-complete", {"index": self.cursor, "label": label, "steps": duration})
        if not final:
            self._send_feedback("object-complete", realize_feedback("object-complete"))
        self.cursor += 1

    def _succeed(self) -> None:
        self._log("success", {"mistakes": self.mistakes})
        self._send_feedback("success", realize_feedback("all-done"))
        self.terminated = True
        self.succeeded = True

    def _promote_stray(self) -> None:
        if not self._strays:
            raise RuntimeError("world diverged from target with nothing left to remove")
        coord = min(self._strays)
        self._strays.discard(coord)
        self.pending_removal = coord
        self._log("removal-requested", _coord_payload(coord))
        self._send_feedback("remove", realize_feedback("wrong-block-remove"))

    def _timed_out(self) -> bool:
        if self._max_events is not None and self._handled > self._max_events:
            return True
        if self._max_seconds is not None and self._now() - self._started > self._max_seconds:
            return True
        return False

    def _precheck(self) -> bool:
        """True when the event must not be processed (already timed out)."""
        if self.terminated:
            raise SessionTerminated("the session is over")
        self._handled += 1
        if self._timed_out():
            self._log("timeout", {})
            self._send_feedback("timeout", TIMEOUT_TEXT)
            self.terminated = True
            return True
        return False

    # -- follower events -------------------------------------------------------

    def handle_place(self, coord: Coord) -> list[dict]:
        """A block appeared; returns the wire messages this event produced."""
        mark = len(self.outbox)
        if self._precheck():
            return self.outbox[mark:]
        coord = Coord(*coord)
        if coord in self.occupied:
            return self.outbox[mark:]
        self.occupied.add(coord)
        self._log("block-placed", _coord_payload(coord))
        self._send_world()
        if self.pending_removal is not None:
            self.mistakes += 1
            self._strays.add(coord)
            self._log("mistake", _coord_payload(coord))
            self._log("removal-requested", _coord_payload(self.pending_removal))
            self._send_feedback("mistake", REPEAT_REMOVAL_TEXT)
        elif coord in self.scope:
            self.scope.discard(coord)
            if self.scope:
                self._send_feedback("correct", CORRECT_TEXT)
            elif self.cursor >= len(self.queue):
                # Replacement of a correct block torn out after the last
                # instruction completed; nothing is left to issue.
                self._terminal_check()
            else:
                self._finish_instruction(final=self.cursor + 1 >= len(self.queue))
                self._advance()
        else:
            self.mistakes += 1
            self.pending_removal = coord
            self._log("mistake", _coord_payload(coord))
            self._log("removal-requested", _coord_payload(coord))
            self._send_feedback("mistake", realize_feedback("wrong-block-remove"))
        return self.outbox[mark:]

    def handle_remove(self, coord: Coord) -> list[dict]:
        """A block disappeared; returns the wire messages this event produced."""
        mark = len(self.outbox)
        if self._precheck():
            return self.outbox[mark:]
        coord = Coord(*coord)
        if coord not in self.occupied:
            return self.outbox[mark:]
        self.occupied.discard(coord)
        self._log("block-removed", _coord_payload(coord))
        self._send_world()
        if coord == self.pending_removal:
            self.pending_removal = None
            if self._strays:
                self._promote_stray()
            elif self.cursor < len(self.queue):
                self._issue()
            elif self.scope:
                pass  # waiting for a torn-out correct block to come back
            else:
                self._terminal_check()
        elif coord in self._strays:
            self._strays.discard(coord)
        elif coord in self.target:
            # A correctly placed cell (marker corners included) was torn out;
            # it re-enters the current scope so progress cannot be lost.
            self.scope.add(coord)
            self._send_feedback("replace", realize_feedback("replace-removed"))
        return self.outbox[mark:]


def start_session(
    scenario: Scenario,
    strategy: Strategy,
    solution,
    *,
    clock: Callable[[], float] | None = None,
    max_events: int | None = None,
    max_seconds: float | None = None,
    validate: bool = True,
) -> Session:
    """Validate the plan and open a session with the first instruction issued."""
    return Session(
        scenario,
        strategy,
        solution,
        clock=clock,
        max_events=max_events,
        max_seconds=max_seconds,
        validate=validate,
    )


def handle_event(session: Session, event: Mapping) -> list[dict]:
    """Dispatch one wire event ({"type": "place"|"remove", "x", "y", "z"})."""
    try:
        kind = event["type"]
        coord = Coord(int(event["x"]), int(event["y"]), int(event["z"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed event: {exc}") from exc
    if kind == "place":
        return session.handle_place(coord)
    if kind == "remove":
        return session.handle_remove(coord)
    raise ValueError(f"unknown event type {kind!r}")


@dataclass(frozen=True)
class FollowerScript:
    """Scripted follower policy.

    perfect places every scoped cell in deterministic order; permuting places
    them in seeded random order; noisy flips a seeded coin before each correct
    placement and with probability error_rate first places a wrong adjacent
    block (then complies with the removal request).
    """

    policy: str = "perfect"
    error_rate: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.policy not in ("perfect", "permuting", "noisy"):
            raise ValueError(f"unknown follower policy {self.policy!r}")
        if not 0.0 <= self.error_rate <= 1.0:
            raise ValueError("error_rate must be within [0, 1]")


def _wrong_cell_near(intended: Coord, session: Session, rng: random.Random) -> Coord:
    candidates = sorted(
        c for c in neighbors(intended) if c not in session.occupied and c not in session.scope
    )
    if candidates:
        return rng.choice(candidates)
    lift = 2
    while True:
        above = Coord(intended.x, intended.y + lift, intended.z)
        if above not in session.occupied and above not in session.scope:
            return above
        lift += 1


def run_scripted(session: Session, script: FollowerScript, max_events: int = 1_000_000) -> Metrics:
    """Drive a session with a scripted follower until it terminates."""
    rng = random.Random(script.seed)
    injected = 0
    owed_correct: Coord | None = None
    steps = 0
    while not session.terminated:
        steps += 1
        if steps > max_events:
            raise NonTermination(f"follower did not finish within {max_events} events")
        if session.pending_removal is not None:
            session.handle_remove(session.pending_removal)
            continue
        if owed_correct is not None:
            coord, owed_correct = owed_correct, None
            session.handle_place(coord)
            continue
        if not session.scope:
            raise NonTermination("session stalled without scope or pending removal")
        ordered = sorted(session.scope)
        intended = rng.choice(ordered) if script.policy == "permuting" else ordered[0]
        if script.policy == "noisy" and rng.random() < script.error_rate:
            injected += 1
            owed_correct = intended
            session.handle_place(_wrong_cell_near(intended, session, rng))
            continue
        session.handle_place(intended)
    return replace(metrics(session), injected_errors=injected)


def metrics(session: Session) -> Metrics:
    """Aggregate a session's event log."""
    events = session.events
    duration = events[-1].ts - events[0].ts if len(events) > 1 else 0.0
    placements = sum(1 for e in events if e.kind == "block-placed")
    return Metrics(
        successful=session.succeeded,
        duration_steps=duration,
        mistakes=session.mistakes,
        per_object_steps=dict(session._timings),
        placements=placements,
    )


def event_log_lines(events: Iterable[SessionEvent]) -> Iterable[str]:
    """Serialize events as JSONL lines: {"ts", "kind", "payload"}."""
    for event in events:
        yield json.dumps(
            {"ts": event.ts, "kind": event.kind, "payload": event.payload}, sort_keys=True
        )
