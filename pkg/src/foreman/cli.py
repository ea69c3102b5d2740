"""Command line entry points.

Scenario files are JSON objects with the shape:

    {
      "name": "bridge" | "mini-bridge" | "house",
      "origin": [x, y, z],
      "orientation": "north" | "east" | "south" | "west",
      "length": int,          // bridge and mini-bridge only
      "width": int,           // bridge and mini-bridge only
      "markers": {"blue": [x, y, z], ...}
    }

Only "name" is required; everything else falls back to the named scenario's
defaults. Cost overrides are KEY=VALUE pairs with keys block, block-adjacent,
object, and teach.

Exit codes: 0 on success, 1 when the requested work fails (no plan, invalid
plan file, unsuccessful simulation), 2 for command line usage errors.
"""

from __future__ import annotations

import json
import os
import sys
import time
from pathlib import Path

import click

from .htn import validate_plan
from .instructions import build_instruction_problem, display_name, instruction_actions
from .planfile import InvalidPlanFile, PlanFile, plan_file
from .realizer import DiscourseState, realize
from .search import DepthExceeded, NoSolution, SearchConfig, exhaustive_optimal
from .search import plan as compute_plan
from .session import FollowerScript, NonTermination, event_log_lines, run_scripted, start_session
from .strategies import CostProfile, UnknownStrategy, default_strategy
from .world import (
    BUILTIN_SCENARIOS,
    Coord,
    InvalidGeometry,
    Scenario,
    builtin_scenario,
    scenario_from_json,
)
from .construction import action_coord
from .instructions import INS_BLOCK, INS_OBJECT

_OVERRIDE_KEYS = {
    "block": "block",
    "block-adjacent": "block_adjacent",
    "blockadjacent": "block_adjacent",
    "object": "object",
    "teach": "teach",
}


def _parse_overrides(pairs: tuple[str, ...]) -> dict[str, float]:
    overrides: dict[str, float] = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        field = _OVERRIDE_KEYS.get(key.strip().lower())
        if not sep or field is None:
            raise click.BadParameter(
                f"expected KEY=VALUE with KEY one of block, block-adjacent, object, teach; got {pair!r}"
            )
        try:
            overrides[field] = float(value)
        except ValueError:
            raise click.BadParameter(f"cost for {key!r} must be a number, got {value!r}")
    return overrides


def _load_scenario(name: str | None, path: str | None) -> Scenario:
    if (name is None) == (path is None):
        raise click.UsageError("give exactly one of --scenario or --scenario-file")
    try:
        if name is not None:
            return builtin_scenario(name)
        document = json.loads(Path(path).read_text(encoding="utf-8"))
        return scenario_from_json(document)
    except (OSError, json.JSONDecodeError, InvalidGeometry, TypeError, ValueError) as exc:
        raise click.ClickException(f"cannot load scenario: {exc}")


def _load_strategy(name: str, overrides: tuple[str, ...]):
    try:
        strategy = default_strategy(name)
    except UnknownStrategy as exc:
        raise click.ClickException(str(exc))
    fields = _parse_overrides(overrides)
    if fields:
        try:
            strategy = strategy.with_profile(strategy.profile.replace(**fields))
        except ValueError as exc:
            raise click.ClickException(f"bad cost profile: {exc}")
    return strategy


def _realized_listing(scenario: Scenario, actions) -> list[tuple[str, str]]:
    """(display name, sentence) per instruction, replaying discourse state."""
    last: Coord | None = None
    rows = []
    for action in actions:
        discourse = DiscourseState(world=scenario.world, last_instructed_block=last)
        rows.append((display_name(action), realize(action, discourse)))
        if action.name == INS_BLOCK:
            last = action_coord(action)
        elif action.name == INS_OBJECT:
            last = None
    return rows


@click.group()
def main() -> None:
    """Plan, validate, simulate, and serve building instructions."""


@main.command("plan")
@click.option("--scenario", "scenario_name", type=click.Choice(sorted(BUILTIN_SCENARIOS)))
@click.option("--scenario-file", type=click.Path(exists=False, dir_okay=False))
@click.option("--strategy", required=True, type=click.Choice(["low-level", "teaching", "high-level"]))
@click.option("--cost-overrides", "overrides", multiple=True, metavar="KEY=VALUE")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the plan file here.")
def plan_command(scenario_name, scenario_file, strategy, overrides, out) -> None:
    """Compute the cheapest instruction plan and print its utterances."""
    scenario = _load_scenario(scenario_name, scenario_file)
    strat = _load_strategy(strategy, overrides)
    problem = build_instruction_problem(scenario, strat)
    started = time.perf_counter()
    try:
        solution = compute_plan(problem, SearchConfig())
    except (NoSolution, DepthExceeded) as exc:
        raise click.ClickException(f"planning failed: {exc}")
    elapsed = time.perf_counter() - started
    actions = instruction_actions(solution.plan)
    for index, (name, sentence) in enumerate(_realized_listing(scenario, actions)):
        click.echo(f"{index + 1:3d}. [{name}] {sentence}")
    click.echo(
        f"total cost {solution.plan.total_cost:g}, {len(actions)} instructions, "
        f"{len(solution.plan.actions)} actions, {elapsed:.3f}s"
        + ("" if solution.optimal else " (search cut off; may be suboptimal)")
    )
    if out:
        Path(out).write_text(plan_file(scenario, strat, solution).to_json() + "\n", encoding="utf-8")
        click.echo(f"plan written to {out}")


@main.command("validate")
@click.option("--plan", "plan_path", required=True, type=click.Path(dir_okay=False))
def validate_command(plan_path) -> None:
    """Check a plan file: executable, rebuilds the target, costs add up."""
    try:
        loaded = PlanFile.from_json(Path(plan_path).read_text(encoding="utf-8"))
    except (OSError, InvalidPlanFile) as exc:
        raise click.ClickException(f"cannot read plan: {exc}")
    try:
        problem = build_instruction_problem(loaded.scenario, loaded.strategy())
        replayed = loaded.to_plan()
    except Exception as exc:
        raise click.ClickException(f"plan does not replay: {exc}")
    report = validate_plan(problem, replayed)
    if not report.ok:
        for message in report.messages:
            click.echo(f"FAIL {message}")
        raise click.ClickException("plan is invalid")
    if abs(report.recomputed_cost - loaded.total_cost) > 1e-9:
        raise click.ClickException(
            f"stored cost {loaded.total_cost} but actions cost {report.recomputed_cost}"
        )
    click.echo(
        f"OK: {len(loaded.actions)} actions, total cost {loaded.total_cost:g}, "
        f"digest {loaded.digest[:12]}"
    )


@main.command("oracle")
@click.option("--scenario", "scenario_name", type=click.Choice(sorted(BUILTIN_SCENARIOS)))
@click.option("--scenario-file", type=click.Path(exists=False, dir_okay=False))
@click.option("--strategy", required=True, type=click.Choice(["low-level", "teaching", "high-level"]))
@click.option("--cost-overrides", "overrides", multiple=True, metavar="KEY=VALUE")
def oracle_command(scenario_name, scenario_file, strategy, overrides) -> None:
    """Exhaustively search for the optimal cost (small scenarios only)."""
    scenario = _load_scenario(scenario_name, scenario_file)
    strat = _load_strategy(strategy, overrides)
    problem = build_instruction_problem(scenario, strat)
    started = time.perf_counter()
    try:
        best_cost = exhaustive_optimal(problem)
    except NoSolution:
        raise click.ClickException("no plan exists for this scenario and strategy")
    elapsed = time.perf_counter() - started
    click.echo(f"optimal cost {best_cost:g} ({elapsed:.3f}s)")


@main.command("simulate")
@click.option("--plan", "plan_path", required=True, type=click.Path(dir_okay=False))
@click.option("--follower", default="perfect", metavar="perfect|permuting|noisy:P")
@click.option("--seed", default=0, type=int, show_default=True)
@click.option("--log", "log_path", type=click.Path(dir_okay=False), help="Write JSONL events here.")
def simulate_command(plan_path, follower, seed, log_path) -> None:
    """Run a scripted follower against a plan and report the session metrics."""
    try:
        loaded = PlanFile.from_json(Path(plan_path).read_text(encoding="utf-8"))
    except (OSError, InvalidPlanFile) as exc:
        raise click.ClickException(f"cannot read plan: {exc}")
    policy, _, rate = follower.partition(":")
    try:
        script = FollowerScript(
            policy=policy, error_rate=float(rate) if rate else 0.0, seed=seed
        )
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--follower")
    try:
        session = start_session(loaded.scenario, loaded.strategy(), loaded.to_plan())
    except Exception as exc:
        raise click.ClickException(f"cannot start session: {exc}")
    try:
        report = run_scripted(session, script)
    except NonTermination as exc:
        raise click.ClickException(str(exc))
    if log_path:
        Path(log_path).write_text(
            "\n".join(event_log_lines(session.events)) + "\n", encoding="utf-8"
        )
    click.echo(
        f"success={report.successful} steps={report.duration_steps:g} "
        f"placements={report.placements} mistakes={report.mistakes} "
        f"injected={report.injected_errors}"
    )
    for label, steps in report.per_object_steps.items():
        click.echo(f"  {label}: {steps:g} steps")
    if not report.successful:
        raise click.ClickException("simulation did not complete the structure")


@main.command("serve")
@click.option("--port", type=int, default=None, help="Defaults to $PORT, then 8000.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--log-dir", type=click.Path(file_okay=False), default=None)
@click.option(
    "--frontend",
    "frontend_dir",
    type=click.Path(file_okay=False),
    default=None,
    help="Directory of static files to serve at /.",
)
def serve_command(port, host, log_dir, frontend_dir) -> None:
    """Serve the session API (and optionally the web client) over HTTP."""
    import uvicorn

    from .server import create_app

    if port is None:
        try:
            port = int(os.environ.get("PORT", "8000"))
        except ValueError:
            raise click.ClickException("PORT environment variable is not a number")
    if frontend_dir is None:
        bundled = Path(__file__).resolve().parent.parent.parent / "frontend" / "dist"
        frontend_dir = str(bundled) if bundled.is_dir() else None
    app = create_app(log_dir=log_dir, frontend_dir=frontend_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    sys.exit(main())
