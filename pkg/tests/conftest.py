"""Shared fixtures: every scenario/strategy pair solved once per test run."""

from __future__ import annotations

import time
from dataclasses import dataclass

import pytest

from foreman import (
    PlanningProblem,
    Scenario,
    SearchConfig,
    Solution,
    Strategy,
    build_instruction_problem,
    builtin_scenario,
    default_strategy,
)
from foreman.search import plan as compute_plan

SCENARIO_NAMES = ("mini-bridge", "bridge", "house")
STRATEGY_NAMES = ("low-level", "teaching", "high-level")


@dataclass(frozen=True)
class SolvedCase:
    scenario: Scenario
    strategy: Strategy
    problem: PlanningProblem
    solution: Solution
    seconds: float


@pytest.fixture(scope="session")
def solved() -> dict[tuple[str, str], SolvedCase]:
    cases = {}
    for scenario_name in SCENARIO_NAMES:
        scenario = builtin_scenario(scenario_name)
        for strategy_name in STRATEGY_NAMES:
            strategy = default_strategy(strategy_name)
            problem = build_instruction_problem(scenario, strategy)
            started = time.perf_counter()
            solution = compute_plan(problem, SearchConfig())
            seconds = time.perf_counter() - started
            cases[scenario_name, strategy_name] = SolvedCase(
                scenario, strategy, problem, solution, seconds
            )
    return cases
