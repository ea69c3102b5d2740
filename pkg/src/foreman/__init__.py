"""Instruction-giving engine for voxel construction.

Plans how to explain a building task at different abstraction levels (block
by block, object by object, or by teaching new object kinds on the fly) and
drives an interactive session that watches a follower build, catches
mistakes, and talks them back on track.
"""

from .htn import (
    AbstractTask,
    DecompositionTrace,
    Fact,
    Method,
    NotAbstract,
    Plan,
    PlanningError,
    PlanningProblem,
    PreconditionViolation,
    PrimitiveAction,
    RegisterUpdate,
    State,
    TaskNetwork,
    TraceNode,
    ValidationReport,
    apply_action,
    decompose,
    is_applicable,
    validate_plan,
)
from .search import (
    BudgetExceeded,
    DepthExceeded,
    NoSolution,
    SearchConfig,
    Solution,
    exhaustive_optimal,
    plan,
)
from .world import (
    BUILTIN_SCENARIOS,
    Coord,
    InvalidGeometry,
    ObjectInstance,
    ObjectKind,
    Scenario,
    WorldGrid,
    builtin_scenario,
    cells,
    face_adjacent,
    scenario_from_json,
    scenario_to_json,
    target_shape,
)
from .construction import build_construction_problem, put_block
from .instructions import (
    build_instruction_problem,
    display_name,
    instruction_actions,
    remaining_cells_heuristic,
)
from .strategies import (
    STRATEGY_NAMES,
    CostProfile,
    Strategy,
    UnknownStrategy,
    cost_of,
    default_strategy,
)

__version__ = "0.1.0"
