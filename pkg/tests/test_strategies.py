"""Cost profiles and instruction-giving strategies."""

import pytest

from foreman.htn import State
from foreman.instructions import (
    KNOWS_FACT,
    LASTBLOCK_REGISTER,
    ins_block,
    ins_object,
    knows_fact,
    teach_end,
    teach_start,
)
from foreman.construction import put_block
from foreman.strategies import (
    CostProfile,
    STRATEGY_NAMES,
    Strategy,
    UnknownStrategy,
    cost_of,
    default_strategy,
)
from foreman.world import Coord, NON_ROOT_KINDS, ObjectInstance, ObjectKind


class TestCostProfile:
    def test_defaults(self):
        profile = CostProfile()
        assert (profile.block, profile.block_adjacent, profile.object, profile.teach) == (
            10.0,
            5.0,
            2.0,
            1.0,
        )

    def test_rejects_negative_costs(self):
        with pytest.raises(ValueError):
            CostProfile(block=-1.0)

    def test_rejects_adjacent_dearer_than_block(self):
        with pytest.raises(ValueError):
            CostProfile(block=5.0, block_adjacent=6.0)

    def test_scaled_multiplies_uniformly(self):
        scaled = CostProfile().scaled(3.0)
        assert (scaled.block, scaled.block_adjacent, scaled.object, scaled.teach) == (
            30.0,
            15.0,
            6.0,
            3.0,
        )

    def test_replace_overrides_fields(self):
        replaced = CostProfile().replace(object=7.0)
        assert replaced.object == 7.0 and replaced.block == 10.0


ROW = ObjectInstance(ObjectKind.ROW, Coord(0, 1, 0), length=3)


class TestCostOf:
    def setup_method(self):
        self.profile = CostProfile()

    def test_first_block_costs_full(self):
        assert cost_of(self.profile, State(), ins_block(Coord(0, 1, 0))) == 10.0

    def test_adjacent_block_is_discounted(self):
        state = State(registers=((LASTBLOCK_REGISTER, Coord(0, 1, 0)),))
        assert cost_of(self.profile, state, ins_block(Coord(0, 1, 1))) == 5.0

    def test_non_adjacent_block_costs_full(self):
        state = State(registers=((LASTBLOCK_REGISTER, Coord(0, 1, 0)),))
        assert cost_of(self.profile, state, ins_block(Coord(0, 1, 2))) == 10.0

    def test_object_and_teach_costs(self):
        state = State(facts=frozenset({knows_fact(ObjectKind.ROW)}))
        assert cost_of(self.profile, state, ins_object(ROW)) == 2.0
        assert cost_of(self.profile, State(), teach_start(ObjectKind.ROW)) == 1.0
        assert cost_of(self.profile, State(), teach_end(ObjectKind.ROW)) == 1.0

    def test_world_changes_are_free(self):
        assert cost_of(self.profile, State(), put_block(Coord(0, 0, 0))) == 0.0


class TestStrategies:
    def test_three_strategies_declared(self):
        assert STRATEGY_NAMES == ("low-level", "teaching", "high-level")

    def test_unknown_name_rejected(self):
        with pytest.raises(UnknownStrategy):
            default_strategy("telepathy")

    def test_low_level_makes_structuring_prohibitive(self):
        low = default_strategy("low-level")
        assert low.initial_knowledge == frozenset()
        assert low.profile.object >= 100.0 and low.profile.teach >= 100.0
        assert (low.profile.block, low.profile.block_adjacent) == (10.0, 5.0)

    def test_teaching_starts_ignorant_with_cheap_teaching(self):
        teaching = default_strategy("teaching")
        assert teaching.initial_knowledge == frozenset()
        assert (teaching.profile.object, teaching.profile.teach) == (2.0, 1.0)

    def test_high_level_knows_every_non_root_kind(self):
        high = default_strategy("high-level")
        assert high.initial_knowledge == frozenset(NON_ROOT_KINDS)
        assert (high.profile.object, high.profile.teach) == (2.0, 1.0)

    def test_with_profile_keeps_name_and_knowledge(self):
        high = default_strategy("high-level")
        tweaked = high.with_profile(high.profile.replace(block=12.0))
        assert tweaked.name == high.name
        assert tweaked.initial_knowledge == high.initial_knowledge
        assert tweaked.profile.block == 12.0

    def test_cost_function_closes_over_profile(self):
        strategy = Strategy(
            name="custom", initial_knowledge=frozenset(), profile=CostProfile().scaled(2.0)
        )
        fn = strategy.cost_function()
        assert fn(State(), ins_block(Coord(0, 0, 0))) == 20.0

    def test_scale_invariance_of_relative_costs(self):
        profile = CostProfile()
        scaled = profile.scaled(3.0)
        state = State(registers=((LASTBLOCK_REGISTER, Coord(0, 1, 0)),))
        near = ins_block(Coord(0, 1, 1))
        far = ins_block(Coord(5, 5, 5))
        assert cost_of(scaled, state, near) * 2 == cost_of(scaled, state, far)
        assert cost_of(scaled, state, near) == 3 * cost_of(profile, state, near)
