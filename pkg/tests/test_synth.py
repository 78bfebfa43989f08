"""Tests for synthetic agents and dataset generation."""

from fractions import Fraction

import pytest

from helpers import random_beliefs
from src.axioms import check_garp, check_sarseu
from src.beliefs import check_belief_compatibility, find_beliefs
from src.errors import DatasetValidationError, PreconditionError
from src.families import CARA, CRRA, ConvexQuadratic, Hyperbolic, Linear
from src.model import corner_state, make_beliefs, wealth
from src.synth import agent_demand, generate_dataset, random_corner_budgets


class TestAgentDemand:
    def test_linear_picks_the_dominant_corner(self, example_beliefs):
        assert agent_demand(Linear(), example_beliefs, (1, 4), 100) == (Fraction(100), Fraction(0))

    def test_linear_ties_go_to_the_first_state(self):
        assert agent_demand(Linear(), make_beliefs("1/2,1/2"), (1, 1), 10) == (Fraction(10), Fraction(0))

    def test_convex_quadratic_is_a_vertex(self):
        bundle = agent_demand(ConvexQuadratic(epsilon=0.1), make_beliefs("1/2,1/2"), (1, 2), 10)

        assert bundle == (Fraction(10), Fraction(0))

    def test_crra_is_interior(self):
        bundle = agent_demand(CRRA(alpha=0.5), make_beliefs("1/2,1/2"), (1, 1), 10)

        assert bundle == (Fraction(5), Fraction(5))

    def test_crra_closed_form(self, example_beliefs):
        bundle = agent_demand(CRRA(alpha=0.5), example_beliefs, (1, 4), 100)

        assert bundle == (Fraction(400, 13), Fraction(225, 13))

    def test_crra_spends_exactly_the_wealth(self):
        prices = (Fraction(3), Fraction(7), Fraction(2))
        bundle = agent_demand(CRRA(alpha=0.3), make_beliefs("1/5,1/2,3/10"), prices, 17)

        assert sum(p * x for p, x in zip(prices, bundle)) == 17
        assert all(x > 0 for x in bundle)

    def test_cara_interior(self):
        assert agent_demand(CARA(beta=1.0), make_beliefs("1/2,1/2"), (1, 1), 10) == (Fraction(5), Fraction(5))

    def test_cara_inside_its_region_stays_at_the_corner(self, example_beliefs):
        assert agent_demand(CARA(beta=0.002), example_beliefs, (1, 4), 100) == (Fraction(100), Fraction(0))

    def test_grid_fallback(self):
        bundle = agent_demand(Hyperbolic(gamma=0.1), make_beliefs("1/2,1/2"), (1, 1), 10, grid_points=10)

        assert bundle == (Fraction(5), Fraction(5))

    def test_single_state(self):
        assert agent_demand(CARA(beta=1.0), make_beliefs("1"), (4,), 10) == (Fraction(5, 2),)

    def test_nonpositive_wealth_rejected(self, example_beliefs):
        with pytest.raises(PreconditionError):
            agent_demand(Linear(), example_beliefs, (1, 1), 0)


class TestGenerateDataset:
    def test_budgets_become_observations(self, example_beliefs):
        data = generate_dataset(Linear(), example_beliefs, [((1, 4), 100), ((4, 1), 80)], states=["rain", "sun"])

        assert data.states == ("rain", "sun")
        assert data.observations[0].demand == (Fraction(100), Fraction(0))
        assert data.observations[1].demand == (Fraction(0), Fraction(80))

    def test_empty_budget_list(self, example_beliefs):
        with pytest.raises(DatasetValidationError, match="at least one observation"):
            generate_dataset(Linear(), example_beliefs, [])

    def test_random_corner_budgets_dominate(self, rng):
        beliefs = make_beliefs("1/5,3/10,1/2")

        def dominates(prices, corner):
            return all(
                beliefs[corner] * price > beliefs[state] * prices[corner]
                for state, price in enumerate(prices)
                if state != corner
            )

        for prices, budget in random_corner_budgets(beliefs, 20, rng):
            assert budget > 0
            assert any(dominates(prices, s) for s, p in enumerate(prices) if p == 1)


class TestRoundTrip:
    def test_linear_agents_pass_every_check(self, rng):
        for _ in range(50):
            n_states = int(rng.integers(2, 4))
            beliefs = random_beliefs(rng, n_states)
            data = generate_dataset(Linear(), beliefs, random_corner_budgets(beliefs, 4, rng))

            assert all(corner_state(obs) is not None for obs in data.observations)
            assert check_garp(data).is_consistent
            assert check_sarseu(data).is_consistent
            assert find_beliefs(data).feasible
            assert check_belief_compatibility(data, beliefs, strict=True).passes

    def test_crra_agents_never_choose_corners(self, rng):
        for _ in range(50):
            n_states = int(rng.integers(2, 4))
            beliefs = random_beliefs(rng, n_states)
            budgets = [
                ([int(p) for p in rng.integers(1, 6, size=n_states)], int(rng.integers(1, 100))) for _ in range(3)
            ]
            data = generate_dataset(CRRA(alpha=float(rng.uniform(0.1, 0.6))), beliefs, budgets)

            for obs in data.observations:
                assert corner_state(obs) is None
                assert all(x > 0 for x in obs.demand)
            assert [wealth(obs) for obs in data.observations] == [b for _, b in budgets]

    def test_cara_agents_pass_garp(self, rng):
        for _ in range(30):
            beliefs = random_beliefs(rng, 2)
            budgets = [
                ([int(p) for p in rng.integers(1, 6, size=2)], int(rng.integers(1, 100))) for _ in range(5)
            ]
            data = generate_dataset(CARA(beta=float(rng.uniform(0.01, 1.0))), beliefs, budgets)

            assert check_garp(data).is_consistent
