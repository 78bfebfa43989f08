import logging
import math
from fractions import Fraction

import numpy as np
from tqdm import tqdm

from src.config import load_settings
from src.errors import DatasetValidationError, PreconditionError
from src.families import CARA, CRRA, ConvexQuadratic, Linear, UtilityFamily
from src.model import Beliefs, Dataset, make_dataset, parse_rational
from src.verify import grid_best

logger = logging.getLogger(__name__)

# closed-form demands are snapped to rationals with denominators up to this bound
SNAP_DENOMINATOR = 10**9


def _snap(value):
    snapped = Fraction(value).limit_denominator(SNAP_DENOMINATOR)
    if value > 0 and snapped <= 0:
        return Fraction(value)
    return max(snapped, Fraction(0))


def _close_budget(prices, wealth, head):
    """Exact bundle on the budget: head for the first states, the rest in the last one."""
    spent = sum((p * x for p, x in zip(prices, head)), Fraction(0))
    last = (wealth - spent) / prices[-1]
    if last < 0:
        # snapping overshot the budget
        head = list(head)
        head[-1] += last * prices[-1] / prices[len(head) - 1]
        last = Fraction(0)
    return tuple(head) + (last,)


def _vertex(prices, wealth, state):
    return tuple(wealth / p if s == state else Fraction(0) for s, p in enumerate(prices))


def _best_vertex(values):
    # lowest state index wins ties
    best = 0
    for state, value in enumerate(values):
        if value > values[best]:
            best = state
    return best


def _linear_demand(beliefs, prices, wealth):
    values = [beliefs[s] * wealth / p for s, p in enumerate(prices)]
    return _vertex(prices, wealth, _best_vertex(values))


def _convex_quadratic_demand(family, beliefs, prices, wealth):
    epsilon = Fraction(family.epsilon)
    values = []
    for s, p in enumerate(prices):
        x = wealth / p
        values.append(beliefs[s] * (x + epsilon * x * x))
    return _vertex(prices, wealth, _best_vertex(values))


def _cara_two_state_demand(family, beliefs, prices, wealth):
    # equal marginal utility per unit of money: x_1 - x_2 = ln(pi_1 p_2 / (pi_2 p_1)) / beta
    p1, p2 = (float(p) for p in prices)
    pi1, pi2 = beliefs.as_floats()
    spread = math.log(pi1 * p2 / (pi2 * p1)) / family.beta
    second = (float(wealth) - p1 * spread) / (p1 + p2)
    first = second + spread
    if second <= 0:
        return _vertex(prices, wealth, 0)
    if first <= 0:
        return _vertex(prices, wealth, 1)
    return _close_budget(prices, wealth, [_snap(first)])


def _crra_demand(family, beliefs, prices, wealth):
    # x_s proportional to (pi_s / p_s) ** (1 / (1 - alpha))
    power = 1.0 / (1.0 - family.alpha)
    weights = np.array([(float(pi) / float(p)) ** power for pi, p in zip(beliefs.probabilities, prices)])
    spend = float(wealth) / float(np.dot(weights, [float(p) for p in prices]))
    bundle = weights * spend
    return _close_budget(prices, wealth, [_snap(x) for x in bundle[:-1]])


def agent_demand(family: UtilityFamily, beliefs: Beliefs, prices, wealth, grid_points=None):
    """Expected-utility maximising bundle on the budget, as exact rationals."""
    prices = tuple(parse_rational(p) for p in prices)
    wealth = parse_rational(wealth)
    if any(p <= 0 for p in prices):
        raise PreconditionError("prices must be strictly positive")
    if wealth <= 0:
        raise PreconditionError(f"wealth must be positive, got {wealth}")
    if len(beliefs) != len(prices):
        raise PreconditionError("beliefs and prices disagree on the number of states")
    if len(prices) == 1:
        return (wealth / prices[0],)

    if isinstance(family, Linear):
        return _linear_demand(beliefs, prices, wealth)
    if isinstance(family, ConvexQuadratic):
        return _convex_quadratic_demand(family, beliefs, prices, wealth)
    if isinstance(family, CRRA):
        return _crra_demand(family, beliefs, prices, wealth)
    if isinstance(family, CARA) and len(prices) == 2:
        return _cara_two_state_demand(family, beliefs, prices, wealth)

    if grid_points is None:
        settings = load_settings()
        grid_points = settings.synth_grid if len(prices) == 2 else settings.grid_points(len(prices))
    best = grid_best(family, beliefs, prices, wealth, grid_points)
    return tuple(Fraction(share, best.grid_points) * wealth / p for share, p in zip(best.shares, prices))


def generate_dataset(family: UtilityFamily, beliefs: Beliefs, budgets, states=None, grid_points=None) -> Dataset:
    """Dataset of (prices, agent demand) pairs, one per (prices, wealth) budget."""
    budgets = list(budgets)
    if not budgets:
        raise DatasetValidationError("dataset needs at least one observation; the budget list is empty")
    pairs = []
    for prices, budget_wealth in tqdm(budgets, desc="Generating demands", disable=not load_settings().progress):
        prices = [parse_rational(p) for p in prices]
        pairs.append((prices, agent_demand(family, beliefs, prices, budget_wealth, grid_points)))
    data = make_dataset(pairs, states)
    logger.info("Generated %d observations from a %s agent.", data.n_observations, family.tag)
    return data


def random_corner_budgets(beliefs: Beliefs, n_budgets, rng: np.random.Generator):
    """Budgets on which a Linear agent's chosen corner strictly ratio-dominates every other state.

    The corner state s gets price 1 and every other state o gets
    (pi_o / pi_s) * (1 + m) with a random margin m in [0.1, 3).
    """
    budgets = []
    n_states = len(beliefs)
    for _ in range(n_budgets):
        corner = int(rng.integers(n_states))
        prices = []
        for state in range(n_states):
            if state == corner:
                prices.append(Fraction(1))
            else:
                margin = Fraction(int(rng.integers(10, 300)), 100)
                prices.append(beliefs[state] / beliefs[corner] * (1 + margin))
        budgets.append((prices, Fraction(int(rng.integers(1, 200)))))
    return budgets
