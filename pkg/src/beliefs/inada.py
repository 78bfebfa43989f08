import logging

import numpy as np

from src.errors import PreconditionError
from src.families import InadaLimit, UtilityFamily
from src.model import Beliefs, Observation, corner_state

logger = logging.getLogger(__name__)

# relative slack on the expected-utility comparison, keeps the eps = 0 case an equality
EU_RTOL = 1e-12


def inada_limit(family: UtilityFamily) -> InadaLimit:
    """Right limit of marginal utility at zero; infinite for CRRA."""
    return family.inada_limit()


def deviation_bundle(obs: Observation, corner, deviation_state, epsilon):
    """Move epsilon units into deviation_state, paid for out of the corner state."""
    bundle = np.zeros(obs.n_states)
    w = float(obs.demand[corner])
    remaining = w - float(obs.prices[deviation_state] / obs.prices[corner]) * epsilon
    if -1e-12 * max(w, 1.0) < remaining < 0:
        remaining = 0.0
    bundle[corner] = remaining
    bundle[deviation_state] = epsilon
    return bundle


def corner_deviation_test(family: UtilityFamily, beliefs: Beliefs, obs: Observation, deviation_state, epsilons):
    """For each epsilon: does the corner weakly beat the epsilon-deviation toward deviation_state?"""
    corner = corner_state(obs)
    if corner is None:
        raise PreconditionError("observation has no corner state (diversified demand)")
    if deviation_state == corner or not 0 <= deviation_state < obs.n_states:
        raise PreconditionError(f"deviation state {deviation_state + 1} must differ from the corner state")

    pi = np.array(beliefs.as_floats())
    observed = np.array([float(x) for x in obs.demand])
    corner_eu = float(pi @ family.evaluate(observed))

    verdicts = []
    for epsilon in epsilons:
        epsilon = float(epsilon)
        bundle = deviation_bundle(obs, corner, deviation_state, epsilon)
        if epsilon < 0 or bundle[corner] < 0:
            raise PreconditionError(
                f"epsilon {epsilon:g} is infeasible: the deviated bundle leaves the budget"
            )
        deviated_eu = float(pi @ family.evaluate(bundle))
        verdicts.append(corner_eu >= deviated_eu - EU_RTOL * max(1.0, abs(corner_eu)))
    logger.debug("Deviation test for %s at corner %d: %s", family.tag, corner + 1, verdicts)
    return verdicts


def find_violating_epsilon(family, beliefs, obs, deviation_state, smallest=1e-12, points=200):
    """Sweep a log-spaced grid of feasible epsilons; first one where deviating pays, or None."""
    corner = corner_state(obs)
    if corner is None:
        raise PreconditionError("observation has no corner state (diversified demand)")
    largest = float(obs.demand[corner] * obs.prices[corner] / obs.prices[deviation_state])
    if largest <= 0:
        return None
    grid = np.geomspace(min(smallest, largest), largest, points)
    for epsilon, holds in zip(grid, corner_deviation_test(family, beliefs, obs, deviation_state, grid)):
        if not holds:
            return float(epsilon)
    return None
