import logging
import math
from dataclasses import dataclass

import numpy as np

from src.config import load_settings
from src.errors import PreconditionError
from src.families import UtilityFamily
from src.model import Beliefs, parse_rational

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridPoint:
    """Best lattice point of a budget face; shares[s] / grid_points of wealth goes to state s."""

    bundle: tuple[float, ...]
    expected_utility: float
    shares: tuple[int, ...]
    grid_points: int


def simplex_lattice(n_states, total):
    """All nonnegative integer vectors of length n_states summing to total, in lexicographic order."""
    if n_states == 1:
        return np.array([[total]], dtype=np.int64)
    if n_states == 2:
        first = np.arange(total + 1, dtype=np.int64)
        return np.column_stack([first, total - first])
    blocks = []
    for first in range(total + 1):
        rest = simplex_lattice(n_states - 1, total - first)
        blocks.append(np.column_stack([np.full(len(rest), first, dtype=np.int64), rest]))
    return np.vstack(blocks)


def lattice_size(n_states, total):
    return math.comb(total + n_states - 1, n_states - 1)


def fit_grid(n_states, grid_points, max_rows):
    """Largest resolution <= grid_points whose simplex lattice has at most max_rows points."""
    if lattice_size(n_states, grid_points) <= max_rows:
        return grid_points
    low, high = 1, grid_points
    while low < high:
        mid = (low + high + 1) // 2
        if lattice_size(n_states, mid) <= max_rows:
            low = mid
        else:
            high = mid - 1
    return low


def vertex_lattice(n_states, total):
    # vertices in lexicographic order: the last state's vertex comes first
    return (np.eye(n_states, dtype=np.int64) * total)[::-1]


def expected_utility(family, beliefs, bundles):
    pi = np.asarray(beliefs.as_floats() if isinstance(beliefs, Beliefs) else beliefs, dtype=float)
    values = family.evaluate(np.asarray(bundles, dtype=float), optimization=True)
    return values @ pi


def grid_best(family: UtilityFamily, beliefs: Beliefs, prices, wealth, grid_points, max_rows=None) -> GridPoint:
    """Brute-force maximum of expected utility over the budget face p.x = wealth.

    Concave families are searched on a uniform lattice of the face; families
    that are not concave attain their maximum at a vertex, so only the vertices
    are evaluated. Ties go to the lexicographically smallest bundle.

    The lattice never holds more than max_rows points (SEU_CORNER_LATTICE_BUDGET);
    a finer request is coarsened and the returned grid_points is the resolution used.
    """
    if grid_points < 2:
        raise PreconditionError(f"grid_points must be at least 2, got {grid_points}")
    prices = np.array([float(parse_rational(p)) for p in prices])
    wealth = float(parse_rational(wealth))
    if wealth < 0:
        raise PreconditionError(f"wealth must be nonnegative, got {wealth}")
    n_states = len(prices)
    if len(beliefs) != n_states:
        raise PreconditionError("beliefs and prices disagree on the number of states")

    if wealth == 0:
        zero = np.zeros(n_states)
        return GridPoint(
            bundle=tuple(zero),
            expected_utility=float(expected_utility(family, beliefs, zero[None, :])[0]),
            shares=(0,) * n_states,
            grid_points=grid_points,
        )

    if family.concave:
        if max_rows is None:
            max_rows = load_settings().lattice_budget
        fitted = fit_grid(n_states, grid_points, max_rows)
        if fitted < grid_points:
            logger.info(
                "Lattice of %d states at %d points exceeds %d rows; searching at %d points.",
                n_states,
                grid_points,
                max_rows,
                fitted,
            )
            grid_points = fitted
        shares = simplex_lattice(n_states, grid_points)
    else:
        shares = vertex_lattice(n_states, grid_points)
    bundles = shares / grid_points * (wealth / prices)
    values = expected_utility(family, beliefs, bundles)
    # argmax keeps the first maximiser, lattices are lexicographically sorted
    best = int(np.argmax(values))
    return GridPoint(
        bundle=tuple(float(v) for v in bundles[best]),
        expected_utility=float(values[best]),
        shares=tuple(int(s) for s in shares[best]),
        grid_points=grid_points,
    )
