import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from src.errors import PreconditionError
from src.model import Beliefs, Dataset, corner_state, format_rational, make_beliefs

logger = logging.getLogger(__name__)

# exact vertex enumeration only while the number of candidate bases stays small
EXACT_MAX_STATES = 4
EXACT_MAX_BASES = 50_000


@dataclass(frozen=True)
class BeliefConstraint:
    """pi[corner] * prices[other] - pi[other] * prices[corner] >= 0 (or > 0)."""

    observation: int
    corner: int
    other: int
    corner_price: Fraction
    other_price: Fraction

    def slack(self, beliefs):
        return beliefs[self.corner] * self.other_price - beliefs[self.other] * self.corner_price

    def coefficients(self, n_states):
        row = [Fraction(0)] * n_states
        row[self.corner] += self.other_price
        row[self.other] -= self.corner_price
        return row

    def to_dict(self):
        return {
            "observation": self.observation + 1,
            "corner_state": self.corner + 1,
            "other_state": self.other + 1,
            "price_ratio": format_rational(self.corner_price / self.other_price),
        }


@dataclass(frozen=True)
class CompatibilityReport:
    passes: bool
    strict: bool
    slacks: dict = field(default_factory=dict)

    @property
    def failing_observations(self):
        bound = (lambda s: s <= 0) if self.strict else (lambda s: s < 0)
        return sorted({i for (i, _), s in self.slacks.items() if bound(s)})

    @property
    def min_slack(self):
        return min(self.slacks.values()) if self.slacks else None

    def to_dict(self):
        observations = {}
        for (index, state), slack in sorted(self.slacks.items()):
            observations.setdefault(index, {})[str(state + 1)] = format_rational(slack)
        return {
            "mode": "strict" if self.strict else "weak",
            "passes": self.passes,
            "slacks": [
                {"observation": index + 1, "slack": slacks} for index, slacks in observations.items()
            ],
            "failing_observations": [i + 1 for i in self.failing_observations],
        }


@dataclass(frozen=True)
class BeliefSearchResult:
    feasible: bool
    strict: bool
    beliefs: Optional[Beliefs] = None
    min_slack: Optional[Fraction] = None
    witness: tuple[BeliefConstraint, ...] = ()
    method: str = "exact"

    def to_dict(self):
        if self.feasible:
            body = {"feasible": True, "mode": "strict" if self.strict else "weak"}
            body.update(self.beliefs.to_dict())
            body["min_slack"] = format_rational(self.min_slack) if self.min_slack is not None else None
            return body
        return {
            "feasible": False,
            "mode": "strict" if self.strict else "weak",
            "witness": [c.to_dict() for c in self.witness],
        }


def belief_constraints(data: Dataset):
    """Ratio-dominance constraints of every corner observation, in observation/state order."""
    constraints = []
    for index, obs in enumerate(data.observations):
        corner = corner_state(obs)
        if corner is None:
            raise PreconditionError(
                f"observation {index + 1} is diversified; corner demands required"
            )
        for other in range(obs.n_states):
            if other != corner:
                constraints.append(
                    BeliefConstraint(index, corner, other, obs.prices[corner], obs.prices[other])
                )
    return constraints


def check_belief_compatibility(data: Dataset, beliefs: Beliefs, strict=True) -> CompatibilityReport:
    if len(beliefs) != data.n_states:
        raise PreconditionError(
            f"beliefs have {len(beliefs)} states but the dataset has {data.n_states}"
        )
    slacks = {(c.observation, c.other): c.slack(beliefs) for c in belief_constraints(data)}
    if strict:
        passes = all(s > 0 for s in slacks.values())
    else:
        passes = all(s >= 0 for s in slacks.values())
    return CompatibilityReport(passes=passes, strict=strict, slacks=slacks)


def _solve_exact(matrix, rhs):
    """Gauss-Jordan over the rationals; None if singular."""
    size = len(matrix)
    rows = [list(row) + [value] for row, value in zip(matrix, rhs)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if rows[r][col] != 0), None)
        if pivot is None:
            return None
        rows[col], rows[pivot] = rows[pivot], rows[col]
        lead = rows[col][col]
        rows[col] = [v / lead for v in rows[col]]
        for r in range(size):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    return [row[-1] for row in rows]


def _inequalities(constraints, n_states, strict):
    # variables (pi_1..pi_n, t); each row g means g . v >= 0
    rows = []
    for c in constraints:
        rows.append(tuple(c.coefficients(n_states)) + (Fraction(-1 if strict else 0),))
    for state in range(n_states):
        rows.append(tuple(Fraction(int(s == state)) for s in range(n_states)) + (Fraction(-1),))
    return list(dict.fromkeys(rows))


def _max_min_slack_exact(constraints, n_states, strict):
    rows = _inequalities(constraints, n_states, strict)
    equality = [Fraction(1)] * n_states + [Fraction(0)]
    best = None
    for basis in combinations(rows, n_states):
        point = _solve_exact([equality, *basis], [Fraction(1)] + [Fraction(0)] * n_states)
        if point is None:
            continue
        if any(sum(g * v for g, v in zip(row, point)) < 0 for row in rows):
            continue
        if best is None or point[-1] > best[-1]:
            best = point
    if best is None:
        # weak ratio-dominance rows alone already exclude the simplex
        return None, None
    return best[-1], best[:-1]


def _max_min_slack_lp(constraints, n_states, strict):
    rows = _inequalities(constraints, n_states, strict)
    a_ub = -np.array([[float(g) for g in row] for row in rows])
    b_ub = np.zeros(len(rows))
    a_eq = np.array([[1.0] * n_states + [0.0]])
    objective = np.zeros(n_states + 1)
    objective[-1] = -1.0
    bounds = [(0, 1)] * n_states + [(None, 1)]
    result = linprog(objective, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0], bounds=bounds, method="highs")
    if result.status == 2:
        return None, None
    if result.status != 0:
        raise RuntimeError(f"belief LP failed: {result.message}")
    return float(-result.fun), [float(v) for v in result.x[:n_states]]


def _use_exact(constraints, n_states):
    n_rows = len(constraints) + n_states
    return n_states <= EXACT_MAX_STATES and comb(n_rows, n_states) <= EXACT_MAX_BASES


def _is_feasible(constraints, n_states, strict):
    if _use_exact(constraints, n_states):
        t, _ = _max_min_slack_exact(constraints, n_states, strict)
        return t is not None and t > 0
    t, _ = _max_min_slack_lp(constraints, n_states, strict)
    return t is not None and t > 1e-12


def _rationalise(values, data, strict):
    """Snap float beliefs to rationals and keep the first snapping that re-verifies."""
    for limit in (10**3, 10**6, 10**9, 10**12):
        snapped = [Fraction(v).limit_denominator(limit) for v in values]
        total = sum(snapped)
        if total <= 0 or any(v <= 0 for v in snapped):
            continue
        beliefs = make_beliefs([v / total for v in snapped])
        if check_belief_compatibility(data, beliefs, strict).passes:
            return beliefs
    return None


def conflict_witness(constraints, n_states, strict=True):
    """A conflicting pair when one exists, otherwise an irreducible infeasible subset."""
    for pair in combinations(constraints, 2):
        if not _is_feasible(list(pair), n_states, strict):
            return tuple(pair)

    # deletion filter
    kept = list(constraints)
    for constraint in list(constraints):
        trial = [c for c in kept if c is not constraint]
        if not _is_feasible(trial, n_states, strict):
            kept = trial
    return tuple(kept)


def find_beliefs(data: Dataset, strict=True) -> BeliefSearchResult:
    """Full-support beliefs maximising the minimum ratio-dominance slack.

    Solves max t s.t. slack_j(pi) >= t (strict) or >= 0 (weak), pi >= t and
    sum(pi) = 1; the region is nonempty iff the optimum is positive.
    """
    constraints = belief_constraints(data)
    n_states = data.n_states

    if _use_exact(constraints, n_states):
        t, point = _max_min_slack_exact(constraints, n_states, strict)
        method = "exact"
        beliefs = make_beliefs(point) if t is not None and t > 0 else None
    else:
        t, point = _max_min_slack_lp(constraints, n_states, strict)
        method = "lp"
        found = t is not None and t > 1e-12
        beliefs = _rationalise(point, data, strict) if found else None
        if found and beliefs is None:
            logger.warning("LP beliefs with optimum %.3g did not survive exact re-verification.", t)

    if beliefs is None:
        witness = conflict_witness(constraints, n_states, strict)
        logger.info("No compatible beliefs; conflicting constraints: %s", [c.to_dict() for c in witness])
        return BeliefSearchResult(feasible=False, strict=strict, witness=witness, method=method)

    report = check_belief_compatibility(data, beliefs, strict)
    logger.info("Found beliefs %s with minimum slack %s.", beliefs.to_dict()["pi"], report.min_slack)
    return BeliefSearchResult(
        feasible=True, strict=strict, beliefs=beliefs, min_slack=report.min_slack, method=method
    )
