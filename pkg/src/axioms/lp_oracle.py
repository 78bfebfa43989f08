import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from src.config import load_settings
from src.errors import LpToleranceWarning
from src.model import Dataset

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LpOracleResult:
    found: bool
    weights: dict = field(default_factory=dict)
    optimum: Optional[float] = None

    def to_dict(self):
        return {
            "oracle": "sarseu_lp",
            "found": self.found,
            "optimum": self.optimum,
            "weights": [
                {"pair": [k + 1, w + 1, k2 + 1, w2 + 1], "weight": weight}
                for (k, w, k2, w2), weight in sorted(self.weights.items())
            ],
        }


def ordered_pairs(data: Dataset):
    cells = [(k, w) for k in range(data.n_observations) for w in range(data.n_states)]
    demand = {cell: data.observations[cell[0]].demand[cell[1]] for cell in cells}
    return [(u[0], u[1], v[0], v[1]) for u in cells for v in cells if demand[u] > demand[v]]


def sarseu_lp_oracle(data: Dataset, eps=None) -> LpOracleResult:
    """Float LP cross-check: max sum(delta * log price ratio) over balanced unit-mass weights."""
    if eps is None:
        eps = load_settings().lp_eps

    pairs = ordered_pairs(data)
    if not pairs:
        return LpOracleResult(found=False)

    k_obs, n_states = data.n_observations, data.n_states
    log_price = [[math.log(p) for p in obs.prices] for obs in data.observations]
    objective = np.array([log_price[k][w] - log_price[k2][w2] for k, w, k2, w2 in pairs])

    a_eq = np.zeros((k_obs + n_states + 1, len(pairs)))
    for col, (k, w, k2, w2) in enumerate(pairs):
        a_eq[k, col] += 1
        a_eq[k2, col] -= 1
        a_eq[k_obs + w, col] += 1
        a_eq[k_obs + w2, col] -= 1
    a_eq[-1, :] = 1.0
    b_eq = np.zeros(k_obs + n_states + 1)
    b_eq[-1] = 1.0

    result = linprog(-objective, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs-ds")
    if result.status == 2:
        # no balanced combination at all
        return LpOracleResult(found=False)
    if result.status != 0:
        raise RuntimeError(f"LP oracle failed: {result.message}")

    optimum = float(-result.fun)
    if abs(optimum) <= eps:
        warnings.warn(
            f"SARSEU LP optimum {optimum:.3e} lies within {eps:g} of zero",
            LpToleranceWarning,
            stacklevel=2,
        )
    if optimum <= eps:
        return LpOracleResult(found=False, optimum=optimum)

    support = result.x > eps
    smallest = result.x[support].min()
    weights = {
        pairs[col]: round(float(result.x[col] / smallest), 9) for col in np.flatnonzero(support)
    }
    logger.info("SARSEU LP oracle found a positive-product combination (optimum %.6g).", optimum)
    return LpOracleResult(found=True, weights=weights, optimum=optimum)
