import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from src.model import Dataset, wealth

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RevealedPreferenceRelation:
    """weak[i, j] iff x^i is revealed weakly preferred to x^j (p^i.x^i >= p^i.x^j)."""

    weak: NDArray[np.bool_]
    strict: NDArray[np.bool_]
    closure: NDArray[np.bool_]


@dataclass(frozen=True)
class GarpResult:
    is_consistent: bool
    cycle: Optional[list[int]] = None
    relation: Optional[RevealedPreferenceRelation] = field(default=None, repr=False)

    def to_dict(self):
        if self.is_consistent:
            return {"axiom": "garp", "verdict": "pass"}
        return {"axiom": "garp", "verdict": "fail", "cycle": [i + 1 for i in self.cycle]}


def revealed_preference(data: Dataset) -> RevealedPreferenceRelation:
    k = data.n_observations
    weak = np.zeros((k, k), dtype=bool)
    strict = np.zeros((k, k), dtype=bool)
    for i, obs in enumerate(data.observations):
        budget = wealth(obs)
        for j, other in enumerate(data.observations):
            cost = sum(p * x for p, x in zip(obs.prices, other.demand))
            weak[i, j] = budget >= cost
            strict[i, j] = budget > cost

    # Warshall
    closure = weak.copy()
    for m in range(k):
        closure |= closure[:, m : m + 1] & closure[m : m + 1, :]
    return RevealedPreferenceRelation(weak=weak, strict=strict, closure=closure)


def _weak_path(weak, start, goal):
    previous = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        if node == goal:
            break
        for nxt in np.flatnonzero(weak[node]):
            nxt = int(nxt)
            if nxt not in previous:
                previous[nxt] = node
                queue.append(nxt)
    path = []
    node = goal
    while node is not None:
        path.append(node)
        node = previous[node]
    return path[::-1]


def check_garp(data: Dataset) -> GarpResult:
    relation = revealed_preference(data)
    violations = np.argwhere(relation.closure & relation.strict.T)
    if len(violations) == 0:
        logger.info("GARP holds on %d observations.", data.n_observations)
        return GarpResult(is_consistent=True, relation=relation)

    # argwhere is row-major: smallest i, then smallest j
    i, j = (int(v) for v in violations[0])
    cycle = _weak_path(relation.weak, i, j)
    logger.info("GARP violated: cycle %s", cycle)
    return GarpResult(is_consistent=False, cycle=cycle, relation=relation)
