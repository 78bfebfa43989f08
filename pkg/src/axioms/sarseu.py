"""Exact SARSEU test.

A balanced sequence of pairs only matters through the net flow it induces on
the (observation, state) cells: each pair moves one unit from a cell with a
larger demand to a cell with a strictly smaller one, conditions (ii) and (iii)
say the net flow has zero row and column sums, and the price product is
prod p[cell] ** net[cell]. The balanced net flows form a pointed rational cone,
so the axiom fails iff one of its extreme rays has product > 1. The rays are
enumerated exactly with the double description method on the cone of
nonnegative weights over "adjacent level" moves, which generate every
realisable flow.
"""

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from src.config import load_settings
from src.errors import PreconditionError, SarseuInconclusiveError
from src.model import Dataset, format_ratio

logger = logging.getLogger(__name__)

Pair = tuple[int, int, int, int]


@dataclass(frozen=True, order=True)
class BalancedSequence:
    length: int
    pairs: tuple[Pair, ...]
    product: Fraction = field(compare=False)

    def to_list(self):
        return [[k + 1, w + 1, k2 + 1, w2 + 1] for k, w, k2, w2 in self.pairs]


@dataclass(frozen=True)
class SarseuResult:
    is_consistent: bool
    sequence: Optional[BalancedSequence] = None
    examined: tuple[BalancedSequence, ...] = ()
    nodes: int = 0

    @property
    def product(self):
        return self.sequence.product if self.sequence else None

    def to_dict(self):
        if self.is_consistent:
            return {
                "axiom": "sarseu",
                "verdict": "pass",
                "sequences_examined": [
                    {"sequence": s.to_list(), "product": format_ratio(s.product)} for s in self.examined
                ],
            }
        return {
            "axiom": "sarseu",
            "verdict": "fail",
            "sequence": self.sequence.to_list(),
            "product": format_ratio(self.sequence.product),
        }


def default_max_pairs(data: Dataset):
    return 2 * data.n_observations * data.n_states


def _demand(data, cell):
    return data.observations[cell[0]].demand[cell[1]]


def _price(data, cell):
    return data.observations[cell[0]].prices[cell[1]]


def demand_levels(data: Dataset):
    """Cells grouped by demand value, largest value first."""
    by_value = {}
    for k, obs in enumerate(data.observations):
        for w, quantity in enumerate(obs.demand):
            by_value.setdefault(quantity, []).append((k, w))
    return [by_value[value] for value in sorted(by_value, reverse=True)]


def is_balanced(data: Dataset, pairs):
    if not pairs:
        return False
    obs_balance = [0] * data.n_observations
    state_balance = [0] * data.n_states
    for k, w, k2, w2 in pairs:
        if not _demand(data, (k, w)) > _demand(data, (k2, w2)):
            return False
        obs_balance[k] += 1
        obs_balance[k2] -= 1
        state_balance[w] += 1
        state_balance[w2] -= 1
    return not any(obs_balance) and not any(state_balance)


def sequence_product(data: Dataset, pairs):
    product = Fraction(1)
    for k, w, k2, w2 in pairs:
        product *= _price(data, (k, w)) / _price(data, (k2, w2))
    return product


def _extreme_rays(generators, rows, budget):
    size = len(generators)
    rays = [tuple(1 if i == g else 0 for i in range(size)) for g in range(size)]
    supports = [1 << g for g in range(size)]
    nodes = 0

    for row in rows:
        values = [sum(c * r for c, r in zip(row, ray) if c) for ray in rays]
        positive = [i for i, v in enumerate(values) if v > 0]
        negative = [i for i, v in enumerate(values) if v < 0]
        if not positive and not negative:
            continue

        new_rays = [rays[i] for i, v in enumerate(values) if v == 0]
        new_supports = [supports[i] for i, v in enumerate(values) if v == 0]
        for p in positive:
            for q in negative:
                nodes += 1
                if nodes > budget:
                    raise SarseuInconclusiveError(f"node budget {budget} exhausted", nodes=nodes)
                union = supports[p] | supports[q]
                # combinatorial adjacency test
                if any(
                    s & ~union == 0 for i, s in enumerate(supports) if i != p and i != q
                ):
                    continue
                a, b = values[p], -values[q]
                combined = [a * y + b * x for x, y in zip(rays[p], rays[q])]
                divisor = math.gcd(*combined)
                new_rays.append(tuple(c // divisor for c in combined))
                new_supports.append(union)
        rays, supports = new_rays, new_supports
    return rays, nodes


def _realise(levels, net):
    """Greedy pairing of a realisable net flow, highest supplies first."""
    pool = deque()
    pairs = []
    for level in levels:
        for cell in level:
            need = -net.get(cell, 0)
            while need > 0:
                source, available = pool[0]
                used = min(need, available)
                pairs.extend([(source[0], source[1], cell[0], cell[1])] * used)
                need -= used
                if used == available:
                    pool.popleft()
                else:
                    pool[0] = (source, available - used)
        for cell in level:
            if net.get(cell, 0) > 0:
                pool.append((cell, net[cell]))
    return tuple(sorted(pairs))


def balanced_sequences(data: Dataset, node_budget=None):
    """Extreme balanced sequences of the dataset, shortest first."""
    if node_budget is None:
        node_budget = load_settings().node_budget

    levels = demand_levels(data)
    generators = [
        (u, v) for upper, lower in zip(levels, levels[1:]) for u in upper for v in lower
    ]
    if not generators:
        return [], 0

    rows = []
    for k in range(data.n_observations - 1):
        rows.append([(u[0] == k) - (v[0] == k) for u, v in generators])
    for w in range(data.n_states - 1):
        rows.append([(u[1] == w) - (v[1] == w) for u, v in generators])

    rays, nodes = _extreme_rays(generators, rows, node_budget)

    sequences = {}
    for ray in rays:
        net = {}
        for weight, (u, v) in zip(ray, generators):
            if weight:
                net[u] = net.get(u, 0) + weight
                net[v] = net.get(v, 0) - weight
        net = {cell: amount for cell, amount in net.items() if amount}
        if not net:
            continue
        divisor = math.gcd(*net.values())
        net = {cell: amount // divisor for cell, amount in net.items()}
        key = tuple(sorted(net.items()))
        if key in sequences:
            continue
        pairs = _realise(levels, net)
        product = Fraction(1)
        for cell, amount in net.items():
            product *= _price(data, cell) ** amount
        sequences[key] = BalancedSequence(length=len(pairs), pairs=pairs, product=product)
    return sorted(sequences.values()), nodes


def check_sarseu(data: Dataset, max_pairs=None, node_budget=None) -> SarseuResult:
    if max_pairs is None:
        max_pairs = default_max_pairs(data)
    if max_pairs < 2:
        raise PreconditionError(f"max_pairs must be at least 2, got {max_pairs}")

    sequences, nodes = balanced_sequences(data, node_budget)
    violations = [s for s in sequences if s.product > 1]
    if not violations:
        logger.info("SARSEU holds: %d extreme balanced sequences, %d nodes.", len(sequences), nodes)
        return SarseuResult(is_consistent=True, examined=tuple(sequences), nodes=nodes)

    witness = violations[0]
    if witness.length > max_pairs:
        raise SarseuInconclusiveError(
            f"no violation of length <= {max_pairs}; shortest violating sequence has {witness.length} pairs",
            max_pairs=max_pairs,
            nodes=nodes,
        )
    logger.info("SARSEU violated by %s with product %s.", witness.pairs, witness.product)
    return SarseuResult(is_consistent=False, sequence=witness, examined=tuple(sequences), nodes=nodes)
