import json
from fractions import Fraction

from src.model import make_beliefs, make_dataset

EXAMPLE_PAIRS = [((1, 4), (100, 0)), ((4, 1), (0, 80)), ((3, 1), (0, 60))]


def write_dataset(path, pairs, states=None):
    payload = {
        "observations": [
            {"prices": [str(p) for p in prices], "demand": [str(x) for x in demand]}
            for prices, demand in pairs
        ]
    }
    if states is not None:
        payload["states"] = states
    path.write_text(json.dumps(payload))
    return str(path)


def random_beliefs(rng, n_states, low=1, high=10):
    weights = [int(w) for w in rng.integers(low, high, size=n_states)]
    total = sum(weights)
    return make_beliefs([Fraction(w, total) for w in weights])


def random_dataset(rng, max_observations=4, max_states=3):
    n_obs = int(rng.integers(1, max_observations + 1))
    n_states = int(rng.integers(2, max_states + 1))
    pairs = []
    for _ in range(n_obs):
        prices = [int(p) for p in rng.integers(1, 6, size=n_states)]
        demand = [int(x) for x in rng.integers(0, 4, size=n_states)]
        pairs.append((prices, demand))
    return make_dataset(pairs)


def random_corner_dataset(rng, n_observations=3, n_states=2, max_demand=20):
    pairs = []
    for _ in range(n_observations):
        prices = [int(p) for p in rng.integers(1, 6, size=n_states)]
        demand = [0] * n_states
        demand[int(rng.integers(0, n_states))] = int(rng.integers(1, max_demand + 1))
        pairs.append((prices, demand))
    return make_dataset(pairs)
