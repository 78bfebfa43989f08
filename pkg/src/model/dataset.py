import io
import json
import logging
import os
from fractions import Fraction
from pathlib import Path
from typing import Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from src.errors import DatasetParseError, DatasetValidationError
from src.model.rationals import format_rational, parse_rational, parse_rational_list

logger = logging.getLogger(__name__)


def _first_message(error):
    details = error.errors()
    if not details:
        return str(error)
    message = details[0].get("msg", str(error))
    return message.removeprefix("Value error, ")


class Observation(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    prices: tuple[Fraction, ...]
    demand: tuple[Fraction, ...]

    @field_validator("prices", "demand", mode="before")
    @classmethod
    def _parse_vector(cls, value):
        if isinstance(value, (str, bytes)) or not hasattr(value, "__iter__"):
            raise ValueError("expected a vector of numbers")
        return tuple(parse_rational(item) for item in value)

    @model_validator(mode="after")
    def _check_vectors(self):
        if len(self.prices) != len(self.demand):
            raise ValueError(
                f"{len(self.prices)} prices but {len(self.demand)} demands"
            )
        if not self.prices:
            raise ValueError("at least one state is required")
        for state, price in enumerate(self.prices):
            if price <= 0:
                raise ValueError(f"price for state {state + 1} is not strictly positive ({price})")
        for state, quantity in enumerate(self.demand):
            if quantity < 0:
                raise ValueError(f"demand for state {state + 1} is negative ({quantity})")
        return self

    @property
    def n_states(self):
        return len(self.prices)


class Dataset(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    states: tuple[str, ...]
    observations: tuple[Observation, ...]

    @model_validator(mode="after")
    def _check_shape(self):
        if not self.states:
            raise ValueError("at least one state is required")
        if len(set(self.states)) != len(self.states):
            raise ValueError("state labels must be unique")
        if not self.observations:
            raise ValueError("at least one observation is required")
        for index, obs in enumerate(self.observations):
            if obs.n_states != len(self.states):
                raise ValueError(
                    f"observation {index + 1} has {obs.n_states} states, expected {len(self.states)}"
                )
        return self

    @property
    def n_states(self):
        return len(self.states)

    @property
    def n_observations(self):
        return len(self.observations)

    def subset(self, indices):
        return Dataset(states=self.states, observations=tuple(self.observations[i] for i in indices))


class Beliefs(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    probabilities: tuple[Fraction, ...]

    @field_validator("probabilities", mode="before")
    @classmethod
    def _parse(cls, value):
        if isinstance(value, str):
            return tuple(parse_rational_list(value))
        return tuple(parse_rational(item) for item in value)

    @model_validator(mode="after")
    def _check_distribution(self):
        if not self.probabilities:
            raise ValueError("beliefs need at least one state")
        for state, prob in enumerate(self.probabilities):
            if prob <= 0:
                raise ValueError(f"belief for state {state + 1} is not strictly positive ({prob})")
        if sum(self.probabilities) != 1:
            raise ValueError(f"beliefs sum to {sum(self.probabilities)}, not 1")
        return self

    def __len__(self):
        return len(self.probabilities)

    def __getitem__(self, state):
        return self.probabilities[state]

    def as_floats(self):
        return [float(p) for p in self.probabilities]

    def to_dict(self):
        return {"pi": [format_rational(p) for p in self.probabilities]}


def make_observation(prices, demand, index=None):
    try:
        return Observation(prices=prices, demand=demand)
    except ValidationError as e:
        where = f"observation {index + 1}: " if index is not None else ""
        raise DatasetValidationError(where + _first_message(e)) from None


def make_dataset(pairs, states=None):
    """Build a validated Dataset from (prices, demand) pairs."""
    observations = tuple(make_observation(p, x, i) for i, (p, x) in enumerate(pairs))
    if states is None:
        n_states = observations[0].n_states if observations else 0
        states = tuple(f"s{i + 1}" for i in range(n_states))
    try:
        return Dataset(states=tuple(str(s) for s in states), observations=observations)
    except ValidationError as e:
        raise DatasetValidationError(_first_message(e)) from None


def make_beliefs(probabilities):
    try:
        return Beliefs(probabilities=probabilities)
    except ValidationError as e:
        raise DatasetValidationError(_first_message(e)) from None


def corner_state(obs: Observation) -> Optional[int]:
    positive = [state for state, quantity in enumerate(obs.demand) if quantity > 0]
    if len(positive) == 1:
        return positive[0]
    return None


def wealth(obs: Observation) -> Fraction:
    return sum((p * x for p, x in zip(obs.prices, obs.demand)), Fraction(0))


class DatasetLoader:
    def __init__(self, source, fmt=None):
        self.source = source
        self.fmt = fmt
        self.records = None
        self.states = None
        self.dataset = None

    def _resolve_format(self):
        if self.fmt:
            return self.fmt.lower()
        if isinstance(self.source, (str, os.PathLike)):
            suffix = os.path.splitext(str(self.source))[1].lower()
            if suffix in (".json", ".csv"):
                return suffix[1:]
        return "json"

    def _read_bytes(self):
        if isinstance(self.source, (str, os.PathLike)):
            if not os.path.exists(self.source):
                raise FileNotFoundError(f"Data file not found: {self.source}")
            return Path(self.source).read_bytes()
        if isinstance(self.source, bytes):
            return self.source
        return self.source.read()

    def load_data(self):
        fmt = self._resolve_format()
        raw = self._read_bytes()
        if fmt == "json":
            self._parse_json(raw)
        elif fmt == "csv":
            self._parse_csv(raw)
        else:
            raise DatasetParseError(f"Unsupported dataset format: {fmt}")
        logger.info("Loaded %d observation records in %s format.", len(self.records), fmt)
        return self.records

    def _parse_json(self, raw):
        try:
            payload = json.loads(raw)
        except (json.JSONDecodeError, UnicodeDecodeError) as e:
            raise DatasetParseError(f"Error reading JSON dataset: {e}") from None
        if not isinstance(payload, dict) or "observations" not in payload:
            raise DatasetParseError("JSON dataset needs an 'observations' list")
        observations = payload["observations"]
        if not isinstance(observations, list):
            raise DatasetParseError("'observations' must be a list")
        records = []
        for index, row in enumerate(observations):
            if not isinstance(row, dict) or "prices" not in row or "demand" not in row:
                raise DatasetParseError(f"observation {index + 1} needs 'prices' and 'demand'")
            for key in ("prices", "demand"):
                if not isinstance(row[key], list):
                    raise DatasetParseError(f"observation {index + 1}: '{key}' must be a list")
            records.append((row["prices"], row["demand"]))
        states = payload.get("states")
        if states is not None and (
            not isinstance(states, list) or not all(isinstance(label, str) for label in states)
        ):
            raise DatasetParseError("'states' must be a list of state labels")
        self.records = records
        self.states = states

    def _parse_csv(self, raw):
        try:
            frame = pd.read_csv(io.BytesIO(raw), dtype=str, skipinitialspace=True)
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise DatasetParseError(f"Error reading CSV dataset: {e}") from None

        price_cols = [c for c in frame.columns if c.endswith("_price")]
        demand_cols = [c for c in frame.columns if c.endswith("_demand")]
        labels = [c[: -len("_price")] for c in price_cols]
        if not price_cols or labels != [c[: -len("_demand")] for c in demand_cols]:
            raise DatasetParseError(
                "CSV header must list state_1_price..state_n_price then the matching _demand columns"
            )
        if frame[price_cols + demand_cols].isnull().any().any():
            raise DatasetValidationError("CSV dataset has empty cells (ragged rows)")
        self.records = [
            (list(row[price_cols]), list(row[demand_cols])) for _, row in frame.iterrows()
        ]
        self.states = labels

    def build_dataset(self):
        if self.records is None:
            raise ValueError("Data not loaded.")
        try:
            pairs = [
                ([parse_rational(v) for v in prices], [parse_rational(v) for v in demand])
                for prices, demand in self.records
            ]
        except TypeError:
            raise DatasetParseError("prices and demand must be lists of numbers") from None
        self.dataset = make_dataset(pairs, self.states)
        logger.info(
            "Loaded dataset with %d observations and %d states.",
            self.dataset.n_observations,
            self.dataset.n_states,
        )
        return self.dataset


def load_dataset(source, fmt=None) -> Dataset:
    loader = DatasetLoader(source, fmt)
    loader.load_data()
    return loader.build_dataset()


def dataset_to_json(data: Dataset):
    return {
        "states": list(data.states),
        "observations": [
            {
                "prices": [format_rational(p) for p in obs.prices],
                "demand": [format_rational(x) for x in obs.demand],
            }
            for obs in data.observations
        ],
    }


def dump_dataset(data: Dataset, output_path):
    directory = os.path.dirname(str(output_path))
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(output_path, "w") as handle:
        json.dump(dataset_to_json(data), handle, indent=2)
    logger.info("Dataset saved to %s", output_path)


def validation_report(data: Dataset):
    rows = []
    for index, obs in enumerate(data.observations):
        corner = corner_state(obs)
        rows.append(
            {
                "observation": index + 1,
                "wealth": format_rational(wealth(obs)),
                "corner_state": data.states[corner] if corner is not None else None,
                "diversified": corner is None,
                "all_zero": all(x == 0 for x in obs.demand),
            }
        )
    return rows
