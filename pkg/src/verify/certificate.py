import logging
import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict
from tqdm import tqdm

from src.config import load_settings
from src.families import UtilityFamily
from src.model import Beliefs, Dataset, corner_state, wealth
from src.verify.oracle import expected_utility, grid_best

logger = logging.getLogger(__name__)


def _number(value):
    # JSON has no infinities
    if value is None or math.isfinite(value):
        return value
    return "inf" if value > 0 else "-inf"


class ObservationVerdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    observation: int
    observed_eu: float
    oracle_eu: float
    oracle_bundle: tuple[float, ...]
    gap: float
    grid_valid: bool
    corner_state: Optional[int] = None
    directional_derivative: Optional[float] = None
    valid: bool

    def to_dict(self):
        body = {
            "observation": self.observation + 1,
            "observed_eu": self.observed_eu,
            "oracle_eu": self.oracle_eu,
            "oracle_bundle": list(self.oracle_bundle),
            "gap": self.gap,
            "valid": self.valid,
        }
        if self.directional_derivative is not None:
            body["corner_state"] = self.corner_state + 1
            body["directional_derivative"] = _number(self.directional_derivative)
        return body


class Certificate(BaseModel):
    model_config = ConfigDict(frozen=True)

    beliefs: Beliefs
    family: UtilityFamily
    tol: float
    grid_points: int
    verdicts: tuple[ObservationVerdict, ...]

    @property
    def valid(self):
        return all(v.valid for v in self.verdicts)

    @property
    def invalid_observations(self):
        return [v.observation for v in self.verdicts if not v.valid]

    def to_dict(self):
        return {
            "family": self.family.tag,
            "params": self.family.params(),
            "pi": self.beliefs.to_dict()["pi"],
            "tol": self.tol,
            "grid_points": self.grid_points,
            "valid": self.valid,
            "observations": [v.to_dict() for v in self.verdicts],
        }


def corner_directional_derivative(family, beliefs, obs):
    """Largest derivative of expected utility along the budget edges leaving the corner.

    Moving one unit into state s costs p_s / p_c units of the corner state, so
    the slope is pi_s u'(0) - pi_c (p_s / p_c) u'(w). For a concave utility
    the corner is optimal on the budget iff every slope is <= 0.
    """
    corner = corner_state(obs)
    w = float(obs.demand[corner])
    at_corner = family.derivative(w)
    at_zero = family.derivative(0.0)
    slopes = []
    for state in range(obs.n_states):
        if state == corner:
            continue
        price_ratio = float(obs.prices[state] / obs.prices[corner])
        if math.isinf(at_zero):
            slopes.append(math.inf)
        else:
            slopes.append(float(beliefs[state]) * at_zero - float(beliefs[corner]) * price_ratio * at_corner)
    return max(slopes) if slopes else -math.inf


def verify_certificate(data: Dataset, beliefs: Beliefs, family: UtilityFamily, tol=None, grid_points=None) -> Certificate:
    """Check observed demands against the brute-force oracle.

    Concave families at corner observations are decided by the sign of the
    closed-form edge derivatives; the grid verdict is then a cross-check only.
    """
    settings = load_settings()
    if tol is None:
        tol = settings.tol
    if grid_points is None:
        grid_points = settings.grid_points(data.n_states)

    pi = np.array(beliefs.as_floats())
    verdicts = []
    observations = tqdm(
        list(enumerate(data.observations)), desc="Verifying observations", disable=not settings.progress
    )
    for index, obs in observations:
        observed = np.array([float(x) for x in obs.demand])
        observed_eu = float(family.evaluate(observed) @ pi)
        best = grid_best(family, beliefs, obs.prices, wealth(obs), grid_points)
        oracle_eu = best.expected_utility
        gap = observed_eu - oracle_eu
        grid_valid = gap >= -tol

        corner = corner_state(obs)
        derivative = None
        valid = grid_valid
        if corner is not None and family.concave and obs.n_states > 1:
            derivative = corner_directional_derivative(family, beliefs, obs)
            valid = derivative <= tol
            if valid != grid_valid:
                logger.warning(
                    "Observation %d: edge derivative %.3g and grid gap %.3g disagree; derivative decides.",
                    index + 1,
                    derivative,
                    gap,
                )
        verdicts.append(
            ObservationVerdict(
                observation=index,
                observed_eu=observed_eu,
                oracle_eu=oracle_eu,
                oracle_bundle=best.bundle,
                gap=gap,
                grid_valid=grid_valid,
                corner_state=corner if derivative is not None else None,
                directional_derivative=derivative,
                valid=valid,
            )
        )

    certificate = Certificate(
        beliefs=beliefs, family=family, tol=tol, grid_points=grid_points, verdicts=tuple(verdicts)
    )
    if certificate.valid:
        logger.info("Certificate valid for %s on %d observations.", family.tag, data.n_observations)
    else:
        logger.info(
            "Certificate invalid for %s at observations %s.",
            family.tag,
            [i + 1 for i in certificate.invalid_observations],
        )
    return certificate
