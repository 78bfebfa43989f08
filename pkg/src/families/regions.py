import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import sympy as sp

from src.errors import FamilyDomainError, PreconditionError
from src.families.utility import CORNER_TAGS, FAMILIES, make_family
from src.model import Beliefs, Dataset, Observation, corner_state, parse_rational

logger = logging.getLogger(__name__)

CRRA_REASON = "infinite marginal utility at zero"


def _rational(value):
    value = Fraction(value)
    return sp.Rational(value.numerator, value.denominator)


def _decimal(expr):
    return float(sp.N(expr, 30))


def _text(expr):
    return str(expr).replace("log(", "ln(")


@dataclass(frozen=True)
class MrsResult:
    holds: bool
    margins: dict
    violated_state: Optional[int] = None
    margin: Optional[float] = None


@dataclass(frozen=True)
class ParameterRegion:
    """Set of free-parameter values under which the family rationalizes every corner.

    kind is "interval", "halfspace" (Quadratic, bound on lambda/theta), "all" or
    "empty". A missing upper bound means +infinity.
    """

    family: str
    kind: str
    parameter: Optional[str] = None
    lower: Optional[sp.Expr] = None
    upper: Optional[sp.Expr] = None
    closed_lower: bool = False
    closed_upper: bool = False
    binding_observation: Optional[int] = None
    binding_side: Optional[str] = None
    binding_reason: Optional[str] = None
    fixed: dict = field(default_factory=dict)
    reason: Optional[str] = None

    @property
    def is_empty(self):
        return self.kind == "empty"

    @property
    def lower_value(self):
        return _decimal(self.lower) if self.lower is not None else -math.inf

    @property
    def upper_value(self):
        return _decimal(self.upper) if self.upper is not None else math.inf

    def contains(self, value):
        if self.is_empty:
            return False
        if self.parameter is None:
            return True
        lo, hi = self.lower_value, self.upper_value
        above = value >= lo if self.closed_lower else value > lo
        below = value <= hi if self.closed_upper else value < hi
        return above and below

    def sample_point(self):
        if self.is_empty:
            raise PreconditionError(f"{self.family}: region is empty, nothing to sample")
        if self.parameter is None:
            return None
        lo, hi = self.lower_value, self.upper_value
        if math.isinf(hi):
            return 2 * lo if lo > 0 else 1.0
        return (lo + hi) / 2

    def family_at(self, value):
        """Concrete utility at a parameter value of this region."""
        if self.family == "shifted_power":
            params = {name: float(v) for name, v in self.fixed.items()}
            params[self.parameter] = value
            return make_family("shifted_power", **params)
        if self.family == "quadratic":
            return make_family("quadratic", theta=1.0, lam=value)
        if self.family == "linear":
            return make_family("linear")
        return make_family(self.family, **{self.parameter: value})

    def to_dict(self):
        body = {"type": self.kind}
        if self.parameter is not None:
            body["parameter"] = self.parameter
        if self.lower is not None:
            body["lower"] = _text(self.lower)
            body["lower_decimal"] = self.lower_value
            body["closed_lower"] = self.closed_lower
        if self.upper is not None:
            body["upper"] = _text(self.upper)
            body["upper_decimal"] = self.upper_value
            body["closed_upper"] = self.closed_upper
        report = {"family": self.family, "region": body}
        if self.fixed:
            report["fixed"] = {name: float(value) for name, value in self.fixed.items()}
        if self.binding_observation is not None:
            report["binding_observation"] = self.binding_observation + 1
            report["binding_reason"] = self.binding_reason
        if self.reason:
            report["reason"] = self.reason
        return report


def corner_ratio(beliefs: Beliefs, obs: Observation):
    """min over w' != w^i of (pi_{w^i} p_{w'}) / (pi_{w'} p_{w^i}) and its argmin."""
    corner = corner_state(obs)
    if corner is None:
        raise PreconditionError("observation has no corner state (diversified demand)")
    best, best_state = None, None
    for state, price in enumerate(obs.prices):
        if state == corner:
            continue
        ratio = (beliefs[corner] * price) / (beliefs[state] * obs.prices[corner])
        if best is None or ratio < best:
            best, best_state = ratio, state
    return best, best_state


def mrs_condition(family, beliefs: Beliefs, obs: Observation, tol=1e-12) -> MrsResult:
    corner = corner_state(obs)
    if corner is None:
        raise PreconditionError("observation has no corner state (diversified demand)")
    if len(beliefs) != obs.n_states:
        raise PreconditionError("beliefs and observation disagree on the number of states")

    ratio = family.marginal_ratio(float(obs.demand[corner]))
    margins = {}
    for state in range(obs.n_states):
        if state == corner:
            continue
        margins[state] = float(beliefs[corner] / beliefs[state]) * ratio - float(
            obs.prices[corner] / obs.prices[state]
        )
    violated = [(m, s) for s, m in margins.items() if m < -tol]
    if not violated:
        return MrsResult(holds=True, margins=margins)
    margin, state = min(violated)
    return MrsResult(holds=False, margins=margins, violated_state=state, margin=margin)


@dataclass(frozen=True)
class _Corner:
    index: int
    state: int
    w: Fraction
    ratio: Optional[Fraction]
    other: Optional[int]
    obs: Observation


def _corners(beliefs, data):
    if len(beliefs) != data.n_states:
        raise PreconditionError(
            f"beliefs have {len(beliefs)} states but the dataset has {data.n_states}"
        )
    corners = []
    for index, obs in enumerate(data.observations):
        state = corner_state(obs)
        if state is None:
            raise PreconditionError(f"observation {index + 1} is diversified; corner demands required")
        ratio, other = corner_ratio(beliefs, obs)
        corners.append(_Corner(index, state, obs.demand[state], ratio, other, obs))
    return corners


def _tightest(candidates, pick):
    """candidates: (index, expr). Returns (index, expr) of the min or max, first on ties."""
    best = None
    for index, expr in candidates:
        value = _decimal(expr)
        if best is None or pick(value, best[2]):
            best = (index, expr, value)
    return (best[0], best[1]) if best else (None, None)


def _smaller(a, b):
    return a < b


def _larger(a, b):
    return a > b


def _solve_cara(corners):
    if any(c.ratio is not None and c.ratio <= 1 for c in corners):
        index = next(c.index for c in corners if c.ratio is not None and c.ratio <= 1)
        return ParameterRegion("cara", "empty", "beta", binding_observation=index, binding_reason="mrs")
    bounds = [(c.index, sp.log(_rational(c.ratio)) / _rational(c.w)) for c in corners if c.ratio is not None]
    index, upper = _tightest(bounds, _smaller)
    if upper is None:
        return ParameterRegion("cara", "all", "beta", lower=sp.Integer(0))
    return ParameterRegion(
        "cara", "interval", "beta", lower=sp.Integer(0), upper=upper, closed_upper=True,
        binding_observation=index, binding_side="upper", binding_reason="mrs",
    )


def _solve_shifted_power(corners, fixed):
    if "alpha" in fixed:
        alpha = _rational(parse_rational(fixed["alpha"]))
        if not 0 < alpha < 1:
            raise FamilyDomainError("shifted_power: fixed alpha must lie in (0, 1)")
        fixed_values = {"alpha": alpha}
        bad = [c for c in corners if c.ratio is not None and c.ratio <= 1]
        if bad:
            return ParameterRegion(
                "shifted_power", "empty", "c", fixed=fixed_values,
                binding_observation=bad[0].index, binding_reason="mrs",
            )
        bounds = [
            (c.index, _rational(c.w) / (_rational(c.ratio) ** (1 / (1 - alpha)) - 1))
            for c in corners
            if c.ratio is not None
        ]
        index, lower = _tightest(bounds, _larger)
        if lower is None:
            return ParameterRegion("shifted_power", "all", "c", lower=sp.Integer(0), fixed=fixed_values)
        return ParameterRegion(
            "shifted_power", "interval", "c", lower=lower, closed_lower=True, fixed=fixed_values,
            binding_observation=index, binding_side="lower", binding_reason="mrs",
        )

    c_value = _rational(parse_rational(fixed.get("c", 1)))
    if c_value <= 0:
        raise FamilyDomainError("shifted_power: fixed c must be positive")
    fixed_values = {"c": c_value}
    bounds = [
        (c.index, 1 + sp.log(1 / _rational(c.ratio)) / sp.log((_rational(c.w) + c_value) / c_value))
        for c in corners
        if c.ratio is not None
    ]
    index, lower = _tightest(bounds, _larger)
    if lower is None or _decimal(lower) <= 0:
        return ParameterRegion(
            "shifted_power", "interval", "alpha", lower=sp.Integer(0), upper=sp.Integer(1), fixed=fixed_values
        )
    if _decimal(lower) >= 1:
        return ParameterRegion(
            "shifted_power", "empty", "alpha", fixed=fixed_values, binding_observation=index, binding_reason="mrs"
        )
    return ParameterRegion(
        "shifted_power", "interval", "alpha", lower=lower, upper=sp.Integer(1), closed_lower=True,
        fixed=fixed_values, binding_observation=index, binding_side="lower", binding_reason="mrs",
    )


def _solve_quadratic(corners):
    bounds = [
        (c.index, (1 - 1 / _rational(c.ratio)) / (2 * _rational(c.w))) for c in corners if c.ratio is not None
    ]
    index, upper = _tightest(bounds, _smaller)
    reason = "mrs"

    # keep every budget extreme inside the increasing part [0, theta / (2 lambda)]
    extremes = []
    for c in corners:
        budget = sum(p * x for p, x in zip(c.obs.prices, c.obs.demand))
        extremes.append((c.index, max(budget / p for p in c.obs.prices)))
    mono_index, largest = max(extremes, key=lambda item: (item[1], -item[0]))
    monotone = 1 / (2 * _rational(largest))
    if upper is None or _decimal(monotone) < _decimal(upper):
        index, upper, reason = mono_index, monotone, "monotone_range"

    if _decimal(upper) <= 0:
        return ParameterRegion(
            "quadratic", "empty", "lambda_over_theta", binding_observation=index, binding_reason=reason
        )
    return ParameterRegion(
        "quadratic", "halfspace", "lambda_over_theta", lower=sp.Integer(0), upper=upper, closed_upper=True,
        binding_observation=index, binding_side="upper", binding_reason=reason,
    )


def _solve_hyperbolic(corners):
    bad = [c for c in corners if c.ratio is not None and c.ratio <= 1]
    if bad:
        return ParameterRegion("hyperbolic", "empty", "gamma", binding_observation=bad[0].index, binding_reason="mrs")
    bounds = [
        (c.index, (sp.sqrt(_rational(c.ratio)) - 1) / _rational(c.w)) for c in corners if c.ratio is not None
    ]
    index, upper = _tightest(bounds, _smaller)
    if upper is None:
        return ParameterRegion("hyperbolic", "all", "gamma", lower=sp.Integer(0))
    return ParameterRegion(
        "hyperbolic", "interval", "gamma", lower=sp.Integer(0), upper=upper, closed_upper=True,
        binding_observation=index, binding_side="upper", binding_reason="mrs",
    )


def _solve_linear(corners):
    bad = [c for c in corners if c.ratio is not None and c.ratio < 1]
    if bad:
        return ParameterRegion("linear", "empty", binding_observation=bad[0].index, binding_reason="mrs")
    return ParameterRegion("linear", "all")


def _solve_convex_quadratic(beliefs, corners):
    # uniqueness of the linear maximizer needs strict ratio dominance
    bad = [c for c in corners if c.ratio is not None and c.ratio <= 1]
    if bad:
        return ParameterRegion(
            "convex_quadratic", "empty", "epsilon", binding_observation=bad[0].index, binding_reason="mrs"
        )
    # the corner must also beat every other vertex of its budget
    bounds = []
    for c in corners:
        for state, price in enumerate(c.obs.prices):
            if state == c.state:
                continue
            r = _rational(c.obs.prices[c.state] / price)
            rho = _rational(beliefs[state] / beliefs[c.state])
            if rho * r**2 > 1:
                bounds.append((c.index, (1 - rho * r) / (_rational(c.w) * (rho * r**2 - 1))))
    index, upper = _tightest(bounds, _smaller)
    if upper is None:
        return ParameterRegion("convex_quadratic", "all", "epsilon", lower=sp.Integer(0))
    return ParameterRegion(
        "convex_quadratic", "interval", "epsilon", lower=sp.Integer(0), upper=upper, closed_upper=True,
        binding_observation=index, binding_side="upper", binding_reason="vertex",
    )


def solve_region(tag, beliefs: Beliefs, data: Dataset, fixed=None) -> ParameterRegion:
    """Exact parameter region of one family for the corner dataset under fixed beliefs."""
    if tag not in FAMILIES:
        raise FamilyDomainError(f"unknown utility family {tag!r}")
    fixed = dict(fixed or {})
    if tag == "crra":
        _corners(beliefs, data)
        return ParameterRegion("crra", "empty", "alpha", reason=CRRA_REASON)

    corners = _corners(beliefs, data)
    if tag == "cara":
        region = _solve_cara(corners)
    elif tag == "shifted_power":
        region = _solve_shifted_power(corners, fixed)
    elif tag == "quadratic":
        region = _solve_quadratic(corners)
    elif tag == "hyperbolic":
        region = _solve_hyperbolic(corners)
    elif tag == "linear":
        region = _solve_linear(corners)
    else:
        region = _solve_convex_quadratic(beliefs, corners)
    logger.info("Solved %s region: %s", tag, region.kind)
    return region


def all_family_report(beliefs: Beliefs, data: Dataset, fixed=None):
    """Regions of every family; fixed holds the shifted_power c or alpha (default c=1)."""
    report = {}
    for tag in CORNER_TAGS:
        report[tag] = solve_region(tag, beliefs, data, fixed if tag == "shifted_power" else None)
    report["crra"] = solve_region("crra", beliefs, data)
    return report
