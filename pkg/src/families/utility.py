import logging
import math
from dataclasses import dataclass
from typing import ClassVar, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.errors import FamilyDomainError
from src.model import parse_rational

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InadaLimit:
    finite: bool
    value: Optional[float] = None

    def to_dict(self):
        if self.finite:
            return {"finite": True, "value": self.value}
        return {"finite": False}


def _as_array(x):
    values = np.asarray(x, dtype=float)
    if np.any(values < 0) or np.any(np.isnan(values)):
        raise FamilyDomainError(f"utility is only defined on nonnegative wealth, got {x!r}")
    return values


def _out(values, x):
    return float(values) if np.ndim(x) == 0 else values


def _check_kappa(kappa):
    kappa = float(kappa)
    if not 0 < kappa <= 1:
        raise FamilyDomainError(f"scaling factor must lie in (0, 1], got {kappa}")
    return kappa


class UtilityFamily(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    tag: ClassVar[str] = ""
    concave: ClassVar[bool] = True
    convex: ClassVar[bool] = False

    def evaluate(self, x, optimization=False):
        values = _as_array(x)
        if optimization and np.any(values > self.monotone_limit()):
            raise FamilyDomainError(
                f"{self.tag}: wealth beyond the monotone range [0, {self.monotone_limit():g}]"
            )
        return _out(self._u(values), x)

    def derivative(self, x):
        values = _as_array(x)
        with np.errstate(divide="ignore"):
            return _out(self._du(values), x)

    def marginal_ratio(self, x):
        """u'(x) / u'(0)."""
        values = _as_array(x)
        return _out(self._ratio(values), x)

    def _ratio(self, values):
        return self._du(values) / self._du(np.zeros_like(values))

    def inada_limit(self) -> InadaLimit:
        return InadaLimit(finite=True, value=float(self._du(np.float64(0.0))))

    def monotone_limit(self):
        return math.inf

    def params(self):
        return self.model_dump()

    def to_dict(self):
        return {"family": self.tag, "params": self.params()}


class ShiftedPower(UtilityFamily):
    tag: ClassVar[str] = "shifted_power"

    alpha: float = Field(gt=0, lt=1)
    c: float = Field(1.0, gt=0)

    def _u(self, x):
        return (x + self.c) ** self.alpha - self.c**self.alpha

    def _du(self, x):
        return self.alpha * (x + self.c) ** (self.alpha - 1)

    def _ratio(self, x):
        return ((x + self.c) / self.c) ** (self.alpha - 1)

    def scale(self, kappa):
        # set c_alpha = 1/kappa in the normalised (1 + kappa x)^alpha form
        return ShiftedPower(alpha=self.alpha, c=self.c / _check_kappa(kappa))


class CARA(UtilityFamily):
    tag: ClassVar[str] = "cara"

    beta: float = Field(gt=0)

    def _u(self, x):
        return -np.expm1(-self.beta * x)

    def _du(self, x):
        return self.beta * np.exp(-self.beta * x)

    def _ratio(self, x):
        return np.exp(-self.beta * x)

    def scale(self, kappa):
        return CARA(beta=self.beta * _check_kappa(kappa))


class Quadratic(UtilityFamily):
    tag: ClassVar[str] = "quadratic"

    theta: float = Field(1.0, gt=0)
    lam: float = Field(gt=0, alias="lambda")

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    def _u(self, x):
        return self.theta * x - self.lam * x**2

    def _du(self, x):
        return self.theta - 2 * self.lam * x

    def _ratio(self, x):
        return 1 - 2 * (self.lam / self.theta) * x

    def monotone_limit(self):
        return self.theta / (2 * self.lam)

    def scale(self, kappa):
        return Quadratic(theta=self.theta, lam=self.lam * _check_kappa(kappa))

    def params(self):
        return {"theta": self.theta, "lambda": self.lam}


class Hyperbolic(UtilityFamily):
    tag: ClassVar[str] = "hyperbolic"

    gamma: float = Field(gt=0)

    def _u(self, x):
        return x / (1 + self.gamma * x)

    def _du(self, x):
        return 1 / (1 + self.gamma * x) ** 2

    def _ratio(self, x):
        return 1 / (1 + self.gamma * x) ** 2

    def scale(self, kappa):
        return Hyperbolic(gamma=self.gamma * _check_kappa(kappa))


class Linear(UtilityFamily):
    tag: ClassVar[str] = "linear"
    convex: ClassVar[bool] = True

    def _u(self, x):
        return x

    def _du(self, x):
        return np.ones_like(x)

    def _ratio(self, x):
        return np.ones_like(x)

    def scale(self, kappa):
        _check_kappa(kappa)
        return Linear()


class ConvexQuadratic(UtilityFamily):
    tag: ClassVar[str] = "convex_quadratic"
    concave: ClassVar[bool] = False
    convex: ClassVar[bool] = True

    epsilon: float = Field(gt=0)

    def _u(self, x):
        return x + self.epsilon * x**2

    def _du(self, x):
        return 1 + 2 * self.epsilon * x

    def _ratio(self, x):
        return 1 + 2 * self.epsilon * x

    def scale(self, kappa):
        return ConvexQuadratic(epsilon=self.epsilon * _check_kappa(kappa))


class CRRA(UtilityFamily):
    tag: ClassVar[str] = "crra"

    alpha: float = Field(gt=0, lt=1)

    def _u(self, x):
        return x**self.alpha

    def _du(self, x):
        with np.errstate(divide="ignore"):
            return self.alpha * np.power(x, self.alpha - 1)

    def marginal_ratio(self, x):
        raise FamilyDomainError("crra: marginal utility at zero is infinite, u'(x)/u'(0) is undefined")

    def inada_limit(self) -> InadaLimit:
        return InadaLimit(finite=False)

    def scale(self, kappa):
        # x^alpha is homothetic: (kappa x)^alpha is cardinally equivalent
        _check_kappa(kappa)
        return CRRA(alpha=self.alpha)


FAMILIES = {
    cls.tag: cls for cls in (ShiftedPower, CARA, Quadratic, Hyperbolic, Linear, ConvexQuadratic, CRRA)
}
CORNER_TAGS = ("shifted_power", "cara", "quadratic", "hyperbolic", "linear", "convex_quadratic")


def make_family(tag, **params):
    if tag not in FAMILIES:
        raise FamilyDomainError(f"unknown utility family {tag!r}; choose from {', '.join(FAMILIES)}")
    try:
        return FAMILIES[tag](**params)
    except ValidationError as e:
        detail = "; ".join(f"{'.'.join(map(str, err['loc']))}: {err['msg']}" for err in e.errors())
        raise FamilyDomainError(f"{tag}: {detail}") from None


def parse_params(text):
    """'beta=0.002,c=1' -> {'beta': 0.002, 'c': 1.0}; values may be a/b rationals."""
    params = {}
    if not text:
        return params
    for item in text.split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise FamilyDomainError(f"parameter {item!r} is not of the form name=value")
        name, value = item.split("=", 1)
        params[name.strip()] = float(parse_rational(value.strip()))
    return params


def parse_family(tag, params_text=""):
    return make_family(tag, **parse_params(params_text))