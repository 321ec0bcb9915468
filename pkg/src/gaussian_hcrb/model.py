"""Parameter points of the two statistical models."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class Model(enum.Enum):
    SINGLE = "single"
    TWO = "two"


@dataclass(frozen=True)
class ModelPoint:
    """A model identifier and ``theta = (Re alpha, Im alpha, r)``.

    ``model`` accepts a :class:`Model` or its string value.
    """

    model: Model
    theta: tuple

    def __post_init__(self):
        model = Model(self.model)
        theta = tuple(float(t) for t in self.theta)
        if len(theta) != 3:
            raise ValueError(f"theta must have three entries, got {len(theta)}")
        if not all(math.isfinite(t) for t in theta):
            raise ValueError(f"theta must be finite, got {theta}")
        if theta[2] < 0:
            raise ValueError(f"squeezing r must be non-negative, got {theta[2]}")
        object.__setattr__(self, "model", model)
        object.__setattr__(self, "theta", theta)

    @classmethod
    def single(cls, theta1: float = 0.0, theta2: float = 0.0, r: float = 0.0) -> "ModelPoint":
        return cls(Model.SINGLE, (theta1, theta2, r))

    @classmethod
    def two(cls, theta1: float = 0.0, theta2: float = 0.0, r: float = 0.0) -> "ModelPoint":
        return cls(Model.TWO, (theta1, theta2, r))

    @property
    def alpha(self) -> complex:
        return complex(self.theta[0], self.theta[1])

    @property
    def r(self) -> float:
        return self.theta[2]
