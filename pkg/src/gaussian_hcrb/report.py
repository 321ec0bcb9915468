"""All scalar bounds of a model point in one record."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

from .estimation_bounds import (
    double_homodyne_precision,
    heterodyne_precision,
    qfi_matrix,
    quantumness,
    sld_crb,
    uhlmann_matrix,
)
from .hcrb import MinimizerConfig, minimize_h, optimal_gendyne
from .model import Model, ModelPoint


@dataclass(frozen=True)
class BoundsReport:
    model: str
    theta: tuple
    c_s: float
    c_h: float
    r_quantumness: float
    gendyne_best: Optional[tuple] = None
    heterodyne: Optional[float] = None
    double_homodyne: Optional[float] = None

    def __post_init__(self):
        slack = 1e-9 * max(1.0, self.c_s)
        if not (0 < self.c_s <= self.c_h + slack and self.c_h <= 2 * self.c_s + slack):
            raise ValueError(
                f"bound ordering violated: C^S={self.c_s}, C^H={self.c_h}"
            )
        if not -1e-10 <= self.r_quantumness <= 1 + 1e-10:
            raise ValueError(f"quantumness outside [0, 1]: {self.r_quantumness}")

    def as_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


def bounds_report(point: ModelPoint, cfg: MinimizerConfig = MinimizerConfig()) -> BoundsReport:
    """Evaluate C^S, the numerical C^H, R and the relevant measurement precisions.

    Raises:
        ConvergenceError: if the HCRB minimisation fails.
    """
    r = point.r
    common = dict(
        model=point.model.value,
        theta=point.theta,
        c_s=float(sld_crb(point)),
        c_h=minimize_h(point, cfg).value,
        r_quantumness=quantumness(qfi_matrix(point), uhlmann_matrix(point)),
    )
    if point.model is Model.SINGLE:
        return BoundsReport(
            **common,
            gendyne_best=optimal_gendyne(r),
            heterodyne=float(heterodyne_precision(r)),
        )
    return BoundsReport(**common, double_homodyne=double_homodyne_precision(r))
