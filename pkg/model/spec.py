"""
Spec Module - Single-agent model families and the choice rule
Single Responsibility: describe binary, multinomial and bundle models and pick outcomes from draws
"""

from itertools import product
from typing import List, Literal, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from common.utils import Label
from numerics.grids import Grid1D
from .index import GDistribution, IndexModel

Family = Literal["binary", "multinomial", "bundles"]

MAX_BUNDLE_GOODS = 8


def bundle_profiles(n: int) -> List[Tuple[int, ...]]:
    """(0,..,0) first, then by binary counting with the first coordinate fastest."""
    return [tuple(reversed(p)) for p in product((0, 1), repeat=n)]


def family_outcomes(family: str, n_goods: int) -> List[Label]:
    if family == "binary":
        return [0, 1]
    if family == "multinomial":
        return list(range(n_goods + 1))
    return bundle_profiles(n_goods)


def family_loadings(family: str, n_goods: int, z2: Sequence[float]) -> NDArray[np.float64]:
    """Coefficient on the index in each inside alternative's utility."""
    z2 = np.asarray(z2, dtype=np.float64)
    if family in ("binary", "multinomial"):
        return z2.copy()
    profiles = np.asarray(bundle_profiles(n_goods)[1:], dtype=np.float64)
    return profiles @ z2


class ModelSpec(BaseModel):
    """Utilities u_y = orientation·L_y(z₂)·(β₀(w)+β₁(w)z₁+e) + g_y, u_0 = 0."""

    model_config = ConfigDict(frozen=True)

    family: Family
    n_goods: int = Field(default=1, ge=1)
    index: IndexModel
    g: GDistribution
    z1_grid: Grid1D
    z2_points: List[List[float]] = Field(min_length=1)
    orientation: Literal[-1, 1] = 1

    @model_validator(mode="after")
    def _consistent(self) -> "ModelSpec":
        if self.family == "binary" and self.n_goods != 1:
            raise ValueError("binary family has exactly one inside good")
        if self.family == "bundles" and self.n_goods > MAX_BUNDLE_GOODS:
            raise ValueError(f"bundles support at most {MAX_BUNDLE_GOODS} goods")
        for point in self.z2_points:
            if len(point) != self.n_goods:
                raise ValueError(f"z2 points must have {self.n_goods} coordinates (got {point})")
            if not np.all(np.isfinite(point)):
                raise ValueError("z2 points must be finite")
        if self.family == "binary":
            if any(p[0] == 0.0 for p in self.z2_points):
                raise ValueError("z2 = 0 is not allowed: the index law v = z2*(...) is degenerate at z2 = 0")
        elif not any(len(set(p)) == 1 and p[0] != 0.0 for p in self.z2_points):
            raise ValueError("at least one z2 point must have all coordinates equal and nonzero")
        if self.g.dimension != self.n_alternatives:
            raise ValueError(f"g dimension {self.g.dimension} does not match {self.n_alternatives} inside alternatives")
        if set(self.g.by_w) != set(self.index.w_levels):
            raise ValueError("g must be given for exactly the index's w levels")
        return self

    @property
    def w_levels(self) -> List[str]:
        return list(self.index.w_levels)

    @property
    def n_alternatives(self) -> int:
        if self.family == "bundles":
            return 2 ** self.n_goods - 1
        return self.n_goods

    def loadings(self, z2_index: int) -> NDArray[np.float64]:
        return family_loadings(self.family, self.n_goods, self.z2_points[z2_index])

    def kernel_scale(self, z2_index: int) -> float:
        """z₂ multiplier of the latent index seen by the choice kernel.

        Binary models carry z₂ inside v; multinomial and bundle kernels are
        indexed by the unscaled index and keep z₂ as a conditioning point.
        """
        if self.family == "binary":
            return float(self.z2_points[z2_index][0])
        return 1.0

    def reflected(self) -> "ModelSpec":
        """Observationally equivalent specification with (−β₀, −β₁)."""
        return self.model_copy(update={"index": self.index.negated(), "orientation": -self.orientation})


def outcome_set(spec: ModelSpec) -> List[Label]:
    """Outcome labels, outside option first."""
    return family_outcomes(spec.family, spec.n_goods)


def choice_given_draw(spec: ModelSpec, w: str, z1: float, z2: Sequence[float], e1: float,
                      g: Sequence[float]) -> Label:
    """
    Utility-maximizing outcome.

    Ties go to the earliest label in outcome_set order. Bundles follow bundle_profiles, which
    compares labels last coordinate first, so (1,0) beats (0,1).
    """
    g = np.asarray(g, dtype=np.float64)
    if g.shape != (spec.n_alternatives,):
        raise ValueError(f"g must have {spec.n_alternatives} coordinates")
    index = spec.index.beta0[w] + spec.index.beta1[w] * z1 + e1
    utilities = np.concatenate(([0.0], spec.orientation * family_loadings(spec.family, spec.n_goods, z2) * index + g))
    return outcome_set(spec)[int(np.argmax(utilities))]
