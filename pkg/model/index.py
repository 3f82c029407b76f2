"""
Index Module - Gaussian latent-index law and the heterogeneity oracles
Single Responsibility: hold β₀(w), β₁(w), sign knowledge and the law of g
"""

from typing import Annotated, Dict, List, Literal, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import special


class SignInfo(BaseModel):
    """Which coefficient's sign is known, and its value."""

    model_config = ConfigDict(frozen=True)

    parameter: Literal["beta0", "beta1"]
    sign: Literal[-1, 1]

    def flipped(self) -> "SignInfo":
        return SignInfo(parameter=self.parameter, sign=-self.sign)


class IndexModel(BaseModel):
    """v = z₂·(β₀(w) + β₁(w)·z₁ + e), e ~ N(0, 1)."""

    model_config = ConfigDict(frozen=True)

    w_levels: List[str] = Field(min_length=1)
    beta0: Dict[str, float]
    beta1: Dict[str, float]
    sign_info: Dict[str, SignInfo]

    @model_validator(mode="after")
    def _complete(self) -> "IndexModel":
        levels = set(self.w_levels)
        if len(levels) != len(self.w_levels):
            raise ValueError("w_levels must be distinct")
        for name in ("beta0", "beta1", "sign_info"):
            keys = set(getattr(self, name))
            if keys != levels:
                raise ValueError(f"{name} must have exactly one entry per w level (missing/extra: {sorted(keys ^ levels)})")
        for w in self.w_levels:
            if not np.isfinite(self.beta0[w]) or not np.isfinite(self.beta1[w]):
                raise ValueError(f"index coefficients must be finite (w={w})")
            if self.beta1[w] == 0.0:
                raise ValueError(f"beta1 must be nonzero (w={w})")
        return self

    @classmethod
    def single(cls, beta0: float, beta1: float, sign: SignInfo = None, w: str = "0") -> "IndexModel":
        """One-level index; the sign of β₁ is taken as known unless given."""
        if sign is None:
            sign = SignInfo(parameter="beta1", sign=1 if beta1 > 0 else -1)
        return cls(w_levels=[w], beta0={w: beta0}, beta1={w: beta1}, sign_info={w: sign})

    def mean_shift(self, w: str, z1: ArrayLike) -> NDArray[np.float64]:
        return self.beta0[w] + self.beta1[w] * np.asarray(z1, dtype=np.float64)

    def negated(self) -> "IndexModel":
        """(−β₀, −β₁) with every sign tag flipped."""
        return IndexModel(
            w_levels=list(self.w_levels),
            beta0={w: -b for w, b in self.beta0.items()},
            beta1={w: -b for w, b in self.beta1.items()},
            sign_info={w: s.flipped() for w, s in self.sign_info.items()},
        )

    def with_coefficients(self, w: str, beta0: float, beta1: float) -> "IndexModel":
        b0 = dict(self.beta0)
        b1 = dict(self.beta1)
        b0[w], b1[w] = beta0, beta1
        return IndexModel(w_levels=list(self.w_levels), beta0=b0, beta1=b1, sign_info=dict(self.sign_info))


def _check_probs(probs: List[float]) -> None:
    arr = np.asarray(probs, dtype=np.float64)
    if arr.size == 0 or np.any(arr < 0) or abs(arr.sum() - 1.0) > 1e-9:
        raise ValueError("mixture probabilities must be non-negative and sum to 1")


class PointMassMixture(BaseModel):
    """g takes value atoms[k] with probability probs[k]."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["point_mass"] = "point_mass"
    atoms: List[List[float]] = Field(min_length=1)
    probs: List[float]

    @model_validator(mode="after")
    def _shape(self) -> "PointMassMixture":
        _check_probs(self.probs)
        if len(self.atoms) != len(self.probs):
            raise ValueError("one probability per atom required")
        if len({len(a) for a in self.atoms}) != 1:
            raise ValueError("atoms must share one dimension")
        if np.any(np.isnan(np.asarray(self.atoms, dtype=np.float64))):
            raise ValueError("atoms must not be NaN")
        return self

    @property
    def dimension(self) -> int:
        return len(self.atoms[0])

    def cdf(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        points = np.asarray(points, dtype=np.float64)
        out = np.zeros(points.shape[:-1])
        for atom, p in zip(self.atoms, self.probs):
            out += p * np.all(np.asarray(atom) <= points, axis=-1)
        return out


class GaussianMixture(BaseModel):
    """Finite mixture of Gaussians with independent coordinates."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["gaussian"] = "gaussian"
    means: List[List[float]] = Field(min_length=1)
    scales: List[List[float]]
    probs: List[float]

    @model_validator(mode="after")
    def _shape(self) -> "GaussianMixture":
        _check_probs(self.probs)
        if not len(self.means) == len(self.scales) == len(self.probs):
            raise ValueError("means, scales and probs must have one entry per component")
        means = np.asarray(self.means, dtype=np.float64)
        scales = np.asarray(self.scales, dtype=np.float64)
        if means.ndim != 2 or means.shape != scales.shape:
            raise ValueError("means and scales must be equally shaped component vectors")
        if not np.all(np.isfinite(means)) or not np.all(scales > 0) or not np.all(np.isfinite(scales)):
            raise ValueError("means must be finite and scales positive")
        return self

    @property
    def dimension(self) -> int:
        return len(self.means[0])

    def cdf(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        points = np.asarray(points, dtype=np.float64)
        out = np.zeros(points.shape[:-1])
        for mean, scale, p in zip(self.means, self.scales, self.probs):
            z = (points - np.asarray(mean)) / np.asarray(scale)
            out += p * np.prod(special.ndtr(z), axis=-1)
        return out


GComponent = Annotated[Union[PointMassMixture, GaussianMixture], Field(discriminator="kind")]


class GDistribution(BaseModel):
    """Law of g = (g_y) per w level (known oracle families only)."""

    model_config = ConfigDict(frozen=True)

    dimension: int = Field(ge=1)
    by_w: Dict[str, GComponent]

    @model_validator(mode="after")
    def _dims(self) -> "GDistribution":
        for w, comp in self.by_w.items():
            if comp.dimension != self.dimension:
                raise ValueError(f"g component for w={w} has dimension {comp.dimension}, expected {self.dimension}")
        return self

    def for_w(self, w: str) -> Union[PointMassMixture, GaussianMixture]:
        return self.by_w[w]

    def cdf(self, w: str, points: ArrayLike) -> NDArray[np.float64]:
        """F_g(r | w) for points with trailing dimension J."""
        return self.by_w[w].cdf(np.asarray(points, dtype=np.float64))
