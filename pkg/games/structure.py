"""
Structure Module - payoffs and solution concept of a binary entry game
Single Responsibility: validated game primitives and the per-player index laws
"""

from typing import Dict, List, Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from common.config import GAME_CONFIG
from model.index import IndexModel
from model.spec import bundle_profiles

Concept = Literal["minimax", "collusion", "rationalizability"]
CONCEPTS = ("minimax", "collusion", "rationalizability")


class GameStructure(BaseModel):
    """
    Player i's payoff from entering: α_i(w) + v_i + Σ_j δ_ij(w)·y_j,
    with v_i = β₀,ᵢ(w) + β₁,ᵢ(w)·z_i + e_i and e_i i.i.d. N(0, 1).
    """

    model_config = ConfigDict(frozen=True)

    n_players: int = Field(default=2, ge=2, le=3)
    w_levels: List[str] = Field(min_length=1)
    alpha: Dict[str, List[float]]
    delta: Dict[str, List[List[float]]]
    index: List[IndexModel]
    concept: Concept
    selection: float = Field(default=GAME_CONFIG["selection"], ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _shapes(self) -> "GameStructure":
        levels = set(self.w_levels)
        if set(self.alpha) != levels or set(self.delta) != levels:
            raise ValueError("alpha and delta need one entry per w level")
        if len(self.index) != self.n_players:
            raise ValueError(f"one index law per player required ({self.n_players})")
        for idx in self.index:
            if set(idx.w_levels) != levels:
                raise ValueError("player index laws must cover the game's w levels")
        for w in self.w_levels:
            if len(self.alpha[w]) != self.n_players:
                raise ValueError(f"alpha[{w}] needs {self.n_players} entries")
            d = np.asarray(self.delta[w], dtype=np.float64)
            if d.shape != (self.n_players, self.n_players):
                raise ValueError(f"delta[{w}] must be {self.n_players}x{self.n_players}")
            if np.any(np.diag(d) != 0.0):
                raise ValueError("delta diagonal must be zero")
            if not np.all(np.isfinite(d)) or not np.all(np.isfinite(self.alpha[w])):
                raise ValueError("payoff parameters must be finite")
        return self

    @classmethod
    def two_player(cls, alpha, delta12: float, delta21: float, concept: str,
                   selection: float = None, beta0=(0.0, 0.0), beta1=(1.0, 1.0), w: str = "0") -> "GameStructure":
        """Single-w two-player game."""
        index = [IndexModel.single(float(b0), float(b1), w=w) for b0, b1 in zip(beta0, beta1)]
        return cls(
            n_players=2,
            w_levels=[w],
            alpha={w: [float(a) for a in alpha]},
            delta={w: [[0.0, float(delta12)], [float(delta21), 0.0]]},
            index=index,
            concept=concept,
            selection=GAME_CONFIG["selection"] if selection is None else selection,
        )

    def alpha_vec(self, w: str) -> NDArray[np.float64]:
        return np.asarray(self.alpha[w], dtype=np.float64)

    def delta_mat(self, w: str) -> NDArray[np.float64]:
        return np.asarray(self.delta[w], dtype=np.float64)

    def mean_shift(self, w: str, player: int, z: ArrayLike) -> NDArray[np.float64]:
        return self.index[player].mean_shift(w, z)

    def profiles(self) -> List[tuple]:
        return bundle_profiles(self.n_players)

    def with_concept(self, concept: str) -> "GameStructure":
        return self.model_copy(update={"concept": concept})
