"""
Run Config Module - the JSON document that drives one run
Single Responsibility: validate experiment settings and resolve command-line overrides
"""

from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from common.config import OUTPUT_CONFIG
from games.structure import GameStructure
from model.spec import ModelSpec
from numerics.grids import Grid1D
from numerics.regularization import RegStrategy, TruncatedSVD

Experiment = Literal["forward", "recover-h", "ident-beta", "recover-fg", "game-classify", "full-pipeline"]
EXPERIMENTS = ("forward", "recover-h", "ident-beta", "recover-fg", "game-classify", "full-pipeline")
MODEL_ONLY = ("ident-beta", "recover-fg")
GAME_ONLY = ("game-classify",)


def _as_label(value: Any):
    if isinstance(value, (list, tuple)):
        return tuple(int(x) for x in value)
    return value if value is None else int(value)


def _expand_z2_grid(model: Dict[str, Any]) -> Dict[str, Any]:
    """Allow `z2_grid` (+ optional `z2_direction`) in place of an explicit z2_points list."""
    if not isinstance(model, dict) or "z2_grid" not in model:
        return model
    model = dict(model)
    grid = Grid1D.model_validate(model.pop("z2_grid"))
    direction = model.pop("z2_direction", None)
    if direction is None:
        direction = [1.0] * int(model.get("n_goods", 1))
    points = [[float(c * d) for d in direction] for c in grid.nodes]
    model["z2_points"] = list(model.get("z2_points", [])) + points
    return model


class RunConfig(BaseModel):
    """One experiment: what to build, how to invert, where to write."""

    model_config = ConfigDict(frozen=True)

    experiment: Experiment
    model: Optional[ModelSpec] = None
    game: Optional[GameStructure] = None
    z_grids: Optional[List[Grid1D]] = None
    v_grid: Optional[Grid1D] = None
    v_grids: Optional[List[Grid1D]] = None
    regularization: RegStrategy = Field(default_factory=TruncatedSVD)
    smoothing: bool = True
    pooled: bool = False
    y_star: Optional[Union[int, Tuple[int, ...]]] = None
    eta_direction: Optional[List[float]] = None
    outcome_pair: Tuple[Tuple[int, int], Tuple[int, int]] = ((0, 0), (1, 1))
    sample_size: Optional[int] = Field(default=None, ge=1)
    seed: int = 0
    output_dir: str = OUTPUT_CONFIG["default_dir"]

    @model_validator(mode="before")
    @classmethod
    def _expand(cls, data: Any) -> Any:
        if isinstance(data, dict) and "model" in data:
            data = dict(data)
            data["model"] = _expand_z2_grid(data["model"])
        return data

    @field_validator("y_star", mode="before")
    @classmethod
    def _label(cls, value: Any):
        return _as_label(value)

    @model_validator(mode="after")
    def _subject(self) -> "RunConfig":
        if self.model is None and self.game is None:
            raise ValueError("config needs a 'model' or a 'game' section")
        if self.model is not None and self.game is not None:
            raise ValueError("config takes either a 'model' or a 'game' section, not both")
        if self.experiment in MODEL_ONLY and self.model is None:
            raise ValueError(f"experiment {self.experiment} needs a 'model' section")
        if self.experiment in GAME_ONLY and self.game is None:
            raise ValueError(f"experiment {self.experiment} needs a 'game' section")
        if self.game is not None:
            if self.game.n_players != 2:
                raise ValueError("game runs support two players")
            if self.z_grids is None or len(self.z_grids) != 2:
                raise ValueError("game runs need 'z_grids' with one grid per player")
            if self.v_grids is not None and len(self.v_grids) != 2:
                raise ValueError("'v_grids' needs one grid per player")
        if self.pooled and (self.model is None or self.model.family != "binary"):
            raise ValueError("pooling across z2 points needs a binary model (the kernel depends on z2 otherwise)")
        if self.eta_direction is not None and not np.any(self.eta_direction):
            raise ValueError("eta_direction must be nonzero")
        return self

    def with_overrides(self, experiment: Optional[str] = None, output_dir: Optional[str] = None,
                       seed: Optional[int] = None, regularization=None) -> "RunConfig":
        """Apply command-line values on top of the document (re-validated)."""
        data = self.model_dump(mode="json")
        if experiment is not None:
            data["experiment"] = experiment
        if output_dir is not None:
            data["output_dir"] = output_dir
        if seed is not None:
            data["seed"] = seed
        if regularization is not None:
            data["regularization"] = regularization.model_dump(mode="json")
        return RunConfig.model_validate(data)
