"""Solver configuration."""
from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.core.errors import ConfigError
from src.core.logic.noise import GumbelNoise, NoiseModel, NoNoise, UniformNoise


class Semantics(str, Enum):
    GT = "gt"
    GODEL = "godel"
    PRODUCT = "product"
    LUKASIEWICZ = "lukasiewicz"


class SolveConfig(BaseModel):
    """Everything ``solve`` needs besides the instance.

    Leaving ``noise`` out picks Uniform(-1, 1) for the Gödel Trick and no
    noise for every other semantics.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    semantics: Semantics = Semantics.GT
    noise: NoiseModel
    samples: int = Field(100, ge=1)
    max_epochs: int = Field(50000, ge=0)
    learning_rate: float = Field(0.1, gt=0)
    init_range: float = Field(1.0, gt=0)
    master_seed: int = Field(0, ge=0)
    stop_on_solve: bool = True
    progress_granularity: int = Field(100, ge=1)
    workers: int = Field(1, ge=1)

    @model_validator(mode="before")
    @classmethod
    def _default_noise(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("noise") is None:
            semantics = Semantics(data.get("semantics", Semantics.GT))
            data = {**data, "noise": UniformNoise() if semantics is Semantics.GT else NoNoise()}
        return data

    @model_validator(mode="after")
    def _noise_matches_semantics(self):
        if self.semantics is Semantics.GT:
            if isinstance(self.noise, NoNoise):
                raise ValueError("the Gödel Trick needs a noise model")
            if isinstance(self.noise, GumbelNoise):
                raise ValueError("gumbel noise is reserved for categorical sampling")
        elif not isinstance(self.noise, NoNoise):
            raise ValueError(f"{self.semantics.value} semantics runs without noise")
        return self

    @classmethod
    def create(cls, **kwargs) -> "SolveConfig":
        """Validate and build, raising ConfigError instead of pydantic's ValidationError."""
        try:
            return cls(**kwargs)
        except ValidationError as e:
            messages = "; ".join(err["msg"] for err in e.errors())
            raise ConfigError(f"invalid solver configuration: {messages}") from e

    def replace(self, **changes) -> "SolveConfig":
        """Copy with changes; switching semantics alone resets noise to its default."""
        base = self.model_dump()
        if "semantics" in changes and "noise" not in changes:
            base.pop("noise")
        return SolveConfig.create(**{**base, **changes})

    @property
    def label(self) -> str:
        if self.semantics is Semantics.GT:
            return f"gt-{self.noise.kind}"
        return self.semantics.value
