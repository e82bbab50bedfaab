"""Noise models for the perturbed Gödel semantics.

A model supplies three things: i.i.d. draws of ε, the map
theta(x) = P(x + ε > 0) from an unperturbed logit to the probability that
the perturbed value is positive, and its inverse. Models are frozen
pydantic models so they can be echoed verbatim in reports.
"""
from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from scipy.special import expit, logit

from src.core.errors import NoiseError


class NoiseBase(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    def theta(self, x):
        raise NotImplementedError

    def theta_inv(self, p):
        raise NotImplementedError

    @property
    def label(self) -> str:
        return self.kind


def _check_probability(p):
    arr = np.asarray(p, dtype=np.float64)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise NoiseError("theta_inv needs probabilities strictly between 0 and 1")
    return arr


def _out(values, like):
    return float(values) if np.ndim(like) == 0 else values


class LogisticNoise(NoiseBase):
    """Logistic(0, scale); with scale 1, theta is the sigmoid and logits are log-odds."""
    kind: Literal["logistic"] = "logistic"
    scale: float = Field(1.0, gt=0)

    def sample(self, rng, size=None):
        return rng.logistic(0.0, self.scale, size)

    def theta(self, x):
        return _out(expit(np.asarray(x, dtype=np.float64) / self.scale), x)

    def theta_inv(self, p):
        return _out(self.scale * logit(_check_probability(p)), p)

    @property
    def label(self) -> str:
        return f"logistic(scale={self.scale:g})"


class UniformNoise(NoiseBase):
    """Uniform(a, b): theta is 0 below -b, linear on [-b, -a], 1 above -a."""
    kind: Literal["uniform"] = "uniform"
    a: float = -1.0
    b: float = 1.0

    @model_validator(mode="after")
    def _ordered(self):
        if not self.a < self.b:
            raise ValueError(f"uniform noise needs a < b, got a={self.a}, b={self.b}")
        return self

    def sample(self, rng, size=None):
        return rng.uniform(self.a, self.b, size)

    def theta(self, x):
        arr = np.asarray(x, dtype=np.float64)
        return _out(np.clip((arr + self.b) / (self.b - self.a), 0.0, 1.0), x)

    def theta_inv(self, p):
        return _out(_check_probability(p) * (self.b - self.a) - self.b, p)

    @property
    def label(self) -> str:
        return f"uniform({self.a:g},{self.b:g})"


class GumbelNoise(NoiseBase):
    """Gumbel(0, scale). Used for the categorical Gumbel-Max equivalence."""
    kind: Literal["gumbel"] = "gumbel"
    scale: float = Field(1.0, gt=0)

    def sample(self, rng, size=None):
        return rng.gumbel(0.0, self.scale, size)

    def theta(self, x):
        arr = np.asarray(x, dtype=np.float64)
        return _out(-np.expm1(-np.exp(arr / self.scale)), x)

    def theta_inv(self, p):
        arr = _check_probability(p)
        return _out(self.scale * np.log(-np.log1p(-arr)), p)

    @property
    def label(self) -> str:
        return f"gumbel(scale={self.scale:g})"


class NoNoise(NoiseBase):
    """Zero perturbation, for the plain Gödel and dense baselines."""
    kind: Literal["none"] = "none"

    def sample(self, rng, size=None):
        return 0.0 if size is None else np.zeros(size)

    def theta(self, x):
        raise NoiseError("theta undefined for noiseless model")

    def theta_inv(self, p):
        raise NoiseError("theta undefined for noiseless model")


NoiseModel = Annotated[Union[LogisticNoise, UniformNoise, GumbelNoise, NoNoise], Field(discriminator="kind")]

NOISE_NAMES = ("uniform", "logistic", "gumbel", "none")


def sample(model: NoiseBase, rng: np.random.Generator, size=None):
    return model.sample(rng, size)


def theta(model: NoiseBase, x):
    return model.theta(x)


def theta_inv(model: NoiseBase, p):
    return model.theta_inv(p)


def parse_noise(name: str, a: Optional[float] = None, b: Optional[float] = None,
                scale: Optional[float] = None) -> NoiseBase:
    """Build a model from its CLI name and optional parameters.

    For uniform noise a missing ``a`` defaults to ``-b`` and a missing ``b``
    to 1.
    """
    key = (name or "").strip().lower()
    try:
        if key == "uniform":
            b = 1.0 if b is None else float(b)
            a = -b if a is None else float(a)
            return UniformNoise(a=a, b=b)
        if key == "logistic":
            return LogisticNoise(scale=1.0 if scale is None else float(scale))
        if key == "gumbel":
            return GumbelNoise(scale=1.0 if scale is None else float(scale))
        if key == "none":
            return NoNoise()
    except ValidationError as e:
        raise NoiseError(f"invalid {key} noise parameters: {e.errors()[0]['msg']}") from e
    raise NoiseError(f"unknown noise model '{name}', expected one of {', '.join(NOISE_NAMES)}")


class NoiseBuffer:
    """Block prefetch of per-step noise rows for one sample.

    Draws ``block`` rows of ``width`` values at a time; rows come out in the
    same order as ``width``-sized draws taken one step at a time.
    """

    def __init__(self, model: NoiseBase, rng: np.random.Generator, width: int, block: int = 256):
        if width <= 0 or block <= 0:
            raise NoiseError("noise buffer needs positive width and block size")
        self.model = model
        self.rng = rng
        self.width = width
        self.block = block
        self._rows = np.empty((0, width))
        self._next = 0

    def next(self) -> np.ndarray:
        if self._next >= self._rows.shape[0]:
            self._rows = np.asarray(self.model.sample(self.rng, (self.block, self.width)), dtype=np.float64)
            self._next = 0
        row = self._rows[self._next]
        self._next += 1
        return row
