"""Categorical variables under the perturbed Gödel semantics.

A K-way choice is kept as K scores. ``shift`` translates them by the
midpoint of the two largest, which leaves exactly one positive entry, so
taking signs yields a one-hot ±1 vector. With Gumbel noise the positive
index is distributed as softmax(z).
"""
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from src.core.errors import CategoricalError
from src.core.logic.noise import NoiseBase, NoNoise

EPS = np.finfo(np.float64).eps


@dataclass(frozen=True, eq=False)
class CategoricalLogits:
    z: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=np.float64)
        if z.ndim != 1 or z.shape[0] < 2:
            raise CategoricalError(f"categorical logits need K >= 2 entries, got shape {z.shape}")
        if not np.all(np.isfinite(z)):
            raise CategoricalError("categorical logits must be finite")
        object.__setattr__(self, "z", z)

    @property
    def num_classes(self) -> int:
        return self.z.shape[0]


ScoreLike = Union[CategoricalLogits, np.ndarray, list, tuple]


def _scores(x: ScoreLike) -> np.ndarray:
    arr = x.z if isinstance(x, CategoricalLogits) else np.asarray(x, dtype=np.float64)
    if arr.ndim == 0 or arr.shape[-1] < 2:
        raise CategoricalError(f"shift needs K >= 2 entries on the last axis, got shape {arr.shape}")
    return arr


def top_two(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Indices of the largest and second largest entry along the last axis.

    Ties go to the lowest index for the first, then the next lowest.
    """
    first = np.argmax(x, axis=-1)
    masked = x.copy()
    np.put_along_axis(masked, first[..., None], -np.inf, axis=-1)
    second = np.argmax(masked, axis=-1)
    return first, second


def shift(x: ScoreLike) -> np.ndarray:
    """Subtract the midpoint of the top two entries; works on (K,) or (N, K).

    On an exact top-two tie the first index is set to +eps and the second to
    -eps so that one entry stays positive.
    """
    arr = _scores(x)
    first, second = top_two(arr)
    hi = np.take_along_axis(arr, first[..., None], axis=-1)
    lo = np.take_along_axis(arr, second[..., None], axis=-1)
    out = arr - (hi + lo) / 2.0
    tied = (hi == lo)[..., 0]
    if np.any(tied):
        fix_hi = np.where(tied, EPS, np.take_along_axis(out, first[..., None], axis=-1)[..., 0])
        fix_lo = np.where(tied, -EPS, np.take_along_axis(out, second[..., None], axis=-1)[..., 0])
        np.put_along_axis(out, first[..., None], fix_hi[..., None], axis=-1)
        np.put_along_axis(out, second[..., None], fix_lo[..., None], axis=-1)
    return out


def _require_noise(model: NoiseBase) -> None:
    if model is None or isinstance(model, NoNoise):
        raise CategoricalError("categorical sampling needs a noise model")


def categorical_gt_sample(z: ScoreLike, model: NoiseBase, rng: np.random.Generator) -> Tuple[np.ndarray, int]:
    """One draw: signs of shift(z + ε) and the index of the single +1."""
    _require_noise(model)
    scores = CategoricalLogits(z if not isinstance(z, CategoricalLogits) else z.z).z
    perturbed = scores + model.sample(rng, scores.shape[0])
    signed = np.where(shift(perturbed) > 0, 1, -1).astype(np.int8)
    return signed, int(np.argmax(signed))


def categorical_gt_sample_batch(z: ScoreLike, model: NoiseBase, rng: np.random.Generator,
                                n_draws: int) -> Tuple[np.ndarray, np.ndarray]:
    """``n_draws`` draws sharing the same noise for both readouts.

    Returns (index of the +1 after shift, plain argmax of z + ε).
    """
    _require_noise(model)
    scores = CategoricalLogits(z if not isinstance(z, CategoricalLogits) else z.z).z
    perturbed = scores[None, :] + model.sample(rng, (n_draws, scores.shape[0]))
    shifted_index = np.argmax(shift(perturbed) > 0, axis=1)
    return shifted_index, np.argmax(perturbed, axis=1)


def rescale_pm1_to_01(v) -> np.ndarray:
    arr = np.asarray(v)
    if not np.all((arr == 1) | (arr == -1)):
        raise CategoricalError("entries must be -1 or +1")
    return ((arr + 1) // 2).astype(np.int8)


def rescale_01_to_pm1(z) -> np.ndarray:
    arr = np.asarray(z)
    if not np.all((arr == 0) | (arr == 1)):
        raise CategoricalError("entries must be 0 or 1")
    return (2 * arr - 1).astype(np.int8)

