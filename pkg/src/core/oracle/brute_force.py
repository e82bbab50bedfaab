"""Exhaustive ground truth for small instances.

Assignments are enumerated in plain binary order with -1 before +1 and
variable 0 as the most significant position, in numpy chunks.
"""
from dataclasses import dataclass
from typing import Iterator, Optional, Union

import numpy as np

from src.core.errors import OracleError
from src.core.logic.formula import CnfFormula, Formula
from src.core.logic.noise import NoiseBase, NoNoise
from src.core.logic.semantics import bool_cnf_satisfied, eval_bool_batch, eval_godel_batch

MAX_SAT_VARS = 26
MAX_PROB_VARS = 20
CHUNK = 1 << 16


@dataclass(frozen=True)
class ExactProbResult:
    probability: float
    satisfying_count: int


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    sigma: float
    draws: int

    def within(self, exact: float, k: float = 4.0) -> bool:
        """|estimate - exact| <= k sigma, with sigma floored at the binomial sigma of ``exact``."""
        sigma = max(self.sigma, float(np.sqrt(exact * (1.0 - exact) / self.draws)))
        return abs(self.estimate - exact) <= k * sigma + 1e-12


def _bits(start: int, stop: int, n: int) -> np.ndarray:
    codes = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] >> shifts[None, :]) & 1).astype(bool)


def enumerate_assignments(n: int, chunk: int = CHUNK) -> Iterator[np.ndarray]:
    """(N, n) blocks of ±1 assignments covering all 2^n in lexicographic order."""
    total = 1 << n
    for start in range(0, total, chunk):
        yield np.where(_bits(start, min(start + chunk, total), n), 1, -1).astype(np.int8)


def brute_force_sat(target: Union[CnfFormula, Formula], num_vars: Optional[int] = None) -> Optional[np.ndarray]:
    """First satisfying assignment in lexicographic order, or None."""
    n = target.num_vars if num_vars is None else num_vars
    if n > MAX_SAT_VARS:
        raise OracleError(f"brute force is limited to {MAX_SAT_VARS} variables, got {n}")
    if n < target.num_vars:
        raise OracleError(f"num_vars {n} is smaller than the {target.num_vars} the target uses")
    for block in enumerate_assignments(n):
        if isinstance(target, CnfFormula):
            ok = bool_cnf_satisfied(target.clause_arrays, block.astype(np.float64))
        else:
            ok = eval_bool_batch(target, block) > 0
        hits = np.flatnonzero(ok)
        if hits.size:
            return block[hits[0]].copy()
    return None


def prob_logic_exact(target: Union[CnfFormula, Formula], probs) -> ExactProbResult:
    """Probability that the formula is true when variable i is true with probability probs[i]."""
    f = target.formula if isinstance(target, CnfFormula) else target
    n = f.num_vars
    if n > MAX_PROB_VARS:
        raise OracleError(f"exact probability is limited to {MAX_PROB_VARS} variables, got {n}")
    pi = np.asarray(probs, dtype=np.float64)
    if pi.ndim != 1 or pi.shape[0] < n:
        raise OracleError(f"need {n} probabilities, got {pi.shape}")
    if np.any((pi < 0.0) | (pi > 1.0)):
        raise OracleError("probabilities must lie in [0, 1]")
    pi = pi[:n]
    total, count = 0.0, 0
    for block in enumerate_assignments(n):
        weights = np.prod(np.where(block > 0, pi, 1.0 - pi), axis=1)
        true_rows = eval_bool_batch(f, block) > 0
        total += float(weights[true_rows].sum())
        count += int(true_rows.sum())
    return ExactProbResult(probability=min(1.0, max(0.0, total)), satisfying_count=count)


def mc_implicit_prob(target: Union[CnfFormula, Formula], logits, model: NoiseBase, n_draws: int,
                     rng: np.random.Generator, chunk: int = CHUNK) -> McEstimate:
    """Fraction of noise draws under which the perturbed Gödel value is positive."""
    if model is None or isinstance(model, NoNoise):
        raise OracleError("Monte-Carlo estimation needs a noise model")
    if n_draws < 1:
        raise OracleError("n_draws must be positive")
    f = target.formula if isinstance(target, CnfFormula) else target
    x = np.asarray(logits, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] < f.num_vars:
        raise OracleError(f"need {f.num_vars} logits, got shape {x.shape}")
    positives = 0
    for start in range(0, n_draws, chunk):
        size = min(chunk, n_draws - start)
        perturbed = x[None, :] + model.sample(rng, (size, x.shape[0]))
        positives += int(np.count_nonzero(eval_godel_batch(f, perturbed) > 0))
    p = positives / n_draws
    return McEstimate(estimate=p, sigma=float(np.sqrt(p * (1.0 - p) / n_draws)), draws=n_draws)
