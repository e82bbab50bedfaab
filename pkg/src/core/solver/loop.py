"""The optimisation loop.

Every sample is an independent run with its own random streams, derived
from ``SeedSequence([master_seed, sample_index])``: one for the initial
logits, one for the noise and one for tie-breaking. Samples are advanced
together as rows of a (B, n) logit matrix; rows never interact, so the
result does not depend on how samples are grouped or how many worker
processes share them.

One epoch is one gradient ascent step per sample. A sample counts as
solved the first time the signs of its logits satisfy the CNF, either
before the step on the perturbed logits or after it on the plain ones.
"""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from src.core.errors import ConfigError, SolverError
from src.core.logic.formula import CnfFormula
from src.core.logic.gradient import (godel_cnf_grad_batch, lukasiewicz_grad_batch,
                                     product_grad_batch)
from src.core.logic.noise import NoiseBase, NoiseBuffer, NoNoise
from src.core.logic.semantics import bool_cnf_satisfied, eval_bool, godel_cnf_batch, signs
from src.core.solver.config import Semantics, SolveConfig
from src.core.solver.report import SolveReport, Timing, solved_curve

logger = logging.getLogger(__name__)


@dataclass
class SampleState:
    """One independent run: current logits and first-solve bookkeeping."""
    logits: np.ndarray
    epoch: int = 0
    solved_at: Optional[int] = None
    solved_by: Optional[str] = None
    witness: Optional[np.ndarray] = None
    rng: Optional[np.random.Generator] = None

    @classmethod
    def start(cls, cnf: CnfFormula, logits, rng: Optional[np.random.Generator] = None) -> "SampleState":
        """Wrap initial logits, recording a solve at epoch 0 if they already satisfy the CNF."""
        x = np.array(logits, dtype=np.float64)
        state = cls(logits=x, rng=rng)
        if bool_cnf_satisfied(cnf.clause_arrays, x[None, :])[0]:
            state._mark(0, "init", x)
        return state

    @property
    def solved(self) -> bool:
        return self.solved_at is not None

    def _mark(self, epoch: int, how: str, values: np.ndarray) -> None:
        if self.solved_at is None:
            self.solved_at = epoch
            self.solved_by = how
            self.witness = signs(values)


def _check_finite(logits: np.ndarray, lr: float) -> None:
    if not np.all(np.isfinite(logits)):
        raise SolverError(f"non-finite logit after update; learning rate {lr} is too large")


def step_gt(cnf: CnfFormula, state: SampleState, noise: NoiseBase, lr: float,
            rng: np.random.Generator) -> SampleState:
    """One Gödel Trick step: perturb, evaluate, move the active variable by ±lr."""
    if isinstance(noise, NoNoise):
        raise ConfigError("the Gödel Trick needs a noise model")
    arrays = cnf.clause_arrays
    epoch = state.epoch + 1
    perturbed = (state.logits + noise.sample(rng, cnf.num_vars))[None, :]
    if bool_cnf_satisfied(arrays, perturbed)[0]:
        state._mark(epoch, "perturbed", perturbed[0])
    batch = godel_cnf_batch(arrays, perturbed, [rng])
    var, direction = godel_cnf_grad_batch(arrays, batch)
    state.logits[var[0]] += lr * direction[0]
    _check_finite(state.logits, lr)
    if bool_cnf_satisfied(arrays, state.logits[None, :])[0]:
        state._mark(epoch, "unperturbed", state.logits)
    state.epoch = epoch
    return state


def step_baseline(cnf: CnfFormula, state: SampleState, semantics: Semantics, lr: float) -> SampleState:
    """One noiseless ascent step under Gödel, Product or Łukasiewicz semantics."""
    arrays = cnf.clause_arrays
    x = state.logits[None, :]
    if semantics is Semantics.GODEL:
        tie = [state.rng] if state.rng is not None else None
        var, direction = godel_cnf_grad_batch(arrays, godel_cnf_batch(arrays, x, tie))
        state.logits[var[0]] += lr * direction[0]
    elif semantics is Semantics.PRODUCT:
        state.logits += lr * product_grad_batch(arrays, x)[0]
    elif semantics is Semantics.LUKASIEWICZ:
        state.logits += lr * lukasiewicz_grad_batch(arrays, x)[0]
    else:
        raise ConfigError(f"{semantics.value} is not a baseline semantics")
    _check_finite(state.logits, lr)
    state.epoch += 1
    if bool_cnf_satisfied(arrays, state.logits[None, :])[0]:
        state._mark(state.epoch, "unperturbed", state.logits)
    return state


# --- batched engine ---

@dataclass
class _Outcome:
    index: int
    solved_at: Optional[int]
    solved_by: Optional[str]
    witness: Optional[np.ndarray]
    steps: int


def sample_streams(master_seed: int, index: int):
    """(init, noise, tie) generators of one sample."""
    children = np.random.SeedSequence([master_seed, index]).spawn(3)
    return tuple(np.random.default_rng(s) for s in children)


def _run_chunk(cnf: CnfFormula, config: SolveConfig, indices: Sequence[int],
               initial: Optional[np.ndarray]) -> List[_Outcome]:
    arrays = cnf.clause_arrays
    n = cnf.num_vars
    lr = config.learning_rate
    streams = [sample_streams(config.master_seed, i) for i in indices]
    if initial is not None:
        logits = np.array(initial, dtype=np.float64)
    else:
        logits = np.stack([s[0].uniform(-config.init_range, config.init_range, n) for s in streams])
    perturb = config.semantics is Semantics.GT
    buffers = [NoiseBuffer(config.noise, s[1], n) for s in streams] if perturb else None
    ties = [s[2] for s in streams]

    states = [SampleState(logits=logits[r]) for r in range(len(indices))]
    done = bool_cnf_satisfied(arrays, logits)
    for r in np.flatnonzero(done):
        states[r]._mark(0, "init", logits[r])
    steps = np.zeros(len(indices), dtype=np.int64)

    for epoch in range(1, config.max_epochs + 1):
        if config.stop_on_solve:
            rows = np.flatnonzero(~done)
            if rows.size == 0:
                break
        else:
            rows = np.arange(len(states))
        current = logits[rows]
        sat_perturbed = None

        if config.semantics in (Semantics.GT, Semantics.GODEL):
            if perturb:
                current = current + np.stack([buffers[r].next() for r in rows])
                sat_perturbed = bool_cnf_satisfied(arrays, current)
            batch = godel_cnf_batch(arrays, current, [ties[r] for r in rows])
            var, direction = godel_cnf_grad_batch(arrays, batch)
            logits[rows, var] += lr * direction
        elif config.semantics is Semantics.PRODUCT:
            logits[rows] += lr * product_grad_batch(arrays, current)
        else:
            logits[rows] += lr * lukasiewicz_grad_batch(arrays, current)

        updated = logits[rows]
        _check_finite(updated, lr)
        steps[rows] += 1
        sat_plain = bool_cnf_satisfied(arrays, updated)
        hits = sat_plain if sat_perturbed is None else sat_plain | sat_perturbed
        for pos in np.flatnonzero(hits & ~done[rows]):
            r = rows[pos]
            done[r] = True
            if sat_perturbed is not None and sat_perturbed[pos]:
                states[r]._mark(epoch, "perturbed", current[pos])
            elif sat_plain[pos]:
                states[r]._mark(epoch, "unperturbed", updated[pos])

    return [_Outcome(index=i, solved_at=s.solved_at, solved_by=s.solved_by,
                     witness=s.witness, steps=int(steps[r]))
            for r, (i, s) in enumerate(zip(indices, states))]


def _initial_matrix(initial_logits, config: SolveConfig, num_vars: int) -> Optional[np.ndarray]:
    if initial_logits is None:
        return None
    x = np.asarray(initial_logits, dtype=np.float64)
    if x.ndim == 1:
        x = np.tile(x, (config.samples, 1))
    if x.shape != (config.samples, num_vars):
        raise ConfigError(f"initial logits must have shape ({num_vars},) or ({config.samples}, {num_vars})")
    if not np.all(np.isfinite(x)):
        raise ConfigError("initial logits must be finite")
    return x


def solve(cnf: CnfFormula, config: SolveConfig, instance: Optional[str] = None,
          initial_logits=None) -> SolveReport:
    """Run ``config.samples`` independent samples on one CNF.

    ``initial_logits`` replaces the random initialisation; a single vector
    is shared by every sample.
    """
    started = time.perf_counter()
    initial = _initial_matrix(initial_logits, config, cnf.num_vars)
    indices = list(range(config.samples))
    workers = min(config.workers, config.samples)

    if workers == 1:
        outcomes = _run_chunk(cnf, config, indices, initial)
    else:
        chunks = [[int(i) for i in c] for c in np.array_split(indices, workers)]
        parts = [None if initial is None else initial[c] for c in chunks]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_chunk, cnf, config, c, p) for c, p in zip(chunks, parts)]
            outcomes = [o for f in futures for o in f.result()]
    outcomes.sort(key=lambda o: o.index)

    solved = [o for o in outcomes if o.solved_at is not None]
    witness, witness_sample = None, None
    if solved:
        first = min(solved, key=lambda o: (o.solved_at, o.index))
        if eval_bool(cnf.formula, first.witness) != 1:
            raise SolverError(f"witness of sample {first.index} does not satisfy the CNF")
        witness, witness_sample = [int(v) for v in first.witness], int(first.index)

    total_steps = int(sum(o.steps for o in outcomes))
    elapsed = time.perf_counter() - started
    solved_at = [o.solved_at for o in outcomes]
    report = SolveReport(
        instance=instance,
        num_vars=cnf.num_vars,
        num_clauses=cnf.num_clauses,
        config=config,
        solved_at=solved_at,
        solved_by=[o.solved_by for o in outcomes],
        curve=solved_curve(solved_at, config.max_epochs, config.progress_granularity),
        witness=witness,
        witness_sample=witness_sample,
        total_steps=total_steps,
        timing=Timing(wall_clock_s=elapsed, steps_per_second=total_steps / elapsed if elapsed > 0 else 0.0),
    )
    logger.info(f"{instance or 'instance'} [{config.label}]: {report.num_solved}/{config.samples} samples solved, "
                f"{total_steps} steps in {elapsed:.2f}s")
    return report
