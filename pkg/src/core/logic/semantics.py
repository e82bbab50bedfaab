"""Classical, Gödel, Product and Łukasiewicz semantics.

Truth values:
  * classical: {-1, +1}
  * Gödel: raw real logits; negation is x -> -x, And is min, Or is max
  * Product / Łukasiewicz: sigmoid(logit) in [0, 1]

The batched kernels (``*_batch``) work on a (B, n) matrix of logits, one row
per independent sample, and are what the solver runs. The single-sample
evaluators wrap them so there is one implementation of each rule.
"""
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit, log_expit

from src.core.errors import EvaluationError
from src.core.logic.formula import And, ClauseArrays, CnfFormula, Formula, Not, Or, Position, Var

# Product clause values are clamped here before taking the log
PRODUCT_CLAMP = 1e-300


def sign(x: float) -> int:
    """s(x) with the convention s(0) = -1."""
    return 1 if x > 0 else -1


def signs(values) -> np.ndarray:
    return np.where(np.asarray(values) > 0, 1, -1).astype(np.int8)


def as_logits(values, num_vars: int, exact: bool = False) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise EvaluationError(f"logits must be one-dimensional, got shape {arr.shape}")
    if (exact and arr.shape[0] != num_vars) or arr.shape[0] < num_vars:
        raise EvaluationError(f"logit vector has length {arr.shape[0]}, formula needs {num_vars}")
    if not np.all(np.isfinite(arr)):
        raise EvaluationError("non-finite logit")
    return arr


def as_assignment(values, num_vars: int, exact: bool = False) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise EvaluationError(f"assignment must be one-dimensional, got shape {arr.shape}")
    if (exact and arr.shape[0] != num_vars) or arr.shape[0] < num_vars:
        raise EvaluationError(f"assignment has length {arr.shape[0]}, formula needs {num_vars}")
    if not np.all((arr == 1) | (arr == -1)):
        raise EvaluationError("assignment entries must be -1 or +1")
    return arr.astype(np.int8)


# --- general formulas ---

def _minmax(f: Formula, values):
    """Shared min/max/negation evaluation; works on scalars and numpy columns."""
    if isinstance(f, Var):
        return values[..., f.index]
    if isinstance(f, Not):
        return -_minmax(f.child, values)
    parts = [_minmax(c, values) for c in f.children]
    if isinstance(f, And):
        return np.minimum.reduce(parts)
    return np.maximum.reduce(parts)


def eval_bool(f: Formula, b) -> int:
    """Classical truth value over {-1, +1}."""
    b = as_assignment(b, f.num_vars)
    return int(_minmax(f, b))


def eval_bool_batch(f: Formula, assignments: np.ndarray) -> np.ndarray:
    """Classical value of each row of an (N, n) matrix of ±1 assignments."""
    assignments = np.asarray(assignments)
    if assignments.shape[-1] < f.num_vars:
        raise EvaluationError(f"assignments have {assignments.shape[-1]} columns, formula needs {f.num_vars}")
    return np.asarray(_minmax(f, assignments), dtype=np.int8)


def eval_godel_batch(f: Formula, logits: np.ndarray) -> np.ndarray:
    """Gödel value of each row of an (N, n) logit matrix (no winners)."""
    logits = np.asarray(logits, dtype=np.float64)
    if logits.shape[-1] < f.num_vars:
        raise EvaluationError(f"logits have {logits.shape[-1]} columns, formula needs {f.num_vars}")
    return np.asarray(_minmax(f, logits), dtype=np.float64)


def eval_godel_unit(f: Formula, probs) -> float:
    """Gödel evaluation over [0, 1] with 1 - x negation."""
    if isinstance(f, Var):
        return float(probs[f.index])
    if isinstance(f, Not):
        return 1.0 - eval_godel_unit(f.child, probs)
    parts = [eval_godel_unit(c, probs) for c in f.children]
    return min(parts) if isinstance(f, And) else max(parts)


@dataclass(frozen=True)
class AnnotatedEval:
    """Gödel values of every node plus the child that won each min/max."""
    formula: Formula
    root_value: float
    values: Dict[Position, float]
    winners: Dict[Position, int]


def _pick(candidates, rng: Optional[np.random.Generator]) -> int:
    if len(candidates) == 1 or rng is None:
        return candidates[0]
    return candidates[int(rng.integers(len(candidates)))]


def eval_godel(f: Formula, logits, rng: Optional[np.random.Generator] = None) -> AnnotatedEval:
    """Gödel value of ``f`` with per-node values and min/max winners.

    Exact ties are broken uniformly at random with ``rng``; without one the
    lowest child index wins.
    """
    logits = as_logits(logits, f.num_vars)
    values: Dict[Position, float] = {}
    winners: Dict[Position, int] = {}

    def visit(node: Formula, pos: Position) -> float:
        if isinstance(node, Var):
            value = float(logits[node.index])
        elif isinstance(node, Not):
            value = -visit(node.child, pos + (0,))
        else:
            child_values = [visit(c, pos + (i,)) for i, c in enumerate(node.children)]
            value = min(child_values) if isinstance(node, And) else max(child_values)
            winners[pos] = _pick([i for i, v in enumerate(child_values) if v == value], rng)
        values[pos] = value
        return value

    root = visit(f, ())
    return AnnotatedEval(formula=f, root_value=root, values=values, winners=winners)


def implicit_interpretation(f: Formula, logits) -> Dict[Position, int]:
    """Sign of every node's Gödel value."""
    ev = eval_godel(f, logits)
    return {pos: sign(v) for pos, v in ev.values.items()}


# --- batched CNF kernels ---

def literal_values(arrays: ClauseArrays, logits: np.ndarray) -> np.ndarray:
    """(B, m, k) Gödel literal values; padding is -inf."""
    lits = logits[:, arrays.var_idx] * arrays.polarity
    return np.where(arrays.mask, lits, -np.inf)


@dataclass
class GodelCnfBatch:
    root: np.ndarray           # (B,)
    clause_values: np.ndarray  # (B, m)
    best_literal: np.ndarray   # (B, m) position of the max literal in each clause
    min_clause: np.ndarray     # (B,)


def godel_cnf_batch(arrays: ClauseArrays, logits: np.ndarray,
                    tie_rngs: Optional[Sequence[np.random.Generator]] = None) -> GodelCnfBatch:
    """Flat min-of-max pass over every row.

    With ``tie_rngs`` (one generator per row) exact ties on the selected
    clause and on its selected literal are broken uniformly at random;
    otherwise the lowest index wins.
    """
    lits = literal_values(arrays, logits)
    clause_values = lits.max(axis=2)
    best_literal = lits.argmax(axis=2)
    min_clause = clause_values.argmin(axis=1)
    rows = np.arange(logits.shape[0])
    root = clause_values[rows, min_clause]

    if tie_rngs is not None:
        tied = clause_values == root[:, None]
        for r in np.flatnonzero(tied.sum(axis=1) > 1):
            min_clause[r] = _pick(np.flatnonzero(tied[r]), tie_rngs[r])
        chosen = lits[rows, min_clause]
        tied = chosen == root[:, None]
        for r in np.flatnonzero(tied.sum(axis=1) > 1):
            best_literal[r, min_clause[r]] = _pick(np.flatnonzero(tied[r]), tie_rngs[r])

    return GodelCnfBatch(root=root, clause_values=clause_values,
                         best_literal=best_literal, min_clause=min_clause)


def bool_cnf_satisfied(arrays: ClauseArrays, logits: np.ndarray) -> np.ndarray:
    """Whether sign(row) satisfies the CNF, per row (s(0) = -1)."""
    positive = logits > 0
    gathered = positive[:, arrays.var_idx]
    lit_true = np.where(arrays.polarity > 0, gathered, ~gathered) & arrays.mask
    return lit_true.any(axis=2).all(axis=1)


def product_cnf_batch(arrays: ClauseArrays, logits: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Log-space Product semantics.

    Returns (log_value (B,), clause_values (B, m), log_false (B, m)) where
    log_false is log prod(1 - v_lit), the log-probability that every
    literal of the clause is false.
    """
    signed = logits[:, arrays.var_idx] * arrays.polarity
    log_false = np.where(arrays.mask, log_expit(-signed), 0.0).sum(axis=2)
    clause_values = np.maximum(-np.expm1(log_false), PRODUCT_CLAMP)
    return np.log(clause_values).sum(axis=1), clause_values, log_false


def lukasiewicz_cnf_batch(arrays: ClauseArrays, logits: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Returns (value (B,), clause_values (B, m), literal_sums (B, m))."""
    signed = logits[:, arrays.var_idx] * arrays.polarity
    sums = np.where(arrays.mask, expit(signed), 0.0).sum(axis=2)
    clause_values = np.minimum(1.0, sums)
    m = arrays.num_clauses
    value = np.maximum(0.0, clause_values.sum(axis=1) - (m - 1))
    return value, clause_values, sums


# --- single-sample CNF evaluators ---

@dataclass(frozen=True)
class CnfGodelEval:
    root: float
    min_clause: int
    max_literal_per_clause: Tuple[int, ...]
    clause_values: Tuple[float, ...]


def eval_cnf_godel(cnf: CnfFormula, logits, rng: Optional[np.random.Generator] = None) -> CnfGodelEval:
    """Same value as eval_godel on cnf_to_formula(cnf) in one flat pass."""
    x = as_logits(logits, cnf.num_vars, exact=True)[None, :]
    batch = godel_cnf_batch(cnf.clause_arrays, x)
    best = batch.best_literal[0].copy()
    min_clause = int(batch.min_clause[0])
    if rng is not None:
        lits = literal_values(cnf.clause_arrays, x)[0]
        for c in range(cnf.num_clauses):
            tied = np.flatnonzero(lits[c] == batch.clause_values[0, c])
            best[c] = _pick(tied, rng)
        min_clause = int(_pick(np.flatnonzero(batch.clause_values[0] == batch.root[0]), rng))
    return CnfGodelEval(root=float(batch.root[0]), min_clause=min_clause,
                        max_literal_per_clause=tuple(int(i) for i in best),
                        clause_values=tuple(float(v) for v in batch.clause_values[0]))


def eval_cnf_product(cnf: CnfFormula, logits) -> Tuple[float, np.ndarray]:
    """(Σ log clause value, clause values) under Product semantics."""
    x = as_logits(logits, cnf.num_vars, exact=True)[None, :]
    log_value, clause_values, _ = product_cnf_batch(cnf.clause_arrays, x)
    return float(log_value[0]), clause_values[0]


def eval_cnf_lukasiewicz(cnf: CnfFormula, logits) -> Tuple[float, np.ndarray]:
    """(formula value, clause values) under Łukasiewicz semantics."""
    x = as_logits(logits, cnf.num_vars, exact=True)[None, :]
    value, clause_values, _ = lukasiewicz_cnf_batch(cnf.clause_arrays, x)
    return float(value[0]), clause_values[0]


def lukasiewicz_combine(clause_values: Sequence[float]) -> float:
    """max(0, Σ clause values - (m - 1))."""
    return max(0.0, float(np.sum(clause_values)) - (len(clause_values) - 1))


def cnf_satisfied_by(cnf: CnfFormula, b) -> bool:
    """Clause-wise classical check of a ±1 assignment."""
    b = as_assignment(b, cnf.num_vars, exact=True)
    return bool(bool_cnf_satisfied(cnf.clause_arrays, b[None, :].astype(np.float64))[0])
