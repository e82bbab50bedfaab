"""Random formulas, CNFs and logits for the property suites and tests."""
from typing import Dict, Tuple

import numpy as np

from src.core.errors import FormulaError
from src.core.logic.formula import And, CnfFormula, Formula, Literal, Not, Or, Var


def _relabel(f: Formula, ids: Dict[int, int]) -> Formula:
    if isinstance(f, Var):
        if f.index not in ids:
            ids[f.index] = len(ids)
        return Var(ids[f.index])
    if isinstance(f, Not):
        return Not(_relabel(f.child, ids))
    parts = tuple(_relabel(c, ids) for c in f.children)
    return And(parts) if isinstance(f, And) else Or(parts)


def random_formula(rng: np.random.Generator, num_vars: int, max_depth: int,
                   max_arity: int = 3) -> Formula:
    """A random tree over at most ``num_vars`` variables.

    Variable ids are renumbered densely by first occurrence, so the result
    may use fewer than ``num_vars`` variables.
    """
    if num_vars < 1 or max_depth < 0:
        raise FormulaError("random_formula needs num_vars >= 1 and max_depth >= 0")

    def grow(depth: int) -> Formula:
        if depth >= max_depth or rng.random() < 0.25:
            return Var(int(rng.integers(num_vars)))
        op = rng.integers(3)
        if op == 0:
            return Not(grow(depth + 1))
        arity = int(rng.integers(2, max_arity + 1))
        parts = tuple(grow(depth + 1) for _ in range(arity))
        return And(parts) if op == 1 else Or(parts)

    return _relabel(grow(0), {})


def random_cnf(rng: np.random.Generator, num_vars: int, num_clauses: int,
               min_len: int = 1, max_len: int = 3) -> CnfFormula:
    """Clauses over distinct variables with random polarities; repeats are dropped."""
    if not 1 <= min_len <= max_len <= num_vars or num_clauses < 1:
        raise FormulaError("random_cnf needs 1 <= min_len <= max_len <= num_vars and num_clauses >= 1")
    clauses = []
    for _ in range(num_clauses):
        width = int(rng.integers(min_len, max_len + 1))
        variables = rng.choice(num_vars, size=width, replace=False)
        polarities = rng.choice((-1, 1), size=width)
        clauses.append([Literal(int(v), int(p)) for v, p in zip(variables, polarities)])
    return CnfFormula.build(num_vars, clauses)


def random_nonzero_logits(rng: np.random.Generator, n: int, scale: float = 3.0,
                          margin: float = 1e-3) -> np.ndarray:
    """Logits with |x| in [margin, scale] and random signs."""
    magnitude = rng.uniform(margin, scale, n)
    return magnitude * rng.choice((-1.0, 1.0), size=n)


def planted_ksat(rng: np.random.Generator, num_vars: int, num_clauses: int,
                 k: int = 3) -> Tuple[CnfFormula, np.ndarray]:
    """Uniform random k-SAT forced satisfiable by a hidden assignment.

    Clauses falsified by the planted assignment are rejected and redrawn.
    """
    if not 1 <= k <= num_vars:
        raise FormulaError("planted_ksat needs 1 <= k <= num_vars")
    planted = rng.choice((-1, 1), size=num_vars).astype(np.int8)
    clauses = []
    seen = set()
    while len(clauses) < num_clauses:
        variables = rng.choice(num_vars, size=k, replace=False)
        polarities = rng.choice((-1, 1), size=k)
        if not np.any(polarities * planted[variables] > 0):
            continue
        clause = tuple(Literal(int(v), int(p)) for v, p in zip(variables, polarities))
        key = frozenset(clause)
        if key in seen:
            continue
        seen.add(key)
        clauses.append(clause)
    return CnfFormula(num_vars, tuple(clauses)), planted
