"""Backward passes and active-path analysis.

Under Gödel semantics the gradient of a formula is sparse: exactly one
root-to-variable path carries a nonzero derivative (the *active path*), and
along it every partial derivative is ±1, flipping sign at each negation.
The backward pass therefore returns a single (variable, direction) pair
instead of a dense vector. Product and Łukasiewicz baselines get ordinary
dense gradients over CNFs.
"""
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy.special import expit

from src.core.errors import GradientError, PathError, RepresentationError
from src.core.logic.formula import (ClauseArrays, CnfFormula, Formula, Literal, Not, Var,
                                    is_relevant_clause)
from src.core.logic.semantics import (AnnotatedEval, CnfGodelEval, GodelCnfBatch, as_assignment,
                                      as_logits, eval_bool, eval_godel, lukasiewicz_cnf_batch,
                                      product_cnf_batch, sign)


@dataclass(frozen=True)
class Path:
    """A walk from the root through direct subformulas.

    ``steps[i]`` is the child index taken at ``nodes[i]``; ``nodes[0]`` is the
    root. ``negation_counts[i]`` is the number of negations traversed before
    reaching ``nodes[i]``.
    """
    steps: Tuple[int, ...]
    nodes: Tuple[Formula, ...]

    @classmethod
    def from_steps(cls, root: Formula, steps) -> "Path":
        nodes = [root]
        for depth, step in enumerate(steps):
            kids = nodes[-1].children
            if not 0 <= step < len(kids):
                raise PathError(f"step {depth} selects child {step} of a node with {len(kids)} children")
            nodes.append(kids[step])
        return cls(steps=tuple(steps), nodes=tuple(nodes))

    @property
    def root(self) -> Formula:
        return self.nodes[0]

    @property
    def end(self) -> Formula:
        return self.nodes[-1]

    @property
    def negation_counts(self) -> Tuple[int, ...]:
        counts = [0]
        for node in self.nodes[:-1]:
            counts.append(counts[-1] + (1 if isinstance(node, Not) else 0))
        return tuple(counts)

    def prefix_positions(self):
        for i in range(len(self.nodes)):
            yield self.steps[:i]


@dataclass(frozen=True)
class SparseGrad:
    """The only nonzero entry of a Gödel gradient: d phi / d var = direction."""
    var: int
    direction: int
    path: Path

    def __post_init__(self):
        if not isinstance(self.path.end, Var) or self.path.end.index != self.var:
            raise GradientError("sparse gradient path must end at its variable")
        if self.direction != (-1) ** self.path.negation_counts[-1]:
            raise GradientError("direction disagrees with the number of negations on the path")


def dense_from_sparse(grad: SparseGrad, num_vars: int) -> np.ndarray:
    """Materialise a SparseGrad; for comparisons only."""
    dense = np.zeros(num_vars, dtype=np.float64)
    dense[grad.var] = grad.direction
    return dense


def backward_godel(f: Formula, ev: AnnotatedEval) -> SparseGrad:
    """Follow the recorded min/max winners from the root down to a variable."""
    if ev.formula is not f and ev.formula != f:
        raise GradientError("evaluation was produced from a different formula")
    node, pos, steps, direction = f, (), [], 1
    while not isinstance(node, Var):
        if isinstance(node, Not):
            step = 0
            direction = -direction
        else:
            if pos not in ev.winners:
                raise GradientError(f"no winner recorded at position {pos}")
            step = ev.winners[pos]
        steps.append(step)
        pos = pos + (step,)
        node = node.children[step]
    return SparseGrad(var=node.index, direction=direction, path=Path.from_steps(f, steps))


def _cnf_steps(cnf: CnfFormula, clause: int, position: int) -> Tuple[int, ...]:
    steps = []
    if cnf.num_clauses > 1:
        steps.append(clause)
    if len(cnf.clauses[clause]) > 1:
        steps.append(position)
    if cnf.clauses[clause][position].polarity < 0:
        steps.append(0)
    return tuple(steps)


def backward_cnf_godel(cnf: CnfFormula, ev: CnfGodelEval) -> SparseGrad:
    """Active literal of the selected clause; +1 for positive literals, -1 for negated ones."""
    if len(ev.max_literal_per_clause) != cnf.num_clauses or not 0 <= ev.min_clause < cnf.num_clauses:
        raise GradientError("evaluation does not match the CNF's clause count")
    position = ev.max_literal_per_clause[ev.min_clause]
    clause = cnf.clauses[ev.min_clause]
    if not 0 <= position < len(clause):
        raise GradientError(f"literal index {position} out of range for clause {ev.min_clause}")
    lit = clause[position]
    path = Path.from_steps(cnf.formula, _cnf_steps(cnf, ev.min_clause, position))
    return SparseGrad(var=lit.var, direction=lit.polarity, path=path)


def check_implicit_gradient_law(f: Formula, logits, grad: SparseGrad) -> bool:
    """d phi / d pi == B(phi) * B(pi) at every node pi on the active path."""
    values = eval_godel(f, logits).values
    root_sign = sign(values[()])
    for pos, negations in zip(grad.path.prefix_positions(), grad.path.negation_counts):
        if root_sign * sign(values[pos]) != (-1) ** negations:
            return False
    return True


def candidate_path_necessary(f: Formula, b, path: Path) -> bool:
    """False iff some prefix has B(phi) * B(psi_i) != (-1)^n_i, i.e. the path can never be active."""
    if path.root is not f and path.root != f:
        raise PathError("path does not start at the given formula")
    b = as_assignment(b, f.num_vars)
    root_value = eval_bool(f, b)
    for node, negations in zip(path.nodes, path.negation_counts):
        if root_value * eval_bool(node, b) != (-1) ** negations:
            return False
    return True


def construct_representation(cnf: CnfFormula, b, clause: int, lit: Union[Literal, int],
                             alpha: float = -2.0, beta: float = -3.0,
                             gamma: float = -1.0, delta: float = 4.0) -> np.ndarray:
    """Logits representing ``b`` whose active path runs through ``clause`` to ``lit``.

    Literal values: ``lit`` gets alpha, the rest of the clause beta, literals
    of other unsatisfied clauses gamma, every remaining variable ±delta
    following ``b``. Needs beta < alpha < gamma < 0 < delta.
    """
    if not beta < alpha < gamma < 0 < delta:
        raise RepresentationError("constants must satisfy beta < alpha < gamma < 0 < delta")
    b = as_assignment(b, cnf.num_vars, exact=True)
    if not 0 <= clause < cnf.num_clauses:
        raise RepresentationError(f"clause index {clause} out of range")
    literals = cnf.clauses[clause]
    if isinstance(lit, int):
        if not 0 <= lit < len(literals):
            raise RepresentationError(f"literal index {lit} out of range for clause {clause}")
        lit = literals[lit]
    if lit not in literals:
        raise RepresentationError("literal not in clause")

    def is_false(literal: Literal) -> bool:
        return literal.polarity * b[literal.var] < 0

    if not all(is_false(l) for l in literals):
        raise RepresentationError("clause not unsatisfied")
    if not is_relevant_clause(cnf, clause):
        raise RepresentationError("clause not relevant")

    logits = np.full(cnf.num_vars, np.nan)

    def assign(literal: Literal, value: float) -> None:
        if np.isnan(logits[literal.var]):
            logits[literal.var] = literal.polarity * value

    assign(lit, alpha)
    for other in literals:
        assign(other, beta)
    for c, clause_lits in enumerate(cnf.clauses):
        if c != clause and all(is_false(l) for l in clause_lits):
            for other in clause_lits:
                assign(other, gamma)
    free = np.isnan(logits)
    logits[free] = delta * b[free]
    return logits


# --- batched gradients used by the solver ---

def godel_cnf_grad_batch(arrays: ClauseArrays, batch: GodelCnfBatch) -> Tuple[np.ndarray, np.ndarray]:
    """(active variable (B,), direction (B,)) per row of a Gödel CNF batch."""
    rows = np.arange(batch.min_clause.shape[0])
    slot = batch.best_literal[rows, batch.min_clause]
    var = arrays.var_idx[batch.min_clause, slot]
    direction = arrays.polarity[batch.min_clause, slot]
    return var, direction


def product_grad_batch(arrays: ClauseArrays, logits: np.ndarray) -> np.ndarray:
    """Gradient of Σ log(clause value) under Product semantics, (B, n).

    For a literal with signed logit s in a clause with all-false
    probability P and value c = 1 - P, d log c / d x = pol * P * sigmoid(s) / c.
    """
    _, clause_values, log_false = product_cnf_batch(arrays, logits)
    signed = logits[:, arrays.var_idx] * arrays.polarity
    ratio = np.exp(log_false) / clause_values
    contrib = np.where(arrays.mask, arrays.polarity * expit(signed) * ratio[:, :, None], 0.0)
    return arrays.scatter(contrib)


def lukasiewicz_grad_batch(arrays: ClauseArrays, logits: np.ndarray) -> np.ndarray:
    """Subgradient of the Łukasiewicz formula value, (B, n); 0 on clamp boundaries."""
    value, _, sums = lukasiewicz_cnf_batch(arrays, logits)
    signed = logits[:, arrays.var_idx] * arrays.polarity
    v = expit(signed)
    live = arrays.mask & (sums < 1.0)[:, :, None] & (value > 0.0)[:, None, None]
    contrib = np.where(live, arrays.polarity * v * (1.0 - v), 0.0)
    return arrays.scatter(contrib)


def backward_cnf_product(cnf: CnfFormula, logits) -> np.ndarray:
    x = as_logits(logits, cnf.num_vars, exact=True)[None, :]
    return product_grad_batch(cnf.clause_arrays, x)[0]


def backward_cnf_lukasiewicz(cnf: CnfFormula, logits) -> np.ndarray:
    x = as_logits(logits, cnf.num_vars, exact=True)[None, :]
    return lukasiewicz_grad_batch(cnf.clause_arrays, x)[0]
