"""Propositional formulas, CNF instances and clause analysis.

Formulas are immutable trees of Var / Not / And / Or nodes. And and Or are
n-ary (at least two children); the factories ``conjunction`` and
``disjunction`` collapse a single child to the child itself. Nodes are
addressed by *positions*: tuples of child indices from the root, which stay
unambiguous when a formula contains structurally equal subtrees.
"""
import logging
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from src.core.errors import FormulaError

logger = logging.getLogger(__name__)

Position = Tuple[int, ...]


class Formula:
    """Common behaviour of the four node types."""

    @property
    def children(self) -> Tuple["Formula", ...]:
        return ()

    @cached_property
    def num_vars(self) -> int:
        """One past the largest variable id that occurs in the formula."""
        return max(self.variables(), default=-1) + 1

    def variables(self) -> FrozenSet[int]:
        found = set()
        stack: List[Formula] = [self]
        while stack:
            node = stack.pop()
            if isinstance(node, Var):
                found.add(node.index)
            else:
                stack.extend(node.children)
        return frozenset(found)

    def subformula(self, position: Position) -> "Formula":
        node: Formula = self
        for step in position:
            kids = node.children
            if not 0 <= step < len(kids):
                raise FormulaError(f"position {position} does not exist in formula")
            node = kids[step]
        return node

    def positions(self) -> Iterator[Tuple[Position, "Formula"]]:
        """Pre-order walk yielding (position, node)."""
        stack: List[Tuple[Position, Formula]] = [((), self)]
        while stack:
            pos, node = stack.pop()
            yield pos, node
            kids = node.children
            for i in range(len(kids) - 1, -1, -1):
                stack.append((pos + (i,), kids[i]))

    @property
    def size(self) -> int:
        return sum(1 for _ in self.positions())

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Var(Formula):
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise FormulaError(f"variable id must be non-negative, got {self.index}")


@dataclass(frozen=True)
class Not(Formula):
    child: Formula

    @property
    def children(self) -> Tuple[Formula, ...]:
        return (self.child,)


@dataclass(frozen=True)
class And(Formula):
    parts: Tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if len(self.parts) < 2:
            raise FormulaError("And needs at least two children; use conjunction() to collapse")

    @property
    def children(self) -> Tuple[Formula, ...]:
        return self.parts


@dataclass(frozen=True)
class Or(Formula):
    parts: Tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if len(self.parts) < 2:
            raise FormulaError("Or needs at least two children; use disjunction() to collapse")

    @property
    def children(self) -> Tuple[Formula, ...]:
        return self.parts


def conjunction(parts: Iterable[Formula]) -> Formula:
    parts = tuple(parts)
    if not parts:
        raise FormulaError("empty conjunction")
    return parts[0] if len(parts) == 1 else And(parts)


def disjunction(parts: Iterable[Formula]) -> Formula:
    parts = tuple(parts)
    if not parts:
        raise FormulaError("empty disjunction")
    return parts[0] if len(parts) == 1 else Or(parts)


# --- CNF ---

@dataclass(frozen=True)
class Literal:
    var: int
    polarity: int

    def __post_init__(self):
        if self.polarity not in (1, -1):
            raise FormulaError(f"literal polarity must be +1 or -1, got {self.polarity}")
        if self.var < 0:
            raise FormulaError(f"variable id must be non-negative, got {self.var}")

    @classmethod
    def from_dimacs(cls, code: int) -> "Literal":
        if code == 0:
            raise FormulaError("0 is the clause terminator, not a literal")
        return cls(abs(code) - 1, 1 if code > 0 else -1)

    def to_dimacs(self) -> int:
        return (self.var + 1) * self.polarity

    def negate(self) -> "Literal":
        return Literal(self.var, -self.polarity)

    def to_formula(self) -> Formula:
        node = Var(self.var)
        return node if self.polarity > 0 else Not(node)


Clause = Tuple[Literal, ...]
LiteralLike = Union[Literal, Tuple[int, int]]


@dataclass(frozen=True, eq=False)
class ClauseArrays:
    """Padded numpy view of a CNF used by the batched kernels.

    ``var_idx[c, j]`` and ``polarity[c, j]`` describe the j-th literal of
    clause c; ``mask`` is False on padding (where polarity is 0).
    """
    num_vars: int
    var_idx: np.ndarray
    polarity: np.ndarray
    mask: np.ndarray

    @property
    def num_clauses(self) -> int:
        return self.var_idx.shape[0]

    @property
    def width(self) -> int:
        return self.var_idx.shape[1]

    @cached_property
    def incidence(self) -> sparse.csr_matrix:
        """(m*k, n) 0/1 matrix sending each literal slot to its variable."""
        slots = np.flatnonzero(self.mask.ravel())
        data = np.ones(len(slots), dtype=np.float64)
        return sparse.csr_matrix((data, (slots, self.var_idx.ravel()[slots])),
                                 shape=(self.mask.size, self.num_vars))

    def scatter(self, contributions: np.ndarray) -> np.ndarray:
        """Sum (B, m, k) per-literal contributions into (B, n) per variable."""
        flat = contributions.reshape(contributions.shape[0], -1)
        return np.asarray(self.incidence.T @ flat.T).T


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: Tuple[Clause, ...]

    def __post_init__(self):
        clauses = tuple(tuple(_as_literal(lit) for lit in clause) for clause in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        if not clauses:
            raise FormulaError("a CNF needs at least one clause")
        for i, clause in enumerate(clauses):
            if not clause:
                raise FormulaError(f"clause {i} is empty")
            seen: Dict[int, int] = {}
            for lit in clause:
                if lit.var in seen:
                    kind = "duplicate literal" if seen[lit.var] == lit.polarity else "complementary literals"
                    raise FormulaError(f"clause {i} contains {kind} on variable {lit.var}")
                seen[lit.var] = lit.polarity
                if lit.var >= self.num_vars:
                    raise FormulaError(
                        f"clause {i} references variable {lit.var} but num_vars is {self.num_vars}")

    @classmethod
    def build(cls, num_vars: int, clauses: Iterable[Iterable[LiteralLike]]) -> "CnfFormula":
        """Normalise then construct: dedupe literals, drop tautologies and repeated clauses."""
        raw = [[_as_literal(lit) for lit in clause] for clause in clauses]
        kept, _ = normalize_clauses(raw)
        return cls(num_vars, tuple(kept))

    @classmethod
    def from_dimacs_lists(cls, num_vars: int, clauses: Iterable[Iterable[int]]) -> "CnfFormula":
        return cls.build(num_vars, ([Literal.from_dimacs(code) for code in clause] for clause in clauses))

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    @cached_property
    def num_literals(self) -> int:
        return sum(len(c) for c in self.clauses)

    @cached_property
    def clause_sets(self) -> Tuple[FrozenSet[Literal], ...]:
        return tuple(frozenset(c) for c in self.clauses)

    @cached_property
    def formula(self) -> Formula:
        return cnf_to_formula(self)

    @cached_property
    def clause_arrays(self) -> ClauseArrays:
        width = max(len(c) for c in self.clauses)
        m = len(self.clauses)
        var_idx = np.zeros((m, width), dtype=np.intp)
        polarity = np.zeros((m, width), dtype=np.float64)
        for c, clause in enumerate(self.clauses):
            for j, lit in enumerate(clause):
                var_idx[c, j] = lit.var
                polarity[c, j] = lit.polarity
        return ClauseArrays(num_vars=self.num_vars, var_idx=var_idx, polarity=polarity, mask=polarity != 0)

    def to_lists(self) -> List[List[Tuple[int, int]]]:
        return [[(lit.var, lit.polarity) for lit in clause] for clause in self.clauses]


def _as_literal(lit: LiteralLike) -> Literal:
    if isinstance(lit, Literal):
        return lit
    var, polarity = lit
    return Literal(int(var), int(polarity))


def normalize_clauses(raw: Sequence[Sequence[Literal]],
                      origins: Optional[Sequence[int]] = None) -> Tuple[List[Clause], List[str]]:
    """Dedupe literals, drop tautologies and repeated clauses.

    ``origins`` are line numbers used in the warnings. Returns the kept
    clauses and the list of notes that were logged.
    """
    kept: List[Clause] = []
    seen_sets = set()
    notes: List[str] = []
    for i, clause in enumerate(raw):
        where = f"line {origins[i]}" if origins is not None else f"clause {i}"
        unique: List[Literal] = []
        for lit in clause:
            if lit not in unique:
                unique.append(lit)
        vars_in = {}
        tautology = False
        for lit in unique:
            if vars_in.get(lit.var, lit.polarity) != lit.polarity:
                tautology = True
            vars_in[lit.var] = lit.polarity
        if tautology:
            notes.append(f"{where}: tautological clause dropped")
            continue
        key = frozenset(unique)
        if key in seen_sets:
            notes.append(f"{where}: repeated clause dropped")
            continue
        seen_sets.add(key)
        kept.append(tuple(unique))
    for note in notes:
        logger.warning(note)
    return kept, notes


def cnf_to_formula(cnf: CnfFormula) -> Formula:
    """And over Or-of-literals, with unary connectives collapsed."""
    return conjunction(disjunction(lit.to_formula() for lit in clause) for clause in cnf.clauses)


def is_relevant_clause(cnf: CnfFormula, idx: int) -> bool:
    """True iff no other clause's literal set is contained in clause ``idx``.

    An identical copy only makes the later one irrelevant, so the first
    occurrence of a repeated clause stays relevant.
    """
    if not 0 <= idx < cnf.num_clauses:
        raise FormulaError(f"clause index {idx} out of range for {cnf.num_clauses} clauses")
    target = cnf.clause_sets[idx]
    for j, other in enumerate(cnf.clause_sets):
        if j == idx:
            continue
        if other < target or (other == target and j < idx):
            return False
    return True


# --- prefix s-expression format ---

_TOKEN = re.compile(r"\(|\)|[^\s()]+")
_OPERATORS = {"and", "or", "not"}


def parse_formula(text: str, names: Optional[Sequence[str]] = None) -> Tuple[Formula, List[str]]:
    """Parse ``(and (or A B) (not C))``.

    Variable ids follow ``names`` when given, otherwise first occurrence.
    Returns the formula and the id -> name table.
    """
    tokens = [(m.group(0), m.start()) for m in _TOKEN.finditer(text)]
    table: List[str] = list(names) if names is not None else []
    fixed = names is not None
    ids = {name: i for i, name in enumerate(table)}
    cursor = 0

    def parse() -> Formula:
        nonlocal cursor
        if cursor >= len(tokens):
            raise FormulaError("unexpected end of formula")
        tok, offset = tokens[cursor]
        cursor += 1
        if tok == ")":
            raise FormulaError(f"unexpected ')' at offset {offset}")
        if tok != "(":
            if tok.lower() in _OPERATORS:
                raise FormulaError(f"operator '{tok}' outside parentheses at offset {offset}")
            if tok not in ids:
                if fixed:
                    raise FormulaError(f"unknown variable '{tok}' at offset {offset}")
                ids[tok] = len(table)
                table.append(tok)
            return Var(ids[tok])
        if cursor >= len(tokens):
            raise FormulaError(f"unterminated '(' at offset {offset}")
        op, op_offset = tokens[cursor]
        cursor += 1
        op = op.lower()
        if op not in _OPERATORS:
            raise FormulaError(f"unknown operator '{op}' at offset {op_offset}")
        args: List[Formula] = []
        while True:
            if cursor >= len(tokens):
                raise FormulaError(f"unterminated '(' at offset {offset}")
            if tokens[cursor][0] == ")":
                cursor += 1
                break
            args.append(parse())
        if op == "not":
            if len(args) != 1:
                raise FormulaError(f"'not' takes exactly one argument at offset {op_offset}")
            return Not(args[0])
        if not args:
            raise FormulaError(f"'{op}' needs at least one argument at offset {op_offset}")
        return conjunction(args) if op == "and" else disjunction(args)

    formula = parse()
    if cursor != len(tokens):
        raise FormulaError(f"trailing input at offset {tokens[cursor][1]}")
    return formula, table


def default_name(index: int) -> str:
    return chr(ord("A") + index) if index < 26 else f"x{index}"


def format_formula(f: Formula, names: Optional[Sequence[str]] = None) -> str:
    """Inverse of parse_formula."""
    if isinstance(f, Var):
        return names[f.index] if names is not None else default_name(f.index)
    if isinstance(f, Not):
        return f"(not {format_formula(f.child, names)})"
    op = "and" if isinstance(f, And) else "or"
    return "(" + op + " " + " ".join(format_formula(c, names) for c in f.children) + ")"
