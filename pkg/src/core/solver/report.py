"""Result models shared by the solver, the benchmark harness and the CLI."""
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field

from src.core.solver.config import SolveConfig

SCHEMA_VERSION = "1.0"

# How a sample first reached a satisfying sign pattern
SOLVED_BY = ("init", "perturbed", "unperturbed")


class CurvePoint(BaseModel):
    epoch: int
    solved_ratio: float = Field(ge=0.0, le=1.0)


class Timing(BaseModel):
    wall_clock_s: float
    steps_per_second: float


class SolveReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    instance: Optional[str] = None
    num_vars: int
    num_clauses: int
    config: SolveConfig
    solved_at: List[Optional[int]]
    solved_by: List[Optional[str]]
    curve: List[CurvePoint]
    witness: Optional[List[int]] = None
    witness_sample: Optional[int] = None
    total_steps: int
    timing: Optional[Timing] = None

    @property
    def num_solved(self) -> int:
        return sum(1 for t in self.solved_at if t is not None)

    @property
    def solved(self) -> bool:
        return self.witness is not None

    @property
    def solved_fraction(self) -> float:
        return self.num_solved / len(self.solved_at) if self.solved_at else 0.0


def snapshot_epochs(max_epochs: int, granularity: int) -> List[int]:
    """g, 2g, ... up to max_epochs, plus max_epochs itself when it is not a multiple."""
    epochs = list(range(granularity, max_epochs + 1, granularity))
    if max_epochs > 0 and (not epochs or epochs[-1] != max_epochs):
        epochs.append(max_epochs)
    return epochs


def solved_curve(solved_at: List[Optional[int]], max_epochs: int, granularity: int) -> List[CurvePoint]:
    """Cumulative fraction of samples whose first solve happened by each snapshot."""
    if not solved_at:
        return []
    firsts = np.array([np.inf if t is None else t for t in solved_at], dtype=np.float64)
    return [CurvePoint(epoch=e, solved_ratio=float(np.mean(firsts <= e)))
            for e in snapshot_epochs(max_epochs, granularity)]
