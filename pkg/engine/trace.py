"""
Run trace
Per-iteration accounting plus the retained generations needed to rebuild any published set
"""
from dataclasses import dataclass, field
from typing import List

import numpy as np
import pandas as pd

from models.config import BAConfig
from models.cube import DyadicCube
from models.results import IterationRecord
from strategies.approximators import LocalApproximator
from .output_set import OutputSet

COMPLETED = "completed"
MAX_QUERIES = "max_queries"
EXHAUSTED = "exhausted"    # C_i became empty; every later set is empty too

TRACE_COLUMNS = ["iteration", "i_cubes_bisected", "cubes_retained", "cumulative_queries"]


def publish_threshold(b: float, beta: float, iteration: int) -> float:
    """rho of S(i) = b 2^(-beta (i - 1))"""
    return float(b * np.exp2(-beta * (iteration - 1)))


@dataclass
class RunTrace:
    """Everything one engine run observed; generations[j] holds C_j with its approximators"""
    config: BAConfig
    dim: int
    strategy: str
    generations: List[List[LocalApproximator]] = field(default_factory=list)
    iterations: List[IterationRecord] = field(default_factory=list)
    status: str = COMPLETED
    total_queries: int = 0

    @property
    def last_iteration(self) -> int:
        return len(self.iterations)

    def retained(self, i: int) -> List[DyadicCube]:
        """Cubes of C_i"""
        return [g.cube for g in self.generations[i]]

    def queries_before(self, i: int) -> int:
        """Cumulative queries at the start of iteration i"""
        if i <= 1:
            return 0
        return self.iterations[i - 2].cumulative_queries

    def output_set(self, i: int) -> OutputSet:
        """S(i), built from C_{i-1} with threshold b 2^(-beta (i - 1))"""
        if not 1 <= i <= len(self.generations):
            raise IndexError(f"Output set S({i}) not available, trace holds S(1)..S({len(self.generations)})")
        rho = publish_threshold(self.config.tolerance_b, self.config.tolerance_beta, i)
        return OutputSet(
            level=self.config.level,
            mode=self.config.mode,
            iteration=i,
            dim=self.dim,
            records=[(g, rho) for g in self.generations[i - 1]],
        )

    @property
    def final_output_set(self) -> OutputSet:
        """S_n after the last query: S of the last iteration that ran, or S(1) if none did"""
        return self.output_set(max(1, self.last_iteration))

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(
            [(r.iteration, r.cubes_bisected, r.cubes_retained, r.cumulative_queries) for r in self.iterations],
            columns=TRACE_COLUMNS,
        )
        frame["cubes_retained"] = frame["cubes_retained"].astype("Int64")
        return frame

    def summary(self) -> str:
        final = len(self.generations[-1]) if self.generations else 0
        return (f"strategy={self.strategy} iterations={self.last_iteration} queries={self.total_queries} "
                f"final_cubes={final} status={self.status}")
