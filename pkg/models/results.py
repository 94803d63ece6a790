"""
Result containers
Plain dataclasses returned by the engine, the verification tools and the adversary harness
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np


@dataclass(frozen=True)
class IterationRecord:
    """One iteration of the bisect-and-approximate loop"""
    iteration: int
    cubes_bisected: int            # |C'_i|
    cubes_retained: Optional[int]  # |C_i|, None when the iteration was cut short
    cumulative_queries: int
    partial: bool = False


@dataclass
class CheckVerdict:
    """Outcome of an epsilon-approximation check"""
    containment_failures: List[Tuple[np.ndarray, float]] = field(default_factory=list)
    excess_failures: List[Tuple[np.ndarray, float]] = field(default_factory=list)
    grid_resolution: float = 1.0
    points_checked: int = 0

    @property
    def passed(self) -> bool:
        return not self.containment_failures and not self.excess_failures


@dataclass
class RateFit:
    """Least-squares line through (log2 1/eps, log2 n)"""
    slope: float
    intercept: float
    r_squared: float
    points: List[Tuple[float, float]] = field(default_factory=list)


@dataclass(frozen=True)
class SweepPoint:
    """Measured sample complexity at one accuracy (queries is None when unbounded)"""
    epsilon: float
    queries: Optional[int]
    iterations: int
    passed: bool


@dataclass
class SmoothnessCertificate:
    """Empirical check of a Hölder or gradient-Hölder inequality on random pairs"""
    kind: str
    constant: float
    exponent: float
    pairs: int
    max_ratio: float
    violations: List[Tuple[np.ndarray, np.ndarray]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


class DefeatBranch(str, Enum):
    """Which inclusion the shared output set violates"""
    CONTAINMENT_ZERO = "containment_f_zero"   # S_n misses a point of {f=0} = [0,1]^d
    EXCESS_BUMP = "excess_f_z"                # S_n holds z while f_z(z) = 2 eps > eps


class Verdict(str, Enum):
    ALGORITHM_DEFEATED = "AlgorithmDefeated"
    BUDGET_SUFFICIENT = "BudgetSufficient"


@dataclass
class AdversaryReport:
    """Outcome of one indistinguishability run"""
    algorithm: str
    budget: int
    grid_size: int
    eta: float
    epsilon: float
    verdict: Verdict
    unqueried_center: Optional[np.ndarray] = None
    branch: Optional[DefeatBranch] = None
    failing_point: Optional[np.ndarray] = None
    failing_value: Optional[float] = None
    witness_checked: bool = False
    queries: List[np.ndarray] = field(default_factory=list)

    def to_text(self) -> str:
        """Structured text form written by the CLI"""
        def fmt(v: Optional[np.ndarray]) -> str:
            return "none" if v is None else ",".join(repr(float(x)) for x in v)

        lines = [
            f"algorithm: {self.algorithm}",
            f"budget: {self.budget}",
            f"eta: {self.eta!r}",
            f"grid_size: {self.grid_size}",
            f"epsilon: {self.epsilon!r}",
            f"verdict: {self.verdict.value}",
            f"witness_z: {fmt(self.unqueried_center)}",
            f"branch: {self.branch.value if self.branch else 'none'}",
            f"failing_point: {fmt(self.failing_point)}",
            f"failing_value: {'none' if self.failing_value is None else repr(self.failing_value)}",
            f"witness_checked: {str(self.witness_checked).lower()}",
        ]
        return "\n".join(lines) + "\n"
