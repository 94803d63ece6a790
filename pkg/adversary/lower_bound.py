"""
Lower-bound harness
Runs a deterministic query algorithm against f == 0, hides a bump where it never looked,
replays it, and reports which inclusion the shared output set breaks
"""
from dataclasses import dataclass
from typing import List, Optional, Protocol, Tuple

import numpy as np
from loguru import logger

from engine.ba_engine import run_ba
from models.config import MaxQueries
from models.exceptions import AccuracyTooLarge, NondeterministicAlgorithm, NoUnqueriedCell, UnknownSmoothness
from models.results import AdversaryReport, DefeatBranch, Verdict
from oracles.oracle import GRAD_HOLDER, HOLDER, Oracle, SmoothnessTag
from oracles.test_functions import bump_grid, bump_grid_size, make_bump_function, make_constant
from strategies.base import Strategy
from utils.geometry import grid_points, sup_distances
from verification.checker import check_points

# Largest bump half-width the construction allows
MAX_ETA = 0.25


class MembershipSet(Protocol):
    def contains(self, points: np.ndarray) -> np.ndarray:
        ...


class QueryAlgorithm(Protocol):
    """Deterministic algorithm that may only learn f through oracle.query"""
    name: str

    def run(self, oracle: Oracle, level: float, budget: int) -> MembershipSet:
        ...


# ---------------------------------------------------------------------------
# Bump scales
# ---------------------------------------------------------------------------

def bump_scale_holder(epsilon: float, d: int, c: float, gamma: float) -> float:
    """eta = (6 eps d 2^(1-gamma) / c)^(1/gamma), valid while eps < c / (3 d 2^gamma)"""
    if not 0 < epsilon < c / (3.0 * d * 2.0 ** gamma):
        raise AccuracyTooLarge(f"Hölder construction needs 0 < eps < {c / (3.0 * d * 2.0 ** gamma)}, got {epsilon}")
    eta = (6.0 * epsilon * d * 2.0 ** (1.0 - gamma) / c) ** (1.0 / gamma)
    if eta > MAX_ETA:
        raise AccuracyTooLarge(f"Bump half-width {eta} exceeds {MAX_ETA} at eps={epsilon}")
    return eta


def bump_scale_gradholder(epsilon: float, d: int, c1: float, gamma1: float) -> float:
    """eta = (132 eps d 2^(1-gamma1) / c1)^(1/(1+gamma1)), valid while eps < c1 / (132 d 2^(3+gamma1))"""
    ceiling = c1 / (132.0 * d * 2.0 ** (3.0 + gamma1))
    if not 0 < epsilon < ceiling:
        raise AccuracyTooLarge(f"Gradient-Hölder construction needs 0 < eps < {ceiling}, got {epsilon}")
    eta = (132.0 * epsilon * d * 2.0 ** (1.0 - gamma1) / c1) ** (1.0 / (1.0 + gamma1))
    if eta > MAX_ETA:
        raise AccuracyTooLarge(f"Bump half-width {eta} exceeds {MAX_ETA} at eps={epsilon}")
    return eta


def bump_scale(tag: SmoothnessTag, epsilon: float, d: int) -> float:
    if tag.kind == HOLDER:
        return bump_scale_holder(epsilon, d, tag.constant, tag.exponent)
    if tag.kind == GRAD_HOLDER:
        return bump_scale_gradholder(epsilon, d, tag.constant, tag.exponent)
    raise UnknownSmoothness(f"No bump construction for smoothness {tag.kind}")


def grid_size(eta: float, d: int) -> int:
    return bump_grid_size(eta, d)


# ---------------------------------------------------------------------------
# Algorithms and transcripts
# ---------------------------------------------------------------------------

class TranscriptOracle(Oracle):
    """Oracle wrapper that records every (x, f(x)) pair in query order"""

    def __init__(self, inner: Oracle):
        super().__init__(f"transcript({inner.name})", inner.dim, inner.values, inner.smoothness)
        self.inner = inner
        self.transcript: List[Tuple[np.ndarray, float]] = []

    def query(self, x) -> float:
        value = super().query(x)
        self.transcript.append((np.asarray(x, dtype=float).reshape(self.dim).copy(), value))
        return value

    __call__ = query

    @property
    def points(self) -> np.ndarray:
        return np.array([x for x, _ in self.transcript]).reshape(-1, self.dim)


class BAAlgorithm:
    """A BA strategy stopped right after `budget` queries"""

    def __init__(self, strategy: Strategy):
        self.strategy = strategy
        self.name = strategy.name

    def run(self, oracle: Oracle, level: float, budget: int) -> MembershipSet:
        config = self.strategy.default_config(level, stop=MaxQueries(queries=budget))
        return run_ba(config, oracle, self.strategy, workers=1).final_output_set


@dataclass
class ConstantMembership:
    value: bool

    def contains(self, points: np.ndarray) -> np.ndarray:
        return np.full(len(np.atleast_2d(points)), self.value, dtype=bool)


class FullCubeAlgorithm:
    """Outputs [0,1]^d without querying"""
    name = "full_cube"

    def run(self, oracle: Oracle, level: float, budget: int) -> MembershipSet:
        return ConstantMembership(True)


class EmptySetAlgorithm:
    """Outputs the empty set without querying"""
    name = "empty_set"

    def run(self, oracle: Oracle, level: float, budget: int) -> MembershipSet:
        return ConstantMembership(False)


# ---------------------------------------------------------------------------
# Harness
# ---------------------------------------------------------------------------

def find_unqueried_center(grid: np.ndarray, queries: np.ndarray, eta: float) -> Optional[np.ndarray]:
    """First grid center (lexicographic) whose open sup-ball of radius eta holds no query"""
    for z in grid:
        if len(queries) == 0 or np.min(sup_distances(queries, z)) >= eta:
            return z
    return None


def _same_transcript(first: TranscriptOracle, second: TranscriptOracle) -> bool:
    if len(first.transcript) != len(second.transcript):
        return False
    return all(np.array_equal(x1, x2) and v1 == v2
               for (x1, v1), (x2, v2) in zip(first.transcript, second.transcript))


def run_indistinguishability(algorithm: QueryAlgorithm,
                             epsilon: float,
                             d: int,
                             smoothness: SmoothnessTag,
                             budget: Optional[int] = None,
                             grid_n: int = 65) -> AdversaryReport:
    """Defeat any algorithm limited to fewer than |Z| queries on f == 0 versus a hidden bump"""
    eta = bump_scale(smoothness, epsilon, d)
    centers = bump_grid(eta, d)
    size = grid_size(eta, d)
    budget = size - 1 if budget is None else budget
    report = AdversaryReport(algorithm=algorithm.name, budget=budget, grid_size=size, eta=eta,
                             epsilon=epsilon, verdict=Verdict.BUDGET_SUFFICIENT)
    if budget >= size:
        logger.info(f"Budget {budget} covers all {size} bump cells; nothing to prove")
        return report

    zero = make_constant(d, 0.0)
    first = TranscriptOracle(zero)
    output_zero = algorithm.run(first, 0.0, budget)
    if len(first.transcript) > budget:
        raise ValueError(f"{algorithm.name} issued {len(first.transcript)} queries over a budget of {budget}")

    z = find_unqueried_center(centers, first.points, eta)
    if z is None:
        raise NoUnqueriedCell(f"All {size} cells were queried with only {len(first.transcript)} queries")

    bump = make_bump_function(2.0 * epsilon, eta, z, smoothness=(smoothness,))
    second = TranscriptOracle(bump)
    output_bump = algorithm.run(second, 0.0, budget)
    if not _same_transcript(first, second):
        raise NondeterministicAlgorithm(f"{algorithm.name} queried differently against the bump at {z.tolist()}")

    probe = np.vstack([z[None, :], grid_points(d, grid_n)])
    if not np.array_equal(output_zero.contains(probe), output_bump.contains(probe)):
        raise NondeterministicAlgorithm(f"{algorithm.name} published different sets from identical transcripts")

    report.verdict = Verdict.ALGORITHM_DEFEATED
    report.unqueried_center = z
    report.failing_point = z
    report.queries = [x for x, _ in first.transcript]
    if output_zero.contains(z[None, :])[0]:
        # z in S while f_z(z) = 2 eps
        report.branch = DefeatBranch.EXCESS_BUMP
        report.failing_value = float(bump.values(z)[0])
        report.witness_checked = bool(check_points(output_bump, bump, 0.0, epsilon, z).excess_failures)
    else:
        # {f = 0} is the whole cube, so z must be in S
        report.branch = DefeatBranch.CONTAINMENT_ZERO
        report.failing_value = 0.0
        report.witness_checked = bool(check_points(output_zero, zero, 0.0, epsilon, z).containment_failures)

    logger.info(f"{algorithm.name} defeated via {report.branch.value} at z={z.tolist()} "
                f"(budget {budget}, |Z|={size}, eta={eta})")
    return report
