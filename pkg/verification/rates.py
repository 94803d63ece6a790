"""
Sample complexity measurement and rate fitting
"""
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from engine.ba_engine import run_ba
from engine.budgets import iterations_needed
from engine.trace import RunTrace
from models.config import BAConfig, MaxDepth
from models.exceptions import DegenerateInput
from models.results import RateFit, SweepPoint
from oracles.oracle import Oracle
from strategies.base import Strategy
from .checker import check_eps_approximation

# Random in-cube points per record during sweeps; the grid carries most of the check
SWEEP_POINTS_PER_CUBE = 16


def fit_rate(samples: Sequence[Tuple[float, float]]) -> RateFit:
    """Least squares of log2 n against log2(1/eps)"""
    if len(samples) < 3:
        raise DegenerateInput(f"Need at least 3 samples for a rate fit, got {len(samples)}")
    eps = np.array([s[0] for s in samples], dtype=float)
    counts = np.array([s[1] for s in samples], dtype=float)
    if len(np.unique(eps)) != len(eps):
        raise DegenerateInput("Rate fit needs distinct accuracies")
    if np.any(eps <= 0) or np.any(counts < 1):
        raise DegenerateInput("Rate fit needs positive accuracies and counts >= 1")

    x = np.log2(1.0 / eps)
    y = np.log2(counts)
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    total = np.sum((y - y.mean()) ** 2)
    r_squared = 1.0 if total == 0 else float(np.clip(1.0 - np.sum(residual ** 2) / total, 0.0, 1.0))
    return RateFit(float(slope), float(intercept), r_squared, list(zip(x.tolist(), y.tolist())))


def first_passing_iteration(trace: RunTrace, passes: Callable[[int], bool]) -> Optional[int]:
    """Smallest i such that S(j) passes for every reconstructible j >= i; None if the last one fails"""
    first = None
    for i in range(len(trace.generations), 0, -1):
        if not passes(i):
            break
        first = i
    return first


def _checker(trace: RunTrace, oracle: Oracle, epsilon: float, grid_n: Optional[int], samples: Optional[int],
             seed: int, points_per_cube: int) -> Callable[[int], bool]:
    def passes(i: int) -> bool:
        verdict = check_eps_approximation(
            trace.output_set(i), oracle, trace.config.level, epsilon,
            grid_n=grid_n, samples=samples, rng=np.random.default_rng(seed), points_per_cube=points_per_cube,
        )
        return verdict.passed
    return passes


def measure_sample_complexity(config: BAConfig,
                              oracle: Oracle,
                              strategy: Strategy,
                              epsilon: float,
                              max_depth: int,
                              grid_n: Optional[int] = None,
                              samples: Optional[int] = None,
                              seed: int = 0,
                              points_per_cube: int = SWEEP_POINTS_PER_CUBE) -> Optional[int]:
    """First query index from which every published set is an epsilon-approximation (None = unbounded)"""
    trace = run_ba(config.with_stop(MaxDepth(depth=max_depth)), oracle, strategy)
    first = first_passing_iteration(trace, _checker(trace, oracle, epsilon, grid_n, samples, seed, points_per_cube))
    if first is None:
        logger.warning(f"eps={epsilon}: still failing after {max_depth} iterations")
        return None
    return trace.queries_before(first) + 1


def sweep_sample_complexity(config: BAConfig,
                            oracle: Oracle,
                            strategy: Strategy,
                            epsilons: Sequence[float],
                            max_depth: Optional[int] = None,
                            grid_n: Optional[int] = None,
                            samples: Optional[int] = None,
                            seed: int = 0,
                            points_per_cube: int = SWEEP_POINTS_PER_CUBE) -> List[SweepPoint]:
    """Sample complexity for each accuracy from one shared engine run.

    The run does not depend on eps, so it goes deep enough for the smallest one
    (one iteration past the guaranteed depth unless max_depth says otherwise).
    """
    if not epsilons:
        raise ValueError("Sweep needs at least one accuracy")
    if max_depth is None:
        max_depth = iterations_needed(min(epsilons), config.tolerance_b, config.tolerance_beta) + 1
    trace = run_ba(config.with_stop(MaxDepth(depth=max_depth)), oracle, strategy)
    logger.info(f"Sweep run: {trace.summary()}")

    points = []
    for eps in epsilons:
        first = first_passing_iteration(trace, _checker(trace, oracle, eps, grid_n, samples, seed, points_per_cube))
        if first is None:
            logger.warning(f"eps={eps}: still failing after {max_depth} iterations")
            points.append(SweepPoint(eps, None, max_depth, False))
        else:
            points.append(SweepPoint(eps, trace.queries_before(first) + 1, first, True))
    return points


def fit_sweep(points: Sequence[SweepPoint]) -> RateFit:
    """Rate fit over the finite points of a sweep"""
    return fit_rate([(p.epsilon, p.queries) for p in points if p.queries is not None])
