"""
Near-level-set dimension
Packing counts of inflated level sets at their own scale, and the packing-based query budget
"""
from typing import List, Sequence

import numpy as np
from loguru import logger

from engine.budgets import iterations_needed
from models.exceptions import EmptyInflatedSet
from models.results import RateFit
from oracles.oracle import Oracle
from utils.geometry import greedy_packing, grid_points, lexicographic_order
from .rates import fit_rate

MIN_SCALES = 4


def _check_scales(scales: Sequence[float]) -> np.ndarray:
    r = np.asarray(scales, dtype=float)
    if len(r) < MIN_SCALES:
        raise ValueError(f"Need at least {MIN_SCALES} scales, got {len(r)}")
    if np.any(r <= 0) or np.any(r >= 1):
        raise ValueError("Scales must lie in (0, 1)")
    ratios = r[1:] / r[:-1]
    if not np.allclose(ratios, ratios[0], rtol=1e-9):
        raise ValueError(f"Scales must form a geometric sequence, got ratios {ratios.tolist()}")
    return r


def inflated_packing_counts(oracle: Oracle, a: float, scales: Sequence[float], grid_n: int) -> List[int]:
    """Greedy r-packing of the grid points with |f - a| <= r, for each r (lexicographic scan order)"""
    grid = grid_points(oracle.dim, grid_n)
    grid = grid[lexicographic_order(grid)]
    distance = np.abs(oracle.values(grid) - a)
    counts = []
    for r in scales:
        near = grid[distance <= r]
        if len(near) == 0:
            raise EmptyInflatedSet(f"No grid point within {r} of level {a} (grid_n={grid_n})")
        counts.append(greedy_packing(near, r).count)
        logger.debug(f"r={r}: {len(near)} inflated grid points, packing {counts[-1]}")
    return counts


def estimate_nls_dimension(oracle: Oracle, a: float, scales: Sequence[float], sample_grid_n: int = 512) -> RateFit:
    """Slope of log2 N({|f - a| <= r}, r) against log2(1/r)"""
    r = _check_scales(scales)
    counts = inflated_packing_counts(oracle, a, r, sample_grid_n)
    return fit_rate(list(zip(r.tolist(), counts)))


def level_set_packing_curve(points: np.ndarray, scales: Sequence[float]) -> RateFit:
    """Slope of log2 N(points, r) against log2(1/r) for a sample of a level set, scanned in the given order"""
    if len(scales) < 3:
        raise ValueError(f"Need at least 3 scales, got {len(scales)}")
    counts = [greedy_packing(points, r).count for r in scales]
    return fit_rate(list(zip(list(scales), counts)))


def empirical_packing_budget(oracle: Oracle, a: float, k: int, b: float, beta: float, epsilon: float,
                             grid_n: int = 256) -> int:
    """4^d k sum_{i < i(eps)} N({|f - a| <= 2b 2^(-beta i)}, 2^-i), packings estimated greedily on a grid"""
    d = oracle.dim
    grid = grid_points(d, grid_n)
    grid = grid[lexicographic_order(grid)]
    distance = np.abs(oracle.values(grid) - a)
    total = 0
    for i in range(iterations_needed(epsilon, b, beta)):
        near = grid[distance <= 2.0 * b * np.exp2(-beta * i)]
        if len(near):
            total += greedy_packing(near, float(np.exp2(-i))).count
    return 4 ** d * k * total
