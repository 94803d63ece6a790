"""
Epsilon-approximation checker
Ground-truth test of {f = a} ⊆ S ⊆ {|f - a| <= eps} against analytic level sets and dense grids
"""
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger

from engine.output_set import OutputSet
from models.config import Mode
from models.exceptions import NoLevelSetSampler
from models.results import CheckVerdict
from models.settings import get_settings
from oracles.oracle import Oracle
from utils.geometry import grid_points

# Failures kept per list; the verdict only needs one
MAX_REPORTED_FAILURES = 1000
# Level-set membership tolerance for witness points
LEVEL_TOLERANCE = 1e-12
# Records per batch of random in-cube points
_RECORD_CHUNK = 512


def _excess_ok(values: np.ndarray, level: float, epsilon: float, slack: float, mode: Mode) -> np.ndarray:
    residual = values - level
    if mode == Mode.SUBLEVEL:
        return residual <= epsilon + slack
    if mode == Mode.SUPERLEVEL:
        return -residual <= epsilon + slack
    return np.abs(residual) <= epsilon + slack


def _as_failures(points: np.ndarray, values: np.ndarray) -> List[Tuple[np.ndarray, float]]:
    return [(p.copy(), float(v)) for p, v in zip(points[:MAX_REPORTED_FAILURES], values[:MAX_REPORTED_FAILURES])]


def _random_cube_points(S: OutputSet, per_cube: int, rng: np.random.Generator):
    """Batches of uniform points inside the record cubes"""
    cubes = S.cubes()
    for start in range(0, len(cubes), _RECORD_CHUNK):
        chunk = cubes[start:start + _RECORD_CHUNK]
        lower = np.repeat(np.array([c.lower() for c in chunk]), per_cube, axis=0)
        side = np.repeat(np.array([c.side for c in chunk]), per_cube)[:, None]
        yield lower + side * rng.random((len(lower), S.dim))


def check_eps_approximation(S: OutputSet,
                            oracle: Oracle,
                            a: float,
                            epsilon: float,
                            grid_n: Optional[int] = None,
                            samples: Optional[int] = None,
                            rng: Optional[np.random.Generator] = None,
                            skip_containment: bool = False,
                            slack: Optional[float] = None,
                            points_per_cube: Optional[int] = None) -> CheckVerdict:
    """Containment on sampled level-set points, excess on grid points and random in-cube points.

    In sublevel and superlevel mode the grid points inside the target set count for containment too.
    """
    settings = get_settings()
    grid_n = grid_n if grid_n is not None else settings.default_grid_n
    samples = samples if samples is not None else settings.level_set_samples
    slack = slack if slack is not None else settings.excess_slack
    per_cube = points_per_cube if points_per_cube is not None else settings.random_points_per_cube
    rng = rng if rng is not None else np.random.default_rng(0)
    if grid_n < 2:
        raise ValueError(f"Grid needs at least 2 points per axis, got {grid_n}")

    verdict = CheckVerdict(grid_resolution=1.0 / (grid_n - 1))

    if not skip_containment:
        if not oracle.has_sampler:
            raise NoLevelSetSampler(f"{oracle.name} has no analytic level set; pass skip_containment to check excess only")
        level_points = oracle.sample_level_set(a, samples, rng)
        missing = ~S.contains(level_points)
        verdict.containment_failures = _as_failures(level_points[missing], oracle.values(level_points[missing]))
        verdict.points_checked += len(level_points)

    grid = grid_points(oracle.dim, grid_n)
    if not skip_containment and S.mode != Mode.LEVEL_SET:
        # The whole sublevel (superlevel) set must be covered, not just its boundary {f = a}
        grid_values = oracle.values(grid)
        inner = grid_values <= a if S.mode == Mode.SUBLEVEL else grid_values >= a
        missing = inner & ~S.contains(grid)
        if np.any(missing) and len(verdict.containment_failures) < MAX_REPORTED_FAILURES:
            verdict.containment_failures.extend(_as_failures(grid[missing], grid_values[missing]))

    batches = [grid]
    if per_cube > 0 and 0 < len(S) <= settings.random_check_max_cubes:
        batches.extend(_random_cube_points(S, per_cube, rng))

    for batch in batches:
        inside = batch[S.contains(batch)]
        values = oracle.values(inside)
        bad = ~_excess_ok(values, a, epsilon, slack, S.mode)
        if np.any(bad) and len(verdict.excess_failures) < MAX_REPORTED_FAILURES:
            verdict.excess_failures.extend(_as_failures(inside[bad], values[bad]))
        verdict.points_checked += len(batch)

    if not verdict.passed:
        logger.debug(f"S({S.iteration}) failed: {len(verdict.containment_failures)} containment, "
                     f"{len(verdict.excess_failures)} excess")
    return verdict


def check_points(S: OutputSet,
                 oracle: Oracle,
                 a: float,
                 epsilon: float,
                 points: np.ndarray,
                 slack: Optional[float] = None) -> CheckVerdict:
    """Check both inclusions at given witness points only.

    A point counts as a containment failure when it lies on {f = a} but outside S,
    and as an excess failure when it lies in S with f too far from a.
    """
    slack = slack if slack is not None else get_settings().excess_slack
    X = np.atleast_2d(np.asarray(points, dtype=float))
    values = oracle.values(X)
    member = np.asarray(S.contains(X), dtype=bool)
    on_level = np.abs(values - a) <= LEVEL_TOLERANCE
    too_far = ~_excess_ok(values, a, epsilon, slack, getattr(S, "mode", Mode.LEVEL_SET))
    return CheckVerdict(
        containment_failures=_as_failures(X[on_level & ~member], values[on_level & ~member]),
        excess_failures=_as_failures(X[member & too_far], values[member & too_far]),
        grid_resolution=0.0,
        points_checked=len(X),
    )
