"""
Bisect and Approximate Engine
Iterative bisection of the retained cubes, k queries per new cube, and tolerance-based rejection
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Tuple

import numpy as np
from loguru import logger

from models.config import BAConfig, MaxDepth, MaxQueries, TargetAccuracy
from models.cube import DyadicCube
from models.exceptions import ConfigError, CubeBudgetExceeded, LevelSetError
from models.results import IterationRecord
from models.settings import get_settings
from oracles.oracle import Oracle
from strategies.approximators import LocalApproximator
from strategies.base import Strategy
from utils.geometry import bisect
from .budgets import iterations_needed
from .trace import COMPLETED, EXHAUSTED, MAX_QUERIES, RunTrace

QueryHook = Callable[[int, np.ndarray, float], None]


class _QueryLimitReached(Exception):
    """Internal signal: the n_max-th query has been answered"""


class BAEngine:
    """One run of the loop for a fixed (config, oracle, strategy)"""

    def __init__(self,
                 config: BAConfig,
                 oracle: Oracle,
                 strategy: Strategy,
                 workers: Optional[int] = None,
                 on_query: Optional[QueryHook] = None):
        if config.queries_per_cube != strategy.queries_per_cube:
            raise ConfigError(
                f"Config asks for k={config.queries_per_cube} but {strategy.name} queries "
                f"{strategy.queries_per_cube} points per cube"
            )
        self.config = config
        self.oracle = oracle
        self.strategy = strategy
        self.on_query = on_query
        self.workers = workers if workers is not None else get_settings().workers
        self._queries = 0

    # ------------------------------------------------------------------
    # Stop rule
    # ------------------------------------------------------------------

    def _max_iterations(self) -> Optional[int]:
        stop = self.config.stop
        if isinstance(stop, MaxDepth):
            return stop.depth
        if isinstance(stop, TargetAccuracy):
            return iterations_needed(stop.epsilon, self.config.tolerance_b, self.config.tolerance_beta) + 1
        return None

    def _query_limit(self) -> Optional[int]:
        stop = self.config.stop
        return stop.queries if isinstance(stop, MaxQueries) else None

    # ------------------------------------------------------------------
    # Per-cube work
    # ------------------------------------------------------------------

    def _observe(self, x: np.ndarray) -> float:
        limit = self._query_limit()
        if limit is not None and self._queries >= limit:
            raise _QueryLimitReached()
        value = self.oracle.query(x)
        self._queries += 1
        if self.on_query is not None:
            self.on_query(self._queries, x, value)
        return value

    def _approximate(self, cube: DyadicCube) -> LocalApproximator:
        points = self.strategy.pick_points(cube)
        values = [self._observe(x) for x in points]
        return self.strategy.build_approximator(cube, values)

    def _approximate_all(self, children: List[DyadicCube]) -> Tuple[List[LocalApproximator], bool]:
        """Approximators for every child in order; the flag is set when the query limit cut the list short"""
        sequential = self.workers <= 1 or self._query_limit() is not None or self.on_query is not None
        if sequential:
            approximators = []
            for cube in children:
                try:
                    approximators.append(self._approximate(cube))
                except _QueryLimitReached:
                    return approximators, True
            return approximators, False

        with ThreadPoolExecutor(max_workers=self.workers) as executor:
            approximators = list(executor.map(self._parallel_approximate, children))
        self._queries += len(children) * self.strategy.queries_per_cube
        return approximators, False

    def _parallel_approximate(self, cube: DyadicCube) -> LocalApproximator:
        points = self.strategy.pick_points(cube)
        return self.strategy.build_approximator(cube, [self.oracle.query(x) for x in points])

    # ------------------------------------------------------------------
    # Main loop
    # ------------------------------------------------------------------

    def run(self) -> RunTrace:
        cfg = self.config
        d = self.oracle.dim
        root = DyadicCube.root(d)
        trace = RunTrace(
            config=cfg,
            dim=d,
            strategy=self.strategy.name,
            generations=[[LocalApproximator.constant(root, cfg.level)]],
        )
        max_iterations = self._max_iterations()
        limit = self._query_limit()
        logger.info(f"Starting {self.strategy!r} on {self.oracle.name} (level={cfg.level}, stop={cfg.stop.kind})")

        try:
            i = 0
            while max_iterations is None or i < max_iterations:
                if limit is not None and self._queries >= limit:
                    trace.status = MAX_QUERIES
                    break
                i += 1
                parents = trace.generations[-1]
                if not parents:
                    trace.iterations.append(IterationRecord(i, 0, 0, self._queries))
                    trace.generations.append([])
                    trace.status = EXHAUSTED
                    break
                if len(parents) * (1 << d) > cfg.max_cubes:
                    raise CubeBudgetExceeded(
                        f"Iteration {i} would bisect {len(parents)} cubes into {len(parents) << d} > {cfg.max_cubes}"
                    )

                children = sorted((child for g in parents for child in bisect(g.cube)), key=DyadicCube.key)
                approximators, cut_short = self._approximate_all(children)
                if cut_short:
                    trace.iterations.append(IterationRecord(i, len(children), None, self._queries, partial=True))
                    trace.status = MAX_QUERIES
                    break

                rho = float(cfg.tolerance_b * np.exp2(-cfg.tolerance_beta * i))
                retained = [g for g in approximators if g.near_level(cfg.level, rho, cfg.mode)]
                trace.generations.append(retained)
                trace.iterations.append(IterationRecord(i, len(children), len(retained), self._queries))
                logger.debug(f"Iteration {i}: bisected {len(children)}, retained {len(retained)}, "
                             f"queries {self._queries}")
        except LevelSetError as e:
            logger.error(f"Engine stopped with {type(e).__name__}: {e}")
            raise

        trace.total_queries = self._queries
        logger.info(f"Finished: {trace.summary()}")
        return trace


def run_ba(config: BAConfig,
           oracle: Oracle,
           strategy: Strategy,
           workers: Optional[int] = None,
           on_query: Optional[QueryHook] = None) -> RunTrace:
    """Run the Bisect and Approximate loop and return its trace"""
    return BAEngine(config, oracle, strategy, workers=workers, on_query=on_query).run()
