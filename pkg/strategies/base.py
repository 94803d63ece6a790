"""
Strategy interface
A strategy decides where to query inside a new cube and how to turn the answers into g_C
"""
import abc
from typing import Optional, Sequence, Union

import numpy as np

from models.config import BAConfig, MaxDepth, MaxQueries, Mode, TargetAccuracy
from models.cube import DyadicCube
from .approximators import LocalApproximator


class Strategy(abc.ABC):
    """Query placement plus approximator construction, with the tolerances (b, beta) it guarantees"""

    name: str = "strategy"

    @property
    @abc.abstractmethod
    def queries_per_cube(self) -> int:
        """k, the number of queries issued in every new cube"""

    @property
    @abc.abstractmethod
    def tolerance_b(self) -> float:
        pass

    @property
    @abc.abstractmethod
    def tolerance_beta(self) -> float:
        pass

    @abc.abstractmethod
    def pick_points(self, cube: DyadicCube) -> np.ndarray:
        """k points (k x d) inside the closed cube"""

    @abc.abstractmethod
    def build_approximator(self, cube: DyadicCube, values: Sequence[float]) -> LocalApproximator:
        """g_C from the values observed at pick_points(cube)"""

    def default_config(self,
                       level: float,
                       stop: Union[TargetAccuracy, MaxDepth, MaxQueries] = MaxDepth(depth=0),
                       mode: Mode = Mode.LEVEL_SET,
                       max_cubes: int = 1_000_000,
                       b: Optional[float] = None,
                       beta: Optional[float] = None) -> BAConfig:
        """Engine configuration with k, b and beta wired for this strategy"""
        return BAConfig(
            level=level,
            tolerance_b=b if b is not None else self.tolerance_b,
            tolerance_beta=beta if beta is not None else self.tolerance_beta,
            queries_per_cube=self.queries_per_cube,
            mode=mode,
            stop=stop,
            max_cubes=max_cubes,
        )

    def __repr__(self) -> str:
        return f"{type(self).__name__}(b={self.tolerance_b}, beta={self.tolerance_beta}, k={self.queries_per_cube})"
