"""
Hölder strategy
One query at the cube center, constant approximator; pairs with b = c, beta = gamma, k = 1
"""
from typing import Sequence

import numpy as np

from models.cube import DyadicCube
from utils.geometry import cube_geometry
from .approximators import LocalApproximator
from .base import Strategy


class BAHStrategy(Strategy):
    """Constant-at-center approximation for (c, gamma)-Hölder functions"""

    name = "bah"

    def __init__(self, c: float, gamma: float):
        if c <= 0:
            raise ValueError(f"Hölder constant must be positive, got {c}")
        if not 0 < gamma <= 1:
            raise ValueError(f"Hölder exponent must lie in (0,1], got {gamma}")
        self.c = float(c)
        self.gamma = float(gamma)

    @property
    def queries_per_cube(self) -> int:
        return 1

    @property
    def tolerance_b(self) -> float:
        return self.c

    @property
    def tolerance_beta(self) -> float:
        return self.gamma

    def pick_points(self, cube: DyadicCube) -> np.ndarray:
        center, _, _ = cube_geometry(cube)
        return center[None, :]

    def build_approximator(self, cube: DyadicCube, values: Sequence[float]) -> LocalApproximator:
        return LocalApproximator.constant(cube, values[0])


def bah_strategy(c: float, gamma: float) -> BAHStrategy:
    return BAHStrategy(c, gamma)
