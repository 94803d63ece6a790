"""
Gradient-Hölder strategy
Queries all 2^d vertices and interpolates them multilinearly; pairs with b = c1 d, beta = 1 + gamma1
"""
from typing import Sequence

import numpy as np

from models.cube import DyadicCube
from utils.geometry import cube_geometry
from .approximators import LocalApproximator
from .base import Strategy


class BAGStrategy(Strategy):
    """Multilinear vertex interpolation for (c1, gamma1)-gradient-Hölder functions"""

    name = "bag"

    def __init__(self, c1: float, gamma1: float, d: int):
        if c1 <= 0:
            raise ValueError(f"Gradient-Hölder constant must be positive, got {c1}")
        if not 0 < gamma1 <= 1:
            raise ValueError(f"Gradient-Hölder exponent must lie in (0,1], got {gamma1}")
        if d < 1:
            raise ValueError(f"Dimension must be positive, got {d}")
        self.c1 = float(c1)
        self.gamma1 = float(gamma1)
        self.d = d

    @property
    def queries_per_cube(self) -> int:
        return 1 << self.d

    @property
    def tolerance_b(self) -> float:
        return self.c1 * self.d

    @property
    def tolerance_beta(self) -> float:
        return 1.0 + self.gamma1

    def pick_points(self, cube: DyadicCube) -> np.ndarray:
        if cube.dim != self.d:
            raise ValueError(f"Strategy built for d={self.d}, got a cube of dimension {cube.dim}")
        _, vertices, _ = cube_geometry(cube)
        return vertices

    def build_approximator(self, cube: DyadicCube, values: Sequence[float]) -> LocalApproximator:
        return LocalApproximator.multilinear(cube, values)

    def error_bound(self, side: float) -> float:
        """Sup-error guarantee c1 d side^(1 + gamma1) on a cube of the given side"""
        return self.c1 * self.d * side ** (1.0 + self.gamma1)


def bag_strategy(c1: float, gamma1: float, d: int) -> BAGStrategy:
    return BAGStrategy(c1, gamma1, d)
