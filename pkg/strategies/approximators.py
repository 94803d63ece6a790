"""
Local Approximators
Constant-at-center and multilinear vertex interpolants, plus the exact in-cube near-level test
"""
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from models.config import Mode
from models.cube import DyadicCube
from models.exceptions import OutOfCube

CONSTANT = "constant"
MULTILINEAR = "multilinear"

# Tolerance for points sitting on a cube face after floating-point rounding
CUBE_SLACK = 1e-12


def lerp(t: np.ndarray, v0: np.ndarray, v1: np.ndarray) -> np.ndarray:
    """(1 - t) v0 + t v1, exact at t = 0 and t = 1"""
    return (1.0 - t) * v0 + t * v1


def multilinear_fold(values: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Tensor-product interpolation by d successive 1-D folds.

    values: (P, 2^d) vertex values in binary-counter order
    t:      (P, d) local coordinates in [0, 1]
    Fold j merges the vertex pairs that differ only in bit j.
    """
    folded = np.asarray(values, dtype=float)
    for j in range(t.shape[1]):
        tj = t[:, j:j + 1]
        folded = lerp(tj, folded[:, 0::2], folded[:, 1::2])
    return folded[:, 0]


def level_predicate(values: np.ndarray, level: float, rho: float, mode: Mode) -> np.ndarray:
    """Per-value membership test against the threshold rho"""
    residual = np.asarray(values, dtype=float) - level
    if mode == Mode.SUBLEVEL:
        return residual <= rho
    if mode == Mode.SUPERLEVEL:
        return -residual <= rho
    return np.abs(residual) <= rho


@dataclass(frozen=True)
class LocalApproximator:
    """g_C on one dyadic cube: a constant or a multilinear interpolant of vertex values"""
    kind: str
    cube: DyadicCube
    values: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        expected = 1 if self.kind == CONSTANT else 1 << self.cube.dim
        if self.kind not in (CONSTANT, MULTILINEAR):
            raise ValueError(f"Unknown approximator kind: {self.kind}")
        if len(self.values) != expected:
            raise ValueError(f"{self.kind} approximator needs {expected} values, got {len(self.values)}")

    @classmethod
    def constant(cls, cube: DyadicCube, value: float) -> "LocalApproximator":
        return cls(CONSTANT, cube, (value,))

    @classmethod
    def multilinear(cls, cube: DyadicCube, vertex_values: Sequence[float]) -> "LocalApproximator":
        return cls(MULTILINEAR, cube, tuple(vertex_values))

    def vertex_range(self) -> Tuple[float, float]:
        """Min and max of g over its cube; both kinds attain extrema at stored values"""
        return min(self.values), max(self.values)

    def local_coordinates(self, points: np.ndarray) -> np.ndarray:
        """Map points to [0,1]^d inside the cube, rejecting anything beyond the face slack"""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        lower, upper = self.cube.lower(), self.cube.upper()
        outside = np.any((points < lower - CUBE_SLACK) | (points > upper + CUBE_SLACK), axis=1)
        if np.any(outside):
            bad = points[np.argmax(outside)]
            raise OutOfCube(f"Point {bad.tolist()} lies outside {self.cube.to_record()}")
        return np.clip((points - lower) / self.cube.side, 0.0, 1.0)

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        t = self.local_coordinates(points)
        if self.kind == CONSTANT:
            return np.full(len(t), self.values[0])
        return multilinear_fold(np.broadcast_to(np.asarray(self.values), (len(t), len(self.values))), t)

    def evaluate(self, x: Sequence[float]) -> float:
        return float(self.evaluate_many(np.asarray(x, dtype=float).reshape(1, -1))[0])

    def near_level(self, level: float, rho: float, mode: Mode = Mode.LEVEL_SET) -> bool:
        """Whether some x in the cube satisfies the level predicate at threshold rho.

        Exact from the stored values: the range of g over the connected cube is
        [min, max], so the level-set case reduces to interval overlap.
        """
        lo, hi = self.vertex_range()
        if mode == Mode.SUBLEVEL:
            return lo - level <= rho
        if mode == Mode.SUPERLEVEL:
            return level - hi <= rho
        return lo - level <= rho and hi - level >= -rho

    def to_record(self, rho: float) -> str:
        """Output-set line `depth:i idx:... rho:r vals:...`"""
        vals = ",".join(repr(v) for v in self.values)
        return f"{self.cube.to_record()} rho:{rho!r} vals:{vals}"


def approx_eval(g: LocalApproximator, x: Union[Sequence[float], np.ndarray]) -> float:
    return g.evaluate(x)


def cube_near_level(g: LocalApproximator, a: float, rho: float, mode: Mode = Mode.LEVEL_SET) -> bool:
    return g.near_level(a, rho, mode)
