"""
Dyadic Cube Geometry
Bisection, corner materialization, checkerboard classes and sup-norm packings
"""
import math
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np

from models.cube import MAX_DEPTH, DyadicCube, PackingResult
from models.exceptions import DepthLimitExceeded

# Brute-force packing enumerates subsets; keep instances tiny
EXACT_PACKING_MAX_POINTS = 20


@lru_cache(maxsize=None)
def vertex_offsets(dim: int) -> np.ndarray:
    """0/1 offsets of the 2^d vertices in binary-counter order (row m has bit j = (m >> j) & 1)"""
    rows = np.arange(1 << dim)[:, None]
    offsets = (rows >> np.arange(dim)[None, :]) & 1
    offsets.setflags(write=False)
    return offsets


def bisect(cube: DyadicCube) -> List[DyadicCube]:
    """Split a cube into its 2^d children, ordered like vertex_offsets"""
    if cube.depth >= MAX_DEPTH:
        raise DepthLimitExceeded(f"Cannot bisect a cube at depth {cube.depth}")
    base = 2 * np.asarray(cube.index, dtype=np.int64)
    return [DyadicCube(cube.depth + 1, tuple(base + offset)) for offset in vertex_offsets(cube.dim)]


def cube_geometry(cube: DyadicCube) -> Tuple[np.ndarray, np.ndarray, float]:
    """Center, vertices (2^d x d, binary-counter order) and side length"""
    index = np.asarray(cube.index, dtype=float)
    center = np.ldexp(index + 0.5, -cube.depth)
    vertices = np.ldexp(index[None, :] + vertex_offsets(cube.dim), -cube.depth)
    return center, vertices, cube.side


def checkerboard_class(cube: DyadicCube) -> int:
    """Parity class sum_j (index_j mod 2) 2^j"""
    return sum((k & 1) << j for j, k in enumerate(cube.index))


def cube_distance(first: DyadicCube, second: DyadicCube) -> float:
    """Exact inf sup-distance between two closed cubes"""
    if first.dim != second.dim:
        raise ValueError(f"Dimension mismatch: {first.dim} vs {second.dim}")
    depth = max(first.depth, second.depth)
    gap = 0
    for k1, k2 in zip(first.index, second.index):
        # Both cubes expressed on the common 2^-depth grid
        lo1, hi1 = k1 << (depth - first.depth), (k1 + 1) << (depth - first.depth)
        lo2, hi2 = k2 << (depth - second.depth), (k2 + 1) << (depth - second.depth)
        gap = max(gap, lo2 - hi1, lo1 - hi2)
    return math.ldexp(gap, -depth)


def sup_distances(points: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Sup-norm distance from every row of points to x"""
    return np.max(np.abs(points - x), axis=-1)


def lexicographic_order(points: np.ndarray) -> np.ndarray:
    """Indices sorting points lexicographically (first coordinate most significant)"""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return np.lexsort(points.T[::-1])


def grid_points(dim: int, n: int) -> np.ndarray:
    """Regular n^d grid over [0,1]^d including the boundary"""
    if n < 2:
        raise ValueError(f"Grid needs at least 2 points per axis, got {n}")
    axes = [np.linspace(0.0, 1.0, n)] * dim
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def greedy_packing(points: Sequence[Sequence[float]], r: float) -> PackingResult:
    """Maximal r-packing: keep each point whose sup-distance to all kept points exceeds r"""
    if r <= 0:
        raise ValueError(f"Packing scale must be positive, got {r}")
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return PackingResult(scale=r)
    if pts.ndim == 1:
        pts = pts[:, None]

    # Same result as the point-by-point scan: the first remaining point is always kept,
    # and everything within r of it would be rejected later
    witnesses = []
    remaining = pts
    while len(remaining):
        head = remaining[0]
        witnesses.append(head.copy())
        remaining = remaining[1:][sup_distances(remaining[1:], head) > r]
    return PackingResult(scale=r, witnesses=witnesses)


def exact_packing(points: Sequence[Sequence[float]], r: float) -> PackingResult:
    """Maximum r-packing by exhaustive search (small point sets only)"""
    if r <= 0:
        raise ValueError(f"Packing scale must be positive, got {r}")
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return PackingResult(scale=r)
    if pts.ndim == 1:
        pts = pts[:, None]
    n = len(pts)
    if n > EXACT_PACKING_MAX_POINTS:
        raise ValueError(f"Exact packing limited to {EXACT_PACKING_MAX_POINTS} points, got {n}")

    # conflicts[i]: bitmask of points within sup-distance r of point i (itself included)
    conflicts = []
    for i in range(n):
        close = np.nonzero(sup_distances(pts, pts[i]) <= r)[0]
        conflicts.append(sum(1 << int(j) for j in close))

    best = 0
    best_size = 0

    def search(candidates: int, chosen: int, size: int) -> None:
        nonlocal best, best_size
        if size + bin(candidates).count("1") <= best_size:
            return
        if candidates == 0:
            best, best_size = chosen, size
            return
        i = (candidates & -candidates).bit_length() - 1
        search(candidates & ~conflicts[i], chosen | (1 << i), size + 1)
        search(candidates & ~(1 << i), chosen, size)

    search((1 << n) - 1, 0, 0)
    return PackingResult(scale=r, witnesses=[pts[i].copy() for i in range(n) if best >> i & 1])


def is_valid_packing(result: PackingResult) -> bool:
    """Every pair of distinct witnesses is more than `scale` apart"""
    w = result.witnesses
    for i in range(len(w)):
        for j in range(i + 1, len(w)):
            if np.max(np.abs(w[i] - w[j])) <= result.scale:
                return False
    return True


def unit_cube_packing_bound(d: int, r: float) -> int:
    """(floor(1/r) + 1)^d, an upper bound on the r-packing number of [0,1]^d"""
    if r <= 0:
        raise ValueError(f"Packing scale must be positive, got {r}")
    return (math.floor(1.0 / r) + 1) ** d


def packing_scale_bound(packing_at_r2: int, d: int, r1: float, r2: float) -> float:
    """Bound on the r1-packing number from the r2-packing number, r1 < r2"""
    if not 0 < r1 < r2:
        raise ValueError(f"Need 0 < r1 < r2, got r1={r1}, r2={r2}")
    return (1.0 + 4.0 * r2 / r1) ** d * packing_at_r2


def trivial_nls_bound(d: int, r: float) -> float:
    """2^d (1/r)^d: packing bound for any subset of [0,1]^d at scale r in (0,1)"""
    if not 0 < r < 1:
        raise ValueError(f"Scale must lie in (0,1), got {r}")
    return 2.0 ** d * (1.0 / r) ** d
