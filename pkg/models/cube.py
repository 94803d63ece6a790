"""
Dyadic hypercube and packing result types
Cubes are kept as (depth, integer index) pairs; corners are materialized on demand
"""
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from .exceptions import DepthLimitExceeded

# Corners index/2^depth stay exact binary fractions up to this depth
MAX_DEPTH = 52


@dataclass(frozen=True, order=True)
class DyadicCube:
    """Closed hypercube [index/2^depth, (index+1)/2^depth] in [0,1]^d"""
    depth: int
    index: Tuple[int, ...]

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError(f"Cube depth must be non-negative, got {self.depth}")
        if self.depth > MAX_DEPTH:
            raise DepthLimitExceeded(f"Cube depth {self.depth} exceeds {MAX_DEPTH}")
        if len(self.index) == 0:
            raise ValueError("Cube index must have at least one coordinate")
        object.__setattr__(self, "index", tuple(int(k) for k in self.index))
        upper = 1 << self.depth
        for k in self.index:
            if not 0 <= k < upper:
                raise ValueError(f"Index {self.index} out of range for depth {self.depth}")

    @classmethod
    def root(cls, dim: int) -> "DyadicCube":
        """The unit cube [0,1]^d"""
        if dim < 1:
            raise ValueError(f"Dimension must be positive, got {dim}")
        return cls(0, (0,) * dim)

    @property
    def dim(self) -> int:
        return len(self.index)

    @property
    def side(self) -> float:
        return 2.0 ** -self.depth

    def lower(self) -> np.ndarray:
        """Lower corner"""
        return np.ldexp(np.asarray(self.index, dtype=float), -self.depth)

    def upper(self) -> np.ndarray:
        """Upper corner"""
        return np.ldexp(np.asarray(self.index, dtype=float) + 1.0, -self.depth)

    def contains(self, x: Sequence[float], slack: float = 0.0) -> bool:
        """Closed-cube membership with optional absolute slack"""
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower() - slack) and np.all(x <= self.upper() + slack))

    def key(self) -> Tuple[int, Tuple[int, ...]]:
        """Sort key (depth, index) used to keep cube lists deterministic"""
        return (self.depth, self.index)

    def to_record(self) -> str:
        """Text form `depth:i idx:k1,...,kd`"""
        return f"depth:{self.depth} idx:{','.join(str(k) for k in self.index)}"

    @classmethod
    def from_record(cls, text: str) -> "DyadicCube":
        """Parse the `depth:i idx:k1,...,kd` text form"""
        fields = dict(part.split(":", 1) for part in text.split())
        try:
            depth = int(fields["depth"])
            index = tuple(int(k) for k in fields["idx"].split(","))
        except (KeyError, ValueError) as e:
            raise ValueError(f"Malformed cube record: {text!r}") from e
        return cls(depth, index)


@dataclass
class PackingResult:
    """r-separated witness points (sup-norm) and their count"""
    scale: float
    witnesses: List[np.ndarray] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.witnesses)
