"""
Black-box oracle
Counted point queries for the algorithms, uncounted batched ground truth for verification
"""
import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from models.exceptions import NoLevelSetSampler, OracleFailure, UnknownSmoothness
from models.results import SmoothnessCertificate

BatchFunction = Callable[[np.ndarray], np.ndarray]
LevelSetSampler = Callable[[float, int, np.random.Generator], np.ndarray]

HOLDER = "holder"
GRAD_HOLDER = "grad_holder"
UNKNOWN = "unknown"

# Absolute slack for floating-point noise in the certificates
CERTIFICATE_SLACK = 1e-12


@dataclass(frozen=True)
class SmoothnessTag:
    """Smoothness class: (c, gamma)-Hölder, (c1, gamma1)-gradient-Hölder or unknown"""
    kind: str
    constant: float = 0.0
    exponent: float = 0.0

    def __post_init__(self):
        if self.kind not in (HOLDER, GRAD_HOLDER, UNKNOWN):
            raise ValueError(f"Unknown smoothness kind: {self.kind}")
        if self.kind != UNKNOWN:
            if not self.constant > 0:
                raise ValueError(f"Smoothness constant must be positive, got {self.constant}")
            if not 0 < self.exponent <= 1:
                raise ValueError(f"Smoothness exponent must lie in (0,1], got {self.exponent}")

    @classmethod
    def holder(cls, c: float, gamma: float) -> "SmoothnessTag":
        return cls(HOLDER, float(c), float(gamma))

    @classmethod
    def grad_holder(cls, c1: float, gamma1: float) -> "SmoothnessTag":
        return cls(GRAD_HOLDER, float(c1), float(gamma1))

    @classmethod
    def unknown(cls) -> "SmoothnessTag":
        return cls(UNKNOWN)


class Oracle:
    """Deterministic black-box function on [0,1]^d with a thread-safe query counter"""

    def __init__(self,
                 name: str,
                 dim: int,
                 fn: BatchFunction,
                 smoothness: Sequence[SmoothnessTag] = (),
                 level_set_sampler: Optional[LevelSetSampler] = None,
                 gradient: Optional[BatchFunction] = None,
                 convex: bool = False):
        if dim < 1:
            raise ValueError(f"Oracle dimension must be positive, got {dim}")
        self.name = name
        self.dim = dim
        self.smoothness: Tuple[SmoothnessTag, ...] = tuple(smoothness) or (SmoothnessTag.unknown(),)
        self.convex = convex
        self._fn = fn
        self._gradient = gradient
        self._sampler = level_set_sampler
        self._count = 0
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return f"Oracle({self.name!r}, dim={self.dim}, queries={self._count})"

    @property
    def query_count(self) -> int:
        return self._count

    @property
    def has_sampler(self) -> bool:
        return self._sampler is not None

    def reset_count(self) -> None:
        with self._lock:
            self._count = 0

    def query(self, x: Sequence[float]) -> float:
        """Counted evaluation at one point (one Protocol-1 query)"""
        point = np.asarray(x, dtype=float).reshape(1, self.dim)
        with self._lock:
            self._count += 1
        try:
            value = float(self._fn(point)[0])
        except Exception as e:
            logger.error(f"Oracle {self.name} failed at {point[0]}: {e}")
            raise OracleFailure(f"{self.name} failed at {point[0].tolist()}: {e}") from e
        if not np.isfinite(value):
            raise OracleFailure(f"{self.name} returned {value} at {point[0].tolist()}")
        return value

    __call__ = query

    def values(self, points: np.ndarray) -> np.ndarray:
        """Uncounted ground-truth values at a batch of points (n x d)"""
        points = np.asarray(points, dtype=float).reshape(-1, self.dim)
        return np.asarray(self._fn(points), dtype=float)

    def gradient(self, points: np.ndarray) -> np.ndarray:
        """Analytic gradients (n x d)"""
        if self._gradient is None:
            raise ValueError(f"Oracle {self.name} has no analytic gradient")
        points = np.asarray(points, dtype=float).reshape(-1, self.dim)
        return np.asarray(self._gradient(points), dtype=float)

    def sample_level_set(self, level: float, count: int, rng: np.random.Generator) -> np.ndarray:
        """Points x in [0,1]^d with |f(x) - level| <= 1e-12"""
        if self._sampler is None:
            raise NoLevelSetSampler(f"Oracle {self.name} has no analytic level set")
        return self._sampler(level, count, rng)

    def tag(self, kind: str) -> Optional[SmoothnessTag]:
        """First smoothness tag of the given kind"""
        for tag in self.smoothness:
            if tag.kind == kind:
                return tag
        return None


# ---------------------------------------------------------------------------
# Smoothness certificates
# ---------------------------------------------------------------------------

def sample_pairs(dim: int, n_pairs: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """Half uniform pairs, half local pairs at log-uniform distances"""
    n_far = n_pairs // 2
    n_near = n_pairs - n_far
    x = rng.random((n_pairs, dim))
    y_far = rng.random((n_far, dim))
    delta = 10.0 ** rng.uniform(-6.0, np.log10(0.5), size=(n_near, 1))
    y_near = np.clip(x[n_far:] + delta * rng.uniform(-1.0, 1.0, size=(n_near, dim)), 0.0, 1.0)
    return x, np.vstack([y_far, y_near])


def _collect(x: np.ndarray, y: np.ndarray, lhs: np.ndarray, rhs: np.ndarray) -> Tuple[float, list]:
    dist_ok = rhs > 0
    ratios = np.zeros_like(lhs)
    ratios[dist_ok] = lhs[dist_ok] / rhs[dist_ok]
    bad = np.nonzero(lhs > rhs + CERTIFICATE_SLACK)[0]
    return float(ratios.max(initial=0.0)), [(x[i].copy(), y[i].copy()) for i in bad]


def certify_holder(oracle: Oracle, tag: SmoothnessTag, n_pairs: int = 10_000,
                   rng: Optional[np.random.Generator] = None) -> SmoothnessCertificate:
    """Check |f(x) - f(y)| <= c ||x - y||^gamma on random pairs"""
    if tag.kind != HOLDER:
        raise UnknownSmoothness(f"Expected a Hölder tag, got {tag.kind}")
    rng = rng or np.random.default_rng(0)
    x, y = sample_pairs(oracle.dim, n_pairs, rng)
    lhs = np.abs(oracle.values(x) - oracle.values(y))
    rhs = tag.constant * np.max(np.abs(x - y), axis=1) ** tag.exponent
    max_ratio, violations = _collect(x, y, lhs, rhs)
    if violations:
        logger.warning(f"{oracle.name}: {len(violations)} Hölder violations at c={tag.constant}, gamma={tag.exponent}")
    return SmoothnessCertificate(HOLDER, tag.constant, tag.exponent, n_pairs, max_ratio, violations)


def certify_grad_holder(oracle: Oracle, tag: SmoothnessTag, n_pairs: int = 10_000,
                        rng: Optional[np.random.Generator] = None) -> SmoothnessCertificate:
    """Check ||grad f(x) - grad f(y)||_inf <= c1 ||x - y||^gamma1 on random pairs"""
    if tag.kind != GRAD_HOLDER:
        raise UnknownSmoothness(f"Expected a gradient-Hölder tag, got {tag.kind}")
    rng = rng or np.random.default_rng(0)
    x, y = sample_pairs(oracle.dim, n_pairs, rng)
    lhs = np.max(np.abs(oracle.gradient(x) - oracle.gradient(y)), axis=1)
    rhs = tag.constant * np.max(np.abs(x - y), axis=1) ** tag.exponent
    max_ratio, violations = _collect(x, y, lhs, rhs)
    if violations:
        logger.warning(f"{oracle.name}: {len(violations)} gradient-Hölder violations at c1={tag.constant}")
    return SmoothnessCertificate(GRAD_HOLDER, tag.constant, tag.exponent, n_pairs, max_ratio, violations)


def certify(oracle: Oracle, tags: Optional[Iterable[SmoothnessTag]] = None,
            n_pairs: int = 10_000, rng: Optional[np.random.Generator] = None) -> list:
    """Certificates for every known tag of the oracle"""
    rng = rng or np.random.default_rng(0)
    results = []
    for tag in tags if tags is not None else oracle.smoothness:
        if tag.kind == HOLDER:
            results.append(certify_holder(oracle, tag, n_pairs, rng))
        elif tag.kind == GRAD_HOLDER:
            results.append(certify_grad_holder(oracle, tag, n_pairs, rng))
    return results
