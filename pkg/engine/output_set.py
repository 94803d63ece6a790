"""
Output set
Union of per-cube predicate regions published by the engine at the start of an iteration
"""
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from models.config import Mode
from models.cube import DyadicCube
from strategies.approximators import CONSTANT, LocalApproximator, level_predicate, multilinear_fold
from utils.geometry import vertex_offsets

# Integer cube keys pack d indices of D bits each into one int64
_PACKED_KEY_BITS = 62


@dataclass
class _DepthGroup:
    depth: int
    kind: str
    keys: np.ndarray            # sorted packed keys, or empty when using the dict fallback
    lookup: Optional[Dict[Tuple[int, ...], int]]
    values: np.ndarray          # (records, n_values), aligned with keys / lookup positions
    rho: np.ndarray             # (records,)


@dataclass
class OutputSet:
    """S(i): records (g_C, rho) over the cubes of C_{i-1}; x is a member iff some record accepts it"""
    level: float
    mode: Mode
    iteration: int
    dim: int
    records: List[Tuple[LocalApproximator, float]] = field(default_factory=list)
    _groups: Optional[List[_DepthGroup]] = field(default=None, init=False, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def threshold(self) -> Optional[float]:
        """Common rho of all records (None for an empty set or mixed thresholds)"""
        rhos = {rho for _, rho in self.records}
        return rhos.pop() if len(rhos) == 1 else None

    def cubes(self) -> List[DyadicCube]:
        return [g.cube for g, _ in self.records]

    # ------------------------------------------------------------------
    # Membership
    # ------------------------------------------------------------------

    def _build_groups(self) -> List[_DepthGroup]:
        buckets: Dict[Tuple[int, str], List[Tuple[LocalApproximator, float]]] = {}
        for g, rho in self.records:
            buckets.setdefault((g.cube.depth, g.kind), []).append((g, rho))

        groups = []
        for (depth, kind), items in sorted(buckets.items()):
            if depth * self.dim <= _PACKED_KEY_BITS:
                keys = np.array([_pack(g.cube.index, depth) for g, _ in items], dtype=np.int64)
                order = np.argsort(keys, kind="stable")
                items = [items[i] for i in order]
                keys = keys[order]
                lookup = None
            else:
                keys = np.empty(0, dtype=np.int64)
                lookup = {g.cube.index: pos for pos, (g, _) in enumerate(items)}
            values = np.array([g.values for g, _ in items], dtype=float)
            rho = np.array([r for _, r in items], dtype=float)
            groups.append(_DepthGroup(depth, kind, keys, lookup, values, rho))
        return groups

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Vectorized membership of an (n x d) batch"""
        X = np.atleast_2d(np.asarray(points, dtype=float))
        if X.shape[1] != self.dim:
            raise ValueError(f"Expected points of dimension {self.dim}, got {X.shape[1]}")
        member = np.zeros(len(X), dtype=bool)
        if not self.records or len(X) == 0:
            return member
        if self._groups is None:
            self._groups = self._build_groups()

        inside = np.all((X >= 0.0) & (X <= 1.0), axis=1)
        for group in self._groups:
            n_side = 1 << group.depth
            scaled = np.ldexp(X, group.depth)
            k = np.floor(scaled).astype(np.int64)
            primary = np.clip(k, 0, n_side - 1)
            # Points on an interior face also belong to the lower neighbour
            on_face = (scaled == k) & (k > 0)
            alternate = np.where(on_face, k - 1, primary)

            for offset in vertex_offsets(self.dim):
                idx = np.where(offset.astype(bool), alternate, primary)
                pending = inside & ~member
                if not np.any(pending):
                    break
                pos, found = self._locate(group, idx, pending)
                if not np.any(found):
                    continue
                rows = np.nonzero(found)[0]
                t = np.clip(scaled[rows] - idx[rows], 0.0, 1.0)
                vals = group.values[pos[rows]]
                approx = vals[:, 0] if group.kind == CONSTANT else multilinear_fold(vals, t)
                member[rows] |= level_predicate(approx, self.level, group.rho[pos[rows]], self.mode)
        return member

    def _locate(self, group: _DepthGroup, idx: np.ndarray, pending: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        pos = np.zeros(len(idx), dtype=np.int64)
        found = np.zeros(len(idx), dtype=bool)
        if group.lookup is None:
            keys = np.zeros(len(idx), dtype=np.int64)
            for j in range(self.dim):
                keys |= idx[:, j] << (group.depth * j)
            where = np.searchsorted(group.keys, keys)
            where = np.minimum(where, len(group.keys) - 1)
            found = pending & (group.keys[where] == keys)
            pos = where
        else:
            for row in np.nonzero(pending)[0]:
                hit = group.lookup.get(tuple(int(k) for k in idx[row]))
                if hit is not None:
                    pos[row] = hit
                    found[row] = True
        return pos, found

    def contains_point(self, x: Sequence[float]) -> bool:
        return bool(self.contains(np.asarray(x, dtype=float).reshape(1, -1))[0])

    # ------------------------------------------------------------------
    # Text form
    # ------------------------------------------------------------------

    def to_lines(self) -> List[str]:
        header = f"# level:{self.level!r} mode:{self.mode.value} iteration:{self.iteration} dim:{self.dim}"
        return [header] + [g.to_record(rho) for g, rho in self.records]

    @classmethod
    def from_lines(cls, lines: Iterable[str], level: float = 0.0, mode: Mode = Mode.LEVEL_SET) -> "OutputSet":
        """Parse the dump written by to_lines; level and mode fill in for a missing header"""
        header: Dict[str, str] = {}
        parsed: List[Tuple[DyadicCube, float, List[float]]] = []
        for raw in lines:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                header.update(part.split(":", 1) for part in line[1:].split() if ":" in part)
                continue
            fields = dict(part.split(":", 1) for part in line.split())
            try:
                cube = DyadicCube.from_record(f"depth:{fields['depth']} idx:{fields['idx']}")
                rho = float(fields["rho"])
                vals = [float(v) for v in fields["vals"].split(",")]
            except KeyError as e:
                raise ValueError(f"Output-set record is missing {e}: {line!r}") from e
            parsed.append((cube, rho, vals))

        if "dim" in header:
            dim = int(header["dim"])
        elif parsed:
            dim = parsed[0][0].dim
        else:
            raise ValueError("Empty output-set dump without a dim header")

        records = []
        for cube, rho, vals in parsed:
            if cube.dim != dim:
                raise ValueError(f"Record {cube.to_record()} does not match dimension {dim}")
            if len(vals) == 1:
                records.append((LocalApproximator.constant(cube, vals[0]), rho))
            else:
                records.append((LocalApproximator.multilinear(cube, vals), rho))
        return cls(
            level=float(header.get("level", level)),
            mode=Mode(header.get("mode", Mode(mode).value)),
            iteration=int(header.get("iteration", 0)),
            dim=dim,
            records=records,
        )


def _pack(index: Tuple[int, ...], depth: int) -> int:
    key = 0
    for j, k in enumerate(index):
        key |= k << (depth * j)
    return key
