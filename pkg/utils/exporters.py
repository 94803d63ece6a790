"""
Result files
CSV writers for traces, sweeps and packings, plus the output-set geometry dump
"""
import os
from typing import Iterable, List, Sequence

import numpy as np
import pandas as pd
from loguru import logger

from engine.output_set import OutputSet
from models.config import Mode
from models.results import SweepPoint

FLOAT_FORMAT = "%.17g"
SWEEP_COLUMNS = ["epsilon", "queries", "iterations", "passed"]
NLS_COLUMNS = ["scale", "packing_count"]


def write_frame(frame: pd.DataFrame, path: str) -> str:
    """Byte-stable CSV: no index, round-trip float precision"""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.debug(f"Wrote {len(frame)} rows to {path}")
    return path


def sweep_frame(points: Sequence[SweepPoint]) -> pd.DataFrame:
    frame = pd.DataFrame(
        [(p.epsilon, p.queries, p.iterations, p.passed) for p in points],
        columns=SWEEP_COLUMNS,
    )
    frame["queries"] = frame["queries"].astype("Int64")
    frame["passed"] = frame["passed"].map({True: "true", False: "false"})
    return frame


def nls_frame(scales: Sequence[float], counts: Sequence[int]) -> pd.DataFrame:
    return pd.DataFrame({"scale": list(scales), "packing_count": list(counts)}, columns=NLS_COLUMNS)


def write_output_set(output_set: OutputSet, path: str) -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as f:
        f.write("\n".join(output_set.to_lines()) + "\n")
    logger.debug(f"Wrote {len(output_set)} output-set records to {path}")
    return path


def read_output_set(path: str, level: float = 0.0, mode: Mode = Mode.LEVEL_SET) -> OutputSet:
    with open(path) as f:
        return OutputSet.from_lines(f, level=level, mode=mode)


def read_points(path: str) -> np.ndarray:
    """Points file: CSV with columns x0..x{d-1}, read in file order"""
    frame = pd.read_csv(path)
    columns: List[str] = [c for c in frame.columns if str(c).startswith("x")]
    if not columns:
        raise ValueError(f"{path} has no x0..x(d-1) columns")
    columns.sort(key=lambda c: int(str(c)[1:]))
    return frame[columns].to_numpy(dtype=float)


def points_frame(points: Iterable[np.ndarray], dim: int) -> pd.DataFrame:
    rows = np.array(list(points), dtype=float).reshape(-1, dim)
    return pd.DataFrame(rows, columns=[f"x{j}" for j in range(dim)])
