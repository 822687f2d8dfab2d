"""CSV outputs: per-cell traces with a provenance header, written atomically."""
import csv
import io
import os
import re
import tempfile
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

TRACE_HEADER = re.compile(r"^# config_hash=(?P<hash>[0-9a-f]+) seed=(?P<seed>-?\d+) scheme=(?P<scheme>\S+) K=(?P<k>\d+)$")


def trace_columns(horizon: int) -> List[str]:
    return (
        ["step", "t", "sinr", "sinr_db", "sinr_pred", "interference"]
        + [f"interference_pred_{tau}" for tau in range(1, horizon + 1)]
        + [f"interference_held_{tau}" for tau in range(1, horizon + 1)]
        + ["min_rate", "user_sinrs", "blockage", "regimes", "hotspot_users", "objective", "iterations", "feasible"]
    )


def trace_header(config_hash: str, seed: int, scheme: str, k: int) -> str:
    return f"# config_hash={config_hash} seed={seed} scheme={scheme} K={k}"


def trace_filename(scheme: str, k: int, seed: int) -> str:
    return f"{scheme}_K{k}_seed{seed}.csv"


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def fmt_list(values: Iterable) -> str:
    return ";".join(fmt(v) for v in values)


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp_path, path)
    except Exception:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def write_csv(path: str, columns: Sequence[str], rows: Iterable[Dict[str, str]], comment: Optional[str] = None) -> None:
    buffer = io.StringIO()
    if comment:
        buffer.write(comment + "\n")
    writer = csv.DictWriter(buffer, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    atomic_write_text(path, buffer.getvalue())


@dataclass
class TraceFile:
    path: str
    config_hash: str
    seed: int
    scheme: str
    k: int
    rows: List[Dict[str, str]]

    def column(self, name: str) -> np.ndarray:
        return np.array([float(row[name]) for row in self.rows])

    def horizon(self) -> int:
        return sum(1 for name in self.rows[0] if name.startswith("interference_pred_")) if self.rows else 0

    def matrix(self, prefix: str) -> np.ndarray:
        taus = range(1, self.horizon() + 1)
        return np.array([[float(row[f"{prefix}{tau}"]) for tau in taus] for row in self.rows])


def read_trace(path: str) -> TraceFile:
    if not os.path.exists(path):
        raise FileNotFoundError(f"Trace not found: {path}")
    with open(path, "r", newline="") as f:
        first = f.readline().rstrip("\n")
        match = TRACE_HEADER.match(first)
        if not match:
            raise ValueError(f"{path} has no trace provenance header")
        rows = list(csv.DictReader(f))
    return TraceFile(
        path=path,
        config_hash=match.group("hash"),
        seed=int(match.group("seed")),
        scheme=match.group("scheme"),
        k=int(match.group("k")),
        rows=rows,
    )
