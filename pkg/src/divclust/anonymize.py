"""l-diverse publication of CSV microdata.

Each record is a point in the space of its numeric quasi-identifiers (QI);
its sensitive attribute (SA) value is its color.  A diversity clustering then
yields groups of at least ``l`` records with pairwise distinct SA values, and
only group-level QI information is published.
"""
from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Sequence
from dataclasses import dataclass
from os import PathLike

import numpy as np

from .diversity import solve
from .errors import DivClustError
from .instance import Clustering, Instance, dense_colors
from .outliers import solve_with_outliers

NORMALIZATIONS = ("minmax", "zscore")
MODES = ("strict", "outliers")


class MicrodataError(DivClustError, ValueError):
    """Unusable CSV input."""


@dataclass(frozen=True)
class AnonymizeConfig:
    qi_columns: tuple[str, ...]
    sa_column: str
    l: int
    normalization: str = "minmax"
    mode: str = "strict"

    def __post_init__(self):
        object.__setattr__(self, "qi_columns", tuple(self.qi_columns))
        if not self.qi_columns:
            raise ValueError("at least one QI column is required")
        if self.sa_column in self.qi_columns:
            raise ValueError("the SA column cannot also be a QI column")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.l < 1:
            raise ValueError("l must be a positive integer")


def normalize(raw: np.ndarray, method: str = "minmax") -> np.ndarray:
    """Column-wise scaling; constant columns map to 0 under either method."""
    raw = np.asarray(raw, dtype=np.float64)
    if method == "minmax":
        lo, span = raw.min(axis=0), np.ptp(raw, axis=0)
        shift, scale = lo, span
    elif method == "zscore":
        shift, scale = raw.mean(axis=0), raw.std(axis=0)
    else:
        raise ValueError(f"unknown normalization {method!r}")
    safe = np.where(scale > 0, scale, 1.0)
    out = (raw - shift) / safe
    out[:, scale == 0] = 0.0
    return out


def _qi_matrix(rows: Sequence[dict], columns: Sequence[str]) -> np.ndarray:
    out = np.empty((len(rows), len(columns)))
    for i, row in enumerate(rows):
        for j, col in enumerate(columns):
            cell = (row.get(col) or "").strip()
            try:
                out[i, j] = float(cell)
            except ValueError:
                raise MicrodataError(f"row {i + 1}: QI column {col!r} is not numeric ({cell!r})") from None
            if not math.isfinite(out[i, j]):
                raise MicrodataError(f"row {i + 1}: QI column {col!r} is not finite")
    return out


def read_rows(source: str | PathLike | io.TextIOBase) -> tuple[list[str], list[dict]]:
    if isinstance(source, io.TextIOBase):
        text = source.read()
    else:
        with open(source, encoding="utf-8", newline="") as fh:
            text = fh.read()
    reader = csv.DictReader(io.StringIO(text))
    if not reader.fieldnames:
        raise MicrodataError("empty file: a header row is required")
    rows = list(reader)
    if not rows:
        raise MicrodataError("no data rows")
    return list(reader.fieldnames), rows


def ingest_csv(source, cfg: AnonymizeConfig) -> tuple[Instance, list[dict]]:
    """One point per row: normalised QI coordinates, color from the SA value."""
    header, rows = read_rows(source)
    missing = [c for c in (*cfg.qi_columns, cfg.sa_column) if c not in header]
    if missing:
        raise MicrodataError(f"missing column(s): {missing}")
    raw = _qi_matrix(rows, cfg.qi_columns)
    colors, names = dense_colors([row[cfg.sa_column] for row in rows])
    inst = Instance(colors=colors, points=normalize(raw, cfg.normalization), l=cfg.l, color_names=names)
    return inst, rows


def anonymize(inst: Instance, cfg: AnonymizeConfig) -> Clustering:
    if cfg.mode == "strict":
        return solve(inst, cfg.l)
    return solve_with_outliers(inst, cfg.l)


@dataclass(frozen=True)
class Publication:
    summary: list[dict]  # one row per cluster
    table: list[dict]  # one row per published record
    suppressed: list[dict]  # original rows withheld as outliers

    def to_dict(self) -> dict:
        return {"summary": self.summary, "table": self.table, "suppressed": self.suppressed}


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def publish(inst: Instance, clustering: Clustering, rows: Sequence[dict], cfg: AnonymizeConfig) -> Publication:
    """Cluster summaries in original QI units plus a generalised record table.

    Each published record keeps its SA value; its QIs are replaced by the
    cluster id and the cluster's per-column ``[min, max]`` range.
    """
    raw = _qi_matrix(rows, cfg.qi_columns)
    summary, table = [], []
    for cid, cluster in enumerate(clustering.clusters):
        idx = list(cluster.members)
        center = raw[cluster.center]
        radius = float(np.sqrt(((raw[idx] - center) ** 2).sum(axis=1)).max())
        entry = {"cluster": cid, "count": len(idx), "radius": radius,
                 "radius_normalized": float(inst.dist[cluster.center, idx].max())}
        for j, col in enumerate(cfg.qi_columns):
            entry[f"center_{col}"] = float(center[j])
        summary.append(entry)
        lo, hi = raw[idx].min(axis=0), raw[idx].max(axis=0)
        ranges = {col: f"[{_fmt(lo[j])}, {_fmt(hi[j])}]" for j, col in enumerate(cfg.qi_columns)}
        for v in idx:
            table.append({"cluster": cid, **ranges, cfg.sa_column: rows[v][cfg.sa_column]})
    suppressed = [dict(rows[v]) for v in clustering.outliers]
    return Publication(summary, table, suppressed)


def _csv_text(records: list[dict], fieldnames: Sequence[str] | None = None) -> str:
    buf = io.StringIO()
    if fieldnames is None:
        fieldnames = list(records[0]) if records else []
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    writer.writerows(records)
    return buf.getvalue()


def publication_files(pub: Publication, cfg: AnonymizeConfig, header: Sequence[str], fmt: str) -> dict[str, str]:
    """Rendered outputs keyed by file suffix (``.json`` or ``_summary.csv`` etc.)."""
    if fmt == "json":
        return {".json": json.dumps(pub.to_dict(), indent=2) + "\n"}
    summary_fields = ["cluster", "count", "radius", "radius_normalized", *(f"center_{c}" for c in cfg.qi_columns)]
    table_fields = ["cluster", *cfg.qi_columns, cfg.sa_column]
    return {
        "_summary.csv": _csv_text(pub.summary, summary_fields),
        "_groups.csv": _csv_text(pub.table, table_fields),
        "_suppressed.csv": _csv_text(pub.suppressed, list(header)),
    }
