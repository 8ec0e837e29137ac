"""Result files: plot-ready CSV tables and a JSON run summary."""
from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

__all__ = ["ResultBundle", "format_value", "write_csv", "write_summary"]


def format_value(v):
    """CSV cell text: floats at 17 significant digits, independent of locale."""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            if len(r) != len(columns):
                raise ValueError(f"row has {len(r)} cells, header has {len(columns)}")
            w.writerow([format_value(v) for v in r])


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    return v


def write_summary(path, summary: dict):
    with open(path, "w") as fh:
        json.dump(_jsonable(summary), fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass
class ResultBundle:
    """Files written by one run plus the summary that went to ``summary.json``."""

    out_dir: str
    csv_paths: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    passed: bool = True

    @property
    def summary_path(self):
        return os.path.join(self.out_dir, "summary.json")
