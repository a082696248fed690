"""Deterministic CSV and text emitters with a '#'-prefixed metadata header."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .model import ModelParams


def format_number(x) -> str:
    """17 significant digits in scientific notation; NaN and None become empty cells."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return ""
    return f"{x:.16e}"


def convention_name(cv: float) -> str:
    return "1" if math.isclose(cv, 1.0) else "2pi"


def params_metadata(params: ModelParams) -> list[tuple[str, str]]:
    out = []
    for k, v in params.as_dict().items():
        if v is None:
            out.append((f"param.{k}", "derived"))
        elif isinstance(v, complex):
            out.append((f"param.{k}", f"{format_number(v.real)} {format_number(v.imag)}j"))
        else:
            out.append((f"param.{k}", format_number(v)))
    out.append(("param.delta3_resolved", format_number(params.resolved_delta3)))
    return out


def base_metadata(job: str, params: ModelParams | None) -> list[tuple[str, str]]:
    meta = [("job", job), ("package", f"ramanpair {__version__}"),
            ("numpy", np.__version__), ("scipy", scipy.__version__)]
    if params is not None:
        meta.append(("angular_convention", convention_name(params.angular_convention)))
        meta.extend(params_metadata(params))
    return meta


def write_csv(path, meta, columns, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        for k, v in meta:
            fh.write(f"# {k}: {v}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([format_number(x) for x in row])
    return path


def write_text(path, meta, body: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {k}: {v}" for k, v in meta]
    path.write_text("\n".join(lines + [body.rstrip("\n")]) + "\n")
    return path
