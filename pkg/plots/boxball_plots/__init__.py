"""Publication-style figures from boxball CSV/JSON outputs.

Pure reader: figures are regenerable artifacts and nothing here mutates or
statistically processes its inputs; axis transforms (log scales, ECDF
ranking, gap differences of recorded positions) are the only arithmetic.
Rendering is deterministic: fixed style, fixed size, no timestamps.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("spacetime", "gaps", "scaling", "cdf")

STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.2,
}


class SchemaError(ValueError):
    """An input file lacks the columns a figure kind needs."""


@dataclass
class FigureSpec:
    kind: str
    inputs: list[str]
    out: str
    reference: str | None = None
    title: str | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")
        if not self.inputs:
            raise ValueError("need at least one input file")


def read_table(path: str) -> tuple[dict[str, str], list[str], list[list[str]]]:
    """CSV with '# key=value' header comments; returns (meta, columns, rows)."""
    meta: dict[str, str] = {}
    lines = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key.strip()] = value.strip()
            elif line.strip():
                lines.append(line)
    reader = csv.reader(lines)
    columns = next(reader)
    return meta, columns, [row for row in reader]


def _require(columns: list[str], prefix: str, path: str) -> list[int]:
    idx = [i for i, c in enumerate(columns) if c.startswith(prefix)]
    if not idx:
        raise SchemaError(f"{path}: missing required columns '{prefix}*' (have {columns})")
    return idx


def _column(columns: list[str], name: str, path: str) -> int:
    try:
        return columns.index(name)
    except ValueError:
        raise SchemaError(f"{path}: missing required column '{name}' (have {columns})") from None


def _positions_table(path: str) -> tuple[np.ndarray, np.ndarray]:
    """(times, positions) from a trajectory CSV with zeta_* or xi_* columns."""
    _, columns, rows = read_table(path)
    for prefix in ("zeta_", "xi_"):
        idx = [i for i, c in enumerate(columns) if c.startswith(prefix)]
        if idx:
            break
    else:
        raise SchemaError(f"{path}: missing required columns 'zeta_*' or 'xi_*' (have {columns})")
    tcol = 0 if columns[0] in ("t", "time") else _column(columns, "t", path)
    times = np.array([float(r[tcol]) for r in rows])
    pos = np.array([[int(r[i]) for i in idx] for r in rows])
    return times, pos


def _fig_spacetime(spec: FigureSpec, ax) -> None:
    times, pos = _positions_table(spec.inputs[0])
    for ball in range(pos.shape[1]):
        ax.plot(pos[:, ball], times, ".", markersize=2.5, rasterized=False)
    ax.set_xlabel("site")
    ax.set_ylabel("time")
    ax.invert_yaxis()


def _fig_gaps(spec: FigureSpec, ax) -> None:
    path = spec.inputs[0]
    _, columns, rows = read_table(path)
    w_idx = [i for i, c in enumerate(columns) if c.startswith("W_")]
    if w_idx:
        tcol = _column(columns, "t", path)
        times = np.array([float(r[tcol]) for r in rows])
        gaps = np.array([[int(r[i]) for i in w_idx] for r in rows])
    else:
        times, pos = _positions_table(path)
        if pos.shape[1] < 2:
            raise SchemaError(f"{path}: need at least two position columns for gaps")
        gaps = pos[:, 1:] - pos[:, :-1] - 1
    for j in range(gaps.shape[1]):
        ax.plot(times, gaps[:, j], label=f"gap {j + 1}")
    ax.set_xlabel("time")
    ax.set_ylabel("gap")
    ax.legend(loc="upper left")


def _fig_scaling(spec: FigureSpec, ax) -> None:
    """log-log mean boundary time vs n, with a slope-1/2 guide line.

    Reads the summary JSON written by the boundary-time experiments; the
    points are taken verbatim from the report details."""
    path = spec.inputs[0]
    with open(path) as fh:
        summary = json.load(fh)
    points = None
    for report in summary.get("reports", []):
        details = report.get("details", {})
        if "ns" in details and "mean_counts" in details:
            points = (details["ns"], details["mean_counts"])
        elif "horizons" in details and "mean_occupation" in details:
            points = (details["horizons"], details["mean_occupation"])
    if points is None:
        raise SchemaError(f"{path}: no report with scaling points (ns/mean_counts)")
    ns = np.array(points[0], dtype=float)
    means = np.array(points[1], dtype=float)
    ax.loglog(ns, means, "o-", label="measured")
    guide = means[0] * np.sqrt(ns / ns[0])
    ax.loglog(ns, guide, "--", color="gray", label="slope 1/2 guide")
    ax.set_xlabel("n")
    ax.set_ylabel("mean boundary time")
    ax.legend(loc="upper left")


def _fig_cdf(spec: FigureSpec, ax) -> None:
    """Empirical CDF overlays, optionally against a reference CDF table."""
    for path in spec.inputs:
        _, columns, rows = read_table(path)
        if "model" in columns:
            mcol = columns.index("model")
            vcols = _require(columns, "w", path)
            models = sorted({r[mcol] for r in rows})
            for model in models:
                for v in vcols:
                    values = np.sort([float(r[v]) for r in rows if r[mcol] == model])
                    ecdf = np.arange(1, values.size + 1) / values.size
                    ax.step(values, ecdf, where="post", label=f"{model} {columns[v]}")
        else:
            vcols = _require(columns, "w", path)
            for v in vcols:
                values = np.sort([float(r[v]) for r in rows])
                ecdf = np.arange(1, values.size + 1) / values.size
                ax.step(values, ecdf, where="post", label=columns[v])
    if spec.reference:
        _, columns, rows = read_table(spec.reference)
        xcol = _column(columns, "x", spec.reference)
        fcol = _column(columns, "F", spec.reference)
        xs = np.array([float(r[xcol]) for r in rows])
        fs = np.array([float(r[fcol]) for r in rows])
        ax.plot(xs, fs, "k--", label="reference")
    ax.set_xlabel("value")
    ax.set_ylabel("CDF")
    ax.legend(loc="lower right")


_RENDERERS = {
    "spacetime": _fig_spacetime,
    "gaps": _fig_gaps,
    "scaling": _fig_scaling,
    "cdf": _fig_cdf,
}


def render(spec: FigureSpec) -> str:
    """Render one figure; returns the output path.

    Identical inputs and spec produce byte-identical PNG output (fixed
    style, no timestamp metadata)."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        try:
            _RENDERERS[spec.kind](spec, ax)
            if spec.title:
                ax.set_title(spec.title)
            out = Path(spec.out)
            out.parent.mkdir(parents=True, exist_ok=True)
            fig.savefig(out, format="png", metadata={"Software": None})
        finally:
            plt.close(fig)
    return str(spec.out)
