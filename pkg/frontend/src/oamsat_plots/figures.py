"""Render detection-probability figures from oamsat result CSV files.

Pure presentation: the tool never recomputes physics, so a byte-identical
CSV always produces a pixel-identical image. Three figure kinds mirror the
simulator outputs: per-altitude detection curves (one line per l0, one line
style per input file), paired comparison curves (e.g. with and without
adaptive optics), and crosstalk-matrix heatmaps on a linear [0, 1] scale.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

SWEEP_COLUMNS = ["axis_value", "l0", "l_r", "mean", "p_stderr"]
RUN_COLUMNS = ["l0", "l_r", "mean", "p_stderr"]

HEATMAP_RANGE = range(-4, 5)  # rows l0 and columns l_r of the matrix figure

LINE_STYLES = ["-", "--", "-.", ":"]

KINDS = ("curves", "paired-curves", "heatmap")


class SchemaError(ValueError):
    """Input CSV does not match the documented result schema."""


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: input CSVs, figure kind, labels, output image path."""

    inputs: tuple[Path, ...]
    kind: str
    output: Path
    labels: tuple[str, ...] = ()
    axis_labels: tuple[str, str] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        if not self.inputs:
            raise SchemaError("at least one input CSV is required")
        if self.kind == "paired-curves" and len(self.inputs) != 2:
            raise SchemaError(
                f"paired-curves takes exactly two inputs, got {len(self.inputs)}"
            )
        if self.kind == "heatmap" and len(self.inputs) != 1:
            raise SchemaError(f"heatmap takes exactly one input, got {len(self.inputs)}")

    def label_for(self, index: int) -> str:
        if index < len(self.labels):
            return self.labels[index]
        return self.inputs[index].stem


def _read_rows(path: Path, columns: list[str]) -> list[dict[str, float]]:
    if not path.exists():
        raise SchemaError(f"input CSV not found: {path}")
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in columns if c not in header]
        if missing:
            raise SchemaError(
                f"{path}: missing column(s) {missing}; found {header}"
            )
        rows = []
        for line_no, raw in enumerate(reader, start=2):
            try:
                rows.append({c: float(raw[c]) for c in columns})
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"{path}:{line_no}: non-numeric cell: {exc}") from exc
    if not rows:
        raise SchemaError(f"{path}: no rows")
    return rows


def load_sweep_curves(path: Path) -> dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Detection-probability curves P(l0) vs axis value from a sweep CSV.

    Returns {l0: (axis_values, means, stderrs)} using only the diagonal
    (l_r == l0) rows.
    """
    rows = _read_rows(path, SWEEP_COLUMNS)
    curves: dict[int, dict[float, tuple[float, float]]] = {}
    for row in rows:
        l0, l_r = int(row["l0"]), int(row["l_r"])
        if l0 != l_r:
            continue
        curves.setdefault(l0, {})[row["axis_value"]] = (row["mean"], row["p_stderr"])
    if not curves:
        raise SchemaError(f"{path}: no diagonal (l_r == l0) rows to plot")
    out = {}
    for l0, points in curves.items():
        axis = np.array(sorted(points))
        means = np.array([points[a][0] for a in axis])
        errs = np.array([points[a][1] for a in axis])
        out[l0] = (axis, means, errs)
    return out


def load_crosstalk_matrix(path: Path) -> np.ndarray:
    """9x9 crosstalk matrix (rows l0, columns l_r, both -4..4) from a run CSV."""
    rows = _read_rows(path, RUN_COLUMNS)
    table = {(int(r["l0"]), int(r["l_r"])): r["mean"] for r in rows}
    matrix = np.full((len(HEATMAP_RANGE), len(HEATMAP_RANGE)), np.nan)
    missing = []
    for i, l0 in enumerate(HEATMAP_RANGE):
        for j, l_r in enumerate(HEATMAP_RANGE):
            if (l0, l_r) in table:
                matrix[i, j] = table[(l0, l_r)]
            else:
                missing.append((l0, l_r))
    if missing:
        raise SchemaError(
            f"{path}: matrix cells missing for (l0, l_r) pairs {missing[:6]}"
            + ("..." if len(missing) > 6 else "")
        )
    return matrix


def _new_figure():
    return plt.figure(figsize=(6.4, 4.8), dpi=150)


def _save(fig, output: Path):
    output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(output, format=output.suffix.lstrip(".") or "png")
    plt.close(fig)


def plot_curves(spec: FigureSpec) -> Path:
    """Detection probability vs the sweep axis; one line per l0, one line
    style per input CSV."""
    fig = _new_figure()
    ax = fig.add_subplot(111)
    color_cycle = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for index, path in enumerate(spec.inputs):
        style = LINE_STYLES[index % len(LINE_STYLES)]
        curves = load_sweep_curves(path)
        for l0 in sorted(curves):
            axis, means, _ = curves[l0]
            label = f"{spec.label_for(index)} l0={l0}" if len(spec.inputs) > 1 else f"l0={l0}"
            ax.plot(
                axis,
                means,
                style,
                color=color_cycle[abs(l0) % len(color_cycle)],
                label=label,
            )
    xlabel, ylabel = spec.axis_labels or ("sweep value", "detection probability")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_ylim(0.0, 1.0)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=7, ncol=max(1, len(spec.inputs)))
    _save(fig, spec.output)
    return spec.output


def plot_paired_curves(spec: FigureSpec) -> Path:
    """Two-result comparison (e.g. AO on vs off) drawn as dashed vs solid."""
    return plot_curves(spec)


def plot_heatmap(spec: FigureSpec) -> Path:
    """Crosstalk matrix image: rows l0, columns l_r, linear scale in [0, 1]."""
    matrix = load_crosstalk_matrix(spec.inputs[0])
    fig = _new_figure()
    ax = fig.add_subplot(111)
    image = ax.imshow(
        matrix,
        vmin=0.0,
        vmax=1.0,
        cmap="viridis",
        origin="upper",
        extent=(-4.5, 4.5, 4.5, -4.5),
    )
    ax.set_xticks(list(HEATMAP_RANGE))
    ax.set_yticks(list(HEATMAP_RANGE))
    xlabel, ylabel = spec.axis_labels or ("detected l_r", "transmitted l0")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.colorbar(image, ax=ax, label="probability")
    _save(fig, spec.output)
    return spec.output


RENDERERS = {
    "curves": plot_curves,
    "paired-curves": plot_paired_curves,
    "heatmap": plot_heatmap,
}


def render(spec: FigureSpec) -> Path:
    return RENDERERS[spec.kind](spec)
