"""Deterministic batch renderer for the figure recipes.

Same CSV plus same recipe yields a byte-identical PNG: fixed backend, fonts,
dpi and stripped metadata.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .recipes import Recipe, RecipeError, evaluate_expression, load_recipe

__all__ = ["RenderResult", "render", "render_all"]

_RC = {
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "font.family": "DejaVu Sans",
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.25,
    "svg.hashsalt": "rmtgeom",
}


@dataclass(frozen=True)
class RenderResult:
    fig_id: str
    path: Path
    n_series: int
    n_overlays: int


def _read_csv(path: Path) -> dict:
    if not path.exists():
        raise RecipeError(f"input CSV missing: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise RecipeError(f"input CSV empty: {path}") from None
        rows = [row for row in reader if row]
    if not rows:
        raise RecipeError(f"input CSV has a header but no data rows: {path}")
    data = np.array(rows, dtype=float)
    return {name: data[:, i] for i, name in enumerate(header)}


def _column(table: dict, name: str, path) -> np.ndarray:
    if name not in table:
        raise RecipeError(f"{path}: column {name!r} not found "
                          f"(have {sorted(table)})")
    return table[name]


def _apply_filter(table: dict, spec_filter: str, path) -> dict:
    column, _, value = spec_filter.partition(":")
    mask = np.isclose(_column(table, column.strip(), path), float(value))
    if not mask.any():
        raise RecipeError(f"{path}: filter {spec_filter!r} removed every row")
    return {k: v[mask] for k, v in table.items()}


def _draw_series(ax, spec, table, path):
    x = _column(table, spec.x, path)
    y = _column(table, spec.y, path)
    kwargs = {"label": spec.label} if spec.label else {}
    if spec.style == "points":
        if spec.yerr is not None:
            ax.errorbar(x, y, yerr=_column(table, spec.yerr, path),
                        fmt="o", markersize=3, capsize=2, **kwargs)
        else:
            ax.plot(x, y, "o", markersize=3, **kwargs)
    else:
        ax.plot(x, y, "-", linewidth=1.2, **kwargs)
    return x


def render(recipe: Recipe, data_dir, out_dir) -> RenderResult:
    """Draw one recipe: every input series, then the overlay curves."""
    data_dir, out_dir = Path(data_dir), Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5.4, 4.0))
        x_all = []
        tables = {}
        for spec in recipe.inputs:
            table = _read_csv(data_dir / spec.path)
            if spec.filter:
                table = _apply_filter(table, spec.filter, spec.path)
            tables[spec.name] = (spec, table)
            x_all.append(_draw_series(ax, spec, table, spec.path))
        x_cat = np.concatenate(x_all)
        x_pos = x_cat[x_cat > 0]
        if recipe.xscale == "log" and len(x_pos):
            grid = np.geomspace(x_pos.min(), x_pos.max(), 400)
        else:
            grid = np.linspace(x_cat.min(), x_cat.max(), 400)
        for ov in recipe.overlays:
            style = {"dashed": "--", "dotted": ":", "solid": "-"}.get(ov.style, "--")
            kwargs = {"label": ov.label} if ov.label else {}
            ax.plot(grid, evaluate_expression(ov.expr, grid), style,
                    linewidth=1.1, **kwargs)
        ax.set_xscale(recipe.xscale)
        ax.set_yscale(recipe.yscale)
        ax.set_xlabel(recipe.xlabel)
        ax.set_ylabel(recipe.ylabel)
        if recipe.title:
            ax.set_title(recipe.title)
        if any(s.label for s in recipe.inputs) or any(o.label for o in recipe.overlays):
            ax.legend(loc="best", fontsize=8)
        if recipe.inset:
            _draw_inset(fig, ax, recipe, tables)
        out_path = out_dir / recipe.output
        fig.savefig(out_path, metadata={"Software": "rmtgeom-plots"})
        plt.close(fig)
    return RenderResult(recipe.fig_id, out_path, len(recipe.inputs),
                        len(recipe.overlays))


def _draw_inset(fig, ax, recipe, tables):
    spec = recipe.inset
    inset_ax = ax.inset_axes([0.55, 0.55, 0.4, 0.4])
    names = [n.strip() for n in spec.get("inputs", "").split(",") if n.strip()] \
        or list(tables)
    x_min = float(spec["x_min"]) if "x_min" in spec else None
    x_max = float(spec["x_max"]) if "x_max" in spec else None
    for name in names:
        if name not in tables:
            raise RecipeError(f"inset references unknown input {name!r}")
        series, table = tables[name]
        xcol = spec.get("x", series.x)
        ycol = spec.get("y", series.y)
        x = _column(table, xcol, series.path)
        y = _column(table, ycol, series.path)
        mask = np.ones(len(x), dtype=bool)
        if x_min is not None:
            mask &= x >= x_min
        if x_max is not None:
            mask &= x <= x_max
        if series.style == "points":
            inset_ax.plot(x[mask], y[mask], "o", markersize=2)
        else:
            inset_ax.plot(x[mask], y[mask], "-", linewidth=1.0)
    if spec.get("xscale"):
        inset_ax.set_xscale(spec["xscale"])
    if spec.get("yscale"):
        inset_ax.set_yscale(spec["yscale"])
    inset_ax.tick_params(labelsize=6)


def render_all(recipe_paths, data_dir, out_dir):
    return [render(load_recipe(p), data_dir, out_dir) for p in recipe_paths]
