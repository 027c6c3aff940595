"""Figure recipes: which CSVs to draw, how, and which reference curves to lay
on top. Same key-value INI format as the CLI config.

A recipe is fully declarative; any analytic reference curve is an expression
string evaluated over the plotted x range (never re-derived here), so this
package stays computation-free.

Sections:
    [figure]            id, output, title, axis labels/scales
    [input <name>]      path, x, y[, yerr, label, style, filter]
    [overlay <name>]    expr (in x), label[, style]
    [inset]             optional zoom panel: x_min, x_max[, inputs, x, y]
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

__all__ = ["Recipe", "SeriesSpec", "OverlaySpec", "RecipeError",
           "load_recipe", "default_recipe_dir", "evaluate_expression"]


class RecipeError(Exception):
    pass


@dataclass(frozen=True)
class SeriesSpec:
    name: str
    path: str
    x: str
    y: str
    yerr: Optional[str] = None
    label: str = ""
    style: str = "line"          # line | points
    filter: Optional[str] = None  # "column:value" row filter


@dataclass(frozen=True)
class OverlaySpec:
    name: str
    expr: str
    label: str = ""
    style: str = "dashed"


@dataclass(frozen=True)
class Recipe:
    fig_id: str
    output: str
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    xscale: str = "linear"
    yscale: str = "linear"
    inputs: tuple = field(default_factory=tuple)
    overlays: tuple = field(default_factory=tuple)
    inset: Optional[dict] = None


# expression namespace for overlay curves; no builtins
_EXPR_NS = {name: getattr(np, name) for name in
            ("sqrt", "arctan", "arctan2", "arccos", "arcsin", "arccosh",
             "sin", "cos", "tan", "exp", "log", "log10", "abs", "minimum",
             "maximum", "where")}
_EXPR_NS["pi"] = np.pi


def evaluate_expression(expr: str, x: np.ndarray) -> np.ndarray:
    try:
        result = eval(expr, {"__builtins__": {}}, {**_EXPR_NS, "x": x})
    except Exception as err:
        raise RecipeError(f"overlay expression {expr!r} failed: {err}") from err
    return np.broadcast_to(np.asarray(result, dtype=float), np.shape(x)).copy()


def load_recipe(path) -> Recipe:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise RecipeError(f"recipe file not found: {path}")
    if not parser.has_section("figure"):
        raise RecipeError(f"{path}: missing [figure] section")
    fig = parser["figure"]
    inputs = []
    overlays = []
    inset = None
    for section in parser.sections():
        if section.startswith("input"):
            sec = parser[section]
            if "path" not in sec or "x" not in sec or "y" not in sec:
                raise RecipeError(f"{path}: [{section}] needs path, x and y")
            inputs.append(SeriesSpec(
                name=section.split(None, 1)[-1], path=sec["path"],
                x=sec["x"], y=sec["y"], yerr=sec.get("yerr"),
                label=sec.get("label", ""), style=sec.get("style", "line"),
                filter=sec.get("filter")))
        elif section.startswith("overlay"):
            sec = parser[section]
            if "expr" not in sec:
                raise RecipeError(f"{path}: [{section}] needs expr")
            overlays.append(OverlaySpec(
                name=section.split(None, 1)[-1], expr=sec["expr"],
                label=sec.get("label", ""), style=sec.get("style", "dashed")))
        elif section == "inset":
            inset = dict(parser[section])
    if not inputs:
        raise RecipeError(f"{path}: recipe has no [input] sections")
    return Recipe(
        fig_id=fig.get("id", Path(path).stem),
        output=fig.get("output", Path(path).stem + ".png"),
        title=fig.get("title", ""), xlabel=fig.get("xlabel", ""),
        ylabel=fig.get("ylabel", ""), xscale=fig.get("xscale", "linear"),
        yscale=fig.get("yscale", "linear"),
        inputs=tuple(inputs), overlays=tuple(overlays), inset=inset)


def default_recipe_dir() -> Path:
    return Path(__file__).parent / "recipes"
