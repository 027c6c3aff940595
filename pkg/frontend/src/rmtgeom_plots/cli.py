"""Standalone renderer: point it at a directory of rmtgeom CSVs."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .recipes import RecipeError, default_recipe_dir, load_recipe
from .render import render


def main(argv=None) -> int:
    p = argparse.ArgumentParser(
        prog="rmtgeom-plots",
        description="Render rmtgeom figure CSVs into images via recipes")
    p.add_argument("--data-dir", required=True,
                   help="directory holding the CSV outputs of a run")
    p.add_argument("--out-dir", default=None,
                   help="where to write images (default: data dir)")
    p.add_argument("--recipe-dir", default=None,
                   help="directory of recipe .ini files (default: bundled)")
    p.add_argument("figures", nargs="*",
                   help="figure ids to render (default: every bundled recipe)")
    args = p.parse_args(argv)

    recipe_dir = Path(args.recipe_dir) if args.recipe_dir else default_recipe_dir()
    out_dir = Path(args.out_dir) if args.out_dir else Path(args.data_dir)
    ids = args.figures or sorted(
        path.stem for path in recipe_dir.glob("*.ini"))
    failures = 0
    for fig_id in ids:
        path = recipe_dir / f"{fig_id}.ini"
        try:
            result = render(load_recipe(path), args.data_dir, out_dir)
            print(f"{fig_id}: wrote {result.path} "
                  f"({result.n_series} series, {result.n_overlays} overlays)")
        except RecipeError as err:
            print(f"{fig_id}: recipe error: {err}", file=sys.stderr)
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
