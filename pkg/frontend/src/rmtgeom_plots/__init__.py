"""Recipe-driven figure rendering for rmtgeom CSV outputs."""

from .recipes import Recipe, RecipeError, load_recipe, default_recipe_dir
from .render import RenderResult, render, render_all

__all__ = ["Recipe", "RecipeError", "load_recipe", "default_recipe_dir",
           "RenderResult", "render", "render_all"]
__version__ = "0.1.0"
