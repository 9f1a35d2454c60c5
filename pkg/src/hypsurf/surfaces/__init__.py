"""Surface groups: regular 4g-gon surfaces and their finite covers."""

from .covers import CoverSpec, build_cover, random_cover
from .regular import FundamentalPolygon, SurfaceGroup, build_regular_surface
from .serialize import load_surface, save_surface
from .words import Word, evaluate_word
