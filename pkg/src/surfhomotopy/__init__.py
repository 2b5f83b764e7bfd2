"""Contractibility and free homotopy of closed walks on surface graphs."""

from .surface_model import CellularEmbedding, EmbeddingError, SurfaceClass, classify_surface, load_embedding
from .reduction import Preprocessed, WalkError, preprocess
from .tiling import is_contractible
from .cyclic import CanonicalCycle, UnsupportedSurface, canonical_generator, free_homotopic, homotopic_fixed

__all__ = [
    "CellularEmbedding",
    "EmbeddingError",
    "SurfaceClass",
    "classify_surface",
    "load_embedding",
    "Preprocessed",
    "WalkError",
    "preprocess",
    "is_contractible",
    "CanonicalCycle",
    "UnsupportedSurface",
    "canonical_generator",
    "free_homotopic",
    "homotopic_fixed",
]
