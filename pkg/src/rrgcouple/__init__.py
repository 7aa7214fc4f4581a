"""Sampling, exact enumeration and coupling of random regular graph models."""

from .distributions import FiniteDistribution
from .graphs import Digraph, Matching, Multigraph, Pairing
from .models import ModelSpec
from .rng import RngStream, rng_stream

__version__ = "0.1.0"

__all__ = [
    "Digraph",
    "FiniteDistribution",
    "Matching",
    "ModelSpec",
    "Multigraph",
    "Pairing",
    "RngStream",
    "rng_stream",
]
