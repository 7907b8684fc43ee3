"""Compact arithmetic-coded AVL and left-leaning AVL tree shapes, with exact
counting and growth-constant estimation for the matching lower bounds."""
from ._backend import BACKEND
from .codec import EncodedTree, decode, encode, measure, predicted_bound
from .counting import count_by_size_height, enumerate_all
from .errors import (AvlError, FormatError, IntegrityError, InvalidTreeError, ModelError,
                     NoFixedPointError, ResourceLimitError, StructureError, TruncatedStreamError)
from .growth import builtin, fixed_point, growth_bracket, parse_spec
from .sampling import DEFAULT_SEED, sample_uniform
from .tree import AvlTree, TreeClass, TreeStats, compute_stats, validate

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "DEFAULT_SEED", "AvlTree", "TreeClass", "TreeStats", "EncodedTree",
    "encode", "decode", "measure", "predicted_bound", "compute_stats", "validate",
    "count_by_size_height", "enumerate_all", "sample_uniform",
    "builtin", "fixed_point", "growth_bracket", "parse_spec",
    "AvlError", "FormatError", "IntegrityError", "InvalidTreeError", "ModelError",
    "NoFixedPointError", "ResourceLimitError", "StructureError", "TruncatedStreamError",
]
