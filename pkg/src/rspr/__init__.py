"""rspr: rooted subtree-prune-and-regraft distance toolkit.

Exact distances via a branch-and-bound search tree, a factor-2
approximation built from good cuts, a factor-3 baseline, key-calculus
verification oracles, Newick I/O, and a benchmark CLI.
"""

from .errors import (
    DomainError,
    InternalInvariantError,
    ParseError,
    ResourceError,
    UsageError,
)
from .forest import Forest
from .newick import parse_forest, parse_tree, serialize
from .pairs import (
    DUMMY_LABEL,
    TFPair,
    forced_cut,
    induced_subpair,
    is_agreement_cut,
    preprocess,
)

__all__ = [
    "DomainError",
    "DUMMY_LABEL",
    "Forest",
    "InternalInvariantError",
    "ParseError",
    "ResourceError",
    "TFPair",
    "UsageError",
    "forced_cut",
    "induced_subpair",
    "is_agreement_cut",
    "parse_forest",
    "parse_tree",
    "preprocess",
    "serialize",
]

__version__ = "0.1.0"
