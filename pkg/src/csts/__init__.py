"""Constricted spatio-temporal sequential (CSTS) pattern mining.

Mines ordered event-type sequences from timestamped, geolocated event data,
ranks them by participation index, and condenses the result into the
constricted representation from which any pattern's participation index can
be recovered to within a chosen margin.

Typical use::

    from csts import MiningConfig, mine_csts
    tree, members = mine_csts(dataset, MiningConfig(radius=500.0,
                                                    window=720.0,
                                                    theta="0.05",
                                                    epsilon="0.1"))
"""

from .analysis import (
    CstsSet,
    PiEstimate,
    approximate_pi,
    closures_of,
    extract_closed,
    is_pi_strong_via_csts,
)
from .bottomup import extract_csts, mine_csts, run_bottom_up
from .model import (
    EventDataset,
    EventInstance,
    EventType,
    MaxTree,
    MiningConfig,
    Pattern,
    PatternNode,
    canonical_key,
    format_pattern,
    is_proper_supersequence,
    is_supersequence,
    parse_pattern,
)
from .neighborhoods import NeighborhoodIndex, build_index
from .topdown import mine_all, participation_ratio

__version__ = "0.1.0"

__all__ = [
    "CstsSet",
    "EventDataset",
    "EventInstance",
    "EventType",
    "MaxTree",
    "MiningConfig",
    "NeighborhoodIndex",
    "Pattern",
    "PatternNode",
    "PiEstimate",
    "approximate_pi",
    "build_index",
    "canonical_key",
    "closures_of",
    "extract_closed",
    "extract_csts",
    "format_pattern",
    "is_pi_strong_via_csts",
    "is_proper_supersequence",
    "is_supersequence",
    "mine_all",
    "mine_csts",
    "parse_pattern",
    "participation_ratio",
    "run_bottom_up",
    "__version__",
]
