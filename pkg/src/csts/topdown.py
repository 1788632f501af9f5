"""Top-down growth of the pattern tree.

Breadth-first, level by level: length-1 patterns are the event types, and a
length-k candidate is assembled from a verified length-(k-1) node (its prefix,
``parent1``) and the sibling that extends that node's own second parent (its
suffix, ``parent2``). A candidate's participation index is the minimum of the
prefix node's index and the participation ratio of the new final element, so
each level needs only one neighborhood-union sweep. Candidates below the
threshold are dropped together with their would-be extensions, which is sound
because the participation index can only shrink as a pattern grows.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Optional, Sequence

from .model import EventDataset, MaxTree, MiningConfig, PatternNode, canonical_key
from .neighborhoods import NeighborhoodIndex, build_index


def participation_ratio(node: PatternNode, dataset: EventDataset) -> Fraction:
    """Exact participation ratio of a node's final element.

    The ratio of distinct instances of the last event type that take part in
    the pattern to all instances of that type. Ratios for earlier positions
    belong to the prefix nodes along the ``parent1`` chain.
    """
    last_type = node.pattern[-1]
    total = dataset.count(last_type)
    if total == 0:
        raise ValueError("event types with zero instances never spawn nodes")
    return Fraction(len(node.last_support), total)


def mine_level1(dataset: EventDataset) -> list[PatternNode]:
    """One root node per event type that actually occurs; pi is 1 by
    definition (every instance of a type participates in its own pattern)."""
    nodes = []
    for type_id in sorted(dataset.by_type):
        members = dataset.by_type[type_id]
        if not members:
            continue
        nodes.append(PatternNode(
            pattern=(type_id,),
            pi=Fraction(1),
            last_support=frozenset(inst.idx for inst in members),
        ))
    return nodes


def _make_child(parent1: PatternNode, parent2: PatternNode, new_type: int,
                index: NeighborhoodIndex, cfg: MiningConfig) -> Optional[PatternNode]:
    # One candidate: extend parent1's pattern by parent2's final element.
    support = index.union_over(parent1.last_support, new_type)
    ratio = Fraction(len(support), index.dataset.count(new_type))
    pi = min(parent1.pi, ratio)
    if not cfg.passes_theta(pi):
        return None
    return PatternNode(
        pattern=parent1.pattern + (new_type,),
        pi=pi,
        last_support=support,
        parent1=parent1,
        parent2=parent2,
    )


def _expand_level2(si: PatternNode, level1: Sequence[PatternNode],
                   index: NeighborhoodIndex, cfg: MiningConfig) -> list[PatternNode]:
    kept = []
    for sj in level1:  # ordered pairs, self-pairing included
        node = _make_child(si, sj, sj.pattern[0], index, cfg)
        if node is not None:
            kept.append(node)
            si.children.append(node)
    return kept


def _expand_deeper(si: PatternNode, index: NeighborhoodIndex,
                   cfg: MiningConfig) -> list[PatternNode]:
    kept = []
    sl = si.parent2
    for sj in sl.children:
        node = _make_child(si, sj, sj.pattern[-1], index, cfg)
        if node is not None:
            kept.append(node)
            si.children.append(node)
    return kept


def mine_level2(level1: Sequence[PatternNode], index: NeighborhoodIndex,
                cfg: MiningConfig, threads: int = 1) -> list[PatternNode]:
    """All verified length-2 patterns from ordered pairs of root nodes."""
    return _run_level(
        level1, lambda si: _expand_level2(si, level1, index, cfg), threads)


def gen_and_verify(level_prev: Sequence[PatternNode], index: NeighborhoodIndex,
                   cfg: MiningConfig, threads: int = 1) -> list[PatternNode]:
    """All verified length-k patterns from the verified length-(k-1) level.

    For each node, the viable suffixes are exactly the children of its second
    parent: those are the verified patterns overlapping it in all but the
    first position. The (prefix, suffix) pairing generates every candidate
    exactly once.
    """
    return _run_level(
        level_prev, lambda si: _expand_deeper(si, index, cfg), threads)


def _run_level(sources, expand_one, threads: int) -> list[PatternNode]:
    # Each worker only touches its own source node's children list, so the
    # per-si split is race-free; the canonical sort makes the merged level
    # (and therefore the whole tree) independent of thread count.
    if threads > 1 and len(sources) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(expand_one, sources))
    else:
        chunks = [expand_one(si) for si in sources]
    merged = [node for chunk in chunks for node in chunk]
    merged.sort(key=lambda n: canonical_key(n.pattern))
    for si in sources:
        si.children.sort(key=lambda n: canonical_key(n.pattern))
    return merged


def mine_all(dataset: EventDataset, cfg: MiningConfig, threads: int = 1) -> MaxTree:
    """Grow the full tree of threshold-passing patterns.

    Levels are generated until one comes back empty or ``cfg.max_length`` is
    reached; stopping at the cap with a live frontier marks the tree as
    ``capped`` (it may be missing longer patterns). With ``strict_theta=False``
    and theta 0 every candidate passes, so a cap is required to terminate.
    """
    if not cfg.strict_theta and cfg.theta == 0 and cfg.max_length is None:
        raise ValueError(
            "theta=0 with non-strict comparison accepts every candidate; "
            "set max_length to bound the search")
    levels: list[list[PatternNode]] = []
    level = mine_level1(dataset)
    if not level:
        return MaxTree(levels, cfg, capped=False)
    index = build_index(dataset, cfg)
    capped = False
    while level:
        level.sort(key=lambda n: canonical_key(n.pattern))
        levels.append(level)
        if cfg.max_length is not None and len(levels) >= cfg.max_length:
            capped = True
            break
        if len(levels) == 1:
            level = mine_level2(level, index, cfg, threads)
        else:
            level = gen_and_verify(level, index, cfg, threads)
    return MaxTree(levels, cfg, capped=capped)
