"""Closed-pattern extraction and interval estimation of participation
indexes from the constricted set.

The constricted set is a lossy summary: most patterns are dropped, each
leaving behind a representative supersequence whose participation index is
within the chosen margin. This module answers queries against that summary —
exact membership, recoverable closures, and two-sided index estimates whose
width never exceeds the margin the summary was built with.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .bottomup import extract_csts
from .model import (
    MaxTree,
    Pattern,
    PatternNode,
    as_fraction,
    canonical_key,
    is_proper_supersequence,
    is_supersequence,
)


def extract_closed(tree: MaxTree) -> list[PatternNode]:
    """Nodes with no equal-pi extension, in canonical order.

    A one-step check suffices: any longer equal-pi supersequence forces an
    equal-pi extension by exactly one element (indexes along the chain
    between them are sandwiched), and every extension covers its node as
    prefix or suffix. So a node is closed iff no node one level deeper
    covering it carries the same pi.
    """
    beaten: set[PatternNode] = set()
    for node in tree:
        if node.parent1 is None:
            continue
        if node.pi == node.parent1.pi:
            beaten.add(node.parent1)
        if node.pi == node.parent2.pi:
            beaten.add(node.parent2)
    return [node for node in tree if node not in beaten]


def closures_of(tree: MaxTree, pattern: Pattern) -> list[PatternNode]:
    """Closed supersequences of ``pattern`` carrying its exact pi (itself
    included when closed)."""
    node = tree.node(pattern)
    if node is None:
        raise ValueError(f"pattern {pattern!r} is not in the tree")
    return [
        c for c in extract_closed(tree)
        if c.pi == node.pi and is_supersequence(c.pattern, node.pattern)
    ]


# ---------------------------------------------------------------------------
# Queries against the constricted summary
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PiEstimate:
    """Two-sided participation-index estimate for a queried pattern.

    ``witness`` is the summary member the bounds came from (the pattern
    itself when ``exact``). Invariants: 0 <= lower <= upper <= 1 and
    upper - lower never exceeds the summary's margin.
    """

    lower: Fraction
    upper: Fraction
    witness: Pattern
    exact: bool


class CstsSet:
    """Pattern -> pi mapping of the constricted members, plus the margin
    they were extracted under. Detached from tree nodes so it can be
    rebuilt from serialized output."""

    def __init__(self, pis: Mapping[Pattern, Fraction] | Iterable[tuple[Pattern, Fraction]],
                 epsilon) -> None:
        items = pis.items() if isinstance(pis, Mapping) else pis
        self._pi = {tuple(p): as_fraction(v) for p, v in items}
        self.epsilon = as_fraction(epsilon)
        if not (0 <= self.epsilon <= 1):
            raise ValueError("epsilon must lie in [0, 1]")

    @classmethod
    def from_tree(cls, tree: MaxTree) -> "CstsSet":
        """Snapshot a tree whose closure phase has run (extracting members
        if the flags are not set yet)."""
        members = extract_csts(tree)
        return cls({n.pattern: n.pi for n in members}, tree.closure_epsilon)

    def __contains__(self, pattern: Pattern) -> bool:
        return tuple(pattern) in self._pi

    def __len__(self) -> int:
        return len(self._pi)

    def pi(self, pattern: Pattern) -> Fraction:
        return self._pi[tuple(pattern)]

    def patterns(self) -> list[Pattern]:
        return sorted(self._pi, key=canonical_key)

    def items(self) -> list[tuple[Pattern, Fraction]]:
        return [(p, self._pi[p]) for p in self.patterns()]


def is_pi_strong_via_csts(q: Pattern, csts: CstsSet) -> bool:
    """Whether the summary proves q passes the mining threshold: q is
    threshold-passing iff some member contains it (possibly equal)."""
    q = tuple(q)
    if q in csts:
        return True
    return any(is_supersequence(m, q) for m in csts.patterns())


def approximate_pi(q: Pattern, csts: CstsSet,
                   eps=None) -> Optional[PiEstimate]:
    """Estimate pi(q) from the summary alone.

    A member equal to q gives the exact value. Otherwise every member
    properly containing q is a candidate witness, and the greatest-pi one
    (canonically smallest on ties) bounds pi(q) within
    [pi(witness), pi(witness) + margin]. The greatest-pi choice is what
    makes the interval sound: q's own representative is among the members
    with pi at least pi(q) - margin, so the best witness can only sit
    closer, while any witness underestimates pi(q) by containment. No
    witness at all means q is not threshold-passing. ``eps`` defaults to
    the margin the summary was built with.
    """
    eps = csts.epsilon if eps is None else as_fraction(eps)
    q = tuple(q)
    if q in csts:
        value = csts.pi(q)
        return PiEstimate(lower=value, upper=value, witness=q, exact=True)
    supers = [p for p in csts.patterns() if is_proper_supersequence(p, q)]
    if not supers:
        return None
    best_pi = max(csts.pi(p) for p in supers)
    witness = min((p for p in supers if csts.pi(p) == best_pi), key=canonical_key)
    return PiEstimate(
        lower=best_pi,
        upper=min(best_pi + eps, Fraction(1)),
        witness=witness,
        exact=False,
    )
