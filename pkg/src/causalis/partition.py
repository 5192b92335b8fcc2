"""Partitions of an occurrence paired with pieces of a purview.

A partition splits the occurrence into m >= 2 blocks and hands each purview
element to one block or leaves it unassigned (unconstrained). The one extra
"full cut" pairs the whole occurrence with the empty purview, which makes
the partitioned repertoire equal to the unconstrained one.

Enumeration order is canonical: the full cut first, then by number of
blocks, then set partitions in restricted-growth-string order, then purview
assignments in lexicographic order (block 0 first, "unassigned" last).
"""

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import InvariantError
from .network import INPUT, OUTPUT, CausalNetwork, Occurrence
from .repertoire import (
    CAUSE,
    EFFECT,
    PARTITIONED,
    Purview,
    Repertoire,
    _cards,
    _make,
    as_purview,
    cause_repertoire,
    effect_repertoire,
)


@dataclass(frozen=True)
class Partition:
    """Parts are ``(occurrence members, purview members)`` pairs."""

    parts: tuple
    direction: str

    @property
    def is_full_cut(self) -> bool:
        return len(self.parts) == 1

    def to_list(self, net: CausalNetwork) -> list:
        occ_slice = INPUT if self.direction == EFFECT else OUTPUT
        pur_slice = OUTPUT if self.direction == EFFECT else INPUT
        occ_vars, pur_vars = net.variables(occ_slice), net.variables(pur_slice)
        return [
            {
                "occ_part": [occ_vars[i].name for i in occ],
                "purview_part": [pur_vars[i].name for i in pur],
            }
            for occ, pur in self.parts
        ]


def restricted_growth_strings(n: int, m: int) -> Iterator[list]:
    """Set partitions of ``range(n)`` into exactly ``m`` blocks, as block labels."""
    labels = [0] * n

    def grow(i, top):
        if i == n:
            if top == m - 1:
                yield list(labels)
            return
        if (m - 1 - top) > (n - i):
            return
        for v in range(min(top + 1, m - 1) + 1):
            labels[i] = v
            yield from grow(i + 1, max(top, v))

    if n == 0 or m < 1 or m > n:
        return iter(())
    return grow(1, 0)


def iter_partitions(occurrence: Sequence[int], purview: Sequence[int]) -> Iterator[tuple]:
    """Yield partitions as tuples of ``(occ_part, purview_part)`` in canonical order."""
    occurrence, purview = tuple(occurrence), tuple(purview)
    n, p = len(occurrence), len(purview)
    if n == 0:
        raise ValueError("cannot partition an empty occurrence")
    yield ((occurrence, ()),)
    for m in range(2, n + 1):
        for labels in restricted_growth_strings(n, m):
            blocks = [[] for _ in range(m)]
            for element, b in zip(occurrence, labels):
                blocks[b].append(element)
            blocks = [tuple(b) for b in blocks]
            for assignment in itertools.product(range(m + 1), repeat=p):
                pieces = [[] for _ in range(m + 1)]
                for element, b in zip(purview, assignment):
                    pieces[b].append(element)
                yield tuple((blocks[b], tuple(pieces[b])) for b in range(m))


def enumerate_partitions(occurrence, purview, direction: str) -> list:
    """All admissible partitions of ``occurrence`` with ``purview``, canonical order."""
    occ = occurrence.members if isinstance(occurrence, Occurrence) else tuple(sorted(occurrence))
    pur = purview.members if isinstance(purview, Purview) else tuple(sorted(purview))
    return [Partition(parts, direction) for parts in iter_partitions(occ, pur)]


def stirling2(n: int, m: int) -> int:
    """Number of ways to split n labelled items into m nonempty blocks."""
    return sum((-1) ** i * math.comb(m, i) * (m - i) ** n for i in range(m + 1)) // math.factorial(m)


def partition_count(n: int, p: int) -> int:
    """Number of partitions produced for an occurrence of size n and purview of size p."""
    return 1 + sum(stirling2(n, m) * (m + 1) ** p for m in range(2, n + 1))


def _sub(occ: Occurrence, members: Sequence[int]) -> Occurrence:
    lookup = dict(zip(occ.members, occ.states))
    return Occurrence(occ.slice, tuple(members), tuple(lookup[m] for m in members))


def _embed(arr: np.ndarray, members: Sequence[int], purview: Sequence[int]) -> np.ndarray:
    """Reshape ``arr`` (axes over ``members``) to broadcast over all ``purview`` axes."""
    shape = [1] * len(purview)
    for axis, m in enumerate(members):
        shape[purview.index(m)] = arr.shape[axis]
    return arr.reshape(shape)


def _product(net, psi, occurrence, purview, own, unconstrained) -> Repertoire:
    pur = list(purview.members)
    cards = _cards(net, purview)
    shape = tuple(cards)
    arr = np.ones(shape)
    used = set()
    for occ_part, pur_part in psi.parts:
        if set(pur_part) - set(pur):
            raise ValueError("partition does not match the purview")
        if not pur_part:
            continue
        used.update(pur_part)
        r = own(net, _sub(occurrence, occ_part), pur_part)
        part = r.probs.reshape(r.cards, order="F") if r.cards else r.probs.reshape(())
        arr = arr * _embed(part, pur_part, pur)
    rest = [m for m in pur if m not in used]
    if rest:
        r = unconstrained(net, rest)
        arr = arr * _embed(r.probs.reshape(r.cards, order="F"), rest, pur)
    if abs(arr.sum() - 1.0) > 1e-9:
        raise InvariantError("partitioned repertoire is not normalized")
    return _make(purview, arr, PARTITIONED, cards)


def partitioned_effect_repertoire(net: CausalNetwork, psi: Partition, x: Occurrence, purview) -> Repertoire:
    """Product of the parts' effect repertoires times the unconstrained remainder."""
    if psi.direction != EFFECT:
        raise ValueError("expected an effect-direction partition")
    purview = as_purview(OUTPUT, purview)

    def unconstrained(net, rest):
        return effect_repertoire(net, Occurrence(INPUT), rest)

    return _product(net, psi, x, purview, effect_repertoire, unconstrained)


def partitioned_cause_repertoire(net: CausalNetwork, psi: Partition, y: Occurrence, purview) -> Repertoire:
    """Product of the parts' cause repertoires times a uniform remainder.

    No renormalization is applied: the factors live on disjoint variables.
    """
    if psi.direction != CAUSE:
        raise ValueError("expected a cause-direction partition")
    purview = as_purview(INPUT, purview)

    def unconstrained(net, rest):
        return cause_repertoire(net, Occurrence(OUTPUT), rest)

    return _product(net, psi, y, purview, cause_repertoire, unconstrained)
