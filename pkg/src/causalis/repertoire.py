"""Cause, effect and unconstrained repertoires.

Variables outside an occurrence are causally marginalized: they are replaced
by a uniform average over interventions on all of their states. Repertoires
over several purview nodes are products of single-node repertoires.
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvariantError
from .network import INPUT, OUTPUT, CausalNetwork, Occurrence, encode_state

CAUSE = "cause"
EFFECT = "effect"
UNCONSTRAINED_CAUSE = "unconstrained_cause"
UNCONSTRAINED_EFFECT = "unconstrained_effect"
PARTITIONED = "partitioned"


@dataclass(frozen=True)
class Purview:
    """A set of variables on one slice that a repertoire ranges over."""

    slice: str
    members: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(int(m) for m in self.members)))

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True, eq=False)
class Repertoire:
    """A distribution over purview states, flat in mixed-radix order."""

    purview: Purview
    probs: np.ndarray
    kind: str
    cards: tuple = ()

    def prob_of(self, state: Sequence[int]) -> float:
        return prob_of(self, state)

    def to_dict(self, net: CausalNetwork) -> dict:
        variables = net.variables(self.purview.slice)
        return {
            "purview": [variables[m].name for m in self.purview.members],
            "slice": self.purview.slice,
            "kind": self.kind,
            "probs": [float(p) for p in self.probs],
        }


def as_purview(slice: str, purview) -> Purview:
    if isinstance(purview, Purview):
        if purview.slice != slice:
            raise ValueError(f"purview must lie on the {slice} slice")
        return purview
    return Purview(slice, tuple(purview))


def _cards(net: CausalNetwork, purview: Purview) -> tuple:
    variables = net.variables(purview.slice)
    return tuple(variables[m].cardinality for m in purview.members)


def _make(purview: Purview, arr, kind: str, cards: tuple) -> Repertoire:
    flat = np.asarray(arr, dtype=float).reshape(-1, order="F")
    flat.setflags(write=False)
    return Repertoire(purview, flat, kind, cards)


def prob_of(r: Repertoire, state: Sequence[int]) -> float:
    """Probability of a purview state (values in purview member order)."""
    return float(r.probs[encode_state(tuple(state), r.cards)])


def node_effect_vector(net: CausalNetwork, fixed: dict, node: int) -> np.ndarray:
    """Distribution of output ``node`` with ``fixed`` inputs set, the rest averaged."""
    if not 0 <= node < len(net.outputs):
        raise IndexError(f"output index {node} out of range")
    tensor = net.tensors[node]
    index = tuple(fixed.get(a, slice(None)) for a in range(len(net.inputs)))
    sub = tensor[index]
    return sub.reshape(-1, sub.shape[-1]).mean(axis=0)


def node_cause_array(net: CausalNetwork, node: int, state: int, members: Sequence[int]) -> np.ndarray:
    """Posterior over the inputs ``members`` given output ``node`` is in ``state``.

    The result has one axis per member, in increasing member order.
    """
    column = net.tensors[node][..., state]
    other = tuple(a for a in range(len(net.inputs)) if a not in set(members))
    total = column.sum()
    if total <= 0:
        raise InvariantError(
            f"output {net.outputs[node].name!r} can never be in state {state}"
        )
    return column.sum(axis=other) / total if other else column / total


def effect_repertoire_node(net: CausalNetwork, x: Occurrence, node: int) -> Repertoire:
    """Effect repertoire of ``x`` over a single output node."""
    _check_slice(x, INPUT)
    vec = node_effect_vector(net, dict(zip(x.members, x.states)), node)
    purview = Purview(OUTPUT, (node,))
    return _make(purview, vec, EFFECT, _cards(net, purview))


def effect_repertoire(net: CausalNetwork, x: Occurrence, purview) -> Repertoire:
    """Effect repertoire of ``x`` over output ``purview``: product of node repertoires."""
    _check_slice(x, INPUT)
    purview = as_purview(OUTPUT, purview)
    fixed = dict(zip(x.members, x.states))
    arr = np.ones(())
    for node in purview.members:
        arr = np.multiply.outer(arr, node_effect_vector(net, fixed, node))
    kind = EFFECT if len(x) else UNCONSTRAINED_EFFECT
    return _make(purview, arr, kind, _cards(net, purview))


def unconstrained_effect(net: CausalNetwork, purview) -> Repertoire:
    """Effect repertoire of the empty occurrence."""
    return effect_repertoire(net, Occurrence(INPUT), purview)


def unconstrained_cause(net: CausalNetwork, purview) -> Repertoire:
    """Uniform distribution over the input ``purview`` states."""
    purview = as_purview(INPUT, purview)
    cards = _cards(net, purview)
    n = math.prod(cards)
    return _make(purview, np.full(n, 1.0 / n), UNCONSTRAINED_CAUSE, cards)


def cause_repertoire_node(net: CausalNetwork, y: Occurrence, purview) -> Repertoire:
    """Cause repertoire of a single-node output occurrence over input ``purview``."""
    _check_slice(y, OUTPUT)
    if len(y) != 1:
        raise ValueError("expected a single-node occurrence")
    purview = as_purview(INPUT, purview)
    arr = node_cause_array(net, y.members[0], y.states[0], purview.members)
    return _make(purview, arr, CAUSE, _cards(net, purview))


def cause_repertoire(net: CausalNetwork, y: Occurrence, purview) -> Repertoire:
    """Cause repertoire of ``y`` over input ``purview``.

    Per-node posteriors are multiplied and the product renormalized. The
    empty occurrence gives the unconstrained (uniform) repertoire.
    """
    _check_slice(y, OUTPUT)
    purview = as_purview(INPUT, purview)
    if not len(y):
        return unconstrained_cause(net, purview)
    arr = np.ones(())
    for node, state in zip(y.members, y.states):
        arr = arr * node_cause_array(net, node, state, purview.members)
    total = arr.sum()
    if not total > 0:
        raise InvariantError("cause repertoire has a zero normalizer")
    return _make(purview, arr / total, CAUSE, _cards(net, purview))


def _check_slice(occ: Occurrence, slice: str) -> None:
    if occ.slice != slice:
        raise ValueError(f"expected an occurrence on the {slice} slice")
