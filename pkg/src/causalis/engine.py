"""Causal strength, actual causes and effects, and full causal accounts.

For an occurrence and a candidate on the opposite slice:

* rho is the log2 ratio of the intact repertoire probability of the actual
  state to its unconstrained probability;
* alpha is the log2 ratio of the intact probability to the probability
  under the minimum information partition (MIP), the partition that
  reduces it the least.

An occurrence's actual cause (effect) is the minimal candidate with the
largest alpha. Ties within ``TOL`` that are not nested are reported as an
indeterminate link.

Internally every subset is a bitmask over the slice's variable indices.
"""

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import InvariantError, RealizationError
from .network import INPUT, OUTPUT, TOL, CausalNetwork, Occurrence, Transition, validate_transition
from .partition import Partition, restricted_growth_strings
from .repertoire import CAUSE, EFFECT, node_cause_array

DIRECTIONS = (CAUSE, EFFECT)


def bits(mask: int) -> tuple:
    """Indices of the set bits of ``mask`` in increasing order."""
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def to_mask(members: Iterable[int]) -> int:
    m = 0
    for i in members:
        m |= 1 << i
    return m


def subset_masks(n: int) -> list:
    """Every subset of ``range(n)`` as a mask, ordered by size then members."""
    out = []
    for size in range(n + 1):
        for combo in itertools.combinations(range(n), size):
            out.append(to_mask(combo))
    return out


def _partition_masks(occ: tuple, pur: tuple):
    """Mask form of :func:`causalis.partition.iter_partitions`, same order."""
    yield ((to_mask(occ), 0),)
    n, p = len(occ), len(pur)
    pur_bits = [1 << i for i in pur]
    for m in range(2, n + 1):
        for labels in restricted_growth_strings(n, m):
            blocks = [0] * m
            for element, b in zip(occ, labels):
                blocks[b] |= 1 << element
            for assignment in itertools.product(range(m + 1), repeat=p):
                pieces = [0] * (m + 1)
                for bit, b in zip(pur_bits, assignment):
                    pieces[b] |= bit
                yield tuple(zip(blocks, pieces))


@dataclass(frozen=True)
class LinkAnalysis:
    """Strength of one occurrence/candidate pair."""

    occurrence: Occurrence
    direction: str
    candidate: Occurrence
    rho: float
    alpha: float
    mip: Optional[Partition]


@dataclass(frozen=True)
class CausalLink:
    """An occurrence with its actual cause or effect.

    ``candidates`` holds the minimal maximally irreducible candidates;
    it is empty when the occurrence has no actual cause/effect.
    """

    occurrence: Occurrence
    direction: str
    alpha_max: float
    candidates: tuple

    @property
    def status(self) -> str:
        if not self.candidates:
            return "none"
        return "unique" if len(self.candidates) == 1 else "indeterminate"


@dataclass(frozen=True)
class CausalAccount:
    """All causal links of a transition, sorted by direction then occurrence."""

    transition: Transition
    links: tuple

    def causes(self) -> list:
        return [l for l in self.links if l.direction == CAUSE]

    def effects(self) -> list:
        return [l for l in self.links if l.direction == EFFECT]

    def find(self, direction: str, members) -> Optional[CausalLink]:
        members = tuple(sorted(members))
        for link in self.links:
            if link.direction == direction and link.occurrence.members == members:
                return link
        return None


class Evaluator:
    """Memoized repertoire probabilities of the actual state for one transition."""

    def __init__(self, net: CausalNetwork, transition: Transition):
        self.net = net
        self.before = tuple(transition.before)
        self.after = tuple(transition.after)
        self.n_in = len(net.inputs)
        self.n_out = len(net.outputs)
        self._node_eff = {}
        self._eff = {}
        self._node_cause = {}
        self._cause = {}
        self._uniform = {}

    # -- repertoire probabilities at the actual state ----------------------

    def node_effect(self, node: int, xmask: int) -> float:
        key = (node, xmask)
        v = self._node_eff.get(key)
        if v is None:
            index = tuple(
                self.before[a] if xmask >> a & 1 else slice(None) for a in range(self.n_in)
            ) + (self.after[node],)
            sub = self.net.tensors[node][index]
            v = float(sub.mean()) if getattr(sub, "ndim", 0) else float(sub)
            self._node_eff[key] = v
        return v

    def effect(self, xmask: int, ymask: int) -> float:
        """pi(y | x) at the actual y-state; ``xmask == 0`` is unconstrained."""
        key = (xmask, ymask)
        v = self._eff.get(key)
        if v is None:
            v = 1.0
            for node in bits(ymask):
                v *= self.node_effect(node, xmask)
            self._eff[key] = v
        return v

    def uniform(self, xmask: int) -> float:
        v = self._uniform.get(xmask)
        if v is None:
            v = 1.0
            for a in bits(xmask):
                v /= self.net.inputs[a].cardinality
            self._uniform[xmask] = v
        return v

    def _node_cause_array(self, node: int, xmask: int):
        key = (node, xmask)
        arr = self._node_cause.get(key)
        if arr is None:
            arr = node_cause_array(self.net, node, self.after[node], bits(xmask))
            self._node_cause[key] = arr
        return arr

    def cause(self, ymask: int, xmask: int) -> float:
        """pi(x | y) at the actual x-state; ``ymask == 0`` is unconstrained."""
        if xmask == 0:
            return 1.0
        if ymask == 0:
            return self.uniform(xmask)
        key = (ymask, xmask)
        v = self._cause.get(key)
        if v is None:
            nodes = bits(ymask)
            arr = self._node_cause_array(nodes[0], xmask)
            for node in nodes[1:]:
                arr = arr * self._node_cause_array(node, xmask)
            total = float(arr.sum())
            if not total > 0:
                raise InvariantError("cause repertoire has a zero normalizer")
            v = float(arr[tuple(self.before[a] for a in bits(xmask))]) / total
            self._cause[key] = v
        return v

    # -- ratios -------------------------------------------------------------

    def intact(self, direction: str, omask: int, cmask: int) -> float:
        if direction == EFFECT:
            return self.effect(omask, cmask)
        return self.cause(omask, cmask)

    def unconstrained(self, direction: str, cmask: int) -> float:
        if direction == EFFECT:
            return self.effect(0, cmask)
        return self.uniform(cmask)

    def partitioned(self, direction: str, parts: tuple, cmask: int) -> float:
        prob = self.effect if direction == EFFECT else self.cause
        p, used = 1.0, 0
        for om, pm in parts:
            if pm:
                p *= prob(om, pm)
                used |= pm
        rest = cmask & ~used
        if rest:
            p *= self.unconstrained(direction, rest)
        return p

    def rho(self, direction: str, omask: int, cmask: int) -> float:
        if omask == 0 or cmask == 0:
            return 0.0
        num = self.intact(direction, omask, cmask)
        if not num > 0:
            raise InvariantError("actual state has zero probability in an intact repertoire")
        return math.log2(num / self.unconstrained(direction, cmask))

    def alpha(self, direction: str, omask: int, cmask: int, floor: Optional[float] = None):
        """Return ``(alpha, mip_parts)``.

        With ``floor`` set, the search stops and returns ``None`` as soon as
        some partition pushes alpha below ``floor``.
        """
        if omask == 0 or cmask == 0:
            return 0.0, None
        intact = self.intact(direction, omask, cmask)
        if not intact > 0:
            raise InvariantError("actual state has zero probability in an intact repertoire")
        occ, pur = bits(omask), bits(cmask)
        values, witnesses = [], []
        lowest = math.inf
        for parts in _partition_masks(occ, pur):
            a = math.log2(intact / self.partitioned(direction, parts, cmask))
            if floor is not None and a < floor:
                return None
            values.append(a)
            witnesses.append(parts)
            if a < lowest:
                lowest = a
        for a, parts in zip(values, witnesses):
            if a <= lowest + TOL:
                return lowest, parts
        raise InvariantError("no partition attains the minimum")

    # -- exclusion ------------------------------------------------------------

    def analyze(self, direction: str, omask: int, cmask: int) -> LinkAnalysis:
        rho = self.rho(direction, omask, cmask)
        alpha, parts = self.alpha(direction, omask, cmask)
        if alpha > rho + TOL:
            raise InvariantError(f"alpha {alpha} exceeds rho {rho}")
        return self._analysis(direction, omask, cmask, rho, alpha, parts)

    def _analysis(self, direction, omask, cmask, rho, alpha, parts) -> LinkAnalysis:
        occ_slice, cand_slice = (INPUT, OUTPUT) if direction == EFFECT else (OUTPUT, INPUT)
        occurrence = self.occurrence(occ_slice, omask)
        candidate = self.occurrence(cand_slice, cmask)
        mip = None
        if parts is not None:
            mip = Partition(tuple((bits(om), bits(pm)) for om, pm in parts), direction)
        return LinkAnalysis(occurrence, direction, candidate, rho, alpha, mip)

    def occurrence(self, slice: str, mask: int) -> Occurrence:
        full = self.before if slice == INPUT else self.after
        members = bits(mask)
        return Occurrence(slice, members, tuple(full[m] for m in members))

    def maximal(self, direction: str, omask: int) -> tuple:
        """Largest alpha over all candidates and the candidates attaining it.

        Candidates whose alpha does not exceed ``TOL`` are equivalent to the
        empty candidate; when nothing beats it the list is empty and the
        maximum is 0.
        """
        n_cand = self.n_out if direction == EFFECT else self.n_in
        best = 0.0
        scored = []
        for cmask in subset_masks(n_cand)[1:]:
            rho = self.rho(direction, omask, cmask)
            if rho <= TOL or rho < best - TOL:
                # alpha <= rho, so this candidate can neither win nor tie
                continue
            floor = max(best - TOL, TOL)
            res = self.alpha(direction, omask, cmask, floor=floor)
            if res is None:
                continue
            alpha, parts = res
            if alpha <= TOL:
                continue
            if alpha > rho + TOL:
                raise InvariantError(f"alpha {alpha} exceeds rho {rho}")
            scored.append((cmask, rho, alpha, parts))
            best = max(best, alpha)
        winners = [
            self._analysis(direction, omask, cmask, rho, alpha, parts)
            for cmask, rho, alpha, parts in scored
            if alpha >= best - TOL
        ]
        return (best if winners else 0.0), winners

    def link(self, direction: str, omask: int) -> CausalLink:
        alpha_max, winners = self.maximal(direction, omask)
        masks = [to_mask(w.candidate.members) for w in winners]
        minimal = tuple(
            w
            for w, m in zip(winners, masks)
            if not any(o != m and o & m == o for o in masks)
        )
        occ_slice = INPUT if direction == EFFECT else OUTPUT
        return CausalLink(self.occurrence(occ_slice, omask), direction, alpha_max, minimal)


# -- public API ------------------------------------------------------------


def _pair_evaluator(net: CausalNetwork, x: Occurrence, y: Occurrence) -> Evaluator:
    if x.slice != INPUT or y.slice != OUTPUT:
        raise ValueError("x must be on the input slice and y on the output slice")
    before = [0] * len(net.inputs)
    after = [0] * len(net.outputs)
    for m, s in zip(x.members, x.states):
        before[m] = s
    for m, s in zip(y.members, y.states):
        after[m] = s
    return Evaluator(net, Transition(tuple(before), tuple(after)))


def rho_e(net: CausalNetwork, x: Occurrence, y: Occurrence) -> float:
    """Effect ratio of ``x`` (inputs) on ``y`` (outputs), in bits."""
    return _pair_evaluator(net, x, y).rho(EFFECT, x.mask, y.mask)


def rho_c(net: CausalNetwork, x: Occurrence, y: Occurrence) -> float:
    """Cause ratio of ``x`` (inputs) for ``y`` (outputs), in bits."""
    return _pair_evaluator(net, x, y).rho(CAUSE, y.mask, x.mask)


def alpha_e(net: CausalNetwork, x: Occurrence, y: Occurrence) -> LinkAnalysis:
    """Irreducible effect strength of ``x`` on ``y`` with its MIP."""
    if not len(x):
        raise ValueError("the occurrence must be nonempty")
    return _pair_evaluator(net, x, y).analyze(EFFECT, x.mask, y.mask)


def alpha_c(net: CausalNetwork, x: Occurrence, y: Occurrence) -> LinkAnalysis:
    """Irreducible cause strength of ``x`` for ``y`` with its MIP."""
    if not len(y):
        raise ValueError("the occurrence must be nonempty")
    return _pair_evaluator(net, x, y).analyze(CAUSE, y.mask, x.mask)


def _checked(net: CausalNetwork, transition: Transition) -> Transition:
    transition = Transition(tuple(transition.before), tuple(transition.after))
    if len(transition.before) != len(net.inputs) or len(transition.after) != len(net.outputs):
        raise ValueError("transition does not match the network's slices")
    if not validate_transition(net, transition):
        raise RealizationError("transition has zero probability")
    return transition


def _members(occurrence) -> tuple:
    if isinstance(occurrence, Occurrence):
        return occurrence.members
    return tuple(sorted(occurrence))


def alpha_max_effect(net: CausalNetwork, transition: Transition, x) -> tuple:
    """``(alpha_max, [LinkAnalysis, ...])`` over all output candidates for ``x``."""
    ev = Evaluator(net, _checked(net, transition))
    return ev.maximal(EFFECT, to_mask(_members(x)))


def alpha_max_cause(net: CausalNetwork, transition: Transition, y) -> tuple:
    """``(alpha_max, [LinkAnalysis, ...])`` over all input candidates for ``y``."""
    ev = Evaluator(net, _checked(net, transition))
    return ev.maximal(CAUSE, to_mask(_members(y)))


def actual_effect(net: CausalNetwork, transition: Transition, x) -> CausalLink:
    """The actual effect of input occurrence ``x`` (members taken from ``transition``)."""
    ev = Evaluator(net, _checked(net, transition))
    return ev.link(EFFECT, to_mask(_members(x)))


def actual_cause(net: CausalNetwork, transition: Transition, y) -> CausalLink:
    """The actual cause of output occurrence ``y`` (members taken from ``transition``)."""
    ev = Evaluator(net, _checked(net, transition))
    return ev.link(CAUSE, to_mask(_members(y)))


_worker = None


def _init_worker(net, transition):
    global _worker
    _worker = Evaluator(net, transition)


def _run_task(task):
    direction, omask = task
    return _worker.link(direction, omask)


def causal_account(net: CausalNetwork, transition: Transition, n_jobs: int = 1) -> CausalAccount:
    """Every causal link of ``transition``.

    With ``n_jobs > 1`` occurrences are scored in worker processes; the
    result is identical to the sequential one.
    """
    transition = _checked(net, transition)
    tasks = [(CAUSE, m) for m in subset_masks(len(net.outputs))[1:]]
    tasks += [(EFFECT, m) for m in subset_masks(len(net.inputs))[1:]]
    if n_jobs is None or n_jobs < 1:
        n_jobs = os.cpu_count() or 1
    if n_jobs == 1 or len(tasks) < 2:
        ev = Evaluator(net, transition)
        results = [ev.link(direction, omask) for direction, omask in tasks]
    else:
        chunk = max(1, len(tasks) // (4 * n_jobs))
        with ProcessPoolExecutor(
            max_workers=n_jobs, initializer=_init_worker, initargs=(net, transition)
        ) as pool:
            results = list(pool.map(_run_task, tasks, chunksize=chunk))
    links = [link for link in results if link.candidates]
    links.sort(key=lambda l: (l.direction, l.occurrence.members))
    return CausalAccount(transition, tuple(links))
