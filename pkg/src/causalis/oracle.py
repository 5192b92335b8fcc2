"""Closed-form causal accounts for two mechanism families.

* Linear threshold units (LTU): ``Y = 1`` iff at least ``k`` of ``n``
  binary inputs are ON.
* Disjunctions of conjunctions (DOC): ``Y = 1`` iff every input of at least
  one conjunction is ON.

For both families the actual causes and effects of any transition follow
from counting arguments over the truth table, so they give predictions that
are independent of the general engine. Probabilities are exact
``Fraction`` values; strengths are floats in bits.
"""

import itertools
import math
import string
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .engine import CausalAccount, CausalLink, LinkAnalysis
from .network import INPUT, OUTPUT, Occurrence, Transition, network_from_mechanisms
from .repertoire import CAUSE, EFFECT


def input_names(n: int) -> list:
    if n <= 26:
        return list(string.ascii_uppercase[:n])
    return [f"X{i + 1}" for i in range(n)]


@dataclass(frozen=True)
class LTUSpec:
    n: int
    k: int

    def __post_init__(self):
        if self.n < 1 or not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got n={self.n}, k={self.k}")


@dataclass(frozen=True)
class DOCSpec:
    sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise ValueError("conjunction sizes must be positive and nonempty")
        object.__setattr__(self, "sizes", sizes)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def k(self) -> int:
        return len(self.sizes)

    def conjunctions(self) -> list:
        """Input indices of each conjunction, inputs numbered consecutively."""
        out, start = [], 0
        for size in self.sizes:
            out.append(tuple(range(start, start + size)))
            start += size
        return out


# -- linear threshold units ---------------------------------------------------


def ltu_q(spec: LTUSpec, c: int, j: int) -> Fraction:
    """p(Y=1) given c fixed inputs of which j are ON; the other n-c averaged."""
    n, k = spec.n, spec.k
    if not 0 <= j <= c <= n:
        raise ValueError(f"need 0 <= j <= c <= n, got c={c}, j={j}")
    if j >= k:
        return Fraction(1)
    free = n - c
    if j < k - free:
        return Fraction(0)
    hits = sum(math.comb(free, i) for i in range(k - j, free + 1))
    return Fraction(hits, 2**free)


def ltu_Q(spec: LTUSpec, c: int) -> Fraction:
    """Sum of q over every state of a c-input occurrence."""
    return sum((math.comb(c, j) * ltu_q(spec, c, j) for j in range(c + 1)), Fraction(0))


def build_ltu_network(spec: LTUSpec):
    names = input_names(spec.n)
    return network_from_mechanisms(names, ["Y"], {"Y": lambda s: int(sum(s) >= spec.k)})


def _link(direction, occurrence, alpha, candidates) -> CausalLink:
    analyses = tuple(
        LinkAnalysis(occurrence, direction, cand, None, alpha, None) for cand in candidates
    )
    return CausalLink(occurrence, direction, alpha, analyses)


def _account(transition, links) -> CausalAccount:
    links = sorted(links, key=lambda l: (l.direction, l.occurrence.members))
    return CausalAccount(transition, tuple(links))


def _occ(transition, slice, members) -> Occurrence:
    return Occurrence.of(transition, slice, members)


def ltu_predict(spec: LTUSpec, before: Sequence[int]) -> CausalAccount:
    """Predicted causal account of an LTU transition.

    ON outputs: the cause is any k ON inputs (indeterminate when more than k
    are ON); every set of at most k ON inputs has the output as its effect.
    OFF outputs are handled by the mirrored unit with inverted inputs and
    threshold n - k + 1.
    """
    before = tuple(int(v) for v in before)
    if len(before) != spec.n or any(v not in (0, 1) for v in before):
        raise ValueError("before-state must be n binary values")
    y = int(sum(before) >= spec.k)
    transition = Transition(before, (y,))
    if y == 1:
        work, v = spec, before
    else:
        work, v = LTUSpec(spec.n, spec.n - spec.k + 1), tuple(1 - b for b in before)
    n, k = work.n, work.k
    on = [i for i in range(n) if v[i] == 1]
    target = _occ(transition, OUTPUT, (0,))
    cause_alpha = math.log2(Fraction(2**k) / ltu_Q(work, k))
    causes = [_occ(transition, INPUT, c) for c in itertools.combinations(on, k)]
    links = [_link(CAUSE, target, cause_alpha, causes)]
    for c in range(1, k + 1):
        alpha = math.log2(ltu_q(work, c, c) / ltu_q(work, c - 1, c - 1))
        for members in itertools.combinations(on, c):
            links.append(_link(EFFECT, _occ(transition, INPUT, members), alpha, [target]))
    return _account(transition, links)


# -- disjunctions of conjunctions ---------------------------------------------


def _as_parts(spec: DOCSpec, s) -> list:
    parts = []
    if len(s) != spec.k:
        raise ValueError("need one (count, all_on) pair per conjunction")
    for size, (c, on) in zip(spec.sizes, s):
        if not 0 <= c <= size:
            raise ValueError(f"member count {c} out of range for a conjunction of {size}")
        parts.append((size, c, bool(on) or c == 0))
    return parts


def doc_q(spec: DOCSpec, s) -> Fraction:
    """p(Y=1) given a partial input state, the remaining inputs averaged.

    ``s`` holds one ``(c_j, all_on)`` pair per conjunction: how many of its
    inputs are fixed and whether all of those are ON. An empty part counts
    as all ON.
    """
    parts = _as_parts(spec, s)
    if len(parts) == 1:
        size, c, on = parts[0]
        return Fraction(1, 2 ** (size - c)) if on else Fraction(0)
    (n1, c1, on1), (n2, c2, on2) = parts[:2]
    if on1 and on2:
        q = Fraction(2 ** (n1 - c1) + 2 ** (n2 - c2) - 1, 2 ** (n1 + n2 - c1 - c2))
    elif on1:
        q = Fraction(1, 2 ** (n1 - c1))
    elif on2:
        q = Fraction(1, 2 ** (n2 - c2))
    else:
        q = Fraction(0)
    for size, c, on in parts[2:]:
        if on:
            q = q + (1 - q) / 2 ** (size - c)
    return q


def doc_state(spec: DOCSpec, members: Sequence[int], states: Sequence[int]) -> list:
    """``(c_j, all_on)`` per conjunction for an occurrence over DOC inputs."""
    value = dict(zip(members, states))
    s = []
    for conj in spec.conjunctions():
        present = [value[i] for i in conj if i in value]
        s.append((len(present), all(v == 1 for v in present)))
    return s


def doc_Q(spec: DOCSpec, counts: Sequence[int]) -> Fraction:
    """Sum of q over every state of an occurrence with ``counts[j]`` inputs per conjunction."""
    total = Fraction(0)
    choices = [((True, 1),) if c == 0 else ((True, 1), (False, 2**c - 1)) for c in counts]
    for combo in itertools.product(*choices):
        weight = math.prod(w for _, w in combo)
        total += weight * doc_q(spec, [(c, on) for c, (on, _) in zip(counts, combo)])
    return total


def build_doc_network(spec: DOCSpec):
    names = input_names(spec.n)
    conj = spec.conjunctions()
    return network_from_mechanisms(
        names, ["Y"], {"Y": lambda s: int(any(all(s[i] for i in c) for c in conj))}
    )


def _proper_sub_counts(counts):
    for sub in itertools.product(*(range(c + 1) for c in counts)):
        if tuple(sub) != tuple(counts):
            yield sub


def doc_predict(spec: DOCSpec, before: Sequence[int], y: Optional[int] = None) -> CausalAccount:
    """Predicted causal account of a DOC transition.

    ON outputs: the cause is a fully ON conjunction (indeterminate if several
    are satisfied); effects belong to all-ON occurrences lying strictly
    inside conjunctions or equal to exactly one whole conjunction.
    OFF outputs: the cause takes one OFF input from each conjunction;
    effects belong to all-OFF occurrences with at most one input per
    conjunction.
    """
    before = tuple(int(v) for v in before)
    if len(before) != spec.n or any(v not in (0, 1) for v in before):
        raise ValueError("before-state must be n binary values")
    conj = spec.conjunctions()
    actual = int(any(all(before[i] for i in c) for c in conj))
    if y is not None and int(y) != actual:
        raise ValueError(f"the DOC maps this input state to {actual}, not {y}")
    transition = Transition(before, (actual,))
    target = _occ(transition, OUTPUT, (0,))
    where = {i: j for j, c in enumerate(conj) for i in c}
    links = []
    if actual == 1:
        satisfied = [j for j, c in enumerate(conj) if all(before[i] for i in c)]
        counts = [0] * spec.k
        counts[satisfied[0]] = spec.sizes[satisfied[0]]
        c = sum(counts)
        alpha = math.log2(Fraction(2**c) / doc_Q(spec, counts))
        causes = [_occ(transition, INPUT, conj[j]) for j in satisfied]
        links.append(_link(CAUSE, target, alpha, causes))
        on = [i for i in range(spec.n) if before[i] == 1]
        for size in range(1, len(on) + 1):
            for members in itertools.combinations(on, size):
                counts = [0] * spec.k
                for i in members:
                    counts[where[i]] += 1
                inside = all(c < n for c, n in zip(counts, spec.sizes))
                whole = set(members) in [set(c) for c in conj]
                if not (inside or whole):
                    continue
                q = doc_q(spec, [(c, True) for c in counts])
                best = max(doc_q(spec, [(c, True) for c in sub]) for sub in _proper_sub_counts(counts))
                links.append(
                    _link(EFFECT, _occ(transition, INPUT, members), math.log2(q / best), [target])
                )
    else:
        off_per_conj = [[i for i in c if before[i] == 0] for c in conj]
        causes = [_occ(transition, INPUT, combo) for combo in itertools.product(*off_per_conj)]
        c = spec.k
        alpha = math.log2(Fraction(2**c) / (2**c - doc_Q(spec, [1] * spec.k)))
        links.append(_link(CAUSE, target, alpha, causes))
        off = [i for i in range(spec.n) if before[i] == 0]
        for size in range(1, min(len(off), spec.k) + 1):
            for members in itertools.combinations(off, size):
                counts = [0] * spec.k
                for i in members:
                    counts[where[i]] += 1
                if any(c > 1 for c in counts):
                    continue
                q = doc_q(spec, [(c, c == 0) for c in counts])
                worst = min(
                    doc_q(spec, [(c, c == 0) for c in sub]) for sub in _proper_sub_counts(counts)
                )
                links.append(
                    _link(EFFECT, _occ(transition, INPUT, members), math.log2((1 - q) / (1 - worst)), [target])
                )
    return _account(transition, links)
