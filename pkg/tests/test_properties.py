"""Randomized invariants over generated networks (up to 4 inputs, 3 outputs, 3 states)."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings

from causalis import CausalNetwork, Occurrence, Transition, causal_account
from causalis.engine import Evaluator, subset_masks
from causalis.network import INPUT, OUTPUT, Variable, all_states, encode_state
from causalis.partition import enumerate_partitions, partitioned_cause_repertoire, partitioned_effect_repertoire
from causalis.repertoire import CAUSE, EFFECT, cause_repertoire, effect_repertoire, unconstrained_cause, unconstrained_effect
from helpers import networks

CASES = settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def subsets(n):
    return [c for size in range(1, n + 1) for c in itertools.combinations(range(n), size)]


@CASES
@given(networks())
def test_repertoires_are_normalized(case):
    net, t, _ = case
    for members in [()] + subsets(len(net.inputs)):
        x = Occurrence(INPUT, members, tuple(t.before[m] for m in members))
        for purview in subsets(len(net.outputs)):
            r = effect_repertoire(net, x, purview)
            assert r.probs.min() >= 0
            assert r.probs.sum() == pytest.approx(1.0, abs=1e-9)
    for members in [()] + subsets(len(net.outputs)):
        y = Occurrence(OUTPUT, members, tuple(t.after[m] for m in members))
        for purview in subsets(len(net.inputs)):
            r = cause_repertoire(net, y, purview)
            assert r.probs.min() >= 0
            assert r.probs.sum() == pytest.approx(1.0, abs=1e-9)


@CASES
@given(networks())
def test_alpha_bounded_by_rho_and_equal_for_singletons(case):
    net, t, _ = case
    ev = Evaluator(net, t)
    n_in, n_out = len(net.inputs), len(net.outputs)
    for direction, n_occ, n_cand in ((EFFECT, n_in, n_out), (CAUSE, n_out, n_in)):
        for omask in subset_masks(n_occ)[1:]:
            for cmask in subset_masks(n_cand)[1:]:
                rho = ev.rho(direction, omask, cmask)
                if rho == -math.inf:
                    continue
                alpha = ev.analyze(direction, omask, cmask).alpha
                assert alpha <= rho + 1e-9
                if bin(omask).count("1") == 1:
                    assert alpha == pytest.approx(rho, abs=1e-9)


@CASES
@given(networks())
def test_alpha_max_nonnegative_and_links_positive(case):
    net, t, _ = case
    account = causal_account(net, t)
    ev = Evaluator(net, t)
    for direction, n in ((EFFECT, len(net.inputs)), (CAUSE, len(net.outputs))):
        for omask in subset_masks(n)[1:]:
            link = ev.link(direction, omask)
            assert link.alpha_max >= 0
            assert (link.alpha_max > 0) == bool(link.candidates)
    for link in account.links:
        assert link.alpha_max > 1e-9
        masks = [set(c.candidate.members) for c in link.candidates]
        # no actual cause/effect contains another
        assert not any(a < b for a in masks for b in masks)


@CASES
@given(networks())
def test_full_cut_equals_unconstrained(case):
    net, t, _ = case
    for members in subsets(len(net.inputs)):
        x = Occurrence(INPUT, members, tuple(t.before[m] for m in members))
        for purview in subsets(len(net.outputs)):
            cut = enumerate_partitions(x, purview, EFFECT)[0]
            assert cut.is_full_cut
            got = partitioned_effect_repertoire(net, cut, x, purview).probs
            assert np.allclose(got, unconstrained_effect(net, purview).probs, atol=1e-12)
    for members in subsets(len(net.outputs)):
        y = Occurrence(OUTPUT, members, tuple(t.after[m] for m in members))
        for purview in subsets(len(net.inputs)):
            cut = enumerate_partitions(y, purview, CAUSE)[0]
            got = partitioned_cause_repertoire(net, cut, y, purview).probs
            assert np.allclose(got, unconstrained_cause(net, purview).probs, atol=1e-12)


def with_idle_input(net: CausalNetwork, card: int) -> CausalNetwork:
    """Append an input that no output depends on."""
    idle = Variable("W", tuple(str(s) for s in range(card)))
    tables = [np.concatenate([t] * card, axis=0) for t in net.cpts]
    return CausalNetwork(net.inputs + (idle,), net.outputs, tuple(tables))


@CASES
@given(networks(max_in=3))
def test_conditional_extension_invariance(case):
    net, t, rng = case
    card = int(rng.integers(2, 4))
    big = with_idle_input(net, card)
    w = len(net.inputs)
    wstate = int(rng.integers(0, card))
    bt = Transition(t.before + (wstate,), t.after)
    ev = Evaluator(big, bt)
    for omask in subset_masks(len(net.outputs))[1:]:
        y = ev.occurrence(OUTPUT, omask)
        for members in subsets(w):
            xr = cause_repertoire(big, y, members)
            xwr = cause_repertoire(big, y, members + (w,))
            # the extension condition holds by construction
            expect = np.multiply.outer(xr.probs.reshape(xr.cards, order="F"), np.full(card, 1 / card))
            assert np.allclose(xwr.probs, expect.reshape(-1, order="F"))
            cmask = sum(1 << m for m in members)
            a = ev.analyze(CAUSE, omask, cmask).alpha
            b = ev.analyze(CAUSE, omask, cmask | 1 << w).alpha
            assert b == pytest.approx(a, abs=1e-9)
        link = ev.link(CAUSE, omask)
        assert all(w not in c.candidate.members for c in link.candidates)


def permute_inputs(net: CausalNetwork, perm) -> CausalNetwork:
    """Network whose input i is the original input perm[i]."""
    inputs = tuple(net.inputs[p] for p in perm)
    cards = [v.cardinality for v in inputs]
    rows = []
    for state in all_states(cards):
        original = [0] * len(perm)
        for i, p in enumerate(perm):
            original[p] = state[i]
        rows.append(encode_state(original, net.input_cards))
    return CausalNetwork(inputs, net.outputs, tuple(np.asarray(t)[rows] for t in net.cpts))


def named(net, account):
    out = set()
    for l in account.links:
        occ = tuple(sorted(net.labels(l.occurrence.slice, l.occurrence.members, l.occurrence.states).items()))
        cands = frozenset(
            tuple(sorted(net.labels(c.candidate.slice, c.candidate.members, c.candidate.states).items()))
            for c in l.candidates
        )
        out.add((l.direction, occ, round(l.alpha_max, 9), cands))
    return out


@CASES
@given(networks())
def test_relabeling_invariance(case):
    net, t, rng = case
    perm = [int(p) for p in rng.permutation(len(net.inputs))]
    other = permute_inputs(net, perm)
    before = tuple(t.before[p] for p in perm)
    a = causal_account(net, t)
    b = causal_account(other, Transition(before, t.after))
    assert named(net, a) == named(other, b)


@settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(networks(max_in=3, max_out=2))
def test_parallel_determinism(case):
    net, t, _ = case
    assert causal_account(net, t, n_jobs=2) == causal_account(net, t, n_jobs=1)
