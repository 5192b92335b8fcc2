import math

import numpy as np
import pytest

from causalis import (
    Occurrence,
    RealizationError,
    Transition,
    actual_cause,
    actual_effect,
    alpha_c,
    alpha_e,
    alpha_max_cause,
    alpha_max_effect,
    causal_account,
    network_from_mechanisms,
    rho_c,
    rho_e,
)
from causalis.engine import Evaluator, bits, subset_masks, to_mask
from causalis.network import INPUT, OUTPUT
from causalis.partition import enumerate_partitions, partitioned_cause_repertoire, partitioned_effect_repertoire
from causalis.repertoire import CAUSE, EFFECT, cause_repertoire, effect_repertoire, prob_of, unconstrained_effect
from helpers import random_network, realizable_transition


def or_and():
    return network_from_mechanisms(
        ["OR", "AND"], ["OR", "AND"], {"OR": lambda s: int(s[0] or s[1]), "AND": lambda s: int(s[0] and s[1])}
    )


def gate(fn):
    return network_from_mechanisms("AB", ["Y"], {"Y": lambda s: int(fn(*s))})


def test_mask_helpers():
    assert bits(0b1011) == (0, 1, 3)
    assert to_mask((0, 1, 3)) == 0b1011
    masks = subset_masks(3)
    assert masks[0] == 0 and len(masks) == 8
    assert [bin(m).count("1") for m in masks] == sorted(bin(m).count("1") for m in masks)


def test_rho_or_gate():
    net = or_and()
    x = Occurrence(INPUT, (0,), (1,))
    y = Occurrence(OUTPUT, (0,), (1,))
    assert rho_e(net, x, y) == pytest.approx(math.log2(4 / 3))
    assert rho_c(net, x, y) == pytest.approx(math.log2(4 / 3))


def test_second_order_cause_and_reducible_effect():
    net = or_and()
    x = Occurrence(INPUT, (0, 1), (1, 0))
    y = Occurrence(OUTPUT, (0, 1), (1, 0))
    a = alpha_c(net, x, y)
    assert a.alpha == pytest.approx(math.log2(9 / 8))
    assert a.mip is not None and not a.mip.is_full_cut
    assert alpha_e(net, x, y).alpha == pytest.approx(0.0, abs=1e-12)


def test_alpha_matches_brute_force_minimum():
    rng = np.random.default_rng(11)
    for _ in range(10):
        net = random_network(rng, 3, 2)
        t = realizable_transition(rng, net)
        ev = Evaluator(net, t)
        for omask in subset_masks(3)[1:]:
            x = ev.occurrence(INPUT, omask)
            for cmask in subset_masks(2)[1:]:
                y = ev.occurrence(OUTPUT, cmask)
                intact = prob_of(effect_repertoire(net, x, y.members), y.states)
                vals = [
                    math.log2(intact / prob_of(partitioned_effect_repertoire(net, psi, x, y.members), y.states))
                    for psi in enumerate_partitions(x, y.members, EFFECT)
                ]
                assert ev.analyze(EFFECT, omask, cmask).alpha == pytest.approx(min(vals))
        for omask in subset_masks(2)[1:]:
            y = ev.occurrence(OUTPUT, omask)
            for cmask in subset_masks(3)[1:]:
                x = ev.occurrence(INPUT, cmask)
                intact = prob_of(cause_repertoire(net, y, x.members), x.states)
                if intact == 0:
                    continue
                vals = [
                    math.log2(intact / prob_of(partitioned_cause_repertoire(net, psi, y, x.members), x.states))
                    for psi in enumerate_partitions(y, x.members, CAUSE)
                ]
                assert ev.analyze(CAUSE, omask, cmask).alpha == pytest.approx(min(vals))


def test_mip_is_first_minimizer():
    # double biconditional: many partitions of DE tie, the MIP is the first in canonical order
    net = network_from_mechanisms("ABC", ["D", "E"], {"D": lambda s: int(s[0] == s[1]), "E": lambda s: int(s[1] == s[2])})
    t = Transition((1, 1, 1), (1, 1))
    y = Occurrence(OUTPUT, (0, 1), (1, 1))
    intact = prob_of(cause_repertoire(net, y, (0, 1, 2)), (1, 1, 1))
    vals = [
        (math.log2(intact / prob_of(partitioned_cause_repertoire(net, psi, y, (0, 1, 2)), (1, 1, 1))), psi)
        for psi in enumerate_partitions(y, (0, 1, 2), CAUSE)
    ]
    low = min(v for v, _ in vals)
    first = next(psi for v, psi in vals if v <= low + 1e-9)
    a = Evaluator(net, t).analyze(CAUSE, 0b11, 0b111)
    assert a.alpha == pytest.approx(low) == pytest.approx(1.0)
    assert a.mip == first
    assert sum(1 for v, _ in vals if v <= low + 1e-9) > 1


def test_overdetermination_is_indeterminate():
    net = gate(lambda a, b: a or b)
    link = actual_cause(net, Transition((1, 1), (1,)), [0])
    assert link.status == "indeterminate"
    assert [c.candidate.members for c in link.candidates] == [(0,), (1,)]
    assert link.alpha_max == pytest.approx(math.log2(4 / 3))


def test_minimality_drops_supersets_in_ties():
    net = gate(lambda a, b: a)
    link = actual_cause(net, Transition((1, 0), (1,)), [0])
    # {A} and {A, B} tie at 1 bit; only {A} is kept
    assert [c.candidate.members for c in link.candidates] == [(0,)]
    alpha, winners = alpha_max_cause(net, Transition((1, 0), (1,)), [0])
    assert alpha == pytest.approx(1.0)
    assert {w.candidate.members for w in winners} == {(0,), (0, 1)}


def test_no_link_gives_zero():
    net = gate(lambda a, b: a != b)
    t = Transition((1, 0), (1,))
    link = actual_effect(net, t, [0])
    assert link.status == "none" and link.alpha_max == 0.0 and link.candidates == ()
    alpha, winners = alpha_max_effect(net, t, Occurrence(INPUT, (0,), (1,)))
    assert alpha == 0.0 and winners == []


def test_realization_checked():
    net = gate(lambda a, b: a and b)
    with pytest.raises(RealizationError):
        causal_account(net, Transition((1, 0), (1,)))
    with pytest.raises(RealizationError):
        actual_cause(net, Transition((1, 0), (1,)), [0])
    with pytest.raises(ValueError):
        causal_account(net, Transition((1,), (1,)))


def test_account_ordering_and_lookup():
    acc = causal_account(or_and(), Transition((1, 0), (1, 0)))
    keys = [(l.direction, l.occurrence.members) for l in acc.links]
    assert keys == sorted(keys)
    assert len(acc.causes()) == 3 and len(acc.effects()) == 2
    link = acc.find(CAUSE, [1, 0])
    assert link is not None and link.alpha_max == pytest.approx(math.log2(9 / 8))
    assert acc.find(EFFECT, [0, 1]) is None


def test_parallel_matches_sequential():
    rng = np.random.default_rng(5)
    net = random_network(rng, 4, 3)
    t = realizable_transition(rng, net)
    a = causal_account(net, t, n_jobs=1)
    b = causal_account(net, t, n_jobs=2)
    assert a == b


def test_alpha_never_exceeds_rho_and_singletons_equal():
    rng = np.random.default_rng(9)
    net = random_network(rng, 3, 2)
    t = realizable_transition(rng, net)
    ev = Evaluator(net, t)
    for direction, n_occ, n_cand in ((EFFECT, 3, 2), (CAUSE, 2, 3)):
        for omask in subset_masks(n_occ)[1:]:
            for cmask in subset_masks(n_cand)[1:]:
                a = ev.analyze(direction, omask, cmask)
                assert a.alpha <= a.rho + 1e-9
                if bin(omask).count("1") == 1:
                    assert a.alpha == pytest.approx(a.rho)


def test_rho_uses_unconstrained_effect():
    net = gate(lambda a, b: a and b)
    x = Occurrence(INPUT, (0,), (1,))
    y = Occurrence(OUTPUT, (0,), (1,))
    expect = math.log2(prob_of(effect_repertoire(net, x, [0]), (1,)) / prob_of(unconstrained_effect(net, [0]), (1,)))
    assert rho_e(net, x, y) == pytest.approx(expect) == pytest.approx(1.0)
