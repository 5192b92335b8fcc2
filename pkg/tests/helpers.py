import numpy as np
from hypothesis import strategies as st

from causalis import CausalNetwork, Transition, Variable
from causalis.network import all_states, encode_state, transition_prob


def random_network(rng, n_in, n_out, max_card=3, deterministic=False):
    """Random network with probabilistic (or deterministic) CPTs."""
    inputs = tuple(Variable(f"I{i}", tuple(str(s) for s in range(rng.integers(2, max_card + 1)))) for i in range(n_in))
    outputs = tuple(Variable(f"O{i}", tuple(str(s) for s in range(rng.integers(2, max_card + 1)))) for i in range(n_out))
    rows = int(np.prod([v.cardinality for v in inputs]))
    tables = []
    for v in outputs:
        if deterministic:
            t = np.zeros((rows, v.cardinality))
            t[np.arange(rows), rng.integers(0, v.cardinality, rows)] = 1.0
        else:
            t = rng.random((rows, v.cardinality))
            # sparsify some entries so zero probabilities also show up
            t[rng.random(t.shape) < 0.3] = 0.0
            t[np.arange(rows), rng.integers(0, v.cardinality, rows)] += 0.05
            t /= t.sum(axis=1, keepdims=True)
        tables.append(t)
    return CausalNetwork(inputs, outputs, tuple(tables))


def realizable_transition(rng, net):
    """A transition with positive probability, drawn from the network itself."""
    before = tuple(int(rng.integers(0, v.cardinality)) for v in net.inputs)
    row = encode_state(before, net.input_cards)
    after = tuple(int(rng.choice(t.shape[1], p=t[row])) for t in net.cpts)
    t = Transition(before, after)
    assert transition_prob(net, before, after) > 0
    return t


@st.composite
def networks(draw, max_in=4, max_out=3):
    seed = draw(st.integers(0, 2**32 - 1))
    n_in = draw(st.integers(1, max_in))
    n_out = draw(st.integers(1, max_out))
    det = draw(st.booleans())
    rng = np.random.default_rng(seed)
    net = random_network(rng, n_in, n_out, deterministic=det)
    return net, realizable_transition(rng, net), rng


def brute_effect(net, fixed, purview, state):
    """p(purview = state | do(fixed)), product of per-node averages."""
    p = 1.0
    for node, s in zip(purview, state):
        total, count = 0.0, 0
        for full in all_states(net.input_cards):
            if all(full[i] == v for i, v in fixed.items()):
                total += net.cpts[node][_row(net, full), s]
                count += 1
        p *= total / count
    return p


def brute_cause(net, y, purview):
    """Cause repertoire over ``purview`` as a dict state -> probability."""
    cards = [net.input_cards[m] for m in purview]
    raw = {}
    for sub in all_states(cards):
        p = 1.0
        for node, s in y.items():
            num = den = 0.0
            for full in all_states(net.input_cards):
                w = net.cpts[node][_row(net, full), s]
                den += w
                if all(full[m] == v for m, v in zip(purview, sub)):
                    num += w
            p *= num / den
        raw[sub] = p
    z = sum(raw.values())
    return {k: v / z for k, v in raw.items()}


def _row(net, full):
    return encode_state(full, net.input_cards)
