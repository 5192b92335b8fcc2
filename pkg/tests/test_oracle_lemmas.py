"""Exhaustive checks of the counting identities behind the LTU and DOC oracles."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from causalis.oracle import DOCSpec, LTUSpec, build_doc_network, build_ltu_network, doc_q, doc_Q, ltu_q, ltu_Q

LTU_SPECS = [LTUSpec(n, k) for n in range(1, 11) for k in range(1, n + 1)]


def compositions(total):
    """Ordered tuples of positive parts summing to ``total``."""
    for cuts in itertools.product((0, 1), repeat=total - 1):
        parts, run = [], 1
        for c in cuts:
            if c:
                parts.append(run)
                run = 1
            else:
                run += 1
        parts.append(run)
        yield tuple(parts)


DOC_SPECS = [DOCSpec(s) for total in range(1, 9) for s in compositions(total)]


def signatures(spec):
    """Every (c_j, all_on) vector a DOC occurrence can have."""
    per = [[(0, True)] + [(c, on) for c in range(1, n + 1) for on in (True, False)] for n in spec.sizes]
    return itertools.product(*per)


# -- frozen values ---------------------------------------------------------------


def test_ltu_reference_values():
    spec = LTUSpec(4, 3)
    assert ltu_q(spec, 3, 3) == 1
    assert ltu_q(spec, 3, 2) == Fraction(1, 2)
    assert ltu_q(spec, 0, 0) == Fraction(5, 16)
    assert ltu_q(spec, 1, 0) == Fraction(1, 8)
    assert ltu_Q(spec, 4) == 5
    assert ltu_Q(spec, 3) == Fraction(5, 2)
    # cause strength of three ON inputs: 2^3 / Q(3)
    assert math.log2(Fraction(8) / ltu_Q(spec, 3)) == pytest.approx(math.log2(3.2))
    assert math.log2(ltu_q(spec, 1, 1) / ltu_q(spec, 0, 0)) == pytest.approx(math.log2(1.6))


def test_doc_reference_values():
    loader = DOCSpec((2, 1))
    assert doc_q(loader, [(0, True), (1, True)]) == 1
    assert doc_q(loader, [(1, True), (0, True)]) == Fraction(3, 4)
    assert doc_q(loader, [(0, True), (0, True)]) == Fraction(5, 8)
    assert doc_q(loader, [(1, False), (1, False)]) == 0
    assert doc_Q(loader, [2, 1]) == 5


def test_range_errors():
    with pytest.raises(ValueError):
        ltu_q(LTUSpec(3, 2), 2, 3)
    with pytest.raises(ValueError):
        LTUSpec(3, 4)
    with pytest.raises(ValueError):
        doc_q(DOCSpec((2,)), [(3, True)])
    with pytest.raises(ValueError):
        DOCSpec(())


# -- LTU lemmas -------------------------------------------------------------------


@pytest.mark.parametrize("spec", LTU_SPECS, ids=lambda s: f"n{s.n}k{s.k}")
def test_ltu_lemmas(spec):
    n, k = spec.n, spec.k
    for c in range(n + 1):
        for j in range(1, c + 1):
            # q is nondecreasing in j, strictly on the window where the threshold is still open
            lo, hi = ltu_q(spec, c, j - 1), ltu_q(spec, c, j)
            assert lo <= hi
            assert (lo < hi) == (k - (n - c) <= j <= k)
    for c in range(n):
        for j in range(c + 1):
            assert ltu_q(spec, c, j) == (ltu_q(spec, c + 1, j) + ltu_q(spec, c + 1, j + 1)) / 2
    for c in range(k):
        assert ltu_q(spec, c, c) < ltu_q(spec, c + 1, c + 1)
    for c in range(n):
        assert ltu_Q(spec, c) == ltu_Q(spec, c + 1) / 2
    assert ltu_Q(spec, n) == sum(math.comb(n, j) for j in range(k, n + 1))


@pytest.mark.parametrize("n", range(1, 9))
def test_ltu_q_matches_truth_table(n):
    for k in range(1, n + 1):
        net = build_ltu_network(LTUSpec(n, k))
        table = net.tensors[0][..., 1]
        for c in range(n + 1):
            for j in range(c + 1):
                fixed = (1,) * j + (0,) * (c - j)
                assert float(ltu_q(LTUSpec(n, k), c, j)) == table[fixed].mean()


# -- DOC lemmas -------------------------------------------------------------------


@pytest.mark.parametrize("spec", DOC_SPECS, ids=lambda s: "-".join(map(str, s.sizes)))
def test_doc_lemmas(spec):
    for sig in signatures(spec):
        sig = list(sig)
        q = doc_q(spec, sig)
        assert 0 <= q <= 1
        for j, n_j in enumerate(spec.sizes):
            c, on = sig[j]
            if c == n_j:
                continue
            grown_on = sig[:j] + [(c + 1, on)] + sig[j + 1 :]
            grown_off = sig[:j] + [(c + 1, False)] + sig[j + 1 :]
            assert doc_q(spec, grown_on) >= q
            assert doc_q(spec, grown_off) <= q
    for counts in itertools.product(*(range(n + 1) for n in spec.sizes)):
        Q = doc_Q(spec, counts)
        for j, n_j in enumerate(spec.sizes):
            if counts[j] < n_j:
                bigger = list(counts)
                bigger[j] += 1
                assert doc_Q(spec, bigger) == 2 * Q
        # all-ON occurrences strictly inside every conjunction: removing members lowers q
        if all(c < n for c, n in zip(counts, spec.sizes)):
            q = doc_q(spec, [(c, True) for c in counts])
            for sub in itertools.product(*(range(c + 1) for c in counts)):
                if tuple(sub) != tuple(counts):
                    assert doc_q(spec, [(c, True) for c in sub]) < q
        # all-OFF occurrences with at most one member per conjunction: removing members raises q
        if all(c <= 1 for c in counts) and any(counts):
            q = doc_q(spec, [(c, c == 0) for c in counts])
            for sub in itertools.product(*(range(c + 1) for c in counts)):
                if tuple(sub) != tuple(counts):
                    assert doc_q(spec, [(c, c == 0) for c in sub]) > q


def partial_table(table):
    """Extend a binary table with a third index per axis meaning "averaged out"."""
    out = table
    for axis in range(table.ndim):
        mean = out.mean(axis=axis, keepdims=True)
        out = np.concatenate([out, mean], axis=axis)
    return out


@pytest.mark.parametrize("total", range(1, 9))
def test_doc_q_matches_truth_table(total):
    for spec in (s for s in DOC_SPECS if s.n == total):
        net = build_doc_network(spec)
        ext = partial_table(net.tensors[0][..., 1]).reshape(-1, order="F")
        # digit i of every flat index, first variable fastest; 2 marks an averaged input
        digits = np.stack(np.unravel_index(np.arange(ext.size), (3,) * total, order="F"), axis=1)
        codes = np.zeros(ext.size, dtype=np.int64)
        for conj, size in zip(spec.conjunctions(), spec.sizes):
            block = digits[:, list(conj)]
            count = (block != 2).sum(axis=1)
            all_on = ~(block == 0).any(axis=1)
            codes = codes * (2 * size + 2) + 2 * count + all_on
        keys, inverse = np.unique(codes, return_inverse=True)
        values = np.empty(len(keys))
        for i, code in enumerate(keys):
            sig, code = [], int(code)
            for size in reversed(spec.sizes):
                code, part = divmod(code, 2 * size + 2)
                sig.append((part // 2, bool(part % 2)))
            values[i] = float(doc_q(spec, sig[::-1]))
        assert np.array_equal(ext, values[inverse])
