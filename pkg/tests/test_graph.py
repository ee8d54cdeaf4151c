from fractions import Fraction

import numpy as np
import pytest

from gmak.equilibria import pseudo_reaction_transform
from gmak.graph import NotWeaklyReversibleError, circulation_rates, decompose
from gmak.netmodel import parse_network

from _factories import power_law_ab, random_network


def _balance(net, k):
    total = [Fraction(0)] * net.m
    for rx, kj in zip(net.reactions, k):
        total[rx.target] += kj
        total[rx.source] -= kj
    return total


def test_reversible_pair():
    dec = decompose(parse_network("A + B <=> C"))
    assert (dec.l, dec.t, dec.weakly_reversible) == (1, 1, True)


def test_pseudo_reaction_network_is_not_weakly_reversible():
    dec = decompose(pseudo_reaction_transform(power_law_ab("2", "3/2", "2")))
    assert dec.l == 2
    assert not dec.weakly_reversible


def test_single_reaction_sink_is_terminal():
    dec = decompose(parse_network("A -> B"))
    assert (dec.l, dec.t, dec.weakly_reversible) == (1, 1, False)
    assert dec.terminal_classes == ((1,),)


def test_classes_sorted_by_smallest_member():
    dec = decompose(parse_network("C -> D\nA <=> B\nD -> C"))
    assert dec.linkage_classes == ((0, 1), (2, 3))
    assert dec.strong_linkage_classes == ((0, 1), (2, 3))


def test_circulation_small_cases():
    assert circulation_rates(parse_network("A + B <=> C")) == [1, 1]
    assert circulation_rates(parse_network("A -> B\nB -> C\nC -> A")) == [1, 1, 1]
    net = parse_network("A <=> B\nB <=> C")
    k = circulation_rates(net)
    assert all(x > 0 for x in k)
    assert _balance(net, k) == [0, 0, 0]


def test_circulation_requires_weak_reversibility():
    with pytest.raises(NotWeaklyReversibleError):
        circulation_rates(parse_network("A -> B"))


def test_decomposition_properties_random():
    rng = np.random.default_rng(7)
    for i in range(100):
        net = random_network(rng, weakly_reversible=bool(i % 2))
        dec = decompose(net)
        assert dec.t >= dec.l
        if dec.weakly_reversible:
            assert dec.t == dec.l
            k = circulation_rates(net)
            assert all(isinstance(x, int) and x > 0 for x in k)
            assert all(v == 0 for v in _balance(net, k))
        for part in (dec.linkage_classes, dec.strong_linkage_classes):
            assert sorted(y for cls in part for y in cls) == list(range(net.m))
