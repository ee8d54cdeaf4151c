from fractions import Fraction

import numpy as np
import pytest

from gmak.exactla import kinetic_order_subspace
from gmak.netmodel import (
    Complex,
    NetworkSyntaxError,
    NetworkValidationError,
    complex_matrix,
    from_json,
    kinetic_matrix,
    parse_network,
    serialize,
    to_json,
)
from gmak.rational import RationalMatrix

from _factories import autocatalytic, power_law_ab, random_network


def test_parse_reversible_default_kinetics():
    net = parse_network("A + B <=> C")
    assert net.n == 3 and net.m == 2 and net.r == 2
    assert net.species_names == ["A", "B", "C"]
    assert net.kinetic_complexes == net.complexes
    assert [(rx.source, rx.target) for rx in net.reactions] == [(0, 1), (1, 0)]


def test_parse_kinetic_lines_set_kinetic_order_subspace():
    S_tilde = kinetic_order_subspace(autocatalytic())
    assert S_tilde.dim == 1
    assert S_tilde.contains([-1, 1, 1])


def test_self_loop_rejected():
    with pytest.raises(NetworkValidationError, match="self-loop"):
        parse_network("A -> A")


def test_duplicate_kinetic_complex_rejected():
    with pytest.raises(NetworkValidationError, match="kinetic"):
        parse_network("A <=> B\nA ~ 2 A\nB ~ 2 A")


def test_duplicate_reaction_rejected():
    with pytest.raises(NetworkValidationError, match="duplicate"):
        parse_network("A -> B\nA -> B")


def test_kinetic_line_for_unknown_complex_is_orphan():
    with pytest.raises(NetworkValidationError, match="orphan"):
        parse_network("A -> B\nC ~ 2 C")


def test_negative_coefficient_rejected():
    with pytest.raises(NetworkValidationError, match="negative"):
        parse_network("-1 A -> B")
    with pytest.raises(NetworkValidationError):
        Complex(((0, Fraction(-1)),))


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("A -> B\nA + -> B", 2, 5),
        ("A => B", 1, 1),
        ("A -> B\nrate A -> B = x", 2, 14),
        ("A -> 2/0 B", 1, 6),
    ],
)
def test_syntax_errors_carry_position(text, line, column):
    with pytest.raises(NetworkSyntaxError) as info:
        parse_network(text)
    assert info.value.line == line
    assert info.value.column == column
    assert f"line {line}" in str(info.value)


def test_empty_complex_and_comments():
    net = parse_network("0 -> A  # inflow\nA -> 0\n")
    assert net.complexes[0].is_empty()
    assert complex_matrix(net) == RationalMatrix([[0, 1]])


def test_complex_matrix_reads_coefficients():
    assert complex_matrix(parse_network("A + B <=> C")) == RationalMatrix([[1, 0], [1, 0], [0, 1]])
    assert complex_matrix(autocatalytic()) == RationalMatrix([[1, 0], [2, 1], [0, 1]])


def test_kinetic_matrix_reads_kinetic_coefficients():
    assert kinetic_matrix(autocatalytic()) == RationalMatrix([[1, 0], [1, 2], [0, 1]])
    net = power_law_ab("1/2", "3/2", "2")
    assert kinetic_matrix(net) == RationalMatrix([["1/2", 0], ["3/2", 0], [0, 2]])
    classical = parse_network("A + B <=> C")
    assert kinetic_matrix(classical) == complex_matrix(classical)


def test_serialize_keeps_rationals_and_rates():
    net = parse_network("A + B <=> C\nA + B ~ 1/2 A + 3/2 B\nrate C -> A + B = 5/2\nrate A + B -> C = 2")
    text = serialize(net)
    assert "3/2" in text
    assert "rate C -> A + B = 5/2" in text
    assert parse_network(text) == net


def test_parsed_networks_round_trip_exactly():
    rng = np.random.default_rng(12)
    for _ in range(30):
        net = parse_network(serialize(random_network(rng)))
        assert parse_network(serialize(net)) == net


def test_serialize_preserves_species_order():
    net = parse_network("species C B A\nA -> B")
    assert parse_network(serialize(net)) == net
    assert net.species_names == ["C", "B", "A"]


def test_round_trip_random_networks():
    rng = np.random.default_rng(11)
    for _ in range(50):
        net = random_network(rng)
        assert parse_network(serialize(net)).structurally_equal(net)
        assert from_json(to_json(net)) == net


def test_json_export_schema():
    obj = to_json(power_law_ab("1/2", "3/2", "2"))
    assert obj["species"] == ["A", "B", "C"]
    assert obj["complexes"] == [{"A": "1", "B": "1"}, {"C": "1"}]
    assert obj["kinetic_complexes"] == [{"A": "1/2", "B": "3/2"}, {"C": "2"}]
    assert obj["reactions"] == [{"source": 0, "target": 1, "rate": None}, {"source": 1, "target": 0, "rate": None}]


def test_matrices_have_distinct_columns():
    rng = np.random.default_rng(5)
    for _ in range(30):
        net = random_network(rng)
        Y, Yt = complex_matrix(net), kinetic_matrix(net)
        assert Y.shape == Yt.shape == (net.n, net.m)
        assert len(set(Y.columns())) == net.m
        assert len(set(Yt.columns())) == net.m
