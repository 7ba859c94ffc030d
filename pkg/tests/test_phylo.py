from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from colorboss.errors import LeafSetMismatch, ParseError, ValidationError
from colorboss.phylo import (bipartitions, neighbor_joining, parse_newick, path_length_matrix,
                             random_tree, robinson_foulds, to_newick)


def test_two_taxa():
    t = neighbor_joining([[0, 2], [2, 0]], ["A", "B"])
    assert to_newick(t) == "(A:1,B:1);"
    assert len(t) == 2 and t.clamped == 0


def test_four_leaf_additive():
    # ((A:1,B:2):3,(C:4,D:5)) with distinct lengths
    truth = parse_newick("((A:1,B:2):3,(C:4,D:5):0);")
    labels = ["A", "B", "C", "D"]
    d = path_length_matrix(truth, labels)
    assert d[0, 2] == 8 and d[1, 3] == 10
    tree = neighbor_joining(d, labels)
    assert robinson_foulds(tree, truth) == 0
    assert np.allclose(path_length_matrix(tree, labels), d, atol=1e-9)
    again = parse_newick(to_newick(tree))
    assert np.allclose(path_length_matrix(again, labels), d, atol=1e-9)


def test_labels_preserved():
    rng = np.random.default_rng(0)
    d = rng.random((7, 7))
    d = d + d.T
    np.fill_diagonal(d, 0)
    labels = list("gfedcba")
    assert sorted(neighbor_joining(d, labels).leaves()) == sorted(labels)


def test_tie_break_is_deterministic():
    d = np.ones((5, 5)) - np.eye(5)
    a = to_newick(neighbor_joining(d, list("ABCDE")))
    assert a == to_newick(neighbor_joining(d, list("ABCDE")))
    # equal Q everywhere: the first pair joined is (A, B)
    assert "(A:0.5,B:0.5)" in a


def test_negative_lengths_are_clamped():
    d = np.array([[0, 1, 9, 9], [1, 0, 9, 9], [9, 9, 0, 0.1], [9, 9, 0.1, 0]], dtype=float)
    d[0, 2] = d[2, 0] = 2.0
    t = neighbor_joining(d, list("ABCD"))
    lengths = [n.length for n in t.root.walk() if n is not t.root]
    assert min(lengths) >= 0
    assert t.clamped >= 1


@pytest.mark.parametrize("bad", [
    [[0, 1], [2, 0]],         # asymmetric
    [[-1, 1], [1, 0]],        # negative diagonal
    [[0]],                    # too small
])
def test_nj_validation(bad):
    labels = [chr(65 + i) for i in range(len(bad))]
    with pytest.raises(ValidationError):
        neighbor_joining(bad, labels)


def test_newick_round_trip_and_quoting():
    t = parse_newick("(('a b':0.5,c:1.25):2,(d,e:3e-3));")
    assert sorted(t.leaves()) == ["a b", "c", "d", "e"]
    text = to_newick(t)
    assert "'a b':0.5" in text and "e:0.003" in text
    assert robinson_foulds(parse_newick(text), t) == 0


@pytest.mark.parametrize("text", ["(A,B)", "(A,(B,C);", "(A,A);", "(A,B):x;", "(A,,B);"])
def test_newick_errors(text):
    with pytest.raises(ParseError):
        parse_newick(text)


def test_rf_small_cases():
    caterpillar = parse_newick("(A,(B,(C,D)));")
    balanced = parse_newick("((A,B),(C,D));")
    crossed = parse_newick("((A,C),(B,D));")
    # unrooted, both trees have the single split AB|CD
    assert robinson_foulds(caterpillar, balanced) == 0
    assert robinson_foulds(balanced, crossed) == 2
    assert bipartitions(balanced) == {frozenset({"C", "D"})}


def test_rf_leaf_mismatch():
    with pytest.raises(LeafSetMismatch) as info:
        robinson_foulds(parse_newick("((A,B),(C,D));"), parse_newick("((A,B),(C,E));"))
    assert info.value.only_first == ["D"] and info.value.only_second == ["E"]


@settings(max_examples=100, deadline=None)
@given(st.integers(4, 16), st.integers(0, 2**32 - 1))
def test_rf_against_edge_removal_oracle(n, seed):
    rng = np.random.default_rng(seed)
    labels = [f"x{i}" for i in range(n)]
    a, b = random_tree(labels, rng), random_tree(labels, rng)
    sa, sb = oracles.splits_by_edge_removal(a), oracles.splits_by_edge_removal(b)
    assert bipartitions(a) == sa and len(sa) == n - 3
    assert robinson_foulds(a, b) == len(sa ^ sb) <= 2 * n - 6
    assert robinson_foulds(parse_newick(to_newick(a)), a) == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 12), st.integers(0, 2**32 - 1))
def test_nj_recovers_additive_trees(n, seed):
    rng = np.random.default_rng(seed)
    labels = [f"L{i}" for i in range(n)]
    truth = random_tree(labels, rng)
    d = path_length_matrix(truth, labels)
    tree = neighbor_joining(d, labels)
    assert robinson_foulds(tree, truth) == 0
    assert np.abs(path_length_matrix(tree, labels) - d).max() <= 1e-9
