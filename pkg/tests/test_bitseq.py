from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from colorboss.bitseq import BitSeq, ColorIndex
from colorboss.errors import ContractViolation


def test_small_example():
    b = BitSeq([0, 0, 1, 1])
    assert b.rank1(4) == 2 and b.rank1(3) == 1 and b.rank0(4) == 2
    assert b.select1(1) == 2 and b.select1(2) == 3
    assert b.select0(2) == 1
    assert b[2] and not b[0]
    assert len(b) == 4 and b.ones == 2


def test_empty():
    b = BitSeq([])
    assert b.rank1(0) == 0 and len(b) == 0 and b.ones == 0


@pytest.mark.parametrize("call", [
    lambda b: b.rank1(5), lambda b: b.rank1(-1), lambda b: b.select1(0), lambda b: b.select1(3),
    lambda b: b[4], lambda b: b.select0(3),
])
def test_out_of_range(call):
    with pytest.raises(ContractViolation):
        call(BitSeq([1, 0, 1, 0]))


@settings(max_examples=120, deadline=None)
@given(st.lists(st.booleans(), max_size=2100))
def test_matches_linear_scan(bits):
    b = BitSeq(bits)
    assert b.to_array().tolist() == bits
    for i in range(0, len(bits) + 1, max(1, len(bits) // 37)):
        assert b.rank1(i) == oracles.linear_rank(bits, i)
    for j in range(1, b.ones + 1, max(1, b.ones // 29)):
        assert b.select1(j) == oracles.linear_select(bits, j)
    zeros = [p for p, x in enumerate(bits) if not x]
    for j in range(1, len(zeros) + 1, max(1, len(zeros) // 13)):
        assert b.select0(j) == zeros[j - 1]


def test_vectorized_queries_agree_with_scalar():
    rng = np.random.default_rng(3)
    bits = rng.random(5000) < 0.3
    b = BitSeq(bits)
    pos = rng.integers(0, 5001, size=300)
    assert b.rank1(pos).tolist() == [b.rank1(int(p)) for p in pos]
    js = rng.integers(1, b.ones + 1, size=300)
    assert b.select1(js).tolist() == [b.select1(int(j)) for j in js]
    assert np.array_equal(b[np.arange(5000)], bits)


def test_rank_select_inverse():
    rng = np.random.default_rng(4)
    b = BitSeq(rng.random(10_000) < 0.01)
    j = np.arange(1, b.ones + 1)
    assert np.array_equal(b.rank1(b.select1(j) + 1), j)


def test_equality_and_size():
    assert BitSeq([1, 0, 1]) == BitSeq([True, False, True])
    assert BitSeq([1, 0, 1]) != BitSeq([1, 0, 0])
    assert BitSeq(np.ones(1000)).nbits() >= 1000


def test_color_index():
    colors = np.array([0, 2, 2, 1, 0, 2])
    ci = ColorIndex(colors)
    assert ci.count(2) == 3 and ci.count(7) == 0
    assert ci.rank(2, 3) == 2
    assert ci.select(0, 2) == 4
    assert ci.positions(2).tolist() == [1, 2, 5]
    assert ColorIndex(colors, palette=[0, 1, 2, 3]).positions(3).tolist() == []
