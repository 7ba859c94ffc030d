from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from colorboss.datasets import S1, S2, toy_pair
from colorboss.errors import CacheError, ResourceError, UsageError
from colorboss.seq_io import prepare_collection
from colorboss.text_index import (build_bwt, build_collection_index, build_lcp, build_suffix_array,
                                  index_from_bytes, index_to_bytes, load_index, read_index_tsv,
                                  save_index, write_index_tsv)


def _ctx(s: str) -> str:
    return s.replace("$_", "$")


# merged table of the toy pair: BWT, LCP, CL, DA, context
MERGED = [
    ("T", 0, 1, 0, "$_1"), ("T", 0, 1, 0, "$_2"), ("G", 0, 1, 1, "$_3"),
    ("C", 0, 5, 0, "ACAT$_2"), ("$", 2, 7, 0, "ACTCAT$_1"), ("C", 1, 3, 1, "AG$_3"),
    ("C", 1, 3, 0, "AT$_1"), ("C", 2, 3, 0, "AT$_2"), ("T", 0, 6, 0, "CACAT$_2"),
    ("T", 2, 4, 1, "CAG$_3"), ("T", 2, 4, 0, "CAT$_1"), ("A", 3, 4, 0, "CAT$_2"),
    ("G", 1, 6, 1, "CTCAG$_3"), ("A", 4, 6, 0, "CTCAT$_1"), ("A", 0, 2, 1, "G$_3"),
    ("$", 1, 7, 1, "GCTCAG$_3"), ("A", 0, 2, 0, "T$_1"), ("A", 1, 2, 0, "T$_2"),
    ("$", 1, 7, 0, "TCACAT$_2"), ("C", 3, 5, 1, "TCAG$_3"), ("C", 3, 5, 0, "TCAT$_1"),
]


def test_merged_toy_table():
    idx = build_collection_index(toy_pair(3))
    assert idx.n_total == 21 and idx.n_reads == 3
    got = [(idx.bwt_string()[i], int(idx.lcp[i]), int(idx.cl[i]), int(idx.da[i]), idx.context(i))
           for i in range(21)]
    assert got == [(b, lcp, cl, da, _ctx(c)) for b, lcp, cl, da, c in MERGED]
    # which separator precedes the full-read contexts
    assert [idx.symbol(int(idx.bwt[i])) for i in (4, 15, 18)] == ["$3", "$2", "$1"]


def test_solo_tables():
    s2 = build_collection_index([prepare_collection(S2, 0, 3)])
    assert s2.bwt_string() == "GCTGA$C"
    assert s2.lcp.tolist() == [0, 0, 0, 1, 0, 1, 0]
    assert s2.cl.tolist() == [1, 3, 4, 6, 2, 7, 5]
    s1 = build_collection_index([prepare_collection(S1, 0, 3)])
    contexts = [s1.context(i) for i in range(s1.n_total)]
    assert contexts.index("CAT$1") < contexts.index("CAT$2")  # separators ordered by read number
    assert s1.bwt_string() == "TTC$CCTTAAAA$C"


def test_fig1_string():
    text = "abracadabra$"
    sa = build_suffix_array(text)
    assert (sa + 1).tolist() == [12, 11, 8, 1, 4, 6, 9, 2, 5, 7, 10, 3]
    assert build_lcp(text).tolist() == [0, 0, 1, 4, 1, 1, 0, 3, 0, 0, 0, 2]
    assert bytes(build_bwt(text, sa).astype(np.uint8)).decode() == "ard$rcaaaabb"


def test_build_lcp_rejects_wrong_sa():
    with pytest.raises(UsageError):
        build_lcp("banana", np.arange(6))


def test_empty_and_single():
    assert build_suffix_array("").tolist() == []
    assert build_suffix_array("a").tolist() == [0]
    assert build_lcp("a").tolist() == [0]


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=120))
def test_sa_lcp_match_brute_force(codes):
    sa = build_suffix_array(codes)
    assert sa.tolist() == oracles.brute_sa(codes)
    assert build_lcp(codes).tolist() == oracles.brute_lcp(codes, sa.tolist())


@settings(max_examples=80, deadline=None)
@given(st.text(alphabet="ACGT", min_size=0, max_size=80))
def test_bwt_inverts_by_lf(s):
    text = s + "$"
    sa = build_suffix_array(text)
    bwt = "".join(map(chr, build_bwt(text, sa)))
    assert oracles.invert_bwt(bwt) == text


genomes_st = st.lists(
    st.lists(st.text(alphabet="ACGNT", min_size=1, max_size=15), min_size=1, max_size=4),
    min_size=1, max_size=3)


@settings(max_examples=100, deadline=None)
@given(genomes_st)
def test_collection_tables_match_brute_force(genomes):
    cols = [prepare_collection(r, g, 1) for g, r in enumerate(genomes)]
    idx = build_collection_index(cols)
    sa, lcp, bwt, da, cl = oracles.brute_doc_tables(genomes)
    d = idx.n_reads
    assert idx.sa.tolist() == sa
    assert idx.lcp.tolist() == lcp
    assert idx.bwt.tolist() == [s[1] if s[0] == 0 else d + "ACGNT".index(s[1]) for s in bwt]
    assert idx.da.tolist() == da
    assert idx.cl.tolist() == cl


def test_budget():
    with pytest.raises(ResourceError):
        build_collection_index(toy_pair(3), max_symbols=10)


def test_no_collections():
    with pytest.raises(UsageError):
        build_collection_index([])


def test_binary_round_trip(tmp_path):
    idx = build_collection_index(toy_pair(3))
    p = tmp_path / "i.cbix"
    save_index(idx, p)
    back = load_index(p)
    assert back.equals(idx) and back.genome_ids == (0, 1)
    blob = index_to_bytes(idx)
    assert index_from_bytes(blob).equals(idx)
    with pytest.raises(CacheError):
        index_from_bytes(b"XXXX" + blob[4:])
    with pytest.raises(CacheError):
        index_from_bytes(blob[:-3])


def test_tsv_round_trip(tmp_path):
    idx = build_collection_index(toy_pair(3))
    p = tmp_path / "i.tsv"
    write_index_tsv(idx, p)
    back = read_index_tsv(p)
    assert np.array_equal(back["sa"], idx.sa)
    assert np.array_equal(back["lcp"], idx.lcp)
    assert np.array_equal(back["cl"], idx.cl)
    assert np.array_equal(back["da"], idx.da)
    assert back["context"] == [idx.context(i) for i in range(idx.n_total)]
