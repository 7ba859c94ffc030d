from __future__ import annotations

import json
import logging

import numpy as np
import pytest

from colorboss.datasets import toy_pair
from colorboss.errors import UsageError
from colorboss.merge import IndexStore, MergePlan, merge_indexes
from colorboss.pipeline import distance_matrices
from colorboss.seq_io import prepare_collection
from colorboss.simulate import sample_reads
from colorboss.text_index import build_collection_index


def three_genomes(k=4, seed=0):
    rng = np.random.default_rng(seed)
    genomes = ["".join(rng.choice(list("ACGT"), 300)) for _ in range(3)]
    return [prepare_collection(sample_reads(g, 30, 2.0, rng), i, k, label=f"g{i}")
            for i, g in enumerate(genomes)]


def test_plan_groups():
    assert MergePlan("pairwise", (2, 0, 1), 3).groups() == [(0, 1), (0, 2), (1, 2)]
    assert MergePlan("multi", (2, 0, 1), 3).groups() == [(0, 1, 2)]
    with pytest.raises(UsageError):
        MergePlan("both", (0, 1), 3)
    with pytest.raises(UsageError):
        MergePlan("multi", (0, 0), 3)


def test_pairwise_and_multi_agree_for_two():
    cols = toy_pair(3)
    pw = merge_indexes(cols, "pairwise", 3)
    mu = merge_indexes(cols, "multi", 3)
    assert list(pw) == [(0, 1)] == list(mu)
    assert pw[(0, 1)].equals(mu[(0, 1)])
    assert pw[(0, 1)].equals(build_collection_index(cols))


def test_needs_two():
    with pytest.raises(UsageError):
        merge_indexes(toy_pair(3)[:1], "multi", 3)


def test_each_genome_built_once():
    cols = three_genomes()
    store = IndexStore(4)
    merged = merge_indexes(cols, "pairwise", 4, store=store)
    assert len(merged) == 3
    merge_indexes(cols, "pairwise", 4, store=store, threads=3)
    assert all(n == 1 for n in store.builds.values())
    assert sum(1 for kind, _ in store.builds if kind == "genome") == 3
    assert sum(1 for kind, _ in store.builds if kind == "merge") == 3


def test_cache_reload_is_identical(tmp_path):
    cols = three_genomes()
    first = merge_indexes(cols, "multi", 4, cache_dir=tmp_path)
    store = IndexStore(4, tmp_path)
    second = merge_indexes(cols, "multi", 4, store=store)
    assert not store.builds  # everything came from disk
    assert second[(0, 1, 2)].equals(first[(0, 1, 2)])
    manifest = json.loads((tmp_path / "merge-0-1-2" / "manifest.json").read_text())
    assert manifest["k"] == 4 and manifest["genomes"] == [0, 1, 2]
    assert len(manifest["reads_sha256"]) == 3 and len(manifest["file_sha256"]) == 64


def test_corrupt_cache_is_rebuilt(tmp_path, caplog):
    cols = toy_pair(3)
    fresh = merge_indexes(cols, "multi", 3, cache_dir=tmp_path)[(0, 1)]
    blob = tmp_path / "merge-0-1" / "index.cbix"
    data = bytearray(blob.read_bytes())
    data[-1] ^= 0xFF
    blob.write_bytes(bytes(data))
    store = IndexStore(3, tmp_path)
    with caplog.at_level(logging.WARNING):
        again = merge_indexes(cols, "multi", 3, store=store)[(0, 1)]
    assert "checksum" in caplog.text
    assert store.builds[("merge", (0, 1))] == 1
    assert again.equals(fresh)
    # the rebuilt file is valid again
    store2 = IndexStore(3, tmp_path)
    merge_indexes(cols, "multi", 3, store=store2)
    assert not store2.builds


def test_changed_reads_invalidate_cache(tmp_path):
    cols = toy_pair(3)
    merge_indexes(cols, "multi", 3, cache_dir=tmp_path)
    other = [cols[0], prepare_collection(["GACTCA"], 1, 3)]
    store = IndexStore(3, tmp_path)
    idx = merge_indexes(other, "multi", 3, store=store)[(0, 1)]
    assert store.builds[("merge", (0, 1))] == 1
    assert idx.equals(build_collection_index(other))


def test_pairwise_extraction_matches_direct_pairs():
    cols = three_genomes(k=5, seed=3)
    for cov in (False, True):
        multi = distance_matrices(cols, 5, "multi", cov)
        for i, j in ((0, 1), (0, 2), (1, 2)):
            direct = distance_matrices([cols[i], cols[j]], 5, "multi", cov)
            assert multi.d_m[i, j] == direct.d_m[0, 1]
            assert multi.d_e[i, j] == direct.d_e[0, 1]
