"""Per-genome and merged index construction with an on-disk cache.

Two ways to reach the merged tables: ``pairwise`` builds one merged index
per unordered genome pair, ``multi`` builds a single index over all genomes.
Either way a merged index is exactly what :func:`build_collection_index`
returns for the selected genomes in id order.

Cache layout under ``cache_dir``::

    genome-<id>/index.cbix  manifest.json
    merge-<id>-<id>.../index.cbix  manifest.json

The manifest records k, the genome order, a checksum of the input reads and
a checksum of the cache file. A file whose checksum no longer matches is
rebuilt with a warning.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from . import _binio
from .errors import CacheError, UsageError
from .seq_io import GenomeCollection
from .text_index import DEFAULT_MAX_SYMBOLS, CollectionIndex, build_collection_index, index_from_bytes, index_to_bytes

log = logging.getLogger(__name__)

MODES = ("pairwise", "multi")


@dataclass(frozen=True)
class MergePlan:
    mode: str
    genome_ids: tuple[int, ...]
    k: int
    cache_dir: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise UsageError(f"mode must be one of {MODES}, got {self.mode!r}")
        if len(set(self.genome_ids)) != len(self.genome_ids):
            raise UsageError("genome ids must be distinct")

    def groups(self) -> list[tuple[int, ...]]:
        """Genome id tuples to merge: every unordered pair, or everything at once."""
        ids = tuple(sorted(self.genome_ids))
        if self.mode == "pairwise":
            return list(combinations(ids, 2))
        return [ids]


def reads_checksum(collection: GenomeCollection) -> str:
    h = hashlib.sha256()
    for r in collection.reads:
        h.update(r.symbols.encode("ascii"))
        h.update(b"\n")
    return h.hexdigest()


class IndexStore:
    """Builds indexes on demand, keeps them in memory and optionally on disk.

    ``builds`` counts actual constructions by key, so tests can check that
    nothing is built twice.
    """

    def __init__(self, k: int, cache_dir: str | os.PathLike | None = None,
                 max_symbols: int = DEFAULT_MAX_SYMBOLS):
        self.k = k
        self.max_symbols = max_symbols
        self.cache_dir = os.fspath(cache_dir) if cache_dir is not None else None
        self.builds: Counter = Counter()
        self._memo: dict[tuple, CollectionIndex] = {}

    def _dir(self, key: tuple) -> str:
        kind, ids = key
        return os.path.join(self.cache_dir, f"{kind}-" + "-".join(str(i) for i in ids))

    def get(self, collections: Sequence[GenomeCollection], kind: str = "merge") -> CollectionIndex:
        cols = sorted(collections, key=lambda c: c.genome_id)
        key = (kind, tuple(c.genome_id for c in cols))
        if key in self._memo:
            return self._memo[key]
        sums = [reads_checksum(c) for c in cols]
        index = self._load(key, sums) if self.cache_dir else None
        if index is None:
            index = build_collection_index(cols, self.max_symbols)
            self.builds[key] += 1
            if self.cache_dir:
                self._save(key, sums, index)
        self._memo[key] = index
        return index

    def genome(self, collection: GenomeCollection) -> CollectionIndex:
        return self.get([collection], kind="genome")

    def _manifest(self, key, sums, blob=None) -> dict:
        m = {"k": self.k, "genomes": list(key[1]), "reads_sha256": sums}
        if blob is not None:
            m["file_sha256"] = _binio.sha256(blob)
        return m

    def _load(self, key, sums) -> CollectionIndex | None:
        d = self._dir(key)
        path, mpath = os.path.join(d, "index.cbix"), os.path.join(d, "manifest.json")
        if not (os.path.exists(path) and os.path.exists(mpath)):
            return None
        try:
            with open(mpath) as fh:
                manifest = json.load(fh)
        except (OSError, ValueError):
            log.warning("cache manifest %s unreadable; rebuilding", mpath)
            return None
        want = self._manifest(key, sums)
        if any(manifest.get(f) != v for f, v in want.items()):
            log.info("cache %s was built for different inputs; rebuilding", d)
            return None
        with open(path, "rb") as fh:
            blob = fh.read()
        if _binio.sha256(blob) != manifest.get("file_sha256"):
            log.warning("cache file %s fails its checksum; rebuilding", path)
            return None
        try:
            return index_from_bytes(blob)
        except CacheError as exc:
            log.warning("cache file %s is corrupt (%s); rebuilding", path, exc)
            return None

    def _save(self, key, sums, index: CollectionIndex) -> None:
        d = self._dir(key)
        os.makedirs(d, exist_ok=True)
        blob = index_to_bytes(index)
        _binio.atomic_write(os.path.join(d, "index.cbix"), blob)
        text = json.dumps(self._manifest(key, sums, blob), indent=2, sort_keys=True) + "\n"
        _binio.atomic_write(os.path.join(d, "manifest.json"), text.encode())


def merge_indexes(
    collections: Sequence[GenomeCollection],
    mode: str = "multi",
    k: int = 31,
    cache_dir: str | os.PathLike | None = None,
    store: IndexStore | None = None,
    threads: int = 1,
) -> dict[tuple[int, ...], CollectionIndex]:
    """Merged indexes keyed by genome-id tuple.

    Per-genome indexes are built first (once each, concurrently if
    ``threads > 1``), then the merged ones.
    """
    if len(collections) < 2:
        raise UsageError(f"need at least 2 genomes, got {len(collections)}")
    by_id = {c.genome_id: c for c in collections}
    plan = MergePlan(mode, tuple(c.genome_id for c in collections), k,
                     os.fspath(cache_dir) if cache_dir is not None else None)
    store = store or IndexStore(k, cache_dir)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(store.genome, collections))
    else:
        for c in collections:
            store.genome(c)
    return {ids: store.get([by_id[i] for i in ids]) for ids in plan.groups()}
