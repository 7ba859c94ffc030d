"""Suffix array, LCP, BWT, document array and context lengths for read collections.

Symbol coding for a collection of ``d`` reads: codes ``0..d-1`` are the
per-read separators (``$_1 < $_2 < ...``), codes ``d..d+4`` are the letters
``A < C < G < N < T``. All positions are 0-based.

Suffix sorting is prefix doubling on numpy arrays. The rank array of every
doubling round is kept, which lets the LCP of all adjacent suffix pairs be
found at once by binary lifting over those rounds.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _binio
from .errors import ResourceError, UsageError
from .seq_io import ALPHABET, GenomeCollection

DEFAULT_MAX_SYMBOLS = 200_000_000
INDEX_MAGIC = b"CBIX"

_LETTER_LUT = np.full(256, 255, dtype=np.uint8)
for _i, _c in enumerate(ALPHABET):
    _LETTER_LUT[ord(_c)] = _i


def _as_codes(text) -> np.ndarray:
    if isinstance(text, str):
        return np.frombuffer(text.encode("latin-1"), dtype=np.uint8).astype(np.int64)
    return np.asarray(text, dtype=np.int64)


def _doubling(codes: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
    n = len(codes)
    if n == 0:
        return np.zeros(0, dtype=np.int64), []
    _, rank = np.unique(codes, return_inverse=True)
    rank = rank.astype(np.int64)
    levels = [rank]
    h = 1
    while rank.max() < n - 1:
        second = np.zeros(n, dtype=np.int64)
        second[: n - h] = rank[h:] + 1  # 0 marks "past the end"
        key = rank * (n + 1) + second
        order = np.argsort(key, kind="stable")
        sk = key[order]
        new = np.empty(n, dtype=np.int64)
        new[order] = np.concatenate(([0], np.cumsum(sk[1:] != sk[:-1])))
        rank = new
        levels.append(rank)
        h *= 2
    sa = np.empty(n, dtype=np.int64)
    sa[rank] = np.arange(n, dtype=np.int64)
    return sa, levels


def _lcp_from_levels(sa: np.ndarray, levels: list[np.ndarray]) -> np.ndarray:
    n = len(sa)
    lcp = np.zeros(n, dtype=np.int64)
    if n < 2:
        return lcp
    a, b = sa[:-1], sa[1:]
    ell = np.zeros(n - 1, dtype=np.int64)
    # levels[j] ranks prefixes of length 2**j; the top level is all-distinct
    for j in range(len(levels) - 1, -1, -1):
        rank = levels[j]
        ia, ib = a + ell, b + ell
        ok = (ia < n) & (ib < n)
        eq = np.zeros(n - 1, dtype=bool)
        eq[ok] = rank[ia[ok]] == rank[ib[ok]]
        ell[eq] += 1 << j
    lcp[1:] = ell
    return lcp


def build_suffix_array(text) -> np.ndarray:
    """Suffix array of ``text`` (a str or integer sequence), 0-based."""
    return _doubling(_as_codes(text))[0]


def build_lcp(text, sa: np.ndarray | None = None) -> np.ndarray:
    """LCP array: ``lcp[0] = 0`` and ``lcp[i]`` = lcp of suffixes ``sa[i-1]``, ``sa[i]``."""
    codes = _as_codes(text)
    sa2, levels = _doubling(codes)
    if sa is not None and not np.array_equal(np.asarray(sa), sa2):
        raise UsageError("sa is not the suffix array of text")
    return _lcp_from_levels(sa2, levels)


def build_bwt(text, sa: np.ndarray) -> np.ndarray:
    codes = _as_codes(text)
    return codes[(np.asarray(sa) - 1) % len(codes)]


@dataclass(frozen=True, eq=False)
class CollectionIndex:
    """Sorted-suffix tables over the concatenation of reversed reads.

    ``bwt`` and ``text`` use the collection symbol coding; a separator cell
    holds the index of its read. ``da[i]`` is the genome owning the
    separator that ends the context of suffix ``sa[i]``; ``cl[i]`` is that
    context's length, separator included.
    """

    text: np.ndarray
    sa: np.ndarray
    lcp: np.ndarray
    bwt: np.ndarray
    da: np.ndarray
    cl: np.ndarray
    read_genome: np.ndarray
    genome_ids: tuple[int, ...]

    @property
    def n_total(self) -> int:
        return len(self.sa)

    @property
    def n_reads(self) -> int:
        return len(self.read_genome)

    def is_separator(self, codes) -> np.ndarray:
        return np.asarray(codes) < self.n_reads

    def symbol(self, code: int) -> str:
        """Printable form: ``$3`` for the separator of read 3 (1-based), else the letter."""
        d = self.n_reads
        return f"${code + 1}" if code < d else ALPHABET[code - d]

    def context(self, i: int) -> str:
        p = int(self.sa[i])
        return "".join(self.symbol(int(c)) for c in self.text[p:p + int(self.cl[i])])

    def bwt_string(self) -> str:
        return "".join("$" if c < self.n_reads else ALPHABET[c - self.n_reads] for c in self.bwt)

    def arrays(self) -> dict[str, np.ndarray]:
        return {
            "text": self.text, "sa": self.sa, "lcp": self.lcp, "bwt": self.bwt,
            "da": self.da, "cl": self.cl, "read_genome": self.read_genome,
            "genome_ids": np.asarray(self.genome_ids, dtype=np.int32),
        }

    def equals(self, other: "CollectionIndex") -> bool:
        a, b = self.arrays(), other.arrays()
        return all(a[key].dtype == b[key].dtype and np.array_equal(a[key], b[key]) for key in a)


def concatenate(collections: Sequence[GenomeCollection]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Code the concatenation ``R_1 $_1 R_2 $_2 ...`` of all reads, genomes in order.

    Returns ``(text, read_genome, read_end)`` where ``read_end[r]`` is the
    position of ``$_r``.
    """
    reads = [r.symbols for c in collections for r in c.reads]
    read_genome = np.array([c.genome_id for c in collections for _ in c.reads], dtype=np.int32)
    d = len(reads)
    raw = np.frombuffer(("\0".join(reads) + "\0").encode("ascii"), dtype=np.uint8)
    letters = _LETTER_LUT[raw]
    is_sep = raw == 0
    if np.any((letters == 255) & ~is_sep):
        raise UsageError("reads contain symbols outside ACGNT")
    text = letters.astype(np.int32) + d
    read_end = np.flatnonzero(is_sep)
    text[read_end] = np.arange(d, dtype=np.int32)
    return text, read_genome, read_end


def build_collection_index(
    collections: Sequence[GenomeCollection],
    max_symbols: int = DEFAULT_MAX_SYMBOLS,
) -> CollectionIndex:
    """Build SA/LCP/BWT/DA/CL in one pass over the joint concatenation.

    Reads are taken in global order (genomes as given, reads in file
    order), which fixes the separator numbering.
    """
    if not collections:
        raise UsageError("need at least one genome collection")
    for c in collections:
        if not c.reads:
            raise UsageError(f"genome {c.label or c.genome_id} has no reads")
    total = sum(c.total_length for c in collections)
    if total > max_symbols:
        raise ResourceError(f"concatenation of {total} symbols exceeds the budget of {max_symbols}")

    text, read_genome, read_end = concatenate(collections)
    sa, levels = _doubling(text.astype(np.int64))
    lcp = _lcp_from_levels(sa, levels)
    n = len(text)
    read_of_pos = np.searchsorted(read_end, np.arange(n), side="left")
    cl_pos = read_end[read_of_pos] - np.arange(n) + 1
    return CollectionIndex(
        text=text,
        sa=sa,
        lcp=lcp.astype(np.int32),
        bwt=text[(sa - 1) % n],
        da=read_genome[read_of_pos[sa]],
        cl=cl_pos[sa].astype(np.uint32),
        read_genome=read_genome,
        genome_ids=tuple(int(c.genome_id) for c in collections),
    )


# -- persistence -----------------------------------------------------------

def index_to_bytes(index: CollectionIndex) -> bytes:
    return _binio.dumps(INDEX_MAGIC, index.arrays())


def index_from_bytes(blob: bytes) -> CollectionIndex:
    a = _binio.loads(INDEX_MAGIC, blob)
    return CollectionIndex(
        text=a["text"], sa=a["sa"], lcp=a["lcp"], bwt=a["bwt"], da=a["da"], cl=a["cl"],
        read_genome=a["read_genome"], genome_ids=tuple(int(g) for g in a["genome_ids"]),
    )


def save_index(index: CollectionIndex, path: str | os.PathLike) -> None:
    _binio.atomic_write(path, index_to_bytes(index))


def load_index(path: str | os.PathLike) -> CollectionIndex:
    with open(path, "rb") as fh:
        return index_from_bytes(fh.read())


TSV_COLUMNS = ("i", "SA", "BWT", "LCP", "CL", "DA", "context")


def write_index_tsv(index: CollectionIndex, out) -> None:
    """One row per sorted suffix, 1-based ``i`` and ``SA`` in the customary table layout."""
    lines = ["\t".join(TSV_COLUMNS)]
    for i in range(index.n_total):
        lines.append("\t".join((
            str(i + 1), str(int(index.sa[i]) + 1), index.symbol(int(index.bwt[i])),
            str(int(index.lcp[i])), str(int(index.cl[i])), str(int(index.da[i])), index.context(i),
        )))
    text = "\n".join(lines) + "\n"
    if hasattr(out, "write"):
        out.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def read_index_tsv(path) -> dict[str, np.ndarray | list[str]]:
    """Parse a table written by :func:`write_index_tsv` back into 0-based arrays."""
    with open(path) as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if tuple(header) != TSV_COLUMNS:
            raise UsageError(f"unexpected index TSV header {header}")
        rows = [line.rstrip("\n").split("\t") for line in fh if line.strip()]
    return {
        "sa": np.array([int(r[1]) - 1 for r in rows], dtype=np.int64),
        "bwt": [r[2] for r in rows],
        "lcp": np.array([int(r[3]) for r in rows], dtype=np.int32),
        "cl": np.array([int(r[4]) for r in rows], dtype=np.uint32),
        "da": np.array([int(r[5]) for r in rows], dtype=np.int32),
        "context": [r[6] for r in rows],
    }
