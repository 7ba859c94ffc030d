"""Colored BOSS representation built by one scan over a merged collection index.

Each row of the index is one occurrence of a (possibly ``$``-padded) k-mer:
the node label is the reverse of the first ``min(cl - 1, k)`` context
symbols and the outgoing edge symbol is the BWT symbol (``$`` when the
k-mer ends its read). Rows of one node are contiguous. Inside a node one
edge is emitted per distinct (symbol, color) pair, ordered by symbol and
then color; its coverage is the number of rows folded into it.

Padded labels keep the identity of their genome: ``$`` padding of genome
``g`` differs from that of genome ``h``, while all reads of one genome share
it. That is what separates the two all-``$`` source nodes of a two-genome
graph.

Symbol classes used for ``w`` and the ``c`` array: ``0 = $``, then
``1..5 = A, C, G, N, T``.
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _binio
from .bitseq import BitSeq
from .errors import EmptyGraphError, UsageError
from .seq_io import ALPHABET
from .text_index import CollectionIndex

SYMBOLS = "$" + ALPHABET
SIGMA = len(SYMBOLS)
BOSS_MAGIC = b"CBBS"


@dataclass(frozen=True, eq=False)
class ColoredBoss:
    k: int
    w: np.ndarray
    w_minus: BitSeq
    last: BitSeq
    c: np.ndarray
    colors: np.ndarray
    coverage: np.ndarray
    lcs: np.ndarray
    kl: np.ndarray
    genome_ids: tuple[int, ...]
    _node: np.ndarray = field(repr=False, default=None)

    @property
    def m(self) -> int:
        return len(self.w)

    @property
    def g(self) -> int:
        return len(self.genome_ids)

    @property
    def n_nodes(self) -> int:
        return self.last.ones

    @property
    def node_of_edge(self) -> np.ndarray:
        """Node number of every edge: the count of ``last`` ones before it."""
        if self._node is None:
            object.__setattr__(self, "_node", self.last.rank1(np.arange(self.m)))
        return self._node

    def arrays(self) -> dict[str, np.ndarray]:
        return {
            "k": np.array([self.k], dtype=np.int64),
            "w": self.w,
            "w_minus": self.w_minus.to_array(),
            "last": self.last.to_array(),
            "c": self.c,
            "colors": self.colors,
            "coverage": self.coverage,
            "lcs": self.lcs,
            "kl": self.kl,
            "genome_ids": np.asarray(self.genome_ids, dtype=np.int32),
        }

    def equals(self, other: "ColoredBoss") -> bool:
        a, b = self.arrays(), other.arrays()
        return all(a[key].dtype == b[key].dtype and np.array_equal(a[key], b[key]) for key in a)


def _label_dtype(k: int):
    return np.uint16 if k <= np.iinfo(np.uint16).max else np.uint32


def _color_dtype(ids) -> np.dtype:
    top = max(ids) if ids else 0
    for dt in (np.uint8, np.uint16, np.uint32):
        if top <= np.iinfo(dt).max:
            return np.dtype(dt)
    return np.dtype(np.int64)


def build_colored_boss(index: CollectionIndex, k: int) -> ColoredBoss:
    """Colored BOSS of order ``k`` from a merged index of reversed reads."""
    if k < 1:
        raise UsageError(f"k must be >= 1, got {k}")
    n = index.n_total
    longest = int(index.cl.max()) - 1 if n else 0
    if k > longest - 1:
        raise EmptyGraphError(f"k={k} leaves no (k+1)-mer: longest read has {longest} symbols")

    d = index.n_reads
    cl = index.cl.astype(np.int64)
    lcp = index.lcp.astype(np.int64)
    da = index.da.astype(np.int64)
    kl_row = np.minimum(cl - 1, k)

    # a row opens a new node unless it repeats the previous row's label
    same = np.zeros(n, dtype=bool)
    same[1:] = (kl_row[1:] == kl_row[:-1]) & (lcp[1:] >= kl_row[1:])
    padded = kl_row[1:] < k
    same[1:] &= ~padded | (da[1:] == da[:-1])
    node_row = np.cumsum(~same) - 1

    def sym_class(codes):
        codes = np.asarray(codes, dtype=np.int64)
        return np.where(codes < d, 0, codes - d + 1)

    sym_row = sym_class(index.bwt)
    order = np.lexsort((da, sym_row, node_row))
    key_node, key_sym, key_col = node_row[order], sym_row[order], da[order]
    start = np.ones(n, dtype=bool)
    start[1:] = (key_node[1:] != key_node[:-1]) | (key_sym[1:] != key_sym[:-1]) | (key_col[1:] != key_col[:-1])
    first = np.flatnonzero(start)
    coverage = np.diff(np.append(first, n))
    e_node = key_node[first]
    e_sym = key_sym[first]
    e_col = key_col[first]
    m = len(first)

    node_first_row = np.flatnonzero(~same)
    e_first_of_node = np.ones(m, dtype=bool)
    e_first_of_node[1:] = e_node[1:] != e_node[:-1]
    last = np.ones(m, dtype=bool)
    last[:-1] = e_first_of_node[1:]

    kl = kl_row[node_first_row][e_node]
    lcs = np.where(e_first_of_node, np.minimum(lcp[node_first_row][e_node], k), kl)

    # W-: first occurrence of each symbol inside a run of edges sharing the (k-1)-suffix
    block = np.cumsum(lcs < k - 1)
    _, first_in_block = np.unique(block * SIGMA + e_sym, return_index=True)
    w_minus = np.zeros(m, dtype=bool)
    w_minus[first_in_block] = True

    # C over the last symbol of each edge's node label (the first context symbol)
    f_row = sym_class(index.text[index.sa])
    f_edge = f_row[node_first_row][e_node]
    counts = np.bincount(f_edge, minlength=SIGMA)
    c = np.concatenate(([0], np.cumsum(counts)[:-1])).astype(np.int64)

    ldt = _label_dtype(k)
    return ColoredBoss(
        k=k,
        w=e_sym.astype(np.uint8),
        w_minus=BitSeq(w_minus),
        last=BitSeq(last),
        c=c,
        colors=e_col.astype(_color_dtype(index.genome_ids)),
        coverage=coverage.astype(np.uint32),
        lcs=lcs.astype(ldt),
        kl=kl.astype(ldt),
        genome_ids=tuple(index.genome_ids),
    )


# -- decoding ----------------------------------------------------------------

class Edge(NamedTuple):
    label: str
    symbol: str
    color: int
    coverage: int


def node_labels(boss: ColoredBoss) -> list[str]:
    """Label of every node, recovered by walking incoming edges with ``c``, ``w`` and ``w_minus``.

    Padding is printed as plain ``$``; the genome it belongs to is the color
    of the node's edges.
    """
    m, k = boss.m, boss.k
    if m == 0:
        return []
    node = boss.node_of_edge
    n_nodes = boss.n_nodes
    first_edge = np.flatnonzero(np.concatenate(([True], boss.last.to_array()[:-1])))
    last_char = np.searchsorted(boss.c, first_edge, side="right") - 1
    pred = np.arange(n_nodes)
    wm = boss.w_minus.to_array()
    for sym in range(1, SIGMA):
        targets = np.flatnonzero(last_char == sym)
        incoming = np.flatnonzero((boss.w == sym) & wm)
        if len(targets) != len(incoming):
            raise UsageError(
                f"inconsistent graph: {len(targets)} nodes end in {SYMBOLS[sym]} "
                f"but {len(incoming)} distinct incoming edges carry it")
        pred[targets] = node[incoming]
    chars = np.zeros((n_nodes, k), dtype=np.int64)
    cur = np.arange(n_nodes)
    alive = np.ones(n_nodes, dtype=bool)
    for pos in range(k - 1, -1, -1):
        ch = last_char[cur]
        alive &= ch != 0
        chars[alive, pos] = ch[alive]
        cur = np.where(alive, pred[cur], cur)
    table = np.frombuffer(SYMBOLS.encode(), dtype=np.uint8)
    return [row.tobytes().decode() for row in table[chars]]


def decode_edges(boss: ColoredBoss) -> list[Edge]:
    """Every edge as (source label, edge symbol, color, coverage), in BOSS order."""
    labels = node_labels(boss)
    node = boss.node_of_edge
    return [
        Edge(labels[node[e]], SYMBOLS[boss.w[e]], int(boss.colors[e]), int(boss.coverage[e]))
        for e in range(boss.m)
    ]


def kmer_counts(boss: ColoredBoss, color: int, full_only: bool = True) -> Counter:
    """Multiset ``{label + symbol: coverage}`` of one color's edges.

    With ``full_only`` the padded edges and the ``$`` sink edges are left
    out, leaving exactly the (k+1)-mers that occur in the genome's reads.
    """
    out: Counter = Counter()
    for e in decode_edges(boss):
        if e.color != color:
            continue
        if full_only and ("$" in e.label or e.symbol == "$"):
            continue
        out[e.label + e.symbol] += e.coverage
    return out


# -- space -------------------------------------------------------------------

@dataclass(frozen=True)
class SpaceReport:
    """Bit accounting for one graph.

    ``core_bits`` is the succinct model ``3m + 2m + sigma * ceil(log2 m)``.
    The remaining model fields follow the same accounting for colors and
    the per-edge arrays; ``stored_bits`` lists what the in-memory containers
    actually occupy.
    """

    m: int
    g: int
    core_bits: int
    colors_bits: int
    coverage_bits: int
    lcs_bits: int
    kl_bits: int
    stored_bits: dict

    @property
    def model_bits(self) -> int:
        return self.core_bits + self.colors_bits + self.coverage_bits + self.lcs_bits + self.kl_bits

    @property
    def stored_total(self) -> int:
        return sum(self.stored_bits.values())


def ceil_log2(x: int) -> int:
    return (x - 1).bit_length() if x > 1 else 0


def space_report(boss: ColoredBoss) -> SpaceReport:
    m, g = boss.m, boss.g
    core = 3 * m + 2 * m + SIGMA * ceil_log2(m)
    colors = m if g == 2 else m * ceil_log2(g)
    stored = {
        "w": boss.w.nbytes * 8,
        "w_minus": boss.w_minus.nbits(),
        "last": boss.last.nbits(),
        "c": boss.c.nbytes * 8,
        "colors": boss.colors.nbytes * 8,
        "coverage": boss.coverage.nbytes * 8,
        "lcs": boss.lcs.nbytes * 8,
        "kl": boss.kl.nbytes * 8,
    }
    return SpaceReport(
        m=m, g=g, core_bits=core, colors_bits=colors,
        coverage_bits=32 * m,
        lcs_bits=m * boss.lcs.itemsize * 8,
        kl_bits=m * boss.kl.itemsize * 8,
        stored_bits=stored,
    )


# -- persistence -------------------------------------------------------------

def boss_to_bytes(boss: ColoredBoss) -> bytes:
    return _binio.dumps(BOSS_MAGIC, boss.arrays())


def boss_from_bytes(blob: bytes) -> ColoredBoss:
    a = _binio.loads(BOSS_MAGIC, blob)
    return ColoredBoss(
        k=int(a["k"][0]), w=a["w"], w_minus=BitSeq(a["w_minus"]), last=BitSeq(a["last"]),
        c=a["c"], colors=a["colors"], coverage=a["coverage"], lcs=a["lcs"], kl=a["kl"],
        genome_ids=tuple(int(x) for x in a["genome_ids"]),
    )


def save_boss(boss: ColoredBoss, path: str | os.PathLike) -> None:
    _binio.atomic_write(path, boss_to_bytes(boss))


def load_boss(path: str | os.PathLike) -> ColoredBoss:
    with open(path, "rb") as fh:
        return boss_from_bytes(fh.read())


BOSS_TSV_COLUMNS = ("i", "last", "Node", "W", "W-", "colors", "coverage", "LCS", "KL")


def write_boss_tsv(boss: ColoredBoss, out) -> None:
    labels = node_labels(boss)
    node = boss.node_of_edge
    last = boss.last.to_array()
    wm = boss.w_minus.to_array()
    lines = [f"# k={boss.k} genomes={','.join(map(str, boss.genome_ids))}", "\t".join(BOSS_TSV_COLUMNS)]
    for e in range(boss.m):
        lines.append("\t".join(map(str, (
            e + 1, int(last[e]), labels[node[e]], SYMBOLS[boss.w[e]], int(wm[e]),
            int(boss.colors[e]), int(boss.coverage[e]), int(boss.lcs[e]), int(boss.kl[e]),
        ))))
    text = "\n".join(lines) + "\n"
    if hasattr(out, "write"):
        out.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def read_boss_tsv(path) -> ColoredBoss:
    """Rebuild a graph from :func:`write_boss_tsv` output; ``c`` is recomputed from the labels."""
    with open(path) as fh:
        meta = fh.readline().lstrip("#").split()
        info = dict(item.split("=", 1) for item in meta)
        header = fh.readline().rstrip("\n").split("\t")
        if tuple(header) != BOSS_TSV_COLUMNS:
            raise UsageError(f"unexpected graph TSV header {header}")
        rows = [line.rstrip("\n").split("\t") for line in fh if line.strip()]
    k = int(info["k"])
    genome_ids = tuple(int(x) for x in info["genomes"].split(",")) if info.get("genomes") else ()
    labels = [r[2] for r in rows]
    f_edge = np.array([SYMBOLS.index(lab[-1]) for lab in labels], dtype=np.int64)
    counts = np.bincount(f_edge, minlength=SIGMA)
    ldt = _label_dtype(k)
    return ColoredBoss(
        k=k,
        w=np.array([SYMBOLS.index(r[3]) for r in rows], dtype=np.uint8),
        w_minus=BitSeq([int(r[4]) for r in rows]),
        last=BitSeq([int(r[1]) for r in rows]),
        c=np.concatenate(([0], np.cumsum(counts)[:-1])).astype(np.int64),
        colors=np.array([int(r[5]) for r in rows], dtype=_color_dtype(genome_ids)),
        coverage=np.array([int(r[6]) for r in rows], dtype=np.uint32),
        lcs=np.array([int(r[7]) for r in rows], dtype=ldt),
        kl=np.array([int(r[8]) for r in rows], dtype=ldt),
        genome_ids=genome_ids,
    )


__all__ = [
    "ColoredBoss", "Edge", "SpaceReport", "SYMBOLS", "SIGMA", "build_colored_boss",
    "decode_edges", "node_labels", "kmer_counts", "space_report", "save_boss", "load_boss",
    "boss_to_bytes", "boss_from_bytes", "write_boss_tsv", "read_boss_tsv", "ceil_log2",
]
