"""Burrows-Wheeler similarity distribution and the two distances derived from it.

For a genome pair ``(i, j)``, ``i < j``, the colored graph's edges are
filtered to full-length nodes (``kl == k``) of those two colors. Writing 0
for color ``i`` and 1 for color ``j`` gives the interleaving sequence alpha;
the histogram of its run lengths is the BWSD.

Coverage weighting: an adjacent (0, 1) pair that is the same (k+1)-mer in
both genomes is replaced by a block of ``c0`` zeros and ``c1`` ones written
alternately, starting with 0. The block's runs are counted on their own and
never merge with the runs around it. Pairs with ``c0 == c1 == 1`` are left
untouched, so unit coverage leaves the histogram unchanged.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .bitseq import ColorIndex
from .boss import ColoredBoss
from .errors import ContractViolation, EmptyGenomeError, UsageError


@dataclass(frozen=True, eq=False)
class Alpha:
    """Interleaving bits of one genome pair plus what coverage weighting needs.

    ``shared[p]`` marks that positions ``p`` (a 0) and ``p + 1`` (a 1) carry
    the same (k+1)-mer.
    """

    bits: np.ndarray
    coverage: np.ndarray
    shared: np.ndarray
    pair: tuple[int, int]

    def __len__(self) -> int:
        return len(self.bits)


@dataclass(frozen=True, eq=False)
class RunSequence:
    """Runs ``bit ** length`` in order. Zero-length runs are never stored."""

    bits: np.ndarray
    lengths: np.ndarray

    def __len__(self) -> int:
        return len(self.lengths)

    def __iter__(self):
        return zip(self.bits.tolist(), self.lengths.tolist())

    def __eq__(self, other):
        return isinstance(other, RunSequence) and list(self) == list(other)

    def expand(self) -> np.ndarray:
        return np.repeat(self.bits, self.lengths).astype(np.uint8)

    def __repr__(self) -> str:
        return "RunSequence(" + " ".join(f"{b}^{n}" for b, n in self) + ")"


@dataclass(frozen=True)
class BwsdHistogram:
    """Run-length counts ``t[k]``; ``s`` is their total."""

    t: dict

    @property
    def s(self) -> int:
        return sum(self.t.values())

    @property
    def k_max(self) -> int:
        return max(self.t) if self.t else 0

    def probabilities(self) -> dict:
        s = self.s
        return {k: v / s for k, v in sorted(self.t.items())}


def _canonical(pair) -> tuple[int, int]:
    i, j = (int(x) for x in pair)
    if i == j:
        raise UsageError(f"pair needs two distinct genomes, got ({i}, {j})")
    return (i, j) if i < j else (j, i)


def extract_alpha(boss: ColoredBoss, pair: tuple[int, int]) -> Alpha:
    """Filter the graph to the pair's full-length edges and read off alpha.

    The smaller genome id always gets bit 0, whatever order ``pair`` is in.
    """
    lo, hi = _canonical(pair)
    present = set(np.unique(boss.colors).tolist())
    for g in (lo, hi):
        if g not in present:
            raise EmptyGenomeError(f"genome {g} has no edges in this graph")
    keep = (boss.kl == boss.k) & ((boss.colors == lo) | (boss.colors == hi))
    idx = np.flatnonzero(keep)
    bits = (boss.colors[idx] == hi).astype(np.uint8)
    node = boss.node_of_edge[idx]
    w = boss.w[idx]
    shared = np.zeros(len(idx), dtype=bool)
    if len(idx) > 1:
        shared[:-1] = (bits[:-1] == 0) & (bits[1:] == 1) & (node[:-1] == node[1:]) & (w[:-1] == w[1:])
    return Alpha(bits, boss.coverage[idx].astype(np.int64), shared, (lo, hi))


def run_length(bits) -> RunSequence:
    bits = np.asarray(bits, dtype=np.uint8)
    if len(bits) == 0:
        raise ContractViolation("alpha is empty")
    starts = np.flatnonzero(np.concatenate(([True], bits[1:] != bits[:-1])))
    lengths = np.diff(np.append(starts, len(bits)))
    return RunSequence(bits[starts], lengths.astype(np.int64))


def block_runs(c0: int, c1: int) -> list[int]:
    """Run lengths of ``c0`` zeros and ``c1`` ones written alternately from 0.

    Once one symbol is exhausted the rest of the other forms a single run.
    """
    if c0 < 1 or c1 < 1:
        raise ContractViolation(f"coverage must be positive, got ({c0}, {c1})")
    m = min(c0, c1)
    if c0 > c1:
        return [1] * (2 * m) + [c0 - m]
    if c0 == c1:
        return [1] * (2 * m)
    return [1] * (2 * m - 1) + [c1 - m + 1]


def shared_pairs(alpha: Alpha, runs: RunSequence | None = None) -> list[tuple[int, int, int]]:
    """``(run index, c0, c1)`` for each shared pair; the 0 ends run ``r`` and the 1 opens ``r + 1``."""
    if runs is None:
        runs = run_length(alpha.bits)
    run_of = np.repeat(np.arange(len(runs)), runs.lengths)
    cov = alpha.coverage
    return [(int(run_of[p]), int(cov[p]), int(cov[p + 1])) for p in np.flatnonzero(alpha.shared)]


def expand_coverage(runs: RunSequence, pairs: Iterable[tuple[int, int, int]]) -> RunSequence:
    """Replace each shared (0, 1) pair with its alternating coverage block.

    ``pairs`` comes from :func:`shared_pairs`. Inserted runs stay separate
    from their neighbours even when they carry the same bit.
    """
    lengths = runs.lengths.copy()
    inserts: dict[int, list[int]] = {}
    for r, c0, c1 in pairs:
        if c0 < 1 or c1 < 1:
            raise ContractViolation(f"coverage must be positive, got ({c0}, {c1})")
        if not (0 <= r < len(runs) - 1) or runs.bits[r] != 0 or runs.bits[r + 1] != 1:
            raise ContractViolation(f"run {r} is not a 0-run followed by a 1-run")
        if c0 == 1 and c1 == 1:
            continue
        lengths[r] -= 1
        lengths[r + 1] -= 1
        inserts[r] = block_runs(c0, c1)
    out_bits: list[int] = []
    out_len: list[int] = []
    for r, (b, n) in enumerate(zip(runs.bits.tolist(), lengths.tolist())):
        if n > 0:
            out_bits.append(b)
            out_len.append(n)
        # block runs alternate from 0, the trailing long run included
        for q, n2 in enumerate(inserts.get(r, ())):
            out_bits.append(q % 2)
            out_len.append(n2)
    return RunSequence(np.array(out_bits, dtype=np.uint8), np.array(out_len, dtype=np.int64))


def histogram(runs: RunSequence | Iterable[int]) -> BwsdHistogram:
    lengths = runs.lengths if isinstance(runs, RunSequence) else np.asarray(list(runs), dtype=np.int64)
    lengths = lengths[lengths > 0]
    if len(lengths) == 0:
        raise ContractViolation("no runs")
    vals, counts = np.unique(lengths, return_counts=True)
    return BwsdHistogram({int(v): int(c) for v, c in zip(vals, counts)})


def expectation_distance(hist: BwsdHistogram) -> float:
    """Mean run length minus one."""
    s = hist.s
    if s < 1:
        raise ContractViolation("empty histogram")
    total = sum(k * t for k, t in hist.t.items())
    return (total - s) / s


def entropy_distance(hist: BwsdHistogram) -> float:
    """Shannon entropy (bits) of the run-length distribution."""
    s = hist.s
    if s < 1:
        raise ContractViolation("empty histogram")
    return sum((t / s) * math.log2(s / t) for t in hist.t.values() if t)


def pair_histogram(boss: ColoredBoss, pair: tuple[int, int], use_coverage: bool = False) -> BwsdHistogram:
    """BWSD of one pair by materializing alpha (the pairwise route)."""
    alpha = extract_alpha(boss, pair)
    if len(alpha) == 0:
        raise EmptyGenomeError(f"no full-length (k+1)-mers for pair {alpha.pair}")
    runs = run_length(alpha.bits)
    if use_coverage:
        runs = expand_coverage(runs, shared_pairs(alpha, runs))
    return histogram(runs)


@dataclass(frozen=True, eq=False)
class DistanceMatrices:
    d_m: np.ndarray
    d_e: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        for mat in (self.d_m, self.d_e):
            if mat.shape != (len(self.labels), len(self.labels)):
                raise UsageError("matrix shape does not match the labels")

    def matrix(self, measure: str) -> np.ndarray:
        if measure == "expectation":
            return self.d_m
        if measure == "entropy":
            return self.d_e
        raise UsageError(f"unknown measure {measure!r}")


class MultiScanner:
    """All-pairs BWSD over one g-genome graph without materializing any alpha.

    One rank/select bit sequence per color over the filtered color array.
    For a pair ``(i, j)`` the occurrences of ``i`` are visited in order; the
    count of ``j`` between consecutive ones (a rank difference) is a 1-run,
    and stretches with none extend the current 0-run.
    """

    def __init__(self, boss: ColoredBoss):
        keep = np.flatnonzero(boss.kl == boss.k)
        self.colors = boss.colors[keep].astype(np.int64)
        self.node = boss.node_of_edge[keep]
        self.w = boss.w[keep]
        self.coverage = boss.coverage[keep].astype(np.int64)
        self.genome_ids = tuple(boss.genome_ids)
        self.index = ColorIndex(self.colors, palette=self.genome_ids)
        self._present = set(np.unique(boss.colors).tolist())

    def histogram(self, i: int, j: int, use_coverage: bool = False) -> BwsdHistogram:
        i, j = _canonical((i, j))
        for g in (i, j):
            if g not in self._present:
                raise EmptyGenomeError(f"genome {g} has no edges in this graph")
        n_i, n_j = self.index.count(i), self.index.count(j)
        if n_i + n_j == 0:
            raise EmptyGenomeError(f"no full-length (k+1)-mers for pair ({i}, {j})")
        if n_i == 0:
            return histogram([n_j])
        pos_i = self.index.positions(i)
        before = self.index.rank(j, pos_i)  # j's preceding each i
        after = np.append(before[1:], n_j)  # j's preceding the next i (or the end)
        gap = after - before
        closes = gap > 0
        closes[-1] = True
        # 0-runs end at the i's followed by at least one j (or at the last i)
        ends = np.flatnonzero(closes)
        zero_runs = np.diff(np.concatenate(([-1], ends)))
        one_runs = gap[ends]
        lead = int(before[0])
        extra: list[int] = []
        if use_coverage:
            cand = ends[(gap[ends] > 0)]
            if len(cand):
                q = self.index.select(j, before[cand] + 1)
                p = pos_i[cand]
                hit = (self.node[p] == self.node[q]) & (self.w[p] == self.w[q])
                c0, c1 = self.coverage[p], self.coverage[q]
                hit &= ~((c0 == 1) & (c1 == 1))
                run_ids = np.searchsorted(ends, cand)
                for r, a, b in zip(run_ids[hit], c0[hit], c1[hit]):
                    zero_runs[r] -= 1
                    one_runs[r] -= 1
                    extra.extend(block_runs(int(a), int(b)))
        return histogram(np.concatenate(([lead], zero_runs, one_runs, np.array(extra, dtype=np.int64))))


def all_pairs(
    boss: ColoredBoss,
    use_coverage: bool = False,
    labels: Sequence[str] | None = None,
    threads: int = 1,
) -> DistanceMatrices:
    """Distance matrices for every genome pair of a g-genome graph (the all-at-once route)."""
    ids = list(boss.genome_ids)
    g = len(ids)
    if g < 2:
        raise UsageError(f"need at least 2 genomes, got {g}")
    scanner = MultiScanner(boss)
    pairs = list(combinations(range(g), 2))

    def job(ab):
        a, b = ab
        return ab, scanner.histogram(ids[a], ids[b], use_coverage)

    return _assemble(_run(job, pairs, threads), g, labels or [str(x) for x in ids])


def _run(job, items, threads):
    if threads <= 1:
        return [job(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(job, items))


def _assemble(results, g: int, labels) -> DistanceMatrices:
    d_m = np.zeros((g, g))
    d_e = np.zeros((g, g))
    for (a, b), hist in results:
        d_m[a, b] = d_m[b, a] = expectation_distance(hist)
        d_e[a, b] = d_e[b, a] = entropy_distance(hist)
    return DistanceMatrices(d_m, d_e, tuple(labels))


# -- PHYLIP ------------------------------------------------------------------

def format_phylip(matrix: np.ndarray, labels: Sequence[str]) -> str:
    """Square PHYLIP: taxon count, then one ``label value ...`` line per taxon, 6 decimals."""
    lines = [str(len(labels))]
    for lab, row in zip(labels, matrix):
        lines.append(" ".join([lab] + [f"{v:.6f}" for v in row]))
    return "\n".join(lines) + "\n"


def write_phylip(matrix: np.ndarray, labels: Sequence[str], path) -> None:
    with open(path, "w") as fh:
        fh.write(format_phylip(matrix, labels))


def read_phylip(path) -> tuple[np.ndarray, list[str]]:
    from .errors import ParseError

    with open(path) as fh:
        lines = [ln.split() for ln in fh if ln.strip()]
    if not lines:
        raise ParseError("empty PHYLIP file", str(path), 1)
    try:
        g = int(lines[0][0])
    except ValueError:
        raise ParseError("first line must hold the taxon count", str(path), 1) from None
    if len(lines) - 1 != g:
        raise ParseError(f"expected {g} rows, found {len(lines) - 1}", str(path), None)
    labels, rows = [], []
    for no, parts in enumerate(lines[1:], 2):
        if len(parts) != g + 1:
            raise ParseError(f"row has {len(parts) - 1} values, expected {g}", str(path), no)
        labels.append(parts[0])
        rows.append([float(x) for x in parts[1:]])
    return np.array(rows), labels


__all__ = [
    "Alpha", "RunSequence", "BwsdHistogram", "DistanceMatrices", "MultiScanner",
    "extract_alpha", "run_length", "block_runs", "shared_pairs", "expand_coverage",
    "histogram", "expectation_distance", "entropy_distance", "pair_histogram", "all_pairs",
    "format_phylip", "write_phylip", "read_phylip",
]
