"""Static bit sequences with rank and select.

Bits are packed into 64-bit words. The rank directory has two levels: an
absolute count per 512-bit block and a 16-bit count per word relative to its
block, so ``rank1`` is a constant number of array lookups. ``select1`` binary
searches the block counts and finishes inside one word with a byte table.

Positions are 0-based. ``rank1(i)`` counts the ones among the first ``i``
bits; ``select1(j)`` is the position of the ``j``-th one (``j >= 1``), so
``rank1(select1(j) + 1) == j``. Both accept scalars or integer arrays.
"""

from __future__ import annotations

import numpy as np

from .errors import ContractViolation

_WORDS_PER_BLOCK = 8

_BYTE_POP = np.array([bin(b).count("1") for b in range(256)], dtype=np.int64)
# _BYTE_SELECT[b, r] = bit offset of the (r+1)-th set bit of byte b
_BYTE_SELECT = np.full((256, 8), -1, dtype=np.int64)
for _b in range(256):
    _r = 0
    for _bit in range(8):
        if _b >> _bit & 1:
            _BYTE_SELECT[_b, _r] = _bit
            _r += 1


class BitSeq:
    def __init__(self, bits):
        bits = np.asarray(bits, dtype=bool).ravel()
        self._n = len(bits)
        nwords = self._n // 64 + 1  # spare word so rank1(n) never indexes past the end
        nwords += -nwords % _WORDS_PER_BLOCK
        packed = np.zeros(nwords * 8, dtype=np.uint8)
        p = np.packbits(bits, bitorder="little")
        packed[: len(p)] = p
        self._words = packed.view("<u8")
        pop = np.bitwise_count(self._words).astype(np.int64)
        blocks = pop.reshape(-1, _WORDS_PER_BLOCK)
        self._block_rank = np.concatenate(([0], np.cumsum(blocks.sum(axis=1))))
        rel = np.cumsum(blocks, axis=1) - blocks
        self._word_rank = rel.astype(np.uint16).ravel()
        self._ones = int(self._block_rank[-1])

    def __len__(self) -> int:
        return self._n

    @property
    def ones(self) -> int:
        return self._ones

    def __getitem__(self, i):
        i = self._check_pos(i, self._n - 1)
        at = np.asarray(i)
        bit = (self._words[at >> 6] >> (at & 63).astype(np.uint64)) & np.uint64(1)
        return bit.astype(bool) if at.ndim else bool(bit)

    def to_array(self) -> np.ndarray:
        return np.unpackbits(self._words.view(np.uint8), bitorder="little")[: self._n].astype(bool)

    def _check_pos(self, i, hi):
        arr = np.asarray(i)
        if arr.dtype.kind not in "iu":
            raise ContractViolation(f"position must be an integer, got {arr.dtype}")
        if arr.size and (arr.min() < 0 or arr.max() > hi):
            raise ContractViolation(f"position out of range [0, {hi}]")
        return arr.astype(np.int64) if arr.ndim else int(arr)

    def rank1(self, i):
        """Number of ones in positions ``[0, i)``; ``0 <= i <= len``."""
        i = self._check_pos(i, self._n)
        scalar = not isinstance(i, np.ndarray)
        i = np.asarray(i, dtype=np.int64)
        w = i >> 6
        mask = (np.uint64(1) << (i & 63).astype(np.uint64)) - np.uint64(1)
        r = (self._block_rank[w // _WORDS_PER_BLOCK] + self._word_rank[w]
             + np.bitwise_count(self._words[w] & mask))
        return int(r) if scalar else r.astype(np.int64)

    def rank0(self, i):
        return i - self.rank1(i)

    def select1(self, j):
        """Position of the ``j``-th one, ``1 <= j <= ones``."""
        arr = np.asarray(j)
        if arr.dtype.kind not in "iu":
            raise ContractViolation("select rank must be an integer")
        if arr.size and (arr.min() < 1 or arr.max() > self._ones):
            raise ContractViolation(f"select rank out of range [1, {self._ones}]")
        scalar = arr.ndim == 0
        j = np.atleast_1d(arr).astype(np.int64)
        b = np.searchsorted(self._block_rank, j, side="left") - 1
        rem = j - self._block_rank[b]
        base = b * _WORDS_PER_BLOCK
        rel = self._word_rank.reshape(-1, _WORDS_PER_BLOCK)[b].astype(np.int64)
        wi = (rel < rem[:, None]).sum(axis=1) - 1
        w = base + wi
        rem = rem - rel[np.arange(len(j)), wi]
        word_bytes = self._words[w].view(np.uint8).reshape(-1, 8).astype(np.int64)
        bpop = _BYTE_POP[word_bytes]
        before = np.cumsum(bpop, axis=1) - bpop
        bi = (before < rem[:, None]).sum(axis=1) - 1
        rows = np.arange(len(j))
        inner = rem - before[rows, bi]
        pos = w * 64 + bi * 8 + _BYTE_SELECT[word_bytes[rows, bi], inner - 1]
        return int(pos[0]) if scalar else pos

    def select0(self, j):
        """Position of the ``j``-th zero, by binary search over :meth:`rank0`."""
        zeros = self._n - self._ones
        arr = np.atleast_1d(np.asarray(j, dtype=np.int64))
        if arr.size and (arr.min() < 1 or arr.max() > zeros):
            raise ContractViolation(f"select rank out of range [1, {zeros}]")
        lo = np.zeros(len(arr), dtype=np.int64)
        hi = np.full(len(arr), self._n, dtype=np.int64)
        while np.any(lo < hi):
            mid = (lo + hi) // 2
            go = self.rank0(mid + 1) < arr
            lo = np.where(go, mid + 1, lo)
            hi = np.where(go, hi, mid)
        return int(lo[0]) if np.ndim(j) == 0 else lo

    def nbits(self) -> int:
        """Bits held by the packed payload and the rank directory."""
        return (self._words.nbytes + self._block_rank.nbytes + self._word_rank.nbytes) * 8

    def __eq__(self, other):
        return isinstance(other, BitSeq) and self._n == other._n and np.array_equal(
            self._words, other._words)

    def __repr__(self) -> str:
        shown = "".join("1" if b else "0" for b in self.to_array()[:64])
        return f"BitSeq({shown}{'...' if self._n > 64 else ''}, n={self._n})"


class ColorIndex:
    """One :class:`BitSeq` per color over a color sequence: ``B_c[i] = colors[i] == c``."""

    def __init__(self, colors, palette=None):
        colors = np.asarray(colors)
        if palette is None:
            palette = np.unique(colors)
        self.colors = colors
        self.bits = {int(c): BitSeq(colors == c) for c in palette}

    def rank(self, color: int, i):
        """Occurrences of ``color`` among the first ``i`` entries."""
        return self.bits[color].rank1(i)

    def select(self, color: int, j):
        return self.bits[color].select1(j)

    def count(self, color: int) -> int:
        return self.bits[color].ones if color in self.bits else 0

    def positions(self, color: int) -> np.ndarray:
        b = self.bits[color]
        if b.ones == 0:
            return np.zeros(0, dtype=np.int64)
        return b.select1(np.arange(1, b.ones + 1))
