"""
Rank and select on a bit vector
===============================
"""

import time

import numpy as np

from colorboss.bitseq import BitSeq, ColorIndex

bits = BitSeq([1, 0, 1, 1, 0, 0, 1, 0])
print(bits)
print("rank1(i) for i = 0..8:", [bits.rank1(i) for i in range(9)])
# select is 1-based in j and returns a 0-based position
print("select1(j) for j = 1..4:", [bits.select1(j) for j in range(1, 5)])
print("select0(2):", bits.select0(2))

# A larger vector: compare against cumulative sums.
rng = np.random.default_rng(0)
raw = rng.integers(0, 2, 1_000_000).astype(np.uint8)
big = BitSeq(raw)
prefix = np.concatenate([[0], np.cumsum(raw)])
probe = rng.integers(0, len(raw) + 1, 10_000)
start = time.perf_counter()
ranks = [big.rank1(int(i)) for i in probe]
print(f"\n10k rank queries in {time.perf_counter() - start:.3f} s, all correct:",
      ranks == prefix[probe].tolist())
j = big.ones // 2
print(f"select1({j}) = {big.select1(j)}, rank1 just after = {big.rank1(big.select1(j) + 1)}")

# One bit vector per color over a color array.
colors = np.array([0, 1, 0, 2, 1, 0, 2, 2])
ci = ColorIndex(colors, (0, 1, 2))
for c in (0, 1, 2):
    print(f"color {c}: count={ci.count(c)} positions={ci.positions(c).tolist()}")
