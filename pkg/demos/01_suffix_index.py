"""
Sorted suffixes of a read collection
====================================

Builds the suffix array, LCP and BWT of a single string, then the joint
tables of two tiny genomes whose reads are reversed and concatenated.
"""

import numpy as np

from colorboss.seq_io import prepare_collection
from colorboss.text_index import build_bwt, build_collection_index, build_lcp, build_suffix_array

# A single string first. "$" sorts before every letter.
text = "abracadabra$"
sa = build_suffix_array(text)
print("SA  ", (sa + 1).tolist())
print("LCP ", build_lcp(text, sa).tolist())
print("BWT ", "".join(map(chr, build_bwt(text, sa))))

# Two genomes: S1 has two reads, S2 has one. Reads are stored reversed.
s1 = prepare_collection(["TACTCA", "TACACT"], 0, 3, label="S1")
s2 = prepare_collection(["GACTCG"], 1, 3, label="S2")
print("reversed reads:", [r.symbols for r in s1.reads + s2.reads])

index = build_collection_index([s1, s2])
print(f"\n{'i':>3} {'bwt':>4} {'lcp':>3} {'cl':>3} {'da':>3}  context")
for i in range(index.n_total):
    print(f"{i + 1:>3} {index.symbol(int(index.bwt[i])):>4} {int(index.lcp[i]):>3} "
          f"{int(index.cl[i]):>3} {int(index.da[i]):>3}  {index.context(i)}")

# Each genome owns as many rows as it has symbols (separators included).
print("\nrows per genome:", np.bincount(index.da).tolist())
