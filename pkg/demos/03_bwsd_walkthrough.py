"""
Distances from run lengths
==========================

The color bits of the full-length edges form a binary string. Its runs
give a histogram, and the histogram gives two distances.
"""

from colorboss import bwsd
from colorboss.boss import build_colored_boss
from colorboss.datasets import TOY_ALPHA, toy_pair
from colorboss.text_index import build_collection_index

graph = build_colored_boss(build_collection_index(toy_pair(3)), 3)
alpha = bwsd.extract_alpha(graph, (0, 1))
print("alpha:", "".join(map(str, alpha.bits)))

runs = bwsd.run_length(alpha.bits)
print(runs)
hist = bwsd.histogram(runs)
print("t =", hist.t, " s =", hist.s)
print(f"D_M = {bwsd.expectation_distance(hist):.6f}")
print(f"D_E = {bwsd.entropy_distance(hist):.6f}")

# Coverage weighting: a 0 followed by a 1 on the same node and symbol is a
# shared (k+1)-mer. With coverages 4 and 3 it turns into seven unit runs.
print("\nblock runs for (4, 3):", bwsd.block_runs(4, 3))
expanded = bwsd.expand_coverage(bwsd.run_length(TOY_ALPHA), [(4, 4, 3)])
h = bwsd.histogram(expanded)
print("t =", h.t, " s =", h.s)
print(f"D_M = {bwsd.expectation_distance(h):.6f}  D_E = {bwsd.entropy_distance(h):.6f}")

# Built from actual reads the numbers differ: the extra ACTC reads also add
# a shared CTC -> $ edge, which the hand-made alpha above leaves out.
cov_graph = build_colored_boss(build_collection_index(toy_pair(3, coverage=True)), 3)
mats = bwsd.all_pairs(cov_graph, use_coverage=True, labels=["S1", "S2"])
print("\ncoverage graph, D_M matrix:\n", mats.d_m)
print(bwsd.format_phylip(mats.d_e, mats.labels))
