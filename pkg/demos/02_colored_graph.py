"""
A colored BOSS graph for two toy genomes
========================================

Every row is one edge: a node label (k symbols), an outgoing symbol W and
the genome (color) that contributes it.
"""

from colorboss.boss import SYMBOLS, build_colored_boss, node_labels, space_report
from colorboss.datasets import toy_pair
from colorboss.text_index import build_collection_index

k = 3
graph = build_colored_boss(build_collection_index(toy_pair(k)), k)
labels = node_labels(graph)
last, w_minus = graph.last.to_array(), graph.w_minus.to_array()

print(f"{'e':>2} last node W W- color cov lcs kl")
for e in range(graph.m):
    print(f"{e + 1:>2} {last[e]:>4} {labels[graph.node_of_edge[e]]} {SYMBOLS[graph.w[e]]} "
          f"{w_minus[e]:>2} {graph.colors[e]:>5} {graph.coverage[e]:>3} {graph.lcs[e]:>3} {graph.kl[e]:>2}")

# ACT has two C-edges, one per genome. Both stay in the table.
print("\nC array:", graph.c.tolist())

# The plain BOSS core costs 5 bits per edge plus the C array.
rep = space_report(graph)
print("core bits:", rep.core_bits, " color bits:", rep.colors_bits)
for name, bits in rep.stored_bits.items():
    print(f"  stored {name:<9} {bits} bits")

# Rows with kl < k are $-padded nodes; they never enter the distance.
print("full nodes:", int((graph.kl == k).sum()), "of", graph.m, "edges")
