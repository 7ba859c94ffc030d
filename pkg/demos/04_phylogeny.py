"""
From simulated reads to a tree
==============================

Evolves genomes down a random tree, samples reads, computes both
distance matrices and compares the Neighbor-Joining trees with the truth.
"""

import numpy as np

from colorboss.phylo import neighbor_joining, robinson_foulds, to_newick
from colorboss.pipeline import distance_matrices
from colorboss.seq_io import prepare_collection
from colorboss.simulate import simulate_dataset

k = 15
truth, reads = simulate_dataset(n_genomes=6, length=5000, rate=0.05, read_length=100, depth=5.0, seed=3)
print("true tree:", to_newick(truth))

collections = [prepare_collection(r, g, k, label=name) for g, (name, r) in enumerate(reads.items())]
print("reads per genome:", [len(c) for c in collections])

for coverage in (False, True):
    mats = distance_matrices(collections, k, "multi", coverage)
    print(f"\ncoverage={'on' if coverage else 'off'}")
    print(np.array2string(mats.d_e, precision=3))
    for measure in ("expectation", "entropy"):
        tree = neighbor_joining(mats.matrix(measure), mats.labels)
        print(f"  {measure:<11} RF = {robinson_foulds(tree, truth)}  {to_newick(tree)}")
