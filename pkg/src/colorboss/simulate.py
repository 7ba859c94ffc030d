"""Synthetic genomes evolved along a known tree, and reads sampled from them."""

from __future__ import annotations

import numpy as np

from .phylo import Node, PhyloTree, random_tree

_BASES = np.frombuffer(b"ACGT", dtype=np.uint8)


def random_genome(length: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, 4, size=length, dtype=np.uint8)


def mutate(genome: np.ndarray, rate: float, rng: np.random.Generator) -> np.ndarray:
    """Substitute each site with probability ``rate`` by one of the other three bases."""
    out = genome.copy()
    hit = rng.random(len(out)) < rate
    out[hit] = (out[hit] + rng.integers(1, 4, size=int(hit.sum()), dtype=np.uint8)) % 4
    return out


def evolve(tree: PhyloTree, length: int, rate: float, rng: np.random.Generator) -> dict[str, str]:
    """Leaf genomes after mutating a random ancestor down each branch.

    A branch of length ``b`` applies substitutions at per-site rate ``b * rate``.
    """
    out = {}
    stack: list[tuple[Node, np.ndarray]] = [(tree.root, random_genome(length, rng))]
    while stack:
        node, seq = stack.pop()
        if node.is_leaf:
            out[node.label] = _BASES[seq].tobytes().decode()
            continue
        for child in node.children:
            stack.append((child, mutate(seq, min(1.0, child.length * rate), rng)))
    return out


def sample_reads(genome: str, read_length: int, depth: float, rng: np.random.Generator) -> list[str]:
    """Error-free reads at uniform positions, enough for ``depth``-fold coverage."""
    if read_length > len(genome):
        return [genome]
    n = max(1, int(round(depth * len(genome) / read_length)))
    starts = np.sort(rng.integers(0, len(genome) - read_length + 1, size=n))
    return [genome[s:s + read_length] for s in starts]


def simulate_dataset(n_genomes: int, length: int, rate: float, read_length: int, depth: float,
                     seed: int = 0) -> tuple[PhyloTree, dict[str, list[str]]]:
    """A random tree on ``G1..Gn`` and each leaf's reads."""
    rng = np.random.default_rng(seed)
    labels = [f"G{i + 1}" for i in range(n_genomes)]
    tree = random_tree(labels, rng)
    genomes = evolve(tree, length, rate, rng)
    return tree, {lab: sample_reads(genomes[lab], read_length, depth, rng) for lab in labels}
