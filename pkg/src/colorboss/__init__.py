"""Genome distances from raw reads through a colored BOSS de Bruijn graph."""

from __future__ import annotations

from .bitseq import BitSeq, ColorIndex
from .boss import ColoredBoss, build_colored_boss, decode_edges, kmer_counts, space_report
from .bwsd import (
    BwsdHistogram,
    DistanceMatrices,
    all_pairs,
    entropy_distance,
    expectation_distance,
    extract_alpha,
    histogram,
    pair_histogram,
    run_length,
)
from .merge import IndexStore, MergePlan, merge_indexes
from .phylo import PhyloTree, neighbor_joining, parse_newick, robinson_foulds, to_newick
from .pipeline import PipelineConfig, distance_matrices, run_pipeline
from .seq_io import GenomeCollection, Read, load_genome, parse_reads, prepare_collection
from .text_index import CollectionIndex, build_collection_index, build_lcp, build_suffix_array

__version__ = "0.1.0"
