"""Reads in, distance matrices and trees out."""

from __future__ import annotations

import contextlib
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import bwsd
from .boss import build_colored_boss, write_boss_tsv
from .errors import UsageError
from .merge import MODES, IndexStore
from .phylo import neighbor_joining, read_newick, robinson_foulds, to_newick
from .seq_io import GenomeCollection, load_genome
from .text_index import DEFAULT_MAX_SYMBOLS, write_index_tsv

log = logging.getLogger(__name__)

MEASURES = ("entropy", "expectation", "both")


@contextlib.contextmanager
def phase(name: str):
    """Tag any exception escaping the block with the pipeline phase it came from."""
    try:
        yield
    except Exception as exc:
        if not hasattr(exc, "phase"):
            exc.phase = name
        raise


@dataclass
class PipelineConfig:
    inputs: list
    labels: list | None = None
    k: int = 31
    coverage: bool = False
    measure: str = "both"
    mode: str = "multi"
    out: str = "."
    reference: str | None = None
    dump_tables: bool = False
    threads: int = 1
    format: str = "auto"
    cache_dir: str | None = None
    max_symbols: int = DEFAULT_MAX_SYMBOLS
    min_inputs: int = field(default=2, repr=False)

    def __post_init__(self):
        if self.k < 1:
            raise UsageError(f"k must be >= 1, got {self.k}")
        if self.measure not in MEASURES:
            raise UsageError(f"measure must be one of {MEASURES}")
        if self.mode not in MODES:
            raise UsageError(f"mode must be one of {MODES}")
        if len(self.inputs) < self.min_inputs:
            raise UsageError(f"need at least {self.min_inputs} input files, got {len(self.inputs)}")
        if self.labels is not None and len(self.labels) != len(self.inputs):
            raise UsageError(f"{len(self.labels)} labels for {len(self.inputs)} inputs")
        if self.threads < 1:
            raise UsageError("threads must be >= 1")

    def genome_labels(self) -> list[str]:
        if self.labels is not None:
            if len(set(self.labels)) != len(self.labels):
                raise UsageError("labels must be distinct")
            return list(self.labels)
        # file stems, with a numeric suffix when the same stem shows up again
        seen: dict[str, int] = {}
        out = []
        for p in self.inputs:
            stem = Path(p).name.split(".")[0] or "genome"
            seen[stem] = seen.get(stem, 0) + 1
            out.append(stem if seen[stem] == 1 else f"{stem}_{seen[stem]}")
        return out


def load_collections(config: PipelineConfig) -> list[GenomeCollection]:
    with phase("read"):
        return [load_genome(p, gid, config.k, label=lab, format=config.format)
                for gid, (p, lab) in enumerate(zip(config.inputs, config.genome_labels()))]


def distance_matrices(
    collections: Sequence[GenomeCollection],
    k: int,
    mode: str = "multi",
    coverage: bool = False,
    threads: int = 1,
    store: IndexStore | None = None,
) -> bwsd.DistanceMatrices:
    """D_M and D_E for every pair, through either merge strategy."""
    if len(collections) < 2:
        raise UsageError(f"need at least 2 genomes, got {len(collections)}")
    store = store or IndexStore(k)
    labels = [c.label or str(c.genome_id) for c in collections]
    by_id = {c.genome_id: c for c in collections}
    ids = [c.genome_id for c in collections]
    if mode == "multi":
        with phase("index"):
            index = store.get(collections)
        with phase("boss"):
            graph = build_colored_boss(index, k)
        with phase("bwsd"):
            return bwsd.all_pairs(graph, coverage, labels, threads)
    if mode != "pairwise":
        raise UsageError(f"mode must be one of {MODES}")
    pos = {gid: n for n, gid in enumerate(ids)}

    def job(pair):
        a, b = pair
        with phase("index"):
            index = store.get([by_id[a], by_id[b]])
        with phase("boss"):
            graph = build_colored_boss(index, k)
        with phase("bwsd"):
            return (pos[a], pos[b]), bwsd.pair_histogram(graph, (a, b), coverage)

    pairs = [(ids[x], ids[y]) for x in range(len(ids)) for y in range(x + 1, len(ids))]
    return bwsd._assemble(bwsd._run(job, pairs, threads), len(ids), labels)


def dump_tables(collections: Sequence[GenomeCollection], k: int, out: str | os.PathLike,
                store: IndexStore | None = None) -> list[str]:
    """Index and graph tables for the merged collection and for each genome alone."""
    store = store or IndexStore(k)
    os.makedirs(out, exist_ok=True)
    written = []
    targets = [("", list(collections))]
    if len(collections) > 1:
        targets += [(f"{c.label or c.genome_id}.", [c]) for c in collections]
    for prefix, cols in targets:
        with phase("index"):
            index = store.get(cols)
        path = os.path.join(out, f"{prefix}index.tsv")
        write_index_tsv(index, path)
        written.append(path)
        with phase("boss"):
            graph = build_colored_boss(index, k)
        path = os.path.join(out, f"{prefix}boss.tsv")
        write_boss_tsv(graph, path)
        written.append(path)
    return written


def run_pipeline(config: PipelineConfig) -> dict[str, str]:
    """Write both matrices, the NJ tree per requested measure and a short report."""
    collections = load_collections(config)
    store = IndexStore(config.k, config.cache_dir, config.max_symbols)
    os.makedirs(config.out, exist_ok=True)
    out = {}
    if config.dump_tables:
        for p in dump_tables(collections, config.k, os.path.join(config.out, "tables"), store):
            out[os.path.basename(p)] = p
    mats = distance_matrices(collections, config.k, config.mode, config.coverage, config.threads, store)
    for name, mat in (("d_m.phy", mats.d_m), ("d_e.phy", mats.d_e)):
        path = os.path.join(config.out, name)
        bwsd.write_phylip(mat, mats.labels, path)
        out[name] = path
    measures = ["entropy", "expectation"] if config.measure == "both" else [config.measure]
    reference = None
    if config.reference:
        with phase("reference"):
            reference = read_newick(config.reference)
    lines = [
        f"genomes\t{len(collections)}",
        f"labels\t{','.join(mats.labels)}",
        f"k\t{config.k}",
        f"mode\t{config.mode}",
        f"coverage\t{'on' if config.coverage else 'off'}",
    ]
    for measure in measures:
        with phase("tree"):
            tree = neighbor_joining(mats.matrix(measure), mats.labels)
        path = os.path.join(config.out, f"tree_{measure}.nwk")
        with open(path, "w") as fh:
            fh.write(to_newick(tree) + "\n")
        out[os.path.basename(path)] = path
        lines.append(f"clamped_branches_{measure}\t{tree.clamped}")
        if reference is not None:
            with phase("rf"):
                lines.append(f"rf_{measure}\t{robinson_foulds(tree, reference)}")
    path = os.path.join(config.out, "report.txt")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    out["report.txt"] = path
    return out
