"""Command-line entry point: ``colorboss <command> ...``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 resource error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import bwsd
from .boss import build_colored_boss, save_boss, write_boss_tsv
from .errors import ColorBossError, UsageError
from .merge import MODES, IndexStore, merge_indexes
from .phylo import neighbor_joining, read_newick, robinson_foulds, to_newick
from .pipeline import MEASURES, PipelineConfig, distance_matrices, dump_tables, load_collections, phase, run_pipeline
from .text_index import DEFAULT_MAX_SYMBOLS, save_index, write_index_tsv


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _reads_args(p, min_inputs=2):
    p.add_argument("inputs", nargs="+", help="FASTA/FASTQ files, one per genome")
    p.add_argument("--k", type=int, default=31)
    p.add_argument("--labels", help="comma-separated genome labels (default: file stems)")
    p.add_argument("--format", choices=("auto", "fasta", "fastq"), default="auto")
    p.add_argument("--out", default=".")
    p.add_argument("--max-symbols", type=int, default=DEFAULT_MAX_SYMBOLS,
                   help="memory budget as total read symbols (exceeding it exits with code 3)")
    p.set_defaults(min_inputs=min_inputs)


def _dist_args(p):
    p.add_argument("--coverage", action="store_true", help="weight shared (k+1)-mers by coverage")
    p.add_argument("--mode", choices=MODES, default="multi")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--cache", dest="cache_dir", help="directory for reusable index files")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="colorboss", description="Genome distances from raw reads via a colored BOSS graph.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("index", help="merged SA/LCP/BWT/DA/CL tables")
    _reads_args(p, 1)
    p.add_argument("--tsv", action="store_true", help="also write index.tsv")

    p = sub.add_parser("merge", help="cache merged indexes for every pair or all genomes")
    _reads_args(p)
    p.add_argument("--mode", choices=MODES, default="multi")
    p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("boss", help="colored BOSS graph")
    _reads_args(p, 1)

    p = sub.add_parser("dist", help="BWSD distance matrices")
    _reads_args(p)
    _dist_args(p)

    p = sub.add_parser("tree", help="Neighbor-Joining tree from a PHYLIP matrix")
    p.add_argument("matrix")
    p.add_argument("--out", help="Newick file (default: standard output)")

    p = sub.add_parser("rf", help="Robinson-Foulds distance between two Newick trees")
    p.add_argument("tree_a")
    p.add_argument("tree_b")

    p = sub.add_parser("pipeline", help="reads to matrices, trees and a report")
    _reads_args(p)
    _dist_args(p)
    p.add_argument("--measure", choices=MEASURES, default="both")
    p.add_argument("--reference", help="Newick tree to score against")
    p.add_argument("--dump-tables", action="store_true")

    p = sub.add_parser("dump-tables", help="index.tsv and boss.tsv, merged and per genome")
    _reads_args(p, 1)
    return ap


def _config(args) -> PipelineConfig:
    labels = args.labels.split(",") if getattr(args, "labels", None) else None
    return PipelineConfig(
        inputs=args.inputs, labels=labels, k=args.k,
        coverage=getattr(args, "coverage", False), measure=getattr(args, "measure", "both"),
        mode=getattr(args, "mode", "multi"), out=args.out, reference=getattr(args, "reference", None),
        dump_tables=getattr(args, "dump_tables", False), threads=getattr(args, "threads", 1),
        format=args.format, cache_dir=getattr(args, "cache_dir", None),
        max_symbols=args.max_symbols, min_inputs=args.min_inputs,
    )


def _run(args) -> int:
    if args.command == "rf":
        with phase("rf"):
            print(robinson_foulds(read_newick(args.tree_a), read_newick(args.tree_b)))
        return 0
    if args.command == "tree":
        with phase("tree"):
            mat, labels = bwsd.read_phylip(args.matrix)
            text = to_newick(neighbor_joining(mat, labels)) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0

    config = _config(args)
    if args.command == "pipeline":
        for path in run_pipeline(config).values():
            print(path)
        return 0
    collections = load_collections(config)
    os.makedirs(config.out, exist_ok=True)
    store = IndexStore(config.k, max_symbols=config.max_symbols)
    if args.command == "index":
        with phase("index"):
            index = store.get(collections)
        save_index(index, os.path.join(config.out, "index.cbix"))
        if args.tsv:
            write_index_tsv(index, os.path.join(config.out, "index.tsv"))
    elif args.command == "merge":
        with phase("index"):
            merged = merge_indexes(collections, config.mode, config.k, threads=config.threads,
                                   store=IndexStore(config.k, config.out, config.max_symbols))
        for ids in merged:
            print("merged genomes " + ",".join(str(i) for i in ids))
    elif args.command == "boss":
        with phase("index"):
            index = store.get(collections)
        with phase("boss"):
            graph = build_colored_boss(index, config.k)
        save_boss(graph, os.path.join(config.out, "boss.cbbs"))
        write_boss_tsv(graph, os.path.join(config.out, "boss.tsv"))
    elif args.command == "dist":
        mats = distance_matrices(collections, config.k, config.mode, config.coverage, config.threads,
                                 IndexStore(config.k, config.cache_dir, config.max_symbols))
        bwsd.write_phylip(mats.d_m, mats.labels, os.path.join(config.out, "d_m.phy"))
        bwsd.write_phylip(mats.d_e, mats.labels, os.path.join(config.out, "d_e.phy"))
    elif args.command == "dump-tables":
        for path in dump_tables(collections, config.k, config.out, store):
            print(path)
    return 0


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except ColorBossError as exc:
        tag = getattr(exc, "phase", None)
        print(f"error{f' [{tag}]' if tag else ''}: {exc}", file=sys.stderr)
        return exc.exit_code
    except MemoryError:
        print("error: out of memory", file=sys.stderr)
        return 3
    except OSError as exc:
        tag = getattr(exc, "phase", None)
        print(f"error{f' [{tag}]' if tag else ''}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
