"""Small hand-checkable read sets used by the tests and demos."""

from __future__ import annotations

from .seq_io import GenomeCollection, Read, prepare_collection

S1 = ("TACTCA", "TACACT")
S2 = ("GACTCG",)

# S1 and S2 with extra copies of ACTC, so ACT -C-> has coverage 4 and 3
S1_COV = S1 + ("ACTC",) * 3
S2_COV = S2 + ("ACTC",) * 2

# alpha of the toy pair and the ACT -C-> coverages, as used in the coverage walkthrough
TOY_ALPHA = (0, 0, 0, 1, 0, 0, 0, 1, 1, 0, 0, 1)
TOY_SHARED_COVERAGE = (4, 3)


def collections(reads_by_genome, k: int) -> list[GenomeCollection]:
    out = []
    for gid, reads in enumerate(reads_by_genome):
        rs = [Read(s, source_file="<toy>", ordinal=i) for i, s in enumerate(reads)]
        out.append(prepare_collection(rs, gid, k, label=f"S{gid + 1}"))
    return out


def toy_pair(k: int = 3, coverage: bool = False) -> list[GenomeCollection]:
    return collections((S1_COV, S2_COV) if coverage else (S1, S2), k)
