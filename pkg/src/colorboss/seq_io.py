"""FASTA/FASTQ ingestion and per-genome read collections.

Reads are kept as plain upper-case strings over ``ACGNT``. Quality strings
are parsed only far enough to validate the record and then dropped.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence

from .errors import EmptyCollectionError, InvalidSymbolError, ParseError, UsageError

log = logging.getLogger(__name__)

ALPHABET = "ACGNT"
_VALID = frozenset(ALPHABET)
FORMATS = ("fasta", "fastq", "auto")


@dataclass(frozen=True)
class Read:
    symbols: str
    source_file: str = ""
    ordinal: int = 0
    name: str = ""

    def __len__(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True)
class GenomeCollection:
    """One genome's reads, reversed and ready for indexing.

    ``dropped`` counts the reads discarded for being shorter than ``k``.
    """

    genome_id: int
    reads: tuple[Read, ...]
    label: str = ""
    dropped: int = 0
    reversed: bool = True

    @property
    def total_length(self) -> int:
        # one separator per read
        return sum(len(r) for r in self.reads) + len(self.reads)

    def __len__(self) -> int:
        return len(self.reads)


def _check_symbols(seq: str, record: str, path: str, line: int) -> None:
    bad = set(seq) - _VALID
    if bad:
        # report the first offending symbol in sequence order
        sym = next(c for c in seq if c in bad)
        raise InvalidSymbolError(sym, record, path, line)


def detect_format(path: str | os.PathLike) -> str:
    with open(path, "rb") as fh:
        for raw in fh:
            s = raw.strip()
            if not s:
                continue
            if s.startswith(b">"):
                return "fasta"
            if s.startswith(b"@"):
                return "fastq"
            raise ParseError(f"cannot detect format from first byte {s[:1]!r}", str(path), None)
    return "fasta"  # empty file: nothing to parse either way


def _iter_fasta(fh: Iterable[str], path: str) -> Iterator[Read]:
    name = None
    chunks: list[str] = []
    start_line = 0
    ordinal = 0
    for lineno, line in enumerate(fh, 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith(">"):
            if name is not None:
                yield _finish_fasta(name, chunks, path, start_line, ordinal)
                ordinal += 1
            name = line[1:].strip()
            chunks = []
            start_line = lineno
        else:
            if name is None:
                raise ParseError("sequence data before first '>' header", path, lineno)
            seq = line.upper()
            _check_symbols(seq, name, path, lineno)
            chunks.append(seq)
    if name is not None:
        yield _finish_fasta(name, chunks, path, start_line, ordinal)


def _finish_fasta(name: str, chunks: list[str], path: str, line: int, ordinal: int) -> Read:
    seq = "".join(chunks)
    if not seq:
        raise ParseError(f"record {name!r} has an empty sequence", path, line)
    return Read(seq, path, ordinal, name)


def _iter_fastq(fh: Iterable[str], path: str) -> Iterator[Read]:
    lines = enumerate(fh, 1)
    ordinal = 0
    for lineno, line in lines:
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        if not line.startswith("@"):
            raise ParseError(f"expected '@' header, found {line[:20]!r}", path, lineno)
        name = line[1:].strip()
        header_line = lineno
        chunks: list[str] = []
        for lineno, line in lines:
            line = line.strip()
            if line.startswith("+"):
                break
            seq = line.upper()
            _check_symbols(seq, name, path, lineno)
            chunks.append(seq)
        else:
            raise ParseError(f"record {name!r} has no '+' separator line", path, header_line)
        seq = "".join(chunks)
        if not seq:
            raise ParseError(f"record {name!r} has an empty sequence", path, header_line)
        # quality may wrap over several lines; consume until it covers the sequence
        qlen = 0
        while qlen < len(seq):
            try:
                lineno, line = next(lines)
            except StopIteration:
                raise ParseError(f"record {name!r} has truncated quality", path, header_line) from None
            qlen += len(line.strip())
        if qlen != len(seq):
            raise ParseError(
                f"record {name!r}: quality length {qlen} != sequence length {len(seq)}",
                path,
                lineno,
            )
        yield Read(seq, path, ordinal, name)
        ordinal += 1


def parse_reads(path: str | os.PathLike, format: str = "auto") -> list[Read]:
    """Parse every read of a FASTA or FASTQ file, in file order.

    Lower-case letters are upper-cased. Any symbol outside ``ACGNT`` raises
    :class:`InvalidSymbolError`; structural problems raise :class:`ParseError`
    carrying the offending line number.
    """
    if format not in FORMATS:
        raise UsageError(f"unknown format {format!r}; expected one of {FORMATS}")
    path = os.fspath(path)
    if format == "auto":
        format = detect_format(path)
    with open(path, "rt", encoding="ascii", errors="replace") as fh:
        it = _iter_fasta(fh, path) if format == "fasta" else _iter_fastq(fh, path)
        return list(it)


def write_fasta(reads: Iterable[Read | str], out: str | os.PathLike | IO[str], width: int = 0) -> None:
    _write(reads, out, lambda i, r: _fasta_record(i, r, width))


def write_fastq(reads: Iterable[Read | str], out: str | os.PathLike | IO[str]) -> None:
    _write(reads, out, _fastq_record)


def _name(i: int, r: Read | str) -> tuple[str, str]:
    if isinstance(r, Read):
        return (r.name or f"r{i}"), r.symbols
    return f"r{i}", r


def _fasta_record(i: int, r: Read | str, width: int) -> str:
    name, seq = _name(i, r)
    if width > 0:
        seq = "\n".join(seq[p:p + width] for p in range(0, len(seq), width))
    return f">{name}\n{seq}\n"


def _fastq_record(i: int, r: Read | str) -> str:
    name, seq = _name(i, r)
    return f"@{name}\n{seq}\n+\n{'I' * len(seq)}\n"


def _write(reads, out, fmt) -> None:
    if hasattr(out, "write"):
        for i, r in enumerate(reads):
            out.write(fmt(i, r))
        return
    with open(out, "w") as fh:
        for i, r in enumerate(reads):
            fh.write(fmt(i, r))


def prepare_collection(
    reads: Sequence[Read | str],
    genome_id: int,
    k: int,
    label: str = "",
    reverse: bool = True,
) -> GenomeCollection:
    """Reverse each read and drop those shorter than ``k``.

    The reversal puts the de Bruijn node order (co-lexicographic) in reach of
    a plain suffix sort. No ``$`` padding is materialized here.
    """
    if k < 1:
        raise UsageError(f"k must be >= 1, got {k}")
    kept = []
    dropped = 0
    for i, r in enumerate(reads):
        if not isinstance(r, Read):
            r = Read(r, "", i)
        if len(r.symbols) < k:
            dropped += 1
            continue
        seq = r.symbols[::-1] if reverse else r.symbols
        kept.append(Read(seq, r.source_file, r.ordinal, r.name))
    if dropped:
        log.warning("genome %s: dropped %d read(s) shorter than k=%d", label or genome_id, dropped, k)
    if not kept:
        raise EmptyCollectionError(
            f"genome {label or genome_id}: all {dropped} read(s) are shorter than k={k}"
        )
    return GenomeCollection(genome_id, tuple(kept), label or str(genome_id), dropped, reverse)


def load_genome(path: str | os.PathLike, genome_id: int, k: int, label: str | None = None,
                format: str = "auto") -> GenomeCollection:
    """Parse ``path`` and prepare it as genome ``genome_id``; label defaults to the file stem."""
    reads = parse_reads(path, format)
    return prepare_collection(reads, genome_id, k, label or Path(path).stem)
