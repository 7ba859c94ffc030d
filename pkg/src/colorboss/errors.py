"""Exception hierarchy. ``exit_code`` is what the CLI returns for each class."""

from __future__ import annotations


class ColorBossError(Exception):
    """Base class for data errors raised by this package."""

    exit_code = 2


class UsageError(ColorBossError):
    exit_code = 1


class ParseError(ColorBossError):
    """Malformed FASTA/FASTQ (or Newick/PHYLIP/TSV) input."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class InvalidSymbolError(ParseError):
    def __init__(self, symbol: str, record: str, path: str | None = None, line: int | None = None):
        self.symbol = symbol
        self.record = record
        super().__init__(f"invalid symbol {symbol!r} in record {record!r}", path, line)


class EmptyCollectionError(ColorBossError):
    pass


class EmptyGraphError(ColorBossError):
    pass


class EmptyGenomeError(ColorBossError):
    pass


class ValidationError(ColorBossError):
    pass


class LeafSetMismatch(ValidationError):
    def __init__(self, only_first: set[str], only_second: set[str]):
        self.only_first = only_first
        self.only_second = only_second
        super().__init__(
            "leaf sets differ: only in first tree "
            f"{sorted(only_first)}, only in second tree {sorted(only_second)}"
        )


class CacheError(ColorBossError):
    pass


class ResourceError(ColorBossError):
    exit_code = 3


class ContractViolation(ValueError):
    """A caller broke a documented precondition (bad index, zero coverage, ...)."""
