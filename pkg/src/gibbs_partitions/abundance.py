"""Observed abundance files: ``species,count`` CSV or one integer per line."""
from __future__ import annotations

import csv
import io
import os
from typing import TextIO

from .structures import ObservedSample


class AbundanceError(ValueError):
    """Malformed abundance input; ``line`` is 1-based (0 if not line-specific)."""

    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


def _parse_count(text: str, line: int) -> int:
    try:
        value = int(text.strip())
    except ValueError:
        raise AbundanceError(f"count {text.strip()!r} is not an integer", line) from None
    if value < 1:
        raise AbundanceError(f"count must be positive, got {value}", line)
    return value


def parse_abundance_text(text: str) -> ObservedSample:
    rows = [(i, r) for i, r in enumerate(csv.reader(io.StringIO(text)), start=1)
            if r and any(c.strip() for c in r)]
    if not rows:
        raise AbundanceError("no records")
    header = [c.strip().lower() for c in rows[0][1]]
    if header == ["species", "count"]:
        rows = rows[1:]
        two_column = True
    else:
        two_column = len(rows[0][1]) == 2
    seen: dict[str, int] = {}
    counts: list[int] = []
    for line, row in rows:
        if two_column:
            if len(row) != 2:
                raise AbundanceError(f"expected 2 fields, got {len(row)}", line)
            species = row[0].strip()
            if not species:
                raise AbundanceError("empty species id", line)
            if species in seen:
                raise AbundanceError(f"duplicate species {species!r} (first on line {seen[species]})", line)
            seen[species] = line
            counts.append(_parse_count(row[1], line))
        else:
            if len(row) != 1:
                raise AbundanceError(f"expected 1 field, got {len(row)}", line)
            counts.append(_parse_count(row[0], line))
    if not counts:
        raise AbundanceError("no records")
    return ObservedSample(tuple(counts))


def parse_abundance(source: str | os.PathLike | TextIO) -> ObservedSample:
    """Read multiplicities in file order from a path or text stream."""
    if hasattr(source, "read"):
        return parse_abundance_text(source.read())
    with open(source, encoding="utf-8") as fh:
        return parse_abundance_text(fh.read())
