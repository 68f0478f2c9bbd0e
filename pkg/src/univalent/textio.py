"""Shared helpers for the line-oriented text formats."""

from __future__ import annotations

from typing import Iterator


class FormatError(ValueError):
    """A malformed input file; ``line`` is 1-based (0 when not tied to a line)."""

    def __init__(self, message: str, line: int = 0, source: str = ""):
        self.message = message
        self.line = line
        self.source = source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}: {message}" if line else f"{where} {message}".strip())


def logical_lines(text: str) -> Iterator[tuple[int, str]]:
    """Yield ``(line_number, content)`` with ``#`` comments and blank lines removed."""
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line


def parse_int(token: str, line: int, what: str = "integer") -> int:
    try:
        return int(token)
    except ValueError:
        raise FormatError(f"expected {what}, got {token!r}", line) from None
