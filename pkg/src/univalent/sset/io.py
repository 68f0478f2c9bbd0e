"""Text format for truncated simplicial sets.

::

    # the horn with faces 01 and 12
    sizes 3 5 7
    d 1 0 = 1 2 0 1 2
    d 1 1 = 0 1 0 1 2
    ...
    s 0 0 = 2 3 4

``sizes`` lists the level sizes from level 0 up to the truncation level;
simplices of level ``n`` are ``0 .. size-1``.  ``d n i`` gives ``d_i`` on
level ``n`` and ``s n i`` gives ``s_i`` on level ``n``, one target index per
simplex.  Every face and degeneracy table must be present exactly once.
"""

from __future__ import annotations

from ..fincat import DomainError
from ..textio import FormatError, logical_lines, parse_int
from .simplex import TruncatedSSet


def loads(text: str, source: str = "") -> TruncatedSSet:
    sizes = None
    tables: dict = {}
    where: dict = {}
    for number, line in logical_lines(text):
        head, *rest = line.split()
        if head == "sizes":
            if sizes is not None:
                raise FormatError("duplicate 'sizes' line", number, source)
            sizes = [parse_int(t, number, "level size") for t in rest]
            if not sizes or any(s < 0 for s in sizes):
                raise FormatError("level sizes must be non-negative and non-empty", number, source)
            continue
        if head not in ("d", "s"):
            raise FormatError(f"unknown directive {head!r}", number, source)
        if sizes is None:
            raise FormatError("'sizes' must come before any table", number, source)
        if len(rest) < 3 or rest[2] != "=":
            raise FormatError(f"expected '{head} <level> <index> = ...'", number, source)
        n, i = parse_int(rest[0], number, "level"), parse_int(rest[1], number, "index")
        top = len(sizes) - 1
        if head == "d":
            ok, src, dst = 1 <= n <= top and 0 <= i <= n, n, n - 1
        else:
            ok, src, dst = 0 <= n < top and 0 <= i <= n, n, n + 1
        if not ok:
            raise FormatError(f"no operator {head}_{i} on level {n}", number, source)
        values = [parse_int(t, number, "simplex index") for t in rest[3:]]
        if len(values) != sizes[src]:
            raise FormatError(f"{head} {n} {i} needs {sizes[src]} entries, got {len(values)}", number, source)
        for v in values:
            if not 0 <= v < sizes[dst]:
                raise FormatError(f"simplex index {v} out of range for level {dst}", number, source)
        key = (head, n, i)
        if key in tables:
            raise FormatError(f"duplicate table {head} {n} {i}", number, source)
        tables[key] = dict(enumerate(values))
        where[key] = number
    if sizes is None:
        raise FormatError("missing 'sizes' line", 0, source)
    top = len(sizes) - 1
    for n in range(1, top + 1):
        for i in range(n + 1):
            if ("d", n, i) not in tables:
                raise FormatError(f"missing table d {n} {i}", 0, source)
    for n in range(top):
        for i in range(n + 1):
            if ("s", n, i) not in tables:
                raise FormatError(f"missing table s {n} {i}", 0, source)
    faces = {(n, i): t for (h, n, i), t in tables.items() if h == "d"}
    degs = {(n, i): t for (h, n, i), t in tables.items() if h == "s"}
    try:
        return TruncatedSSet.from_tables([range(s) for s in sizes], faces, degs, name=source)
    except DomainError as exc:
        raise FormatError(str(exc), 0, source) from None


def load(path: str) -> TruncatedSSet:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), source=str(path))


def dumps(x: TruncatedSSet, comment: str = "") -> str:
    """Serialize with simplices renumbered by their position in each level."""
    pos = {n: {s: i for i, s in enumerate(x.at[n])} for n in x.at}
    out = [f"# {line}" for line in comment.splitlines()]
    out.append("sizes " + " ".join(str(len(x.at[n])) for n in range(x.N + 1)))
    for n in range(1, x.N + 1):
        for i in range(n + 1):
            out.append(f"d {n} {i} = " + " ".join(str(pos[n - 1][x.d(n, i, s)]) for s in x.at[n]))
    for n in range(x.N):
        for i in range(n + 1):
            out.append(f"s {n} {i} = " + " ".join(str(pos[n + 1][x.s(n, i, s)]) for s in x.at[n]))
    return "\n".join(out) + "\n"
