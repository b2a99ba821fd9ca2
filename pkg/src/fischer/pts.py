"""The ``.pts`` text format for triple systems.

::

    pts v1 <n_points>
    # optional comment lines, e.g. a manifest "# family=sym n=5"
    0 1 2
    ...

Each record is three ascending 0-based point ids separated by single
spaces. The file ends with a newline.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from .incidence import TripleSystem, TripleSystemError


class PtsFormatError(ValueError):
    pass


def dumps(system: TripleSystem, comments: Sequence[str] = ()) -> str:
    out = [f"pts v1 {system.n_points}"]
    for c in comments:
        out.append(c if c.startswith("#") else f"# {c}")
    out.extend(f"{a} {b} {c}" for a, b, c in system.lines)
    return "\n".join(out) + "\n"


def loads(text: str) -> tuple:
    """Parse ``.pts`` text into ``(system, comment_lines)``."""
    if not text.endswith("\n"):
        raise PtsFormatError("missing trailing newline")
    rows = text[:-1].split("\n")
    head = rows[0].split(" ")
    if len(head) != 3 or head[:2] != ["pts", "v1"] or not head[2].isdigit():
        raise PtsFormatError(f"bad header {rows[0]!r}")
    n = int(head[2])
    comments, lines = [], []
    for k, row in enumerate(rows[1:], start=2):
        if row.startswith("#"):
            comments.append(row)
            continue
        parts = row.split(" ")
        if len(parts) != 3 or not all(p.isdigit() for p in parts):
            raise PtsFormatError(f"line {k}: expected three point ids, got {row!r}")
        tri = [int(p) for p in parts]
        if not tri[0] < tri[1] < tri[2]:
            raise PtsFormatError(f"line {k}: point ids must be strictly ascending")
        lines.append(tri)
    try:
        return TripleSystem(n, lines), comments
    except TripleSystemError as exc:
        raise PtsFormatError(str(exc)) from exc


def manifest(family: str, n: int | None = None) -> str:
    return f"# family={family}" + ("" if n is None else f" n={n}")


def parse_manifest(comments: Sequence[str]) -> dict:
    """Key/value pairs from the first comment that contains ``family=``."""
    for c in comments:
        body = c.lstrip("#").strip()
        if "family=" in body:
            return dict(tok.split("=", 1) for tok in body.split() if "=" in tok)
    return {}


def read(path) -> tuple:
    return loads(Path(path).read_text())


def write(path, system: TripleSystem, comments: Sequence[str] = ()) -> None:
    Path(path).write_text(dumps(system, comments))
