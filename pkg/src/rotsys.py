"""Text formats: "rotsys v1" plane graphs and `u>v` orientation lists.

rotsys v1:
    n l root outer_hint
    v: u1 u2 ... ud          (n lines, counterclockwise neighbour order)

`outer_hint` is `-` or the outer face's boundary vertex sequence. Blank lines and
`#` comments are ignored everywhere.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from .errors import RotsysFormatError
from .plane_graph import PlaneGraph, build

logger = logging.getLogger(__name__)

VALID_L = (5, 6, 7)


@dataclass(frozen=True)
class RotsysDocument:
    graph: PlaneGraph
    l: int


def _content_lines(text: str) -> list[str]:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    return lines


def _ints(tokens: list[str], where: str) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise RotsysFormatError(f"{where}: expected integers, got {' '.join(tokens)!r}") from None


def parse_rotsys(text: str) -> RotsysDocument:
    lines = _content_lines(text)
    if not lines:
        raise RotsysFormatError("empty rotsys input")
    header = lines[0].split()
    if len(header) < 4:
        raise RotsysFormatError(f"header must be 'n l root outer_hint', got {lines[0]!r}")
    n, l, root = _ints(header[:3], "header")
    if l not in VALID_L:
        raise RotsysFormatError(f"l must be one of {VALID_L}, got {l}")
    hint = None if header[3:] == ["-"] else _ints(header[3:], "outer hint")

    body = lines[1:]
    if len(body) != n:
        raise RotsysFormatError(f"header announces {n} vertices but {len(body)} lines follow")
    rotation: dict[int, list[int]] = {}
    for line in body:
        head, sep, tail = line.partition(":")
        if not sep:
            raise RotsysFormatError(f"vertex line must look like 'v: u1 u2 ...', got {line!r}")
        (v,) = _ints([head.strip()], "vertex id")
        if v in rotation:
            raise RotsysFormatError(f"vertex {v} listed twice")
        rotation[v] = _ints(tail.split(), f"neighbours of {v}")
    return RotsysDocument(graph=build(rotation, root, outer_hint=hint), l=l)


def load_rotsys(path: str | Path) -> RotsysDocument:
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"rotsys file not found: {path}")
    try:
        return parse_rotsys(file_path.read_text())
    except RotsysFormatError as e:
        logger.warning("rejected %s: %s", path, e)
        raise


def format_rotsys(G: PlaneGraph, l: int) -> str:
    """Serialize G, relabelling vertices to 0..n-1 in ascending id order."""
    relabel = {v: i for i, v in enumerate(G.vertices)}
    outer = " ".join(str(relabel[v]) for v in G.outer_face.vertices)
    lines = [f"{len(G)} {l} {relabel[G.root]} {outer or '-'}"]
    for v in G.vertices:
        lines.append(f"{relabel[v]}: " + " ".join(str(relabel[u]) for u in G.rotation[v]))
    return "\n".join(lines) + "\n"


def parse_orientation(text: str) -> list[tuple[int, int]]:
    arcs = []
    for line in _content_lines(text):
        tail, sep, head = line.partition(">")
        if not sep:
            raise RotsysFormatError(f"arc line must look like 'u>v', got {line!r}")
        u, v = _ints([tail.strip(), head.strip()], "arc")
        arcs.append((u, v))
    return arcs


def load_orientation(path: str | Path) -> list[tuple[int, int]]:
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"orientation file not found: {path}")
    return parse_orientation(file_path.read_text())


def format_orientation(arcs: list[tuple[int, int]]) -> str:
    return "".join(f"{u}>{v}\n" for u, v in arcs)
