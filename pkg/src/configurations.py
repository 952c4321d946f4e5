"""Reducible configurations: detection, role labelling and from-scratch re-validation.

Each configuration names the vertices its surgery needs. Roles are tuples of vertex
ids so that singletons and sequences share one representation:

    PendantBlock            block, cut
    LowDegreeVertex         v
    AdjacentThrees          u, v
    ChainPendantThree       w (w0..w_{k+1}), u (u0..u_k), x
    ChainTwoMinorTriangles  w, u, x, y, z
    Sun                     v (v1..v6), u (u1..u5)
    SpecialFiveCycle        u (u1..u6)

In the chain kinds T0 = [w0 w1 u0] is the minor triangle with d(w0) = 3 and
T_i = [w_i w_{i+1} u_i] are the chain triangles.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .errors import NotInClass
from .plane_graph import Face, PlaneGraph, blocks, in_class

logger = logging.getLogger(__name__)


class ConfigKind(str, Enum):
    PENDANT_BLOCK = "PendantBlock"
    LOW_DEGREE_VERTEX = "LowDegreeVertex"
    ADJACENT_THREES = "AdjacentThrees"
    CHAIN_PENDANT_THREE = "ChainPendantThree"
    CHAIN_TWO_MINOR_TRIANGLES = "ChainTwoMinorTriangles"
    SUN = "Sun"
    SPECIAL_FIVE_CYCLE = "SpecialFiveCycle"


PRIORITY: tuple[ConfigKind, ...] = tuple(ConfigKind)

KINDS_FOR_L: dict[int, tuple[ConfigKind, ...]] = {
    5: tuple(k for k in PRIORITY if k is not ConfigKind.SPECIAL_FIVE_CYCLE),
    6: (ConfigKind.PENDANT_BLOCK, ConfigKind.LOW_DEGREE_VERTEX, ConfigKind.ADJACENT_THREES),
    7: tuple(k for k in PRIORITY if k is not ConfigKind.SUN),
}


@dataclass(frozen=True)
class Configuration:
    kind: ConfigKind
    roles: Mapping[str, tuple[int, ...]] = field(default_factory=dict)

    def one(self, name: str) -> int:
        (v,) = self.roles[name]
        return v

    def seq(self, name: str) -> tuple[int, ...]:
        return self.roles[name]

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(v for vs in self.roles.values() for v in vs)

    def sort_key(self) -> tuple:
        return (min(self.vertices, default=-1), tuple(self.roles.items()))

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind.value, "roles": {k: list(v) for k, v in self.roles.items()}}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Configuration:
        return cls(
            kind=ConfigKind(data["kind"]),
            roles={k: tuple(v) for k, v in data["roles"].items()},
        )


@dataclass(frozen=True)
class TriangleChain:
    """w = (w1..w_{k+1}), u = (u1..u_k); faces are the chain triangles T1..Tk."""

    w: tuple[int, ...]
    u: tuple[int, ...]
    faces: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.u)

    @property
    def end(self) -> int:
        return self.w[-1]

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(self.w) | frozenset(self.u)


# ── Face predicates ──────────────────────────────────────────────


def _degrees(G: PlaneGraph, face: Face) -> list[int]:
    return sorted(G.degree(v) for v in face.vertices)


def _is_444(G: PlaneGraph, fid: int) -> bool:
    f = G.face(fid)
    return G.is_triangle(fid) and G.root not in f.vertex_set and _degrees(G, f) == [4, 4, 4]


def is_minor_triangle(G: PlaneGraph, fid: int) -> bool:
    f = G.face(fid)
    return G.is_triangle(fid) and G.root not in f.vertex_set and _degrees(G, f) == [3, 4, 4]


def _triangle_face(G: PlaneGraph, a: int, b: int, c: int) -> int | None:
    target = {a, b, c}
    for fid in G.triangles_at(a):
        if G.face(fid).vertex_set == target:
            return fid
    return None


def _face_with_cycle(G: PlaneGraph, seq: tuple[int, ...]) -> int | None:
    """The face whose boundary is the cycle seq, read in either direction."""
    n = len(seq)
    fwd, back = list(seq), list(reversed(seq))
    for fid in G.faces_at(seq[0]):
        f = G.face(fid)
        if f.degree != n or not f.is_cycle():
            continue
        walk = list(f.vertices)
        for shift in range(n):
            rotated = walk[shift:] + walk[:shift]
            if rotated == fwd or rotated == back:
                return fid
    return None


def _minor_labelling(G: PlaneGraph, fid: int) -> tuple[int, list[int]]:
    """(the 3-vertex, the two 4-vertices ascending) of a minor triangle."""
    vs = G.face(fid).vertices
    three = next(v for v in vs if G.degree(v) == 3)
    return three, sorted(v for v in vs if v != three)


# ── Minor triangles and chains ───────────────────────────────────


def find_minor_triangles(G: PlaneGraph) -> list[Face]:
    """All (3,4,4)-faces avoiding the root, ordered by their sorted vertex sets."""
    found = [G.face(fid) for fid in G.triangle_ids if is_minor_triangle(G, fid)]
    return sorted(found, key=lambda f: sorted(f.vertices))


def find_triangle_chains(
    G: PlaneGraph, from_triangle: Face | int, *, maximal: bool = True
) -> list[TriangleChain]:
    """Chains of (4,4,4)-faces of G - v0 intersecting the given minor triangle.

    With maximal=False every prefix is returned too, including the length-0 chain at
    each 4-vertex of the triangle.
    """
    t0 = from_triangle if isinstance(from_triangle, Face) else G.face(from_triangle)
    if not is_minor_triangle(G, t0.id):
        return []
    three, fours = _minor_labelling(G, t0.id)
    chains: list[TriangleChain] = []

    def extend(w: tuple[int, ...], u: tuple[int, ...], faces: tuple[int, ...], used: frozenset[int]):
        grew = False
        for fid in G.triangles_at(w[-1]):
            if fid in faces or fid == t0.id or not _is_444(G, fid):
                continue
            others = sorted(x for x in G.face(fid).vertices if x != w[-1])
            if any(x in used for x in others):
                continue
            for nxt, apex in ((others[0], others[1]), (others[1], others[0])):
                grew = True
                extend(w + (nxt,), u + (apex,), faces + (fid,), used | {nxt, apex})
        if not maximal or not grew:
            chains.append(TriangleChain(w=w, u=u, faces=faces))

    for w1 in fours:
        extend((w1,), (), (), t0.vertex_set)
    return chains


# ── Per-kind candidates ──────────────────────────────────────────


def _pendant_blocks(G: PlaneGraph) -> list[Configuration]:
    if len(G) < 3 or not G.is_connected():
        return []
    decomposition = blocks(G)
    if len(decomposition.blocks) <= 1:
        return []
    found = []
    for block, cut in decomposition.leaf_blocks():
        # single-edge leaves are left to LowDegreeVertex
        if len(block) < 3:
            continue
        if G.root in block and G.root != cut:
            continue
        found.append(
            Configuration(ConfigKind.PENDANT_BLOCK, {"block": tuple(sorted(block)), "cut": (cut,)})
        )
    return found


def _low_degree(G: PlaneGraph) -> list[Configuration]:
    candidates = sorted(
        (G.degree(v), v) for v in G.vertices if v != G.root and G.degree(v) <= 2
    )
    return [Configuration(ConfigKind.LOW_DEGREE_VERTEX, {"v": (v,)}) for _, v in candidates]


def _adjacent_threes(G: PlaneGraph) -> list[Configuration]:
    found = []
    for u, v in G.edges:
        if G.root in (u, v):
            continue
        if G.degree(u) == 3 and G.degree(v) == 3:
            found.append(Configuration(ConfigKind.ADJACENT_THREES, {"u": (u,), "v": (v,)}))
    return found


def _chain_starts(G: PlaneGraph) -> Iterator[tuple[Face, int, TriangleChain]]:
    for t0 in find_minor_triangles(G):
        three, _ = _minor_labelling(G, t0.id)
        for chain in find_triangle_chains(G, t0, maximal=False):
            yield t0, three, chain


def _chain_roles(t0: Face, three: int, chain: TriangleChain) -> dict[str, tuple[int, ...]]:
    w1 = chain.w[0]
    u0 = next(v for v in t0.vertices if v not in (three, w1))
    return {"w": (three,) + chain.w, "u": (u0,) + chain.u}


def _chain_pendant_three(G: PlaneGraph) -> list[Configuration]:
    found = []
    for t0, three, chain in _chain_starts(G):
        used = chain.vertices | t0.vertex_set
        for x in sorted(G.neighbors(chain.end)):
            if x == G.root or x in used or G.degree(x) != 3:
                continue
            roles = _chain_roles(t0, three, chain) | {"x": (x,)}
            found.append(Configuration(ConfigKind.CHAIN_PENDANT_THREE, roles))
    return found


def _chain_two_minor(G: PlaneGraph) -> list[Configuration]:
    minors = find_minor_triangles(G)
    found = []
    for t0, three, chain in _chain_starts(G):
        used = chain.vertices | t0.vertex_set
        for y in sorted(G.neighbors(chain.end)):
            if y == G.root or y in used or G.degree(y) != 4:
                continue
            for other in minors:
                if other.id == t0.id or y not in other.vertex_set or other.vertex_set & used:
                    continue
                x, fours = _minor_labelling(G, other.id)
                z = next(v for v in fours if v != y)
                roles = _chain_roles(t0, three, chain) | {"x": (x,), "y": (y,), "z": (z,)}
                found.append(Configuration(ConfigKind.CHAIN_TWO_MINOR_TRIANGLES, roles))
    return found


def _sun_at(G: PlaneGraph, face: Face, v: list[int]) -> Configuration | None:
    apexes = []
    for a, b in zip(v, v[1:]):
        left, right = G.edge_faces(a, b)
        other = right if left == face.id else left
        if other == face.id or not G.is_triangle(other):
            return None
        apexes.append(next(x for x in G.face(other).vertices if x not in (a, b)))
    named = v + apexes
    if len(set(named)) != 11 or G.root in named:
        return None
    if G.degree(v[0]) != 3 or any(G.degree(x) != 4 for x in named[1:]):
        return None
    return Configuration(ConfigKind.SUN, {"v": tuple(v), "u": tuple(apexes)})


def _suns(G: PlaneGraph) -> list[Configuration]:
    found = []
    for face in G.faces:
        if face.degree != 6 or not face.is_cycle():
            continue
        walk = list(face.vertices)
        for i, start in enumerate(walk):
            if G.degree(start) != 3:
                continue
            forward = walk[i:] + walk[:i]
            backward = [forward[0]] + forward[:0:-1]
            for v in (forward, backward):
                cfg = _sun_at(G, face, v)
                if cfg is not None:
                    found.append(cfg)
    return found


def _special_five_cycles(G: PlaneGraph) -> list[Configuration]:
    def ok(x: int, d: int) -> bool:
        return x != G.root and G.degree(x) == d

    found = []
    for u1 in G.vertices:
        if not ok(u1, 3):
            continue
        for u5 in G.neighbors(u1):
            if not ok(u5, 4):
                continue
            for u6 in sorted(G.adjacency[u1] & G.adjacency[u5]):
                if not ok(u6, 4):
                    continue
                for u2 in G.neighbors(u1):
                    if u2 in (u5, u6) or not ok(u2, 4):
                        continue
                    for u3 in G.neighbors(u2):
                        if not ok(u3, 3):
                            continue
                        for u4 in G.neighbors(u3):
                            if not ok(u4, 4) or not G.has_edge(u4, u5):
                                continue
                            named = (u1, u2, u3, u4, u5, u6)
                            if len(set(named)) == 6:
                                found.append(
                                    Configuration(ConfigKind.SPECIAL_FIVE_CYCLE, {"u": named})
                                )
    return found


_FINDERS = {
    ConfigKind.PENDANT_BLOCK: _pendant_blocks,
    ConfigKind.LOW_DEGREE_VERTEX: _low_degree,
    ConfigKind.ADJACENT_THREES: _adjacent_threes,
    ConfigKind.CHAIN_PENDANT_THREE: _chain_pendant_three,
    ConfigKind.CHAIN_TWO_MINOR_TRIANGLES: _chain_two_minor,
    ConfigKind.SUN: _suns,
    ConfigKind.SPECIAL_FIVE_CYCLE: _special_five_cycles,
}


def find_configurations(G: PlaneGraph, kind: ConfigKind) -> list[Configuration]:
    """Every instance of one kind, ordered by smallest involved vertex then roles.

    LowDegreeVertex is the exception: lowest degree first, then smallest id.
    """
    found = _FINDERS[kind](G)
    if kind is ConfigKind.LOW_DEGREE_VERTEX:
        return found
    return sorted(found, key=Configuration.sort_key)


def _kinds(l: int) -> tuple[ConfigKind, ...]:
    try:
        return KINDS_FOR_L[l]
    except KeyError:
        raise ValueError(f"l must be one of {sorted(KINDS_FOR_L)}, got {l}") from None


def iter_configurations(
    G: PlaneGraph, l: int, kinds: Iterable[ConfigKind] | None = None
) -> Iterator[Configuration]:
    """Every configuration instance for this l, in detection priority order."""
    allowed = _kinds(l)
    wanted = allowed if kinds is None else tuple(k for k in allowed if k in set(kinds))
    for kind in wanted:
        yield from find_configurations(G, kind)


def detect(G: PlaneGraph, l: int, *, check_class: bool = True) -> Configuration | None:
    """The first configuration under the fixed priority, or None."""
    _kinds(l)
    if check_class and not in_class(G, l):
        raise NotInClass(f"graph contains a 4-cycle or a {l}-cycle")
    return next(iter_configurations(G, l), None)


# ── Re-validation ────────────────────────────────────────────────


def _check_chain(G: PlaneGraph, cfg: Configuration, problems: list[str]) -> None:
    w, u = cfg.seq("w"), cfg.seq("u")
    if len(w) != len(u) + 1 or len(u) < 1:
        problems.append(f"chain roles have mismatched lengths w={w} u={u}")
        return
    fid = _triangle_face(G, w[0], w[1], u[0])
    if fid is None or not is_minor_triangle(G, fid):
        problems.append(f"[{w[0]} {w[1]} {u[0]}] is not a minor triangle")
    elif G.degree(w[0]) != 3:
        problems.append(f"w0={w[0]} is not the 3-vertex of the minor triangle")
    for i in range(1, len(u)):
        fid = _triangle_face(G, w[i], w[i + 1], u[i])
        if fid is None or not _is_444(G, fid):
            problems.append(f"[{w[i]} {w[i + 1]} {u[i]}] is not a (4,4,4)-face avoiding the root")


def validate_configuration(G: PlaneGraph, cfg: Configuration) -> list[str]:
    """Re-check a configuration's defining conditions against G; empty list means valid."""
    missing = sorted(v for v in cfg.vertices if v not in G)
    if missing:
        return [f"vertices {missing} are not in the graph"]
    problems: list[str] = []
    root = G.root
    kind = cfg.kind

    if kind is ConfigKind.PENDANT_BLOCK:
        block, z = frozenset(cfg.seq("block")), cfg.one("cut")
        decomposition = blocks(G)
        if block not in decomposition.blocks:
            problems.append(f"{sorted(block)} is not a block")
        elif block & decomposition.cut_vertices != {z}:
            problems.append(f"block {sorted(block)} does not have {z} as its only cut vertex")
        if root in block and root != z:
            problems.append("the root lies inside the pendant block")
        if len(block) < 3:
            problems.append("pendant block has fewer than 3 vertices")
        return problems

    named = [v for vs in cfg.roles.values() for v in vs]
    if len(set(named)) != len(named):
        problems.append(f"named vertices are not distinct: {named}")
    if root in named:
        problems.append(f"root {root} is a named vertex")

    if kind is ConfigKind.LOW_DEGREE_VERTEX:
        if G.degree(cfg.one("v")) > 2:
            problems.append(f"vertex {cfg.one('v')} has degree {G.degree(cfg.one('v'))}")
    elif kind is ConfigKind.ADJACENT_THREES:
        u, v = cfg.one("u"), cfg.one("v")
        if not G.has_edge(u, v):
            problems.append(f"{u}{v} is not an edge")
        if G.degree(u) != 3 or G.degree(v) != 3:
            problems.append(f"degrees are {G.degree(u)}, {G.degree(v)}, expected 3, 3")
    elif kind is ConfigKind.CHAIN_PENDANT_THREE:
        _check_chain(G, cfg, problems)
        x, end = cfg.one("x"), cfg.seq("w")[-1]
        if G.degree(x) != 3 or not G.has_edge(x, end):
            problems.append(f"x={x} is not a 3-vertex adjacent to w_(k+1)={end}")
    elif kind is ConfigKind.CHAIN_TWO_MINOR_TRIANGLES:
        _check_chain(G, cfg, problems)
        x, y, z, end = cfg.one("x"), cfg.one("y"), cfg.one("z"), cfg.seq("w")[-1]
        if not G.has_edge(y, end) or G.degree(y) != 4:
            problems.append(f"{end}{y} is not a (4,4)-edge")
        fid = _triangle_face(G, x, y, z)
        if fid is None or not is_minor_triangle(G, fid) or G.degree(x) != 3:
            problems.append(f"[{x} {y} {z}] is not a minor triangle with d(x)=3")
    elif kind is ConfigKind.SUN:
        v, u = cfg.seq("v"), cfg.seq("u")
        if len(v) != 6 or len(u) != 5:
            return problems + [f"sun roles have lengths {len(v)}, {len(u)}"]
        if _face_with_cycle(G, v) is None:
            problems.append(f"{list(v)} is not a 6-face")
        for i in range(5):
            if _triangle_face(G, v[i], v[i + 1], u[i]) is None:
                problems.append(f"[{v[i]} {v[i + 1]} {u[i]}] is not a triangle face")
        if G.degree(v[0]) != 3 or any(G.degree(x) != 4 for x in v[1:] + u):
            problems.append("sun degrees differ from d(v1)=3 and 4 elsewhere")
    elif kind is ConfigKind.SPECIAL_FIVE_CYCLE:
        u = cfg.seq("u")
        if len(u) != 6:
            return problems + [f"special 5-cycle needs six vertices, got {len(u)}"]
        cycle = list(zip(u[:5], u[1:5] + u[:1])) + [(u[0], u[5]), (u[4], u[5])]
        for a, b in cycle:
            if not G.has_edge(a, b):
                problems.append(f"{a}{b} is not an edge")
        want = (3, 4, 3, 4, 4, 4)
        if tuple(G.degree(x) for x in u) != want:
            problems.append(f"degrees {[G.degree(x) for x in u]} differ from {list(want)}")
    return problems
