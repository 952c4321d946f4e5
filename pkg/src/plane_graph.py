"""PlaneGraph: a simple graph with a combinatorial embedding (rotation system).

Faces are derived by tracing the rotation system. The successor of the dart
(u -> v) is (v -> w), where w follows u counterclockwise in the rotation at v.
Every dart is visited exactly once, so each face is a closed walk.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx

from .errors import (
    DisconnectedGraph,
    InconsistentRotation,
    NotPlanarEmbedding,
    RootDeleted,
    RootNotOnOuterFace,
    RotsysFormatError,
    UnknownVertex,
)

logger = logging.getLogger(__name__)

Dart = tuple[int, int]
Edge = tuple[int, int]


def edge_key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Face:
    id: int
    darts: tuple[Dart, ...]
    lone_vertex: int | None = None  # set only for the face of an isolated vertex

    @property
    def degree(self) -> int:
        return len(self.darts)

    @property
    def vertices(self) -> tuple[int, ...]:
        """Boundary vertices in traversal order (repeats possible if not 2-connected)."""
        if self.lone_vertex is not None:
            return (self.lone_vertex,)
        return tuple(u for u, _ in self.darts)

    @property
    def vertex_set(self) -> frozenset[int]:
        return frozenset(self.vertices)

    @property
    def edges(self) -> frozenset[Edge]:
        return frozenset(edge_key(u, v) for u, v in self.darts)

    def is_cycle(self) -> bool:
        return self.degree >= 3 and len(self.vertex_set) == self.degree


@dataclass(frozen=True)
class BlockDecomposition:
    blocks: tuple[frozenset[int], ...]
    cut_vertices: frozenset[int]

    def leaf_blocks(self) -> list[tuple[frozenset[int], int]]:
        """Blocks containing exactly one cut vertex, paired with that cut vertex."""
        leaves = []
        for block in self.blocks:
            cuts = block & self.cut_vertices
            if len(cuts) == 1:
                leaves.append((block, next(iter(cuts))))
        return leaves


@dataclass(frozen=True, eq=False)
class PlaneGraph:
    rotation: Mapping[int, tuple[int, ...]]
    root: int
    faces: tuple[Face, ...]
    outer_face_id: int
    _dart_face: Mapping[Dart, int] = field(repr=False)
    # outer-boundary vertices of the graph this one was cut from, minus what was cut
    inherited_outer: frozenset[int] = field(default=frozenset(), repr=False)

    # ── Basic structure ──────────────────────────────────────────

    @cached_property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(self.rotation))

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(sorted({edge_key(u, v) for u, nbrs in self.rotation.items() for v in nbrs}))

    @cached_property
    def adjacency(self) -> dict[int, frozenset[int]]:
        return {v: frozenset(nbrs) for v, nbrs in self.rotation.items()}

    def __contains__(self, v: object) -> bool:
        return v in self.rotation

    def __len__(self) -> int:
        return len(self.rotation)

    def degree(self, v: int) -> int:
        return len(self._nbrs(v))

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._nbrs(v)

    def has_edge(self, u: int, v: int) -> bool:
        return u in self.rotation and v in self.adjacency[u]

    def _nbrs(self, v: int) -> tuple[int, ...]:
        try:
            return self.rotation[v]
        except KeyError:
            raise UnknownVertex(f"vertex {v} is not in the graph") from None

    # ── Faces ────────────────────────────────────────────────────

    @property
    def outer_face(self) -> Face:
        return self.faces[self.outer_face_id]

    def face(self, face_id: int) -> Face:
        return self.faces[face_id]

    def face_of_dart(self, u: int, v: int) -> int:
        return self._dart_face[(u, v)]

    def edge_faces(self, u: int, v: int) -> tuple[int, int]:
        """The faces on the two sides of edge uv (equal for a bridge)."""
        return self._dart_face[(u, v)], self._dart_face[(v, u)]

    @cached_property
    def _faces_at(self) -> dict[int, tuple[int, ...]]:
        at: dict[int, set[int]] = {v: set() for v in self.rotation}
        for f in self.faces:
            for v in f.vertices:
                at[v].add(f.id)
        return {v: tuple(sorted(ids)) for v, ids in at.items()}

    def faces_at(self, v: int) -> tuple[int, ...]:
        self._nbrs(v)
        return self._faces_at[v]

    @cached_property
    def _adjacent_faces(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, set[int]] = {f.id: set() for f in self.faces}
        for u, v in self.edges:
            a, b = self.edge_faces(u, v)
            if a != b:
                adj[a].add(b)
                adj[b].add(a)
        return {f: tuple(sorted(s)) for f, s in adj.items()}

    def adjacent_faces(self, face_id: int) -> tuple[int, ...]:
        """Distinct faces sharing at least one edge with the given face."""
        return self._adjacent_faces[face_id]

    @cached_property
    def triangle_ids(self) -> tuple[int, ...]:
        return tuple(f.id for f in self.faces if f.degree == 3 and f.is_cycle())

    def is_triangle(self, face_id: int) -> bool:
        f = self.faces[face_id]
        return f.degree == 3 and f.is_cycle()

    def triangles_at(self, v: int) -> tuple[int, ...]:
        return tuple(fid for fid in self.faces_at(v) if self.is_triangle(fid))

    # ── Connectivity ─────────────────────────────────────────────

    @cached_property
    def components(self) -> tuple[frozenset[int], ...]:
        return tuple(
            sorted((frozenset(c) for c in _components(self.rotation)), key=min)
        )

    def is_connected(self) -> bool:
        return len(self.components) <= 1

    # ── Export ───────────────────────────────────────────────────

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g

    def rotation_lists(self) -> dict[int, list[int]]:
        return {v: list(self.rotation[v]) for v in self.vertices}

    def to_rotsys(self, l: int) -> str:
        from .rotsys import format_rotsys

        return format_rotsys(self, l)

    def to_dot(self, name: str = "G") -> str:
        lines = [f"graph {name} {{", f"  // root v0 = {self.root}"]
        for f in self.faces:
            tag = " (outer)" if f.id == self.outer_face_id else ""
            lines.append(f"  // face {f.id}{tag} deg={f.degree}: {' '.join(map(str, f.vertices))}")
        for v in self.vertices:
            shape = "doublecircle" if v == self.root else "circle"
            lines.append(f"  {v} [shape={shape}];")
        for u, v in self.edges:
            lines.append(f"  {u} -- {v};")
        lines.append("}")
        return "\n".join(lines) + "\n"


# ── Construction ─────────────────────────────────────────────────


def _components(rotation: Mapping[int, Iterable[int]]) -> list[set[int]]:
    seen: set[int] = set()
    comps = []
    for start in sorted(rotation):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for u in rotation[v]:
                if u not in comp:
                    comp.add(u)
                    stack.append(u)
        seen |= comp
        comps.append(comp)
    return comps


def _check_rotation(rotation: Mapping[int, tuple[int, ...]]) -> None:
    for v, nbrs in rotation.items():
        if v in nbrs:
            raise InconsistentRotation(f"loop at vertex {v}")
        if len(set(nbrs)) != len(nbrs):
            raise InconsistentRotation(f"parallel edges at vertex {v}: {list(nbrs)}")
        for u in nbrs:
            if u not in rotation:
                raise InconsistentRotation(f"vertex {v} lists unknown neighbour {u}")
            if v not in rotation[u]:
                raise InconsistentRotation(f"{u} appears in the list of {v} but not vice versa")


def _trace_faces(
    rotation: Mapping[int, tuple[int, ...]], root: int
) -> tuple[list[Face], dict[Dart, int]]:
    pos = {v: {u: i for i, u in enumerate(nbrs)} for v, nbrs in rotation.items()}
    order = [root] + [v for v in sorted(rotation) if v != root]
    dart_face: dict[Dart, int] = {}
    faces: list[Face] = []
    for v in order:
        if not rotation[v]:
            faces.append(Face(id=len(faces), darts=(), lone_vertex=v))
            continue
        for u in rotation[v]:
            start = (v, u)
            if start in dart_face:
                continue
            fid = len(faces)
            walk = []
            cur = start
            while cur not in dart_face:
                dart_face[cur] = fid
                walk.append(cur)
                a, b = cur
                nbrs = rotation[b]
                cur = (b, nbrs[(pos[b][a] + 1) % len(nbrs)])
            faces.append(Face(id=fid, darts=tuple(walk)))
    return faces, dart_face


def _check_euler(rotation: Mapping[int, tuple[int, ...]], faces: list[Face]) -> None:
    for comp in _components(rotation):
        n_v = len(comp)
        n_e = sum(len(rotation[v]) for v in comp) // 2
        n_f = sum(1 for f in faces if f.vertices[0] in comp)
        if n_v - n_e + n_f != 2:
            raise NotPlanarEmbedding(
                f"component containing {min(comp)}: V - E + F = {n_v} - {n_e} + {n_f} != 2"
            )


def _default_outer(faces: list[Face], root: int) -> int:
    candidates = [f for f in faces if root in f.vertex_set]
    return max(candidates, key=lambda f: (f.degree, -f.id)).id


def _match_outer_hint(faces: list[Face], hint: list[int]) -> int:
    def same_cycle(seq: list[int]) -> bool:
        return len(seq) == len(hint) and any(
            seq[shift:] + seq[:shift] == hint for shift in range(len(seq))
        )

    # traversal direction first, so a cycle's two faces stay distinguishable
    for reverse in (False, True):
        for f in faces:
            seq = list(f.vertices)
            if same_cycle(seq[::-1] if reverse else seq):
                return f.id
    raise RotsysFormatError(f"outer face hint {hint} matches no traced face")


def from_rotation(
    rotation: Mapping[int, Iterable[int]],
    root: int,
    *,
    outer_face_id: int | None = None,
    outer_hint: list[int] | None = None,
    allow_disconnected: bool = True,
    inherited_outer: Iterable[int] = (),
) -> PlaneGraph:
    """Trace faces and validate; accepts arbitrary vertex ids and, by default, several components."""
    rot = {v: tuple(nbrs) for v, nbrs in rotation.items()}
    if root not in rot:
        raise UnknownVertex(f"root {root} is not a vertex")
    _check_rotation(rot)
    if not allow_disconnected and len(_components(rot)) > 1:
        raise DisconnectedGraph(f"graph has {len(_components(rot))} components")
    faces, dart_face = _trace_faces(rot, root)
    _check_euler(rot, faces)

    if outer_face_id is None:
        outer_face_id = _match_outer_hint(faces, outer_hint) if outer_hint else _default_outer(faces, root)
    if root not in faces[outer_face_id].vertex_set:
        raise RootNotOnOuterFace(
            f"root {root} is not on outer face {list(faces[outer_face_id].vertices)}"
        )
    return PlaneGraph(
        rotation=rot,
        root=root,
        faces=tuple(faces),
        outer_face_id=outer_face_id,
        _dart_face=dart_face,
        inherited_outer=frozenset(inherited_outer) & frozenset(rot),
    )


def build(
    rotation_lists: Mapping[int, Iterable[int]] | list[Iterable[int]],
    root: int,
    outer_hint: list[int] | None = None,
) -> PlaneGraph:
    """Build a connected plane graph from counterclockwise neighbour lists over ids 0..n-1."""
    if not isinstance(rotation_lists, Mapping):
        rotation_lists = dict(enumerate(rotation_lists))
    ids = sorted(rotation_lists)
    if ids != list(range(len(ids))):
        raise InconsistentRotation(f"vertex ids must be 0..{len(ids) - 1}, got {ids}")
    return from_rotation(rotation_lists, root, outer_hint=outer_hint, allow_disconnected=False)


# ── Cycles and class membership ──────────────────────────────────


def has_cycle_of_length(G: PlaneGraph, k: int) -> bool:
    """True iff G contains a cycle on exactly k vertices (not necessarily facial)."""
    if k < 3 or k > len(G):
        return False
    adj = G.adjacency
    for s in G.vertices:
        # s is the smallest vertex of the cycle; paths only visit larger vertices
        stack = [(s, (s,))]
        while stack:
            v, path = stack.pop()
            if len(path) == k:
                if s in adj[v]:
                    return True
                continue
            for u in adj[v]:
                if u > s and u not in path:
                    stack.append((u, path + (u,)))
    return False


def in_class(G: PlaneGraph, l: int) -> bool:
    """Membership in P(4, l): no 4-cycle and no l-cycle."""
    return not has_cycle_of_length(G, 4) and not has_cycle_of_length(G, l)


# ── Surgery ──────────────────────────────────────────────────────


def delete_vertices(G: PlaneGraph, S: Iterable[int], *, root: int | None = None) -> PlaneGraph:
    """Induced plane subgraph on V - S; the outer face is re-derived around the root."""
    S = frozenset(S)
    root = G.root if root is None else root
    if root in S:
        raise RootDeleted(f"cannot delete root {root}")
    if root not in G:
        raise UnknownVertex(f"root {root} is not a vertex")
    boundary = (G.outer_face.vertex_set | G.inherited_outer) - S
    if not S:
        if root == G.root:
            return G
        return from_rotation(G.rotation, root, inherited_outer=boundary)
    rot = {v: tuple(u for u in nbrs if u not in S) for v, nbrs in G.rotation.items() if v not in S}
    H = from_rotation(rot, root, inherited_outer=boundary)
    if root == G.root:
        kept = G.outer_face.vertex_set - S
        if not kept <= H.outer_face.vertex_set:
            logger.debug(
                "outer face changed after deleting %s: %s -> %s",
                sorted(S), list(G.outer_face.vertices), list(H.outer_face.vertices),
            )
    return H


def component_graphs(G: PlaneGraph) -> list[PlaneGraph]:
    """Split G into its components; the root's component keeps the root first.

    Any other component is rooted at its smallest vertex on the outer boundary G
    inherited, or at the smallest vertex of its largest face when it has none there.
    """
    if G.is_connected():
        return [G]
    boundary = G.outer_face.vertex_set | G.inherited_outer
    parts = []
    for comp in G.components:
        rot = {v: G.rotation[v] for v in comp}
        if G.root in comp:
            parts.append(from_rotation(rot, G.root, inherited_outer=boundary))
            continue
        on_boundary = boundary & comp
        if on_boundary:
            parts.append(from_rotation(rot, min(on_boundary), inherited_outer=boundary))
            continue
        provisional = from_rotation(rot, min(comp))
        best = max(provisional.faces, key=lambda f: (f.degree, -f.id))
        parts.append(from_rotation(rot, min(best.vertices)))
    parts.sort(key=lambda H: H.root != G.root)
    return parts


def blocks(G: PlaneGraph) -> BlockDecomposition:
    """Maximal 2-connected blocks (bridges count as blocks) and cut vertices."""
    g = G.to_networkx()
    found = [frozenset(b) for b in nx.biconnected_components(g)]
    found += [frozenset([v]) for v in g.nodes if g.degree(v) == 0]
    return BlockDecomposition(
        blocks=tuple(sorted(found, key=lambda b: sorted(b))),
        cut_vertices=frozenset(nx.articulation_points(g)),
    )


def is_two_connected(G: PlaneGraph) -> bool:
    return G.is_connected() and len(blocks(G).blocks) == 1
