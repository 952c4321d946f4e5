"""Desk-scale generation of plane graphs without 4-cycles and l-cycles, plus brute-force oracles.

Every connected plane graph grows from K1 by two moves: attach a new vertex at a corner,
or join two non-adjacent vertices across a face. Both moves keep the class closed
under subgraphs, so pruning to the class after each move loses nothing. Duplicates are
removed by a canonical code over all starting darts and both mirror images.
"""

from __future__ import annotations

import itertools
import logging
import os
import random
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from typing import Any, Literal

import networkx as nx
from pydantic import BaseModel, Field, field_validator

from .alon_tarsi import as_networkx
from .errors import TooLarge
from .plane_graph import PlaneGraph, from_rotation, in_class, is_two_connected
from .rotsys import VALID_L

logger = logging.getLogger(__name__)

Rotation = dict[int, tuple[int, ...]]

_max_vertices: int = int(os.environ.get("ATMATCH_MAX_VERTICES", "10"))
EXHAUSTIVE_CHOOSABLE_CAP = 8


def configure_generator(max_vertices: int | None = None) -> None:
    global _max_vertices
    if max_vertices is not None:
        _max_vertices = max_vertices


def get_max_vertices() -> int:
    return _max_vertices


class GeneratorSpec(BaseModel):
    max_vertices: int = Field(ge=1)
    l: int
    connectivity: int = Field(default=1, ge=1, le=2)
    seed: int = 0
    mode: Literal["exhaustive", "random"] = "exhaustive"
    samples: int = Field(default=100, ge=1)

    @field_validator("l")
    @classmethod
    def _known_l(cls, v: int) -> int:
        if v not in VALID_L:
            raise ValueError(f"l must be one of {VALID_L}")
        return v

    @field_validator("max_vertices")
    @classmethod
    def _within_cap(cls, v: int) -> int:
        if v > _max_vertices:
            raise ValueError(f"max_vertices {v} exceeds the enumeration cap {_max_vertices}")
        return v


# ── Growth moves ─────────────────────────────────────────────────


def _insert_after(nbrs: tuple[int, ...], after: int | None, new: int) -> tuple[int, ...]:
    if after is None:
        return nbrs + (new,)
    i = nbrs.index(after)
    return nbrs[: i + 1] + (new,) + nbrs[i + 1 :]


def _corners(G: PlaneGraph) -> list[list[tuple[int, int | None]]]:
    """Per face, its corners as (vertex, neighbour the new edge goes after)."""
    result = []
    for f in G.faces:
        if f.lone_vertex is not None:
            result.append([(f.lone_vertex, None)])
            continue
        result.append([(a, p) for p, a in f.darts])
    return result


def _vertex_moves(rot: Rotation) -> Iterator[Rotation]:
    w = len(rot)
    for a in sorted(rot):
        for after in rot[a] or (None,):
            new = dict(rot)
            new[a] = _insert_after(rot[a], after, w)
            new[w] = (a,)
            yield new


def _edge_moves(G: PlaneGraph) -> Iterator[Rotation]:
    rot = dict(G.rotation)
    for corners in _corners(G):
        for (a, p), (b, q) in itertools.combinations(corners, 2):
            if a == b or G.has_edge(a, b):
                continue
            new = dict(rot)
            new[a] = _insert_after(rot[a], p, b)
            new[b] = _insert_after(rot[b], q, a)
            yield new


def _graph(rot: Mapping[int, tuple[int, ...]], root: int = 0) -> PlaneGraph:
    return from_rotation(rot, root)


# ── Canonical form ───────────────────────────────────────────────


def _code_from(rot: Mapping[int, tuple[int, ...]], start: tuple[int, int], mirror: bool) -> tuple:
    """BFS relabelling from a starting dart; each rotation read from its discovery edge."""
    u0, v0 = start
    label = {u0: 0}
    ref = {u0: v0}
    order = [u0]
    code: list[int] = []
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        nbrs = rot[v][::-1] if mirror else rot[v]
        if nbrs:
            k = nbrs.index(ref[v])
            nbrs = nbrs[k:] + nbrs[:k]
        for u in nbrs:
            if u not in label:
                label[u] = len(label)
                ref[u] = v
                order.append(u)
            code.append(label[u])
        code.append(-1)
    return tuple(code)


def canonical_code(G: PlaneGraph | Mapping[int, tuple[int, ...]]) -> tuple:
    """Invariant of a connected embedded graph under relabelling and reflection."""
    rot = G.rotation if isinstance(G, PlaneGraph) else G
    darts = [(u, v) for u, nbrs in rot.items() for v in nbrs]
    if not darts:
        return (len(rot),)
    return min(_code_from(rot, d, m) for d in darts for m in (False, True))


# ── Enumeration ──────────────────────────────────────────────────


def embedded_representatives(max_vertices: int, l: int) -> list[Rotation]:
    """One rotation system per embedded isomorphism class in the class, BFS from K1."""
    start: Rotation = {0: ()}
    seen = {canonical_code(start)}
    found = [start]
    frontier = [start]
    while frontier:
        nxt: list[Rotation] = []
        for rot in frontier:
            G = _graph(rot)
            moves = list(_edge_moves(G))
            if len(rot) < max_vertices:
                moves += list(_vertex_moves(rot))
            for cand in moves:
                H = _graph(cand)
                if not in_class(H, l):
                    continue
                code = canonical_code(cand)
                if code in seen:
                    continue
                seen.add(code)
                found.append(cand)
                nxt.append(cand)
        frontier = nxt
    found.sort(key=lambda r: (len(r), sum(map(len, r.values())), canonical_code(r)))
    return found


def rooted_variants(rot: Mapping[int, tuple[int, ...]]) -> Iterator[PlaneGraph]:
    """Every (outer face, root on that face) choice for one embedded graph."""
    base = _graph(rot)
    for f in base.faces:
        for v in sorted(f.vertex_set):
            H = _graph(rot, v)
            fid = H.face_of_dart(*f.darts[0]) if f.darts else H.faces_at(v)[0]
            yield from_rotation(rot, v, outer_face_id=fid)


def enumerate_class(spec: GeneratorSpec) -> Iterator[PlaneGraph]:
    """Connected class members up to spec.max_vertices with every outer face and root.

    Random mode instead yields spec.samples rooted members drawn with spec.seed.
    """
    if spec.mode == "random":
        rng = random.Random(spec.seed)
        emitted = 0
        while emitted < spec.samples:
            n = rng.randint(1, spec.max_vertices)
            G = random_class_member(n, spec.l, rng.randrange(2**31))
            if spec.connectivity == 2 and not is_two_connected(G):
                continue
            emitted += 1
            yield G
        return

    reps = embedded_representatives(spec.max_vertices, spec.l)
    logger.info("enumerated %d embedded graphs (n <= %d, l=%d)", len(reps), spec.max_vertices, spec.l)
    for rot in reps:
        if spec.connectivity == 2 and not is_two_connected(_graph(rot)):
            continue
        yield from rooted_variants(rot)


def random_class_member(n: int, l: int, seed: int) -> PlaneGraph:
    """Grow a class member on n vertices by random moves, rejecting those leaving the class."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    rng = random.Random(seed)
    rot: Rotation = {0: ()}
    while True:
        G = _graph(rot)
        moves = list(_edge_moves(G))
        if len(rot) < n:
            moves += list(_vertex_moves(rot))
        rng.shuffle(moves)
        nxt = next((m for m in moves if in_class(_graph(m), l)), None)
        if nxt is None or (len(rot) == n and rng.random() < 0.3):
            break
        rot = nxt
    G = _graph(rot)
    f = rng.choice(G.faces)
    root = rng.choice(sorted(f.vertex_set))
    H = _graph(rot, root)
    fid = H.face_of_dart(*f.darts[0]) if f.darts else H.faces_at(root)[0]
    return from_rotation(rot, root, outer_face_id=fid)


# ── Colouring oracles ────────────────────────────────────────────


def _list_colourable(g: nx.Graph, lists: Mapping[int, tuple[int, ...]], order: list[int]) -> bool:
    colour: dict[int, int] = {}

    def rec(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        taken = {colour[u] for u in g.adj[v] if u in colour}
        for c in lists[v]:
            if c not in taken:
                colour[v] = c
                if rec(i + 1):
                    return True
                del colour[v]
        return False

    return rec(0)


def _canonical_lists(k: int, universe: int, used: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """k-lists over the colours seen so far plus the lowest fresh ones, with the new count."""
    for fresh in range(0, min(k, universe - used) + 1):
        for old in itertools.combinations(range(used), k - fresh):
            yield old + tuple(range(used, used + fresh)), used + fresh


@dataclass
class ChoosabilityVerdict:
    k: int
    mode: str
    choosable: bool | None  # None: random mode found no counterexample
    assignments_checked: int = 0
    core_size: int = 0
    counterexample: dict[int, list[int]] | None = field(default=None)

    @property
    def verdict(self) -> str:
        if self.choosable is None:
            return "no_counterexample_found"
        return "choosable" if self.choosable else "not_choosable"

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "mode": self.mode,
            "verdict": self.verdict,
            "assignments_checked": self.assignments_checked,
            "core_size": self.core_size,
            "counterexample": self.counterexample,
        }


def brute_force_choosable(
    G: Any,
    k: int,
    mode: Literal["exhaustive", "random"] = "exhaustive",
    budget: int = 1000,
    seed: int = 0,
) -> ChoosabilityVerdict:
    """k-choosability by list enumeration on the k-core over a universe of 2k-1 colours."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    g = as_networkx(G)
    core = nx.k_core(g, k) if g.number_of_edges() else nx.Graph()
    verdict = ChoosabilityVerdict(k=k, mode=mode, choosable=True, core_size=core.number_of_nodes())
    if core.number_of_nodes() == 0:
        return verdict
    order = sorted(core.nodes, key=lambda v: (-core.degree(v), v))
    universe = 2 * k - 1

    if mode == "random":
        rng = random.Random(seed)
        for _ in range(budget):
            lists = {v: tuple(sorted(rng.sample(range(universe), k))) for v in order}
            verdict.assignments_checked += 1
            if not _list_colourable(core, lists, order):
                verdict.choosable = False
                verdict.counterexample = {v: list(c) for v, c in lists.items()}
                return verdict
        verdict.choosable = None
        return verdict

    if core.number_of_nodes() > EXHAUSTIVE_CHOOSABLE_CAP:
        raise TooLarge("brute_force_choosable", core.number_of_nodes(), EXHAUSTIVE_CHOOSABLE_CAP)

    lists: dict[int, tuple[int, ...]] = {}

    def search(i: int, used: int) -> bool:
        """True if some completion of the partial assignment is not colourable."""
        if i == len(order):
            verdict.assignments_checked += 1
            return not _list_colourable(core, lists, order)
        for chosen, now_used in _canonical_lists(k, universe, used):
            lists[order[i]] = chosen
            if search(i + 1, now_used):
                return True
        del lists[order[i]]
        return False

    if search(0, 0):
        verdict.choosable = False
        verdict.counterexample = {v: list(c) for v, c in sorted(lists.items())}
    return verdict


def chromatic_number(G: Any) -> int:
    g = as_networkx(G)
    if g.number_of_nodes() == 0:
        return 0
    order = sorted(g.nodes, key=lambda v: (-g.degree(v), v))
    for k in range(1, g.number_of_nodes() + 1):
        lists = {v: tuple(range(k)) for v in order}
        if _list_colourable(g, lists, order):
            return k
    return g.number_of_nodes()
