"""Exact Alon-Tarsi machinery: orientations, diff(D), graph-polynomial coefficients, AT numbers.

diff(D) is the number of even spanning Eulerian sub-digraphs of D minus the number of
odd ones (the empty arc set counts as even). The coefficient of prod x_v^eta(v) in the
graph polynomial prod_{u<v} (x_v - x_u) equals +-diff(D) for any orientation D whose
out-degree sequence is eta, so poly_coefficient is an independent oracle for diff.

Enumeration caps are module state, read from the environment and overridable via
configure_limits():
  - ATMATCH_CAP_EDGES     (default 32)  diff / poly_coefficient
  - ATMATCH_AT_CAP_EDGES  (default 20)  at_number / find_good_orientation
"""

from __future__ import annotations

import logging
import os
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from functools import cached_property
from typing import Any

import networkx as nx

from .errors import TooLarge, UnknownVertex

logger = logging.getLogger(__name__)

Arc = tuple[int, int]

_cap_edges: int = int(os.environ.get("ATMATCH_CAP_EDGES", "32"))
_at_cap_edges: int = int(os.environ.get("ATMATCH_AT_CAP_EDGES", "20"))


def configure_limits(cap_edges: int | None = None, at_cap_edges: int | None = None) -> None:
    """Override the enumeration caps. Call before running a batch."""
    global _cap_edges, _at_cap_edges
    if cap_edges is not None:
        _cap_edges = cap_edges
    if at_cap_edges is not None:
        _at_cap_edges = at_cap_edges


def get_limits() -> dict[str, int]:
    return {"cap_edges": _cap_edges, "at_cap_edges": _at_cap_edges}


@dataclass(frozen=True, eq=False)
class Orientation:
    vertices: tuple[int, ...]
    arcs: tuple[Arc, ...]  # (tail, head), ordered by the undirected edge id

    @classmethod
    def from_arcs(cls, arcs: Iterable[Arc], vertices: Iterable[int] | None = None) -> Orientation:
        arcs = list(arcs)
        seen: set[tuple[int, int]] = set()
        for u, v in arcs:
            if u == v:
                raise ValueError(f"loop arc {u}>{v}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"edge {key} is oriented more than once")
            seen.add(key)
        verts = set(vertices) if vertices is not None else set()
        verts.update(x for arc in arcs for x in arc)
        if vertices is not None and len(verts) != len(set(vertices)):
            raise UnknownVertex(f"arcs mention vertices outside {sorted(set(vertices))}")
        return cls(
            vertices=tuple(sorted(verts)),
            arcs=tuple(sorted(arcs, key=lambda a: (min(a), max(a)))),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Orientation):
            return NotImplemented
        return self.vertices == other.vertices and self.arcs == other.arcs

    def __hash__(self) -> int:
        return hash((self.vertices, self.arcs))

    @cached_property
    def out_degrees(self) -> dict[int, int]:
        out = {v: 0 for v in self.vertices}
        for u, _ in self.arcs:
            out[u] += 1
        return out

    def out_degree(self, v: int) -> int:
        try:
            return self.out_degrees[v]
        except KeyError:
            raise UnknownVertex(f"vertex {v} is not in the orientation") from None

    @property
    def max_out_degree(self) -> int:
        return max(self.out_degrees.values(), default=0)

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return frozenset((min(a), max(a)) for a in self.arcs)

    def base_graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.arcs)
        return g

    def to_digraph(self) -> nx.DiGraph:
        d = nx.DiGraph()
        d.add_nodes_from(self.vertices)
        d.add_edges_from(self.arcs)
        return d

    def induced(self, X: Iterable[int]) -> Orientation:
        X = frozenset(X)
        return Orientation(
            vertices=tuple(v for v in self.vertices if v in X),
            arcs=tuple(a for a in self.arcs if a[0] in X and a[1] in X),
        )

    def reversed(self) -> Orientation:
        return Orientation.from_arcs(((v, u) for u, v in self.arcs), self.vertices)

    def is_acyclic(self) -> bool:
        return nx.is_directed_acyclic_graph(self.to_digraph())


# ── diff(D) ──────────────────────────────────────────────────────


def diff(D: Orientation, cap: int | None = None) -> int:
    """Signed count of spanning Eulerian sub-digraphs: +1 per even arc set, -1 per odd.

    Backtracks over arcs in edge-id order, pruning as soon as some vertex's
    out/in imbalance exceeds the number of its still-undecided arcs.
    """
    cap = _cap_edges if cap is None else cap
    arcs = D.arcs
    m = len(arcs)
    if m > cap:
        raise TooLarge("diff", m, cap)

    remaining = {v: 0 for v in D.vertices}
    for u, v in arcs:
        remaining[u] += 1
        remaining[v] += 1
    balance = {v: 0 for v in D.vertices}

    def rec(i: int, odd: int) -> int:
        if i == m:
            return -1 if odd else 1
        t, h = arcs[i]
        remaining[t] -= 1
        remaining[h] -= 1
        total = 0
        if abs(balance[t]) <= remaining[t] and abs(balance[h]) <= remaining[h]:
            total += rec(i + 1, odd)
        balance[t] += 1
        balance[h] -= 1
        if abs(balance[t]) <= remaining[t] and abs(balance[h]) <= remaining[h]:
            total += rec(i + 1, odd ^ 1)
        balance[t] -= 1
        balance[h] += 1
        remaining[t] += 1
        remaining[h] += 1
        return total

    return rec(0, 0)


def diff_factored(D: Orientation, cap: int | None = None) -> int:
    """diff(D) as the product of diff over strongly connected components.

    Every Eulerian sub-digraph is a union of directed cycles and each cycle stays
    inside one strong component, so arcs between components never contribute.
    """
    result = 1
    for comp in nx.strongly_connected_components(D.to_digraph()):
        if len(comp) > 1:
            result *= diff(D.induced(comp), cap)
            if result == 0:
                return 0
    return result


def is_AT(D: Orientation) -> bool:
    return D.is_acyclic() or diff(D) != 0


def is_good(D: Orientation, v0: int) -> bool:
    """AT, every out-degree at most 2, and v0 a sink."""
    if D.out_degree(v0) != 0 or D.max_out_degree > 2:
        return False
    return is_AT(D)


# ── Graph polynomial oracle ──────────────────────────────────────


def as_networkx(G: Any) -> nx.Graph:
    """Accept a networkx graph or anything exposing to_networkx() (a PlaneGraph)."""
    if isinstance(G, nx.Graph):
        return G
    return G.to_networkx()


def _sorted_edges(G: nx.Graph) -> list[tuple[int, int]]:
    return sorted((min(u, v), max(u, v)) for u, v in G.edges())


def poly_coefficient(G: Any, eta: Mapping[int, int], cap: int | None = None) -> int:
    """Coefficient of prod x_v^eta(v) in prod_{u<v, uv in E} (x_v - x_u), ascending-id order."""
    G = as_networkx(G)
    cap = _cap_edges if cap is None else cap
    edges = _sorted_edges(G)
    m = len(edges)
    if m > cap:
        raise TooLarge("poly_coefficient", m, cap)
    need = {v: eta.get(v, 0) for v in G.nodes}
    if any(n < 0 for n in need.values()) or sum(need.values()) != m:
        return 0
    remaining = {v: G.degree(v) for v in G.nodes}
    if any(need[v] > remaining[v] for v in need):
        return 0

    def rec(i: int) -> int:
        if i == m:
            return 1
        u, v = edges[i]
        remaining[u] -= 1
        remaining[v] -= 1
        total = 0
        # x_v from (x_v - x_u)
        if need[v] > 0 and need[u] <= remaining[u] and need[v] - 1 <= remaining[v]:
            need[v] -= 1
            total += rec(i + 1)
            need[v] += 1
        # -x_u
        if need[u] > 0 and need[v] <= remaining[v] and need[u] - 1 <= remaining[u]:
            need[u] -= 1
            total -= rec(i + 1)
            need[u] += 1
        remaining[u] += 1
        remaining[v] += 1
        return total

    return rec(0)


# ── Orientation search ───────────────────────────────────────────


def _orientations(
    G: nx.Graph, max_out: Mapping[int, int]
) -> Iterator[tuple[Arc, ...]]:
    """All orientations with out-degree(v) <= max_out[v], edges by id, head = smaller id first."""
    edges = _sorted_edges(G)
    out = {v: 0 for v in G.nodes}
    chosen: list[Arc] = []

    def rec(i: int) -> Iterator[tuple[Arc, ...]]:
        if i == len(edges):
            yield tuple(chosen)
            return
        u, v = edges[i]
        for tail, head in ((v, u), (u, v)):
            if out[tail] < max_out[tail]:
                out[tail] += 1
                chosen.append((tail, head))
                yield from rec(i + 1)
                chosen.pop()
                out[tail] -= 1

    if sum(max_out[v] for v in G.nodes) < len(edges):
        return iter(())
    return rec(0)


def at_number(G: Any, cap: int | None = None) -> int:
    """Least k such that some orientation with all out-degrees < k has nonzero diff."""
    G = as_networkx(G)
    cap = _at_cap_edges if cap is None else cap
    m = G.number_of_edges()
    if m > cap:
        raise TooLarge("at_number", m, cap)
    if m == 0:
        return 1
    # an acyclic orientation along a degeneracy order has diff 1
    degeneracy = max(nx.core_number(G).values())
    for k in range(2, degeneracy + 1):
        bound = {v: k - 1 for v in G.nodes}
        for arcs in _orientations(G, bound):
            if diff(Orientation.from_arcs(arcs, G.nodes)) != 0:
                return k
    return degeneracy + 1


def find_good_orientation(G: Any, v0: int, cap: int | None = None) -> Orientation | None:
    """First good orientation (Delta+ <= 2, v0 a sink, diff != 0) in search order, else None."""
    G = as_networkx(G)
    cap = _at_cap_edges if cap is None else cap
    if v0 not in G:
        raise UnknownVertex(f"root {v0} is not a vertex")
    m = G.number_of_edges()
    if m > cap:
        raise TooLarge("find_good_orientation", m, cap)
    bound = {v: 2 for v in G.nodes}
    bound[v0] = 0
    for arcs in _orientations(G, bound):
        D = Orientation.from_arcs(arcs, G.nodes)
        if is_AT(D):
            return D
    return None
