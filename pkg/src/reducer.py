"""Certificate extraction: valid matchings and good orientations by reducible-configuration surgery.

extract() recurses on (G, v0): small graphs are solved by brute force, larger ones by
detecting a configuration, deleting its vertex set X and lifting the certificate of the
remainder. Every surgery orients G[X] - M acyclically and sends all X-to-rest edges out
of X, so diff(D) = diff(D[V - X]) and the trace alone certifies diff above the
enumeration cap.

Tunables (module state, overridable via configure_reducer()):
  - ATMATCH_BASE_THRESHOLD  (default 6)  brute force at or below this many vertices
"""

from __future__ import annotations

import itertools
import logging
import os
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import Any

import networkx as nx

from .alon_tarsi import (
    Arc,
    Orientation,
    diff,
    diff_factored,
    find_good_orientation,
    get_limits,
)
from .configurations import ConfigKind, Configuration, iter_configurations, validate_configuration
from .errors import ConfigurationStale, NotInClass, TheoremViolation, TooLarge
from .plane_graph import (
    Edge,
    PlaneGraph,
    component_graphs,
    delete_vertices,
    edge_key,
    from_rotation,
    in_class,
)
from .rotsys import format_rotsys

logger = logging.getLogger(__name__)

_base_threshold: int = int(os.environ.get("ATMATCH_BASE_THRESHOLD", "6"))

BRUTE_FORCE = "BruteForce"
FALLBACK = "Fallback"
COMPONENTS = "Components"


def configure_reducer(base_threshold: int | None = None) -> None:
    global _base_threshold
    if base_threshold is not None:
        _base_threshold = base_threshold


def get_base_threshold() -> int:
    return _base_threshold


# ── Certificate types ────────────────────────────────────────────


@dataclass(frozen=True)
class Matching:
    edges: frozenset[Edge] = frozenset()

    @classmethod
    def of(cls, edges: Iterable[tuple[int, int]]) -> Matching:
        """Normalize edge keys; raises ValueError if two edges share a vertex."""
        keys = frozenset(edge_key(u, v) for u, v in edges)
        seen: set[int] = set()
        for u, v in sorted(keys):
            if u in seen or v in seen:
                raise ValueError(f"edge {u}{v} shares a vertex with another matching edge")
            seen.update((u, v))
        return cls(keys)

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[Edge]:
        return iter(sorted(self.edges))

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(v for e in self.edges for v in e)

    def covers(self, v: int) -> bool:
        return v in self.vertices

    def union(self, other: Matching | Iterable[tuple[int, int]]) -> Matching:
        extra = other.edges if isinstance(other, Matching) else other
        return Matching.of(list(self.edges) + list(extra))


@dataclass(frozen=True)
class TraceStep:
    kind: str
    deleted: tuple[int, ...]
    scope: tuple[int, ...]
    root: int
    roles: Mapping[str, tuple[int, ...]] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "deleted": list(self.deleted),
            "scope": list(self.scope),
            "root": self.root,
            "roles": {k: list(v) for k, v in self.roles.items()},
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> TraceStep:
        return cls(
            kind=data["kind"],
            deleted=tuple(data["deleted"]),
            scope=tuple(data["scope"]),
            root=data["root"],
            roles={k: tuple(v) for k, v in data.get("roles", {}).items()},
        )


@dataclass(frozen=True)
class Certificate:
    root: int
    matching: Matching
    orientation: Orientation
    trace: tuple[TraceStep, ...] = ()

    def kind_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for step in self.trace:
            counts[step.kind] = counts.get(step.kind, 0) + 1
        return counts

    def to_dict(self) -> dict[str, Any]:
        return {
            "root": self.root,
            "vertices": list(self.orientation.vertices),
            "matching": [list(e) for e in self.matching],
            "orientation": [list(a) for a in self.orientation.arcs],
            "trace": [s.to_dict() for s in self.trace],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Certificate:
        # no disjointness check here: a tampered certificate must still load for verification
        matching = Matching(frozenset(edge_key(u, v) for u, v in data["matching"]))
        return cls(
            root=data["root"],
            matching=matching,
            orientation=Orientation.from_arcs(
                (tuple(a) for a in data["orientation"]), data.get("vertices")
            ),
            trace=tuple(TraceStep.from_dict(s) for s in data.get("trace", [])),
        )


# ── Surgery plans ────────────────────────────────────────────────


@dataclass(frozen=True)
class SurgeryPlan:
    kind: ConfigKind
    deleted: frozenset[int]
    matching: frozenset[Edge]
    internal_arcs: tuple[Arc, ...]
    cut_arcs: tuple[Arc, ...]

    @property
    def arcs(self) -> tuple[Arc, ...]:
        return self.internal_arcs + self.cut_arcs

    @property
    def out_degrees(self) -> dict[int, int]:
        out = {v: 0 for v in self.deleted}
        for u, _ in self.arcs:
            out[u] += 1
        return out

    def is_acyclic(self) -> bool:
        g = nx.DiGraph()
        g.add_nodes_from(self.deleted)
        g.add_edges_from(self.internal_arcs)
        return nx.is_directed_acyclic_graph(g)

    def problems(self) -> list[str]:
        found = []
        if not self.is_acyclic():
            found.append("internal arcs contain a directed cycle")
        heavy = {v: d for v, d in self.out_degrees.items() if d > 2}
        if heavy:
            found.append(f"out-degree above 2 at {heavy}")
        if any(not (set(e) <= self.deleted) for e in self.matching):
            found.append("a matching edge leaves the deleted set")
        return found

    def is_sound(self) -> bool:
        return not self.problems()


def _named_surgery(cfg: Configuration) -> tuple[set[int], list[Edge], list[Arc]]:
    """Deleted set, matching additions and named arcs of each surgery."""
    kind = cfg.kind
    if kind is ConfigKind.LOW_DEGREE_VERTEX:
        return {cfg.one("v")}, [], []
    if kind is ConfigKind.ADJACENT_THREES:
        u, v = cfg.one("u"), cfg.one("v")
        return {u, v}, [edge_key(u, v)], []
    if kind in (ConfigKind.CHAIN_PENDANT_THREE, ConfigKind.CHAIN_TWO_MINOR_TRIANGLES):
        w, u = cfg.seq("w"), cfg.seq("u")
        k = len(u) - 1
        X = set(w) | set(u)
        M = [edge_key(w[i], u[i]) for i in range(k + 1)]
        arcs: list[Arc] = []
        for i in range(k + 1):
            arcs += [(w[i], w[i + 1]), (w[i + 1], u[i])]
        if kind is ConfigKind.CHAIN_PENDANT_THREE:
            x = cfg.one("x")
            return X | {x}, M + [edge_key(w[k + 1], x)], arcs
        x, y, z = cfg.one("x"), cfg.one("y"), cfg.one("z")
        return X | {x, y, z}, M + [edge_key(w[k + 1], y), edge_key(x, z)], arcs + [(x, y), (y, z)]
    if kind is ConfigKind.SUN:
        v, u = cfg.seq("v"), cfg.seq("u")
        arcs = [(v[0], v[5])]
        for i in range(5):
            arcs += [(v[i], v[i + 1]), (v[i + 1], u[i])]
        return set(v) | set(u), [edge_key(v[i], u[i]) for i in range(5)], arcs
    if kind is ConfigKind.SPECIAL_FIVE_CYCLE:
        u = cfg.seq("u")
        M = [edge_key(u[0], u[1]), edge_key(u[2], u[3]), edge_key(u[4], u[5])]
        arcs = [(u[0], u[5]), (u[0], u[4]), (u[4], u[3]), (u[2], u[1])]
        return set(u), M, arcs
    raise ValueError(f"no single-piece surgery for {kind.value}")


def _peel(edges: list[Edge], bound: Mapping[int, int]) -> list[Arc] | None:
    """Acyclic orientation with out-degree(v) <= bound[v], or None if none exists.

    Repeatedly removes a vertex whose remaining degree fits its bound, orienting its
    remaining edges outward.
    """
    adj: dict[int, set[int]] = {v: set() for v in bound}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    arcs: list[Arc] = []
    while adj:
        ready = [v for v in sorted(adj) if len(adj[v]) <= bound[v]]
        if not ready:
            return None
        v = ready[0]
        for nb in sorted(adj[v]):
            arcs.append((v, nb))
            adj[nb].discard(v)
        del adj[v]
    return arcs


def surgery_arcs(G: PlaneGraph, cfg: Configuration) -> SurgeryPlan:
    """The matching additions and arcs that a surgery adds inside and around its deleted set."""
    if cfg.kind is ConfigKind.PENDANT_BLOCK:
        X = frozenset(cfg.seq("block")) - {cfg.one("cut")}
        return SurgeryPlan(cfg.kind, X, frozenset(), (), ())

    X, M, named = _named_surgery(cfg)
    matched = set(M)
    cut = tuple((v, nb) for v in sorted(X) for nb in G.neighbors(v) if nb not in X)
    internal = [
        edge_key(a, b) for a, b in G.edges if a in X and b in X and edge_key(a, b) not in matched
    ]
    missing = [a for a in named if edge_key(*a) not in set(internal)]
    if missing:
        raise ConfigurationStale(f"{cfg.kind.value}: named arcs {missing} are not free edges")

    order_graph = nx.DiGraph()
    order_graph.add_nodes_from(X)
    order_graph.add_edges_from(named)
    arcs: list[Arc] | None = None
    if nx.is_directed_acyclic_graph(order_graph):
        rank = {v: i for i, v in enumerate(nx.lexicographical_topological_sort(order_graph))}
        named_keys = {edge_key(*a) for a in named}
        arcs = list(named) + [
            (a, b) if rank[a] < rank[b] else (b, a) for a, b in internal if (a, b) not in named_keys
        ]
    plan = SurgeryPlan(cfg.kind, frozenset(X), frozenset(M), tuple(arcs or ()), cut)
    if arcs is not None and plan.is_sound():
        return plan

    cut_out = {v: 0 for v in X}
    for v, _ in cut:
        cut_out[v] += 1
    bound = {v: max(0, 2 - cut_out[v]) for v in X}
    peeled = _peel(internal, bound)
    if peeled is None:
        return plan
    logger.debug("%s: named arcs overloaded, using a bounded acyclic orientation", cfg.kind.value)
    return SurgeryPlan(cfg.kind, frozenset(X), frozenset(M), tuple(peeled), cut)


@dataclass(frozen=True)
class Reduction:
    graph: PlaneGraph
    configuration: Configuration
    plan: SurgeryPlan
    subproblems: tuple[PlaneGraph, ...]

    def lift(self, *parts: Certificate) -> Certificate:
        """Extend certificates of the subproblems to one of the reduced graph."""
        if len(parts) != len(self.subproblems):
            raise ValueError(f"expected {len(self.subproblems)} certificates, got {len(parts)}")
        step = TraceStep(
            kind=self.configuration.kind.value,
            deleted=tuple(sorted(self.plan.deleted)),
            scope=self.graph.vertices,
            root=self.graph.root,
            roles=dict(self.configuration.roles),
        )
        return _combine(self.graph, step, list(parts), self.plan.matching, self.plan.arcs)


def _combine(
    G: PlaneGraph,
    step: TraceStep,
    parts: list[Certificate],
    matching: Iterable[Edge] = (),
    arcs: Iterable[Arc] = (),
) -> Certificate:
    M = Matching.of(list(matching))
    all_arcs = list(arcs)
    trace = [step]
    for part in parts:
        M = M.union(part.matching)
        all_arcs += part.orientation.arcs
        trace += part.trace
    return Certificate(
        root=G.root,
        matching=M,
        orientation=Orientation.from_arcs(all_arcs, G.vertices),
        trace=tuple(trace),
    )


def _induced(G: PlaneGraph, keep: frozenset[int], root: int) -> PlaneGraph:
    rot = {v: tuple(u for u in G.rotation[v] if u in keep) for v in G.vertices if v in keep}
    return from_rotation(rot, root)


def reduce_step(G: PlaneGraph, cfg: Configuration) -> Reduction:
    """Apply one surgery; raises ConfigurationStale if cfg no longer describes G."""
    problems = validate_configuration(G, cfg)
    if problems:
        raise ConfigurationStale(f"{cfg.kind.value}: " + "; ".join(problems))
    plan = surgery_arcs(G, cfg)
    problems = plan.problems()
    if problems:
        raise ConfigurationStale(f"{cfg.kind.value} surgery is unsound: " + "; ".join(problems))

    if cfg.kind is ConfigKind.PENDANT_BLOCK:
        block, z = frozenset(cfg.seq("block")), cfg.one("cut")
        rest = delete_vertices(G, block - {z})
        return Reduction(G, cfg, plan, (rest, _induced(G, block, z)))
    return Reduction(G, cfg, plan, (delete_vertices(G, plan.deleted),))


# ── Brute force ──────────────────────────────────────────────────


def valid_matchings(G: PlaneGraph | nx.Graph, v0: int) -> Iterator[frozenset[Edge]]:
    """Matchings avoiding v0: the empty one first, then by size, lexicographically."""
    edges = sorted(edge_key(u, v) for u, v in G.edges if v0 not in (u, v))
    for size in itertools.count():
        if 2 * size > len({x for e in edges for x in e}):
            return
        for combo in itertools.combinations(edges, size):
            covered = [x for e in combo for x in e]
            if len(covered) == len(set(covered)):
                yield frozenset(combo)


def _brute_force(G: PlaneGraph, l: int, kind: str) -> Certificate:
    g = G.to_networkx()
    for M in valid_matchings(g, G.root):
        h = g.copy()
        h.remove_edges_from(M)
        D = find_good_orientation(h, G.root)
        if D is not None:
            step = TraceStep(kind=kind, deleted=G.vertices, scope=G.vertices, root=G.root)
            return Certificate(root=G.root, matching=Matching.of(M), orientation=D, trace=(step,))
    message = f"no valid matching admits a good orientation ({len(G)} vertices, l={l})"
    logger.error("theorem violation: %s", message)
    raise TheoremViolation(message, rotsys=format_rotsys(G, l))


# ── Extraction ───────────────────────────────────────────────────


def _solve(G: PlaneGraph, l: int, threshold: int) -> Certificate:
    if not G.is_connected():
        parts = [_solve(H, l, threshold) for H in component_graphs(G)]
        step = TraceStep(kind=COMPONENTS, deleted=(), scope=G.vertices, root=G.root)
        return _combine(G, step, parts)
    if len(G) <= threshold:
        return _brute_force(G, l, BRUTE_FORCE)
    for cfg in iter_configurations(G, l):
        try:
            reduction = reduce_step(G, cfg)
        except ConfigurationStale as e:
            logger.debug("skipping candidate: %s", e)
            continue
        return reduction.lift(*(_solve(H, l, threshold) for H in reduction.subproblems))
    logger.warning(
        "no reducible configuration applies on %d vertices (l=%d); falling back to brute force",
        len(G), l,
    )
    return _brute_force(G, l, FALLBACK)


def extract(
    G: PlaneGraph, l: int, *, base_threshold: int | None = None, check_class: bool = True
) -> Certificate:
    """A valid matching M and a good orientation of G - M, with the reduction trace."""
    if check_class and not in_class(G, l):
        raise NotInClass(f"graph contains a 4-cycle or a {l}-cycle")
    threshold = _base_threshold if base_threshold is None else base_threshold
    return _solve(G, l, threshold)


# ── Verification ─────────────────────────────────────────────────


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "witness": self.witness}


@dataclass
class VerificationReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        return next(c for c in self.checks if c.name == name)

    def to_dict(self) -> dict[str, Any]:
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def _check_matching(G: PlaneGraph, c: Certificate) -> CheckResult:
    edges = sorted(c.matching.edges)
    not_edges = [list(e) for e in edges if not G.has_edge(*e)]
    counts: dict[int, int] = {}
    for e in edges:
        for x in e:
            counts[x] = counts.get(x, 0) + 1
    shared = sorted(v for v, n in counts.items() if n > 1)
    covers_root = c.root in counts or G.root in counts
    witness: dict[str, Any] = {}
    if not_edges:
        witness["not_edges"] = not_edges
    if shared:
        witness["shared_vertices"] = shared
    if covers_root:
        witness["covers_root"] = G.root
    return CheckResult("matching", not witness, witness)


def _check_base(G: PlaneGraph, c: Certificate) -> CheckResult:
    want = set(G.edges) - set(c.matching.edges)
    have = set(c.orientation.edges)
    witness: dict[str, Any] = {}
    if set(c.orientation.vertices) != set(G.vertices):
        witness["vertex_mismatch"] = sorted(set(c.orientation.vertices) ^ set(G.vertices))
    if want - have:
        witness["unoriented_edges"] = [list(e) for e in sorted(want - have)]
    if have - want:
        witness["extra_arcs"] = [list(e) for e in sorted(have - want)]
    return CheckResult("orientation_base", not witness, witness)


def _check_degrees(G: PlaneGraph, c: Certificate) -> CheckResult:
    out = c.orientation.out_degrees
    heavy = {v: d for v, d in sorted(out.items()) if d > 2}
    root_out = out.get(G.root, 0)
    witness: dict[str, Any] = {"max_out_degree": c.orientation.max_out_degree, "root_out_degree": root_out}
    if heavy:
        witness["over_two"] = heavy
    return CheckResult("out_degrees", not heavy and root_out == 0, witness)


def _arcs_between(D: Orientation, A: set[int], B: set[int]) -> list[Arc]:
    return [(a, b) for a, b in D.arcs if (a in A and b in B) or (a in B and b in A)]


def _trace_value(
    D: Orientation, steps: list[TraceStep], pos: int, scope: frozenset[int]
) -> tuple[int, int]:
    """diff(D[scope]) from the subtrace starting at pos; returns (value, next position).

    Raises ValueError when the pieces do not partition scope or some cut is not one-way.
    """
    if pos >= len(steps):
        raise ValueError(f"trace ends before covering {sorted(scope)}")
    step = steps[pos]
    if frozenset(step.scope) != scope:
        raise ValueError(f"step {pos} ({step.kind}) covers {list(step.scope)}, expected {sorted(scope)}")
    X = frozenset(step.deleted)
    if not X <= scope:
        raise ValueError(f"step {pos} ({step.kind}) deletes vertices outside its scope")
    pos += 1

    if step.kind in (BRUTE_FORCE, FALLBACK):
        if X != scope:
            raise ValueError(f"step {pos - 1} ({step.kind}) must delete its whole scope")
        return diff(D.induced(scope)), pos

    if step.kind == COMPONENTS:
        if X:
            raise ValueError(f"step {pos - 1} (Components) deletes vertices")
        covered: set[int] = set()
        total = 1
        while covered != scope:
            if pos >= len(steps):
                raise ValueError(f"components of {sorted(scope)} are not all covered")
            piece = frozenset(steps[pos].scope)
            if not piece or not piece <= scope - covered:
                raise ValueError(f"step {pos}: component {list(piece)} overlaps or leaves its scope")
            if _arcs_between(D, set(piece), set(scope - piece)):
                raise ValueError(f"step {pos}: component {list(piece)} has arcs leaving it")
            value, pos = _trace_value(D, steps, pos, piece)
            total *= value
            covered |= piece
        return total, pos

    if not X or X == scope:
        raise ValueError(f"step {pos - 1} ({step.kind}) must delete a proper non-empty subset")

    if step.kind == ConfigKind.PENDANT_BLOCK.value:
        rest = scope - X
        rest_value, pos = _trace_value(D, steps, pos, rest)
        if pos >= len(steps):
            raise ValueError(f"step {pos - 1} (PendantBlock) is missing its block")
        block = frozenset(steps[pos].scope)
        cut = block - X
        if not X <= block or len(cut) != 1 or not cut <= rest:
            raise ValueError(f"step {pos}: block {list(block)} does not meet the rest in one vertex")
        if _arcs_between(D, set(X), set(rest - cut)):
            raise ValueError(f"step {pos}: arcs join the block to the rest away from the cut vertex")
        block_value, pos = _trace_value(D, steps, pos, block)
        return rest_value * block_value, pos

    backward = [(a, b) for a, b in D.arcs if a in scope - X and b in X]
    if backward:
        raise ValueError(f"step {pos - 1} ({step.kind}): arc {backward[0]} enters the deleted set")
    if not D.induced(X).is_acyclic():
        raise ValueError(f"step {pos - 1} ({step.kind}): deleted set is not oriented acyclically")
    return _trace_value(D, steps, pos, scope - X)


def _diff_from_trace(D: Orientation, trace: Iterable[TraceStep]) -> int:
    steps = list(trace)
    value, pos = _trace_value(D, steps, 0, frozenset(D.vertices))
    if pos != len(steps):
        raise ValueError(f"trace has {len(steps) - pos} steps beyond the covered graph")
    return value


def diff_along_trace(D: Orientation, trace: Iterable[TraceStep]) -> int | None:
    """diff(D) as the product over brute-force pieces, or None unless the trace partitions V(D)
    into pieces joined only by one-way cuts and cut vertices."""
    try:
        return _diff_from_trace(D, trace)
    except ValueError as e:
        logger.debug("trace rejected: %s", e)
        return None


def _check_diff(c: Certificate) -> CheckResult:
    D = c.orientation
    cap = get_limits()["cap_edges"]
    if len(D.arcs) <= cap:
        value = diff(D)
        return CheckResult("diff_nonzero", value != 0, {"diff": value, "method": "enumeration"})
    witness: dict[str, Any] = {}
    try:
        try:
            value, method = _diff_from_trace(D, c.trace), "trace"
        except ValueError as e:
            witness["trace_rejected"] = str(e)
            value, method = diff_factored(D), "strong_components"
    except TooLarge as e:
        return CheckResult("diff_nonzero", False, witness | {"undecided": str(e)})
    return CheckResult("diff_nonzero", value != 0, witness | {"diff": value, "method": method})


def verify_certificate(G: PlaneGraph, c: Certificate) -> VerificationReport:
    """Independent checks: matching validity, base graph, out-degree caps, diff != 0."""
    return VerificationReport(
        checks=[_check_matching(G, c), _check_base(G, c), _check_degrees(G, c), _check_diff(c)]
    )
