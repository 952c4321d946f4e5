"""Enumeration, canonical codes, random members and the colouring oracles."""

from __future__ import annotations

import networkx as nx
import pytest
from pydantic import ValidationError

from src.errors import TooLarge
from src.genlab import (
    GeneratorSpec,
    brute_force_choosable,
    canonical_code,
    chromatic_number,
    configure_generator,
    embedded_representatives,
    enumerate_class,
    random_class_member,
    rooted_variants,
)
from src.plane_graph import from_rotation, has_cycle_of_length, in_class, is_two_connected


def _shape(G) -> tuple[int, int]:
    return len(G), len(G.edges)


def _is_cycle_graph(G, n: int) -> bool:
    return len(G) == n and len(G.edges) == n and all(G.degree(v) == 2 for v in G.vertices)


# ── Canonical codes ──────────────────────────────────────────────


def test_canonical_code_ignores_labels(chain_pendant_three):
    rot = chain_pendant_three.rotation
    perm = {v: (5 * v + 3) % 14 for v in rot}
    relabelled = {perm[v]: tuple(perm[u] for u in nbrs) for v, nbrs in rot.items()}
    assert canonical_code(relabelled) == canonical_code(chain_pendant_three)


def test_canonical_code_ignores_reflection(sun):
    mirrored = {v: tuple(reversed(nbrs)) for v, nbrs in sun.rotation.items()}
    assert canonical_code(mirrored) == canonical_code(sun)


def test_canonical_code_separates_embeddings():
    # two triangles and two leaves at vertex 0: leaves in one gap versus one leaf per gap
    tri = {1: (2, 0), 2: (0, 1), 3: (4, 0), 4: (0, 3), 5: (0,), 6: (0,)}
    together = {0: (1, 2, 5, 6, 3, 4)} | tri
    split = {0: (1, 2, 5, 3, 4, 6)} | tri
    assert canonical_code(split) != canonical_code(together)
    assert canonical_code({0: ()}) == (1,)


# ── Enumeration ──────────────────────────────────────────────────


def test_three_vertex_classes():
    reps = embedded_representatives(3, 5)
    assert sorted(len(r) for r in reps) == [1, 2, 3, 3]
    graphs = [from_rotation(r, 0) for r in reps]
    assert sorted(_shape(G) for G in graphs) == [(1, 0), (2, 1), (3, 2), (3, 3)]


def test_representatives_are_distinct():
    reps = embedded_representatives(6, 6)
    codes = [canonical_code(r) for r in reps]
    assert len(codes) == len(set(codes))


def test_enumeration_respects_l():
    five = list(enumerate_class(GeneratorSpec(max_vertices=5, l=5)))
    assert all(in_class(G, 5) for G in five)
    assert not any(has_cycle_of_length(G, 4) for G in five)
    assert not any(_is_cycle_graph(G, 5) for G in five)
    six = list(enumerate_class(GeneratorSpec(max_vertices=6, l=6)))
    assert any(_is_cycle_graph(G, 5) for G in six)
    assert not any(_is_cycle_graph(G, 6) for G in six)


def test_every_rooted_variant_is_emitted():
    # K3: two faces with three roots each
    variants = list(rooted_variants({0: (1, 2), 1: (2, 0), 2: (0, 1)}))
    assert len(variants) == 6
    assert {(G.outer_face_id, G.root) for G in variants} == {(f, v) for f in (0, 1) for v in range(3)}
    for G in variants:
        assert G.root in G.outer_face.vertex_set


def test_enumeration_is_deterministic():
    spec = GeneratorSpec(max_vertices=5, l=7)
    first = [G.to_rotsys(7) for G in enumerate_class(spec)]
    second = [G.to_rotsys(7) for G in enumerate_class(spec)]
    assert first == second


def test_two_connected_filter():
    graphs = list(enumerate_class(GeneratorSpec(max_vertices=5, l=6, connectivity=2)))
    assert graphs
    assert all(is_two_connected(G) for G in graphs)


def test_spec_validation():
    with pytest.raises(ValidationError):
        GeneratorSpec(max_vertices=5, l=4)
    with pytest.raises(ValidationError):
        GeneratorSpec(max_vertices=0, l=5)
    with pytest.raises(ValidationError):
        GeneratorSpec(max_vertices=11, l=5)
    configure_generator(max_vertices=12)
    assert GeneratorSpec(max_vertices=11, l=5).max_vertices == 11


def test_random_members():
    for seed in range(20):
        G = random_class_member(7, 6, seed)
        assert in_class(G, 6)
        assert G.is_connected()
        assert 1 <= len(G) <= 7
        assert G.root in G.outer_face.vertex_set
    assert random_class_member(6, 5, 3).rotation == random_class_member(6, 5, 3).rotation
    with pytest.raises(ValueError):
        random_class_member(0, 5, 0)


def test_random_mode_sample_count():
    graphs = list(enumerate_class(GeneratorSpec(max_vertices=6, l=7, mode="random", samples=15, seed=4)))
    assert len(graphs) == 15


# ── Colouring oracles ────────────────────────────────────────────


def test_triangle_choosability():
    k3 = nx.complete_graph(3)
    assert brute_force_choosable(k3, 3).verdict == "choosable"
    verdict = brute_force_choosable(k3, 2)
    assert verdict.verdict == "not_choosable"
    lists = verdict.counterexample
    assert len({tuple(c) for c in lists.values()}) == 1


def test_edgeless_is_one_choosable():
    assert brute_force_choosable(nx.empty_graph(4), 1).choosable is True


def test_cycles_and_two_choosability():
    assert brute_force_choosable(nx.cycle_graph(4), 2).choosable is True
    assert brute_force_choosable(nx.cycle_graph(5), 2).choosable is False


def test_random_mode_finds_counterexample():
    verdict = brute_force_choosable(nx.complete_graph(3), 2, mode="random", budget=300, seed=1)
    assert verdict.verdict == "not_choosable"
    assert brute_force_choosable(nx.cycle_graph(4), 2, mode="random", budget=50).verdict == (
        "no_counterexample_found"
    )


def test_choosability_limits():
    with pytest.raises(TooLarge):
        brute_force_choosable(nx.complete_graph(9), 3)
    with pytest.raises(ValueError):
        brute_force_choosable(nx.complete_graph(3), 0)


def test_chromatic_number():
    assert chromatic_number(nx.complete_graph(4)) == 4
    assert chromatic_number(nx.cycle_graph(5)) == 3
    assert chromatic_number(nx.cycle_graph(6)) == 2
    assert chromatic_number(nx.empty_graph(0)) == 0
