"""Rotation systems, face tracing, blocks and class membership."""

from __future__ import annotations

import pytest

from src.errors import (
    DisconnectedGraph,
    InconsistentRotation,
    NotPlanarEmbedding,
    RootDeleted,
    RootNotOnOuterFace,
    UnknownVertex,
)
from src.plane_graph import (
    blocks,
    build,
    component_graphs,
    delete_vertices,
    from_rotation,
    has_cycle_of_length,
    in_class,
    is_two_connected,
)


def _euler(G) -> int:
    return len(G) - len(G.edges) + len(G.faces)


def test_triangle_has_two_faces():
    G = build([[1, 2], [2, 0], [0, 1]], 1)
    assert len(G) == 3
    assert len(G.edges) == 3
    assert sorted(f.degree for f in G.faces) == [3, 3]
    assert G.root == 1
    assert 1 in G.outer_face.vertex_set


def test_k4_faces_are_triangles(k4):
    assert len(k4.faces) == 4
    assert all(f.degree == 3 for f in k4.faces)
    assert len(k4.triangle_ids) == 4


def test_k5_is_not_a_plane_embedding():
    rotation = [[j for j in range(5) if j != i] for i in range(5)]
    with pytest.raises(NotPlanarEmbedding):
        build(rotation, 0)


def test_every_dart_lies_on_exactly_one_face(sun):
    darts = [d for f in sun.faces for d in f.darts]
    assert len(darts) == len(set(darts)) == 2 * len(sun.edges)
    assert _euler(sun) == 2


def test_lone_vertex_face(k1):
    assert len(k1.faces) == 1
    assert k1.outer_face.vertices == (0,)
    assert k1.outer_face.degree == 0


def test_tree_face_repeats_vertices(p3):
    (f,) = p3.faces
    assert f.degree == 4
    assert f.vertex_set == {0, 1, 2}
    assert not f.is_cycle()


def test_asymmetric_rotation_rejected():
    with pytest.raises(InconsistentRotation):
        build([[1, 2], [0], [1]], 0)


def test_loops_and_parallel_edges_rejected():
    with pytest.raises(InconsistentRotation):
        build([[0]], 0)
    with pytest.raises(InconsistentRotation):
        build([[1, 1], [0, 0]], 0)


def test_ids_must_be_contiguous():
    with pytest.raises(InconsistentRotation):
        build({0: [2], 2: [0]}, 0)


def test_build_requires_connected():
    with pytest.raises(DisconnectedGraph):
        build([[1], [0], []], 0)


def test_unknown_root_rejected():
    with pytest.raises(UnknownVertex):
        build([[1], [0]], 5)


def test_outer_hint_selects_face(c5):
    walk = list(c5.faces[0].vertices)
    G = build(c5.rotation_lists(), 0, outer_hint=walk)
    assert G.outer_face_id == 0
    G = build(c5.rotation_lists(), 0, outer_hint=walk[::-1])
    assert G.outer_face_id == 1


def test_root_must_be_on_chosen_outer_face(eared_triangle):
    tri = next(f.id for f in eared_triangle.faces if f.degree == 3)
    with pytest.raises(RootNotOnOuterFace):
        from_rotation(eared_triangle.rotation, 3, outer_face_id=tri)


def test_default_outer_face_is_largest_at_root(eared_triangle):
    assert eared_triangle.outer_face.degree == 12


def test_face_adjacency(eared_triangle):
    tri = next(f.id for f in eared_triangle.faces if f.degree == 3)
    neighbours = eared_triangle.adjacent_faces(tri)
    assert len(neighbours) == 3
    assert all(eared_triangle.face(g).degree == 5 for g in neighbours)


# ── Cycles ───────────────────────────────────────────────────────


def test_cycle_lengths(c5, k4):
    assert has_cycle_of_length(c5, 5)
    assert not has_cycle_of_length(c5, 4)
    assert has_cycle_of_length(k4, 4)
    assert has_cycle_of_length(k4, 3)
    assert not has_cycle_of_length(k4, 5)


def test_class_membership(c5, c6, k4, chain_pendant_three, sun, special_five_cycle, eared_triangle):
    assert not in_class(c5, 5)
    assert in_class(c6, 5)
    assert not in_class(k4, 7)
    assert all(in_class(chain_pendant_three, l) for l in (5, 6, 7))
    assert in_class(sun, 5)
    assert not in_class(sun, 6)
    assert in_class(special_five_cycle, 7)
    assert not in_class(special_five_cycle, 5)
    assert in_class(eared_triangle, 7)
    assert not in_class(eared_triangle, 6)


# ── Surgery ──────────────────────────────────────────────────────


def test_delete_vertex_from_k4(k4):
    H = delete_vertices(k4, {3})
    assert len(H) == 3
    assert len(H.faces) == 2
    assert H.root == 0


def test_delete_nothing_is_identity(sun):
    assert delete_vertices(sun, set()) is sun


def test_cannot_delete_root(k3):
    with pytest.raises(RootDeleted):
        delete_vertices(k3, {0})


def test_delete_chain_configuration_leaves_isolated_leaves(chain_pendant_three):
    H = delete_vertices(chain_pendant_three, {0, 1, 2, 3, 4, 5})
    assert set(H.vertices) == set(range(6, 14))
    assert not H.edges
    assert len(H.components) == 8
    assert _euler(H) == 2 * len(H.components)


def test_component_graphs_root_first(chain_pendant_three):
    H = delete_vertices(chain_pendant_three, {0, 1, 2, 3, 4, 5})
    parts = component_graphs(H)
    assert parts[0].root == 13
    assert sorted(P.root for P in parts) == list(range(6, 14))


def test_component_roots_come_from_the_inherited_outer_boundary():
    # 0 hangs off 1; triangle 1-3-4 has 2 drawn inside it, joined to 3 and 4
    G = build({0: [1], 1: [3, 0, 4], 2: [3, 4], 3: [1, 2, 4], 4: [3, 2, 1]}, 0)
    assert G.outer_face.vertex_set == {0, 1, 3, 4}
    H = delete_vertices(G, {1})
    assert H.inherited_outer == {0, 3, 4}
    root_part, triangle = component_graphs(H)
    assert root_part.root == 0
    # the largest-face rule would pick 2, which never was on the outer face
    assert triangle.root == 3
    assert set(triangle.vertices) == {2, 3, 4}


def test_component_without_inherited_boundary_uses_largest_face():
    G = from_rotation({0: (), 1: (2, 3), 2: (3, 1), 3: (1, 2)}, 0)
    assert not G.inherited_outer
    assert [P.root for P in component_graphs(G)] == [0, 1]


# ── Blocks ───────────────────────────────────────────────────────


def test_bowtie_blocks(bowtie):
    d = blocks(bowtie)
    assert set(d.blocks) == {frozenset({0, 1, 2}), frozenset({0, 3, 4})}
    assert d.cut_vertices == {0}
    assert {b for b, _ in d.leaf_blocks()} == set(d.blocks)


def test_two_connected_single_block(c6):
    d = blocks(c6)
    assert len(d.blocks) == 1
    assert not d.cut_vertices
    assert is_two_connected(c6)


def test_path_blocks(p3):
    d = blocks(p3)
    assert set(d.blocks) == {frozenset({0, 1}), frozenset({1, 2})}
    assert d.cut_vertices == {1}
    assert not is_two_connected(p3)
