"""Shared plane-graph fixtures.

Rotation lists are counterclockwise. The configuration fixtures pad degrees with
pendant leaves placed in outer corners, so every named triangle stays a face and
the only cycles are the ones drawn.
"""

from __future__ import annotations

import pytest

from src.alon_tarsi import configure_limits
from src.genlab import configure_generator
from src.plane_graph import PlaneGraph, build
from src.reducer import configure_reducer


def cycle(n: int, root: int = 0) -> PlaneGraph:
    return build([[(i - 1) % n, (i + 1) % n] for i in range(n)], root)


@pytest.fixture(autouse=True)
def default_limits():
    """Every test starts from the documented defaults."""
    configure_limits(cap_edges=32, at_cap_edges=20)
    configure_reducer(base_threshold=6)
    configure_generator(max_vertices=10)
    yield
    configure_limits(cap_edges=32, at_cap_edges=20)
    configure_reducer(base_threshold=6)
    configure_generator(max_vertices=10)


# ── Small graphs ─────────────────────────────────────────────────


@pytest.fixture
def k1() -> PlaneGraph:
    return build([[]], 0)


@pytest.fixture
def k2() -> PlaneGraph:
    return build([[1], [0]], 0)


@pytest.fixture
def p3() -> PlaneGraph:
    return build([[1], [0, 2], [1]], 0)


@pytest.fixture
def k3() -> PlaneGraph:
    return build([[1, 2], [2, 0], [0, 1]], 0)


@pytest.fixture
def k4() -> PlaneGraph:
    return build([[1, 2, 3], [2, 0, 3], [3, 0, 1], [1, 0, 2]], 0)


@pytest.fixture
def c4() -> PlaneGraph:
    return cycle(4)


@pytest.fixture
def c5() -> PlaneGraph:
    return cycle(5)


@pytest.fixture
def c6() -> PlaneGraph:
    return cycle(6)


@pytest.fixture
def bowtie() -> PlaneGraph:
    """Triangles 012 and 034 sharing the root 0."""
    return build([[3, 1, 2, 4], [2, 0], [0, 1], [0, 4], [3, 0]], 0)


@pytest.fixture
def bridged_triangles() -> PlaneGraph:
    """Triangles 012 and 345 joined by the edge 23; vertices 2 and 3 have degree 3."""
    return build([[1, 2], [2, 0], [0, 1, 3], [4, 5, 2], [5, 3], [3, 4]], 0)


# ── Configuration fixtures ───────────────────────────────────────


@pytest.fixture
def chain_pendant_three() -> PlaneGraph:
    """Minor triangle [0 1 3], chain triangle [1 2 4], pendant 3-vertex 5 next to 2.

    Roles: w = (0, 1, 2), u = (3, 4), x = 5. Root 13 is a leaf of 5.
    """
    return build(
        {
            0: [1, 3, 6],
            1: [3, 0, 2, 4],
            2: [4, 1, 5, 9],
            3: [0, 1, 7, 8],
            4: [1, 2, 10, 11],
            5: [2, 12, 13],
            6: [0], 7: [3], 8: [3], 9: [2], 10: [4], 11: [4], 12: [5], 13: [5],
        },
        13,
    )


@pytest.fixture
def chain_two_minor() -> PlaneGraph:
    """Minor triangles [0 1 2] (3-vertex 0) and [4 3 5] (3-vertex 4) joined by the edge 1-3.

    Root 13 is a leaf of 5.
    """
    return build(
        {
            0: [1, 2, 6],
            1: [2, 0, 3, 7],
            2: [0, 1, 8, 9],
            3: [5, 4, 1, 10],
            4: [3, 5, 11],
            5: [4, 3, 12, 13],
            6: [0], 7: [1], 8: [2], 9: [2], 10: [3], 11: [4], 12: [5], 13: [5],
        },
        13,
    )


@pytest.fixture
def sun() -> PlaneGraph:
    """6-face 0..5 with triangles [i, i+1, 6+i] on five of its edges (l = 5).

    d(0) = 3, every other named vertex has degree 4. Root 11 is a leaf of 5.
    """
    return build(
        {
            0: [5, 1, 6],
            1: [0, 2, 7, 6],
            2: [1, 3, 8, 7],
            3: [2, 4, 9, 8],
            4: [3, 5, 10, 9],
            5: [4, 0, 11, 10],
            6: [0, 1, 12, 13],
            7: [1, 2, 14, 15],
            8: [2, 3, 16, 17],
            9: [3, 4, 18, 19],
            10: [4, 5, 20, 21],
            11: [5], 12: [6], 13: [6], 14: [7], 15: [7], 16: [8], 17: [8],
            18: [9], 19: [9], 20: [10], 21: [10],
        },
        11,
    )


@pytest.fixture
def special_five_cycle() -> PlaneGraph:
    """5-face 0-1-2-3-4 with the triangle [0 4 5] outside it (l = 7).

    Degrees along u1..u6 = 0..5 are 3, 4, 3, 4, 4, 4. Root 13 is a leaf of 5.
    """
    return build(
        {
            0: [5, 4, 1],
            1: [0, 2, 6, 7],
            2: [1, 3, 8],
            3: [2, 4, 9, 10],
            4: [3, 0, 5, 11],
            5: [4, 0, 12, 13],
            6: [1], 7: [1], 8: [2], 9: [3], 10: [3], 11: [4], 12: [5], 13: [5],
        },
        13,
    )


@pytest.fixture
def eared_triangle() -> PlaneGraph:
    """Triangle 012 whose three edges each close a 5-face with a path of length 4 (l = 7).

    Faces: the triangle, three 5-faces and a 12-face outside. Root 3 is an ear vertex.
    """
    return build(
        {
            0: [1, 2, 11, 3],
            1: [6, 2, 0, 5],
            2: [8, 9, 0, 1],
            3: [0, 4], 4: [3, 5], 5: [4, 1],
            6: [1, 7], 7: [6, 8], 8: [7, 2],
            9: [2, 10], 10: [9, 11], 11: [10, 0],
        },
        3,
    )


@pytest.fixture
def three_minor_hexagon() -> PlaneGraph:
    """6-face 0..5 with triangles [0 1 6], [2 3 7], [4 5 8]; 0, 2 and 4 are minor 3-vertices (l = 5).

    1, 3 and 5 carry leaves 9, 10, 11. Root 9.
    """
    return build(
        {
            0: [6, 1, 5],
            1: [9, 2, 0, 6],
            2: [7, 3, 1],
            3: [10, 4, 2, 7],
            4: [8, 5, 3],
            5: [11, 0, 4, 8],
            6: [1, 0], 7: [3, 2], 8: [5, 4],
            9: [1], 10: [3], 11: [5],
        },
        9,
    )


@pytest.fixture
def four_triangle_hexagon() -> PlaneGraph:
    """6-face 0..5 with triangles on the edges 01, 12, 34, 45; its only 3-vertices are 0 and 2 (l = 5).

    3 and 5 carry leaves 10 and 11. Root 10.
    """
    return build(
        {
            0: [6, 1, 5],
            1: [7, 2, 0, 6],
            2: [3, 1, 7],
            3: [10, 8, 4, 2],
            4: [9, 5, 3, 8],
            5: [11, 0, 4, 9],
            6: [1, 0], 7: [2, 1], 8: [4, 3], 9: [5, 4],
            10: [3], 11: [5],
        },
        10,
    )
