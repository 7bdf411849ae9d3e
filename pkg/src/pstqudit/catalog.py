"""Example networks with golden spectral data and published coupling sets."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable

import numpy as np

from .graph import Graph, GraphError, IntersectionNumbers

PI = math.pi
SQ3 = math.sqrt(3)
SQ5 = math.sqrt(5)
SQ6 = math.sqrt(6)


def glued_trees(n: int) -> Graph:
    """Two binary trees of height ``n`` whose leaves are identified pairwise.

    Vertex 0 is the left root and the last vertex is the right root.  Leaves
    are shared in heap order, giving ``2**(n+1) + 2**n - 2`` vertices.
    """
    if not 1 <= n <= 8:
        raise GraphError(f"glued_trees needs 1 <= n <= 8, got {n}")
    left = 2 ** (n + 1) - 1
    edges = [((i - 1) // 2, i) for i in range(1, left)]
    first_leaf = 2**n - 1
    # right tree: internal heap node h (0 <= h < first_leaf) -> vertex id
    right_id = {h: left + (first_leaf - 1 - h) for h in range(first_leaf)}
    for h in range(first_leaf):
        for child in (2 * h + 1, 2 * h + 2):
            cid = child if child >= first_leaf else right_id[child]
            edges.append((right_id[h], cid))
    return Graph.from_edges(left + first_leaf, edges, f"G_{n}")


def modified_glued_trees_array(n: int) -> IntersectionNumbers:
    """Intersection array ``{3, 2^(n-1), 1^n; 1^n, 2^(n-1), 3}`` with ``alpha_{n+1} = 1``.

    The diagonal entries are supplied explicitly because the published
    Jacobi parameters put the single self-coupling at stratum ``n+1``.
    """
    if n < 1:
        raise GraphError("n must be >= 1")
    b = [3] + [2] * (n - 1) + [1] * n
    c = [1] * n + [2] * (n - 1) + [3]
    a = [0] * (2 * n + 1)
    a[n + 1] = 1
    return IntersectionNumbers.from_array(b, c, a=a, name=f"modified_G_{n}")


def icosahedron() -> Graph:
    edges = []
    for i in range(5):
        up, up_next = 1 + i, 1 + (i + 1) % 5
        lo, lo_next = 6 + i, 6 + (i + 1) % 5
        edges += [(0, up), (up, up_next), (lo, lo_next), (lo, 11), (up, lo), (up_next, lo)]
    return Graph.from_edges(12, edges, "icosahedron")


def simplex3() -> Graph:
    """Octahedron ``K_{2,2,2}``; vertex 5 is opposite vertex 0."""
    opposite = {(0, 5), (1, 4), (2, 3)}
    edges = [e for e in combinations(range(6), 2) if e not in opposite]
    return Graph.from_edges(6, edges, "simplex3")


def hypercube(k: int) -> Graph:
    if not 1 <= k <= 6:
        raise GraphError(f"hypercube needs 1 <= k <= 6, got {k}")
    edges = [(v, v ^ (1 << b)) for v in range(2**k) for b in range(k) if v < v ^ (1 << b)]
    return Graph.from_edges(2**k, edges, f"hypercube{k}")


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, list(combinations(range(n), 2)), f"K_{n}")


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], f"C_{n}")


def star(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)], f"K_1,{leaves}")


JSet = Callable[[float, float], np.ndarray]


@dataclass(frozen=True)
class CatalogEntry:
    """Construction plus golden values.

    ``published_order[i]`` is the index, in descending node order, of the node the
    published tables list in position ``i``.  Golden node/weight lists and
    ``P`` snapshots are in that published order.
    """

    name: str
    build: Callable[[], Graph | IntersectionNumbers]
    reference: int = 0
    alpha: tuple | None = None
    omega: tuple | None = None
    valencies: tuple | None = None
    nodes: tuple | None = None
    weights: tuple | None = None
    published_order: tuple[int, ...] | None = None
    p_matrix: np.ndarray | None = None
    inverse_matrix: np.ndarray | None = None
    couplings: JSet | None = None
    coupling_tol: float = 1e-9
    golden_tol: float = 1e-12
    notes: str = ""
    distance_regular: bool = False
    feasible: bool = True
    extra: dict = field(default_factory=dict)

    def construct(self) -> Graph | IntersectionNumbers:
        return self.build()


def _g2_couplings(theta: float, t0: float) -> np.ndarray:
    return np.array(
        [-(theta + 2 * PI / 3) / (2 * t0), PI / (4 * SQ3 * t0), -PI / (6 * t0), PI / (4 * SQ3 * t0), PI / (6 * t0)]
    )


def _mod_g2_couplings(theta: float, t0: float) -> np.ndarray:
    return np.array(
        [
            -(theta + 0.4925 * PI) / (2 * t0),
            -0.1838 * PI / (2 * t0),
            -0.0271 * PI / (2 * t0),
            -0.0293 * PI / (2 * t0),
            0.4563 * PI / (2 * t0),
        ]
    )


def _ico_couplings(theta: float, t0: float) -> np.ndarray:
    return np.array([-(2 * theta + PI) / (4 * t0), 0.0, 0.0, PI / (4 * t0)])


def _simplex_couplings(theta: float, t0: float) -> np.ndarray:
    return np.array([-(2 * theta + 5 * PI / 3) / (4 * t0), -PI / (3 * t0), PI / (12 * t0)])


def _cube_couplings(theta: float, t0: float) -> np.ndarray:
    return np.array(
        [
            -(theta + 5 * PI / 8) / (2 * t0),
            -PI / (8 * t0),
            -3 * PI / (8 * SQ6 * t0),
            -PI / (8 * t0),
            3 * PI / (16 * t0),
        ]
    )


F = Fraction
_CATALOG = [
    CatalogEntry(
        "G2",
        lambda: glued_trees(2),
        alpha=(0, 0, 0, 0, 0),
        omega=(2, 2, 2, 2),
        valencies=(1, 2, 4, 2, 1),
        nodes=(SQ6, math.sqrt(2), 0.0, -math.sqrt(2), -SQ6),
        weights=(F(1, 12), F(1, 4), F(1, 3), F(1, 4), F(1, 12)),
        published_order=(0, 1, 2, 3, 4),
        p_matrix=np.array(
            [
                [1, 1, 1, 1, 1],
                [SQ3, 1, 0, -1, -SQ3],
                [2, 0, -1, 0, 2],
                [SQ3, -1, 0, 1, -SQ3],
                [1, -1, 1, -1, 1],
            ]
        ),
        inverse_matrix=np.array(
            [
                [1, SQ3, 2, SQ3, 1],
                [3, 3, 0, -3, -3],
                [4, 0, -4, 0, 4],
                [3, -3, 0, 3, -3],
                [1, -SQ3, 2, -SQ3, 1],
            ]
        )
        / 12,
        couplings=_g2_couplings,
        notes="glued binary trees of height 2, leaves identified in heap order; 10 vertices",
    ),
    CatalogEntry(
        "modified_G2",
        lambda: modified_glued_trees_array(2),
        alpha=(0, 0, 0, 1, 0),
        omega=(3, 2, 2, 3),
        valencies=(1, 3, 6, 3, 1),
        nodes=(0.0, 3.0, -2.4728, -1.4626, 1.9354),
        weights=(F(2, 7), F(1, 26), 0.3101, 0.1786, 0.1872),
        published_order=(2, 0, 4, 3, 1),
        p_matrix=np.array(
            [
                [1, 1, 1, 1, 1],
                [0, SQ3, -1.4277, -0.8445, 1.1174],
                [-1.3417, 0, 1.3930, -0.3850, 0.1492],
                [0, 2 * SQ3, -0.4594, 0.6974, 0.4046],
                [1, 2, 0.5572, -1.4304, -0.6270],
            ]
        ),
        couplings=_mod_g2_couplings,
        # couplings printed with four decimals of pi
        coupling_tol=2e-3,
        golden_tol=5e-4,
        notes="array-only; published values rounded to four decimals",
        feasible=False,
    ),
    CatalogEntry(
        "icosahedron",
        icosahedron,
        alpha=(0, 2, 2, 0),
        omega=(5, 4, 5),
        valencies=(1, 5, 5, 1),
        nodes=(-1.0, 5.0, SQ5, -SQ5),
        weights=(F(5, 12), F(1, 12), F(1, 4), F(1, 4)),
        published_order=(2, 0, 1, 3),
        p_matrix=np.array(
            [[1, 1, 1, 1], [-1 / SQ5, SQ5, 1, -1], [-1 / SQ5, SQ5, -1, 1], [1, 1, -1, -1]]
        ),
        inverse_matrix=np.array(
            [[5, -SQ5, -SQ5, 5], [1, SQ5, SQ5, 1], [3, 3, -3, -3], [3, -3, 3, -3]]
        )
        / 12,
        couplings=_ico_couplings,
        distance_regular=True,
    ),
    CatalogEntry(
        "simplex3",
        simplex3,
        alpha=(0, 2, 0),
        omega=(4, 4),
        valencies=(1, 4, 1),
        nodes=(0.0, 4.0, -2.0),
        weights=(F(1, 2), F(1, 6), F(1, 3)),
        published_order=(1, 0, 2),
        p_matrix=np.array([[1, 1, 1], [0, 2, -1], [-1, 1, 1]]),
        inverse_matrix=np.array([[3, 0, -3], [1, 2, 1], [2, -2, 2]]) / 6,
        couplings=_simplex_couplings,
        distance_regular=True,
        notes="octahedron realization; array {4, 1; 1, 4}",
    ),
    CatalogEntry(
        "hypercube4",
        lambda: hypercube(4),
        alpha=(0, 0, 0, 0, 0),
        omega=(4, 6, 6, 4),
        valencies=(1, 4, 6, 4, 1),
        nodes=(0.0, 2.0, -2.0, 4.0, -4.0),
        weights=(F(3, 8), F(1, 4), F(1, 4), F(1, 16), F(1, 16)),
        published_order=(2, 1, 3, 0, 4),
        p_matrix=np.array(
            [
                [1, 1, 1, 1, 1],
                [0, 1, -1, 2, -2],
                [-SQ6 / 3, 0, 0, SQ6, SQ6],
                [0, -1, 1, 2, -2],
                [1, -1, -1, 1, 1],
            ]
        ),
        inverse_matrix=np.array(
            [
                [6, 0, -2 * SQ6, 0, 6],
                [4, 4, 0, -4, -4],
                [4, -4, 0, 4, -4],
                [1, 2, SQ6, 2, 1],
                [1, -2, SQ6, -2, 1],
            ]
        )
        / 16,
        couplings=_cube_couplings,
        distance_regular=True,
        notes="4-cube stands in for the 16-node Hadamard-derived network (same array)",
    ),
    CatalogEntry(
        "K2",
        lambda: complete_graph(2),
        alpha=(0, 0),
        omega=(1,),
        valencies=(1, 1),
        nodes=(1.0, -1.0),
        weights=(F(1, 2), F(1, 2)),
        published_order=(0, 1),
        distance_regular=True,
    ),
    CatalogEntry(
        "C4",
        lambda: cycle(4),
        alpha=(0, 0, 0),
        omega=(2, 2),
        valencies=(1, 2, 1),
        nodes=(2.0, 0.0, -2.0),
        weights=(F(1, 4), F(1, 2), F(1, 4)),
        published_order=(0, 1, 2),
        distance_regular=True,
    ),
    CatalogEntry(
        "K3",
        lambda: complete_graph(3),
        alpha=(0, 1),
        omega=(2,),
        valencies=(1, 2),
        nodes=(2.0, -1.0),
        weights=(F(1, 3), F(2, 3)),
        published_order=(0, 1),
        distance_regular=True,
        feasible=False,
    ),
]

CATALOG: dict[str, CatalogEntry] = {e.name: e for e in _CATALOG}
PUBLISHED_NETWORKS = ("G2", "modified_G2", "icosahedron", "simplex3", "hypercube4")
PST_NETWORKS = tuple(name for name, e in CATALOG.items() if e.feasible)


def get(name: str) -> CatalogEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(CATALOG)}") from None
