"""Graph representation, stratification and intersection numbers.

Everything here is exact: distances are integers and the local intersection
numbers are :class:`fractions.Fraction` values, because the degree-weighted
numbers of a non-regular graph divide by vertex degrees.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np


class GraphError(ValueError):
    """Invalid graph or intersection-array document."""


@dataclass(frozen=True)
class Graph:
    n_vertices: int
    edges: frozenset[tuple[int, int]]
    name: str | None = None
    _neighbors: tuple[tuple[int, ...], ...] = field(
        default=(), init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        nbrs: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        object.__setattr__(self, "_neighbors", tuple(tuple(sorted(x)) for x in nbrs))

    @classmethod
    def from_edges(
        cls, n: int, edges: Sequence[Sequence[int]], name: str | None = None
    ) -> "Graph":
        """Validate ``edges`` and build a connected simple graph."""
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise GraphError(f"n must be a positive integer, got {n!r}")
        seen: set[tuple[int, int]] = set()
        for e in edges:
            if len(e) != 2:
                raise GraphError(f"edge {e!r} does not have two endpoints")
            u, v = (int(x) for x in e)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge {e!r} has a vertex out of range 0..{n - 1}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
        g = cls(n, frozenset(seen), name)
        if min(distances(g, 0)) < 0:
            raise GraphError("graph is disconnected")
        return g

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._neighbors[v]

    def degree(self, v: int) -> int:
        return len(self._neighbors[v])

    @property
    def degrees(self) -> list[int]:
        return [len(x) for x in self._neighbors]

    @property
    def is_regular(self) -> bool:
        return len(set(self.degrees)) == 1

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def adjacency(self) -> np.ndarray:
        """Symmetric 0/1 adjacency matrix with integer dtype."""
        a = np.zeros((self.n_vertices, self.n_vertices), dtype=np.int64)
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1
        return a

    def to_document(self) -> dict[str, Any]:
        doc: dict[str, Any] = {}
        if self.name is not None:
            doc["name"] = self.name
        doc["n"] = self.n_vertices
        doc["edges"] = [list(e) for e in sorted(self.edges)]
        return doc


@dataclass(frozen=True)
class Stratification:
    reference: int
    strata: tuple[tuple[int, ...], ...]

    @property
    def valencies(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.strata)

    @property
    def diameter(self) -> int:
        return len(self.strata) - 1

    def level_of(self) -> dict[int, int]:
        return {v: i for i, s in enumerate(self.strata) for v in s}


@dataclass(frozen=True)
class IntersectionNumbers:
    """Intersection numbers ``b_0..b_{D-1}``, ``c_1..c_D`` and ``a_0..a_D``.

    ``kappa`` is the common degree for regular graphs and ``None`` when the
    numbers are the degree-weighted ones of a non-regular graph (or when an
    array document supplies ``a`` explicitly without a degree).
    """

    b: tuple[Fraction, ...]
    c: tuple[Fraction, ...]
    a: tuple[Fraction, ...]
    kappa: int | None = None
    name: str | None = None

    def __post_init__(self) -> None:
        if len(self.b) != len(self.c) or len(self.a) != len(self.b) + 1:
            raise GraphError(
                f"inconsistent lengths: |b|={len(self.b)}, |c|={len(self.c)}, |a|={len(self.a)}"
            )

    @property
    def diameter(self) -> int:
        return len(self.b)

    @property
    def is_regular(self) -> bool:
        return self.kappa is not None

    def b_ext(self, i: int) -> Fraction:
        """``b_i`` with the convention ``b_D = 0``."""
        return self.b[i] if i < self.diameter else Fraction(0)

    def c_ext(self, i: int) -> Fraction:
        """``c_i`` with the convention ``c_0 = 0``."""
        return self.c[i - 1] if i >= 1 else Fraction(0)

    @classmethod
    def from_array(
        cls,
        b: Sequence[Any],
        c: Sequence[Any],
        kappa: int | None = None,
        a: Sequence[Any] | None = None,
        name: str | None = None,
    ) -> "IntersectionNumbers":
        """Build numbers from an intersection array ``{b; c}``.

        Without ``a`` the array is taken to describe a regular graph of degree
        ``kappa`` (default ``b_0``) and ``a_i = kappa - b_i - c_i``.
        """
        if len(b) != len(c) or not b:
            raise GraphError("intersection array needs len(b) == len(c) >= 1")
        bf = tuple(Fraction(x) for x in b)
        cf = tuple(Fraction(x) for x in c)
        D = len(bf)
        if a is None:
            k = int(bf[0]) if kappa is None else int(kappa)
            af = tuple(
                k - (bf[i] if i < D else 0) - (cf[i - 1] if i >= 1 else 0)
                for i in range(D + 1)
            )
            return cls(bf, cf, tuple(Fraction(x) for x in af), k, name)
        if len(a) != D + 1:
            raise GraphError(f"a must have length D+1={D + 1}, got {len(a)}")
        return cls(bf, cf, tuple(Fraction(x) for x in a), kappa, name)

    def to_document(self) -> dict[str, Any]:
        doc: dict[str, Any] = {}
        if self.name is not None:
            doc["name"] = self.name
        doc["b"] = [_num(x) for x in self.b]
        doc["c"] = [_num(x) for x in self.c]
        if self.kappa is not None:
            doc["kappa"] = self.kappa
        if self.kappa is None or any(
            self.a[i] != self.kappa - self.b_ext(i) - self.c_ext(i)
            for i in range(self.diameter + 1)
        ):
            doc["a"] = [_num(x) for x in self.a]
        return doc


@dataclass(frozen=True)
class PdrReport:
    is_pseudo_distance_regular: bool
    numbers: IntersectionNumbers | None = None
    # (k, beta, beta') on failure
    witness: tuple[int, int, int] | None = None

    def __post_init__(self) -> None:
        if self.is_pseudo_distance_regular != (self.witness is None):
            raise ValueError("witness must be present iff the check failed")


def _num(x: Fraction) -> int | str:
    return int(x) if x.denominator == 1 else str(x)


def _parse_num(x: Any) -> Fraction:
    if isinstance(x, bool):
        raise GraphError(f"not a number: {x!r}")
    if isinstance(x, (int, str)):
        try:
            return Fraction(x)
        except ValueError as exc:
            raise GraphError(f"not a number: {x!r}") from exc
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**9)
    raise GraphError(f"not a number: {x!r}")


def load_graph(description: str | dict[str, Any]) -> Graph:
    """Parse a graph document (JSON text or an already decoded mapping)."""
    doc = _decode(description)
    if "n" not in doc or "edges" not in doc:
        raise GraphError("graph document needs 'n' and 'edges'")
    edges = doc["edges"]
    if not isinstance(edges, list) or not all(isinstance(e, list) for e in edges):
        raise GraphError("'edges' must be a list of 2-element lists")
    for e in edges:
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in e):
            raise GraphError(f"edge {e!r} must contain integers")
    return Graph.from_edges(doc["n"], edges, doc.get("name"))


def load_array(description: str | dict[str, Any]) -> IntersectionNumbers:
    """Parse an intersection-array document ``{name, b, c, kappa?, a?}``."""
    doc = _decode(description)
    if "b" not in doc or "c" not in doc:
        raise GraphError("array document needs 'b' and 'c'")
    b = [_parse_num(x) for x in doc["b"]]
    c = [_parse_num(x) for x in doc["c"]]
    a = [_parse_num(x) for x in doc["a"]] if "a" in doc else None
    kappa = doc.get("kappa")
    if kappa is not None and (not isinstance(kappa, int) or isinstance(kappa, bool)):
        raise GraphError(f"kappa must be an integer, got {kappa!r}")
    return IntersectionNumbers.from_array(b, c, kappa=kappa, a=a, name=doc.get("name"))


def load_document(description: str | dict[str, Any]) -> Graph | IntersectionNumbers:
    doc = _decode(description)
    if "edges" in doc:
        return load_graph(doc)
    return load_array(doc)


def dump_document(obj: Graph | IntersectionNumbers) -> str:
    return json.dumps(obj.to_document())


def _decode(description: str | dict[str, Any]) -> dict[str, Any]:
    if isinstance(description, dict):
        return description
    try:
        doc = json.loads(description)
    except json.JSONDecodeError as exc:
        raise GraphError(f"cannot parse document: {exc}") from exc
    if not isinstance(doc, dict):
        raise GraphError("document must be a JSON object")
    return doc


def distances(g: Graph, o: int) -> list[int]:
    """Breadth-first distances from ``o``; unreachable vertices get -1."""
    if not 0 <= o < g.n_vertices:
        raise IndexError(f"vertex {o} out of range")
    dist = [-1] * g.n_vertices
    dist[o] = 0
    queue = deque([o])
    while queue:
        u = queue.popleft()
        for v in g.neighbors(u):
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def stratify(g: Graph, o: int = 0) -> Stratification:
    dist = distances(g, o)
    D = max(dist)
    strata: list[list[int]] = [[] for _ in range(D + 1)]
    for v, i in enumerate(dist):
        strata[i].append(v)
    return Stratification(o, tuple(tuple(s) for s in strata))


def local_numbers(
    g: Graph, s: Stratification, beta: int
) -> tuple[Fraction, Fraction, Fraction]:
    """Degree-weighted ``(c_k, a_k, b_k)`` at ``beta`` (reduces to counts when regular)."""
    level = s.level_of()
    k = level[beta]
    sums = {k - 1: 0, k: 0, k + 1: 0}
    for gamma in g.neighbors(beta):
        sums[level[gamma]] += g.degree(gamma)
    kb = g.degree(beta)
    return Fraction(sums[k - 1], kb), Fraction(sums[k], kb), Fraction(sums[k + 1], kb)


def intersection_numbers(g: Graph, s: Stratification) -> PdrReport:
    """Check pseudo-distance-regularity around ``s.reference``.

    Returns a failing report with a witness ``(k, beta, beta')`` instead of
    raising when two vertices of one stratum disagree.
    """
    D = s.diameter
    b: list[Fraction] = []
    c: list[Fraction] = []
    a: list[Fraction] = []
    for k, stratum in enumerate(s.strata):
        first = stratum[0]
        ref = local_numbers(g, s, first)
        for beta in stratum[1:]:
            if local_numbers(g, s, beta) != ref:
                return PdrReport(False, witness=(k, first, beta))
        ck, ak, bk = ref
        a.append(ak)
        if k < D:
            b.append(bk)
        if k > 0:
            c.append(ck)
    kappa = g.degree(0) if g.is_regular else None
    nums = IntersectionNumbers(tuple(b), tuple(c), tuple(a), kappa, g.name)
    if not check_consistency(nums, s.valencies):
        raise AssertionError("extracted intersection numbers violate the counting relations")
    return PdrReport(True, numbers=nums)


def array_valencies(num: IntersectionNumbers) -> tuple[Fraction, ...]:
    """Stratum sizes implied by ``k_{i-1} b_{i-1} = k_i c_i`` with ``k_0 = 1``."""
    ks = [Fraction(1)]
    for i in range(1, num.diameter + 1):
        if num.c[i - 1] == 0:
            raise GraphError(f"c_{i} = 0")
        ks.append(ks[-1] * num.b[i - 1] / num.c[i - 1])
    return tuple(ks)


def check_consistency(num: IntersectionNumbers, valencies: Sequence[Any] | None = None) -> bool:
    """Counting relations between intersection numbers and stratum sizes.

    Regular numbers must satisfy ``a_i + b_i + c_i = kappa``, ``c_1 = 1``,
    ``b_0 = kappa`` and ``k_{i-1} b_{i-1} = k_i c_i``.  Degree-weighted numbers
    of a non-regular graph only obey the boundary and positivity conditions;
    the edge-balance relation ties unweighted counts and does not apply.
    Without ``valencies`` they are derived from the array and must be
    positive integers.
    """
    D = num.diameter
    if any(x <= 0 for x in num.b) or any(x <= 0 for x in num.c):
        return False
    if any(x < 0 for x in num.a):
        return False
    if valencies is None:
        try:
            ks = array_valencies(num)
        except GraphError:
            return False
        if any(k.denominator != 1 or k < 1 for k in ks):
            return False
    else:
        ks = tuple(Fraction(k) for k in valencies)
        if len(ks) != D + 1 or ks[0] != 1:
            return False
    if num.kappa is None:
        return True
    k = num.kappa
    if num.b[0] != k or num.c[0] != 1:
        return False
    for i in range(D + 1):
        if num.a[i] + num.b_ext(i) + num.c_ext(i) != k:
            return False
    return all(ks[i - 1] * num.b[i - 1] == ks[i] * num.c[i - 1] for i in range(1, D + 1))
