"""Finite flag simplicial complexes stored as one-skeleta.

A flag complex is determined by its one-skeleton, so only vertices and
edges are stored; simplices are the cliques of the graph and are
enumerated on demand.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Mapping

import networkx as nx

from .errors import InputError, UnknownVertex

__all__ = [
    "SkeletonGraph",
    "FlagComplex",
    "SimplicialComplexInput",
    "Cycle",
    "FlagWitness",
    "LargenessWitness",
    "check_flag",
    "graph_distance",
    "bfs_distances",
    "r_neighborhood",
    "iter_chordless_cycles",
    "find_short_cycle_no_diagonal",
    "is_m_large",
]


@dataclass(frozen=True, eq=True)
class SkeletonGraph:
    """Undirected simple graph on integer vertices."""

    vertices: tuple[int, ...]
    adj: Mapping[int, frozenset[int]]

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise InputError("vertex ids must be unique")
        for v in self.vertices:
            nbrs = self.adj.get(v)
            if nbrs is None:
                raise InputError(f"vertex {v} has no adjacency entry")
            if v in nbrs:
                raise InputError(f"self-loop at vertex {v}")
            for w in nbrs:
                if v not in self.adj.get(w, ()):
                    raise InputError(f"adjacency not symmetric at ({v}, {w})")

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def from_edges(cls, vertices: Iterable[int], edges: Iterable[Iterable[int]]) -> SkeletonGraph:
        vs = sorted(set(vertices))
        adj: dict[int, set[int]] = {v: set() for v in vs}
        for edge in edges:
            u, w = edge
            if u not in adj:
                raise UnknownVertex(u)
            if w not in adj:
                raise UnknownVertex(w)
            if u == w:
                raise InputError(f"self-loop at vertex {u}")
            adj[u].add(w)
            adj[w].add(u)
        return cls(tuple(vs), {v: frozenset(n) for v, n in adj.items()})

    def __contains__(self, v) -> bool:
        return v in self.adj

    def __len__(self) -> int:
        return len(self.vertices)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj.get(u, ())

    def neighbors(self, v: int) -> frozenset[int]:
        try:
            return self.adj[v]
        except KeyError:
            raise UnknownVertex(v) from None

    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, w) for u in self.vertices for w in self.adj[u] if u < w)

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def induced(self, vertices: Iterable[int]) -> SkeletonGraph:
        keep = set(vertices)
        for v in keep:
            if v not in self.adj:
                raise UnknownVertex(v)
        return SkeletonGraph(
            tuple(sorted(keep)), {v: self.adj[v] & keep for v in keep}
        )


@dataclass(frozen=True, eq=True)
class FlagComplex:
    """The flag completion of ``skeleton``."""

    skeleton: SkeletonGraph

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def from_edges(cls, vertices, edges) -> FlagComplex:
        return cls(SkeletonGraph.from_edges(vertices, edges))

    @property
    def vertices(self) -> tuple[int, ...]:
        return self.skeleton.vertices

    @property
    def adj(self) -> Mapping[int, frozenset[int]]:
        return self.skeleton.adj

    def __contains__(self, v) -> bool:
        return v in self.skeleton

    def __len__(self) -> int:
        return len(self.skeleton)

    def has_edge(self, u: int, v: int) -> bool:
        return self.skeleton.has_edge(u, v)

    def neighbors(self, v: int) -> frozenset[int]:
        return self.skeleton.neighbors(v)

    def edges(self) -> list[tuple[int, int]]:
        return self.skeleton.edges()

    def triangles(self) -> list[tuple[int, int, int]]:
        adj = self.adj
        out = []
        for u, v in self.edges():
            for w in adj[u] & adj[v]:
                if w > v:
                    out.append((u, v, w))
        out.sort()
        return out

    def simplices(self, dim: int) -> list[tuple[int, ...]]:
        """All ``dim``-simplices (cliques of size dim + 1), sorted."""
        if dim < 0:
            return []
        if dim == 0:
            return [(v,) for v in self.vertices]
        adj = self.adj
        out: list[tuple[int, ...]] = []

        def grow(clique, candidates):
            if len(clique) == dim + 1:
                out.append(tuple(clique))
                return
            for w in sorted(candidates):
                grow(clique + [w], {x for x in candidates & adj[w] if x > w})

        for v in self.vertices:
            grow([v], {w for w in adj[v] if w > v})
        return out

    def dimension(self) -> int:
        if not self.vertices:
            return -1
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges())
        return max(len(c) for c in nx.find_cliques(g)) - 1

    def span(self, vertices: Iterable[int]) -> FlagComplex:
        return FlagComplex(self.skeleton.induced(vertices))


def _skeleton(c) -> SkeletonGraph:
    return c.skeleton if isinstance(c, FlagComplex) else c


@dataclass(frozen=True)
class SimplicialComplexInput:
    vertices: tuple[int, ...]
    maximal_simplices: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class Cycle:
    """An embedded cycle, given by its cyclic vertex sequence."""

    vertices: tuple[int, ...]

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise InputError("a cycle needs at least three vertices")
        if len(set(self.vertices)) != len(self.vertices):
            raise InputError(f"cycle {self.vertices} repeats a vertex")

    @property
    def length(self) -> int:
        return len(self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def edges(self) -> list[tuple[int, int]]:
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def diagonals(self, c) -> list[tuple[int, int]]:
        """Pairs of non-consecutive cycle vertices that are adjacent in ``c``."""
        g = _skeleton(c)
        vs = self.vertices
        n = len(vs)
        out = []
        for i, j in combinations(range(n), 2):
            if j - i in (1, n - 1):
                continue
            if g.has_edge(vs[i], vs[j]):
                out.append((vs[i], vs[j]))
        return out

    def is_embedded_in(self, c) -> bool:
        g = _skeleton(c)
        return all(v in g for v in self.vertices) and all(g.has_edge(u, w) for u, w in self.edges())

    def canonical(self) -> Cycle:
        """Rotate to the least vertex and orient so the second entry is the smaller neighbour."""
        vs = self.vertices
        i = vs.index(min(vs))
        fwd = vs[i:] + vs[:i]
        back = (fwd[0],) + tuple(reversed(fwd[1:]))
        return Cycle(min(fwd, back))


@dataclass(frozen=True)
class FlagWitness:
    passed: bool
    missing: tuple[int, ...] | None = None


@dataclass(frozen=True)
class LargenessWitness:
    m: int
    bad_cycle: Cycle | None = None

    @property
    def verdict(self) -> str:
        return "pass" if self.bad_cycle is None else "fail"

    @property
    def passed(self) -> bool:
        return self.bad_cycle is None


def check_flag(data: SimplicialComplexInput) -> FlagWitness:
    """Decide whether the complex generated by ``maximal_simplices`` is flag.

    On failure the witness is a clique of the one-skeleton that spans no
    simplex and is minimal with that property (every proper sub-clique is
    a face). Among minimal witnesses the shortest, then lexicographically
    least, is returned.
    """
    vertices = set(data.vertices)
    faces = []
    for simplex in data.maximal_simplices:
        for v in simplex:
            if v not in vertices:
                raise UnknownVertex(v)
        faces.append(frozenset(simplex))

    g = nx.Graph()
    g.add_nodes_from(sorted(vertices))
    for face in faces:
        g.add_edges_from(combinations(sorted(face), 2))

    def is_face(vs) -> bool:
        s = set(vs)
        return any(s <= f for f in faces) or len(s) <= 1 and s <= vertices

    best = None
    for clique in nx.find_cliques(g):
        if is_face(clique):
            continue
        clique = sorted(clique)
        # every edge is a face by construction, so minimal witnesses have size >= 3
        for k in range(3, len(clique) + 1):
            found = next((sub for sub in combinations(clique, k) if not is_face(sub)), None)
            if found is not None:
                if best is None or (len(found), found) < (len(best), best):
                    best = found
                break
    return FlagWitness(best is None, best)


def bfs_distances(g, sources: Iterable[int], limit: float = math.inf) -> dict[int, int]:
    """Multi-source breadth-first distances, truncated at ``limit``."""
    g = _skeleton(g)
    dist: dict[int, int] = {}
    queue: deque[int] = deque()
    for s in sources:
        if s not in g:
            raise UnknownVertex(s)
        if s not in dist:
            dist[s] = 0
            queue.append(s)
    while queue:
        u = queue.popleft()
        d = dist[u]
        if d >= limit:
            continue
        for w in g.adj[u]:
            if w not in dist:
                dist[w] = d + 1
                queue.append(w)
    return dist


def graph_distance(g, u: int, v: int) -> float:
    """Edge-path distance in the one-skeleton; ``math.inf`` across components."""
    g = _skeleton(g)
    if v not in g:
        raise UnknownVertex(v)
    return bfs_distances(g, [u]).get(v, math.inf)


def r_neighborhood(g, zs: Iterable[int], r: int) -> FlagComplex:
    """Full subcomplex spanned by the vertices within distance ``r`` of ``zs``."""
    g = _skeleton(g)
    zs = list(zs)
    if not zs:
        raise InputError("r_neighborhood needs a non-empty vertex set")
    if r < 0:
        raise InputError("radius must be non-negative")
    return FlagComplex(g.induced(bfs_distances(g, zs, r)))


def iter_chordless_cycles(
    c, max_length: int, vertices: Iterable[int] | None = None
) -> Iterator[Cycle]:
    """Yield embedded cycles of length 4..max_length that have no diagonal.

    Cycles are produced in canonical form (least vertex first, smaller
    neighbour second) and in lexicographic order. With ``vertices`` the
    search is restricted to cycles inside the span of that set.
    """
    g = _skeleton(c)
    order = sorted(g.vertices if vertices is None else set(vertices))
    index = {v: i for i, v in enumerate(order)}
    nbm = [0] * len(order)
    for v, i in index.items():
        m = 0
        for w in g.adj[v]:
            j = index.get(w)
            if j is not None:
                m |= 1 << j
        nbm[i] = m

    def bits(m):
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m ^= low

    def walk(path, start_nb, higher, blocked, inner):
        last = path[-1]
        for w in bits(nbm[last] & higher & ~blocked & ~inner):
            if start_nb >> w & 1:
                if len(path) >= 3 and path[1] < w:
                    yield path + [w]
                continue
            if len(path) + 1 < max_length:
                yield from walk(path + [w], start_nb, higher, blocked | 1 << w, inner | nbm[last])

    for s in range(len(order)):
        higher = ~((1 << (s + 1)) - 1)
        for a in bits(nbm[s] & higher):
            for path in walk([s, a], nbm[s], higher, 1 << s | 1 << a, 0):
                yield Cycle(tuple(order[i] for i in path))


def find_short_cycle_no_diagonal(c, m: int, vertices: Iterable[int] | None = None) -> Cycle | None:
    """Lexicographically least cycle of length in [4, m - 1] without a diagonal."""
    if m < 6:
        raise InputError(f"m must be at least 6, got {m}")
    return next(iter_chordless_cycles(c, m - 1, vertices), None)


def is_m_large(c, m: int, vertices: Iterable[int] | None = None) -> LargenessWitness:
    # m-largeness makes sense for any m >= 4; systolicity only needs m >= 6
    if m < 4:
        raise InputError(f"m must be at least 4, got {m}")
    return LargenessWitness(m, next(iter_chordless_cycles(c, m - 1, vertices), None))
