"""Evidence for simple connectivity: integral H1, pi1 presentations and
budgeted loop contraction.

None of this decides simple connectivity; a loop that cannot be
contracted within the budget is reported as unknown.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from itertools import count
from typing import Iterable, Sequence

from .complex import FlagComplex, SkeletonGraph, bfs_distances
from .errors import InputError, UnknownVertex
from .group import Presentation, formal_inverse


def _flag(c) -> FlagComplex:
    return c if isinstance(c, FlagComplex) else FlagComplex(c)


def smith_diagonal(rows: Sequence[Sequence[int]], ncols: int) -> list[int]:
    """Invariant factors (nonzero, ascending by divisibility) of an integer matrix."""
    a = [list(r) for r in rows if any(r)]
    m, n = len(a), ncols
    diag = []
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        a[t], a[i] = a[i], a[t]
        if j != t:
            for row in a:
                row[t], row[j] = row[j], row[t]
        while True:
            p = a[t][t]
            clean = True
            for i in range(t + 1, m):
                x = a[i][t]
                if x:
                    q = x // p
                    ri, rt = a[i], a[t]
                    for j in range(t, n):
                        if rt[j]:
                            ri[j] -= q * rt[j]
                    if ri[t]:
                        clean = False
            rt = a[t]
            for j in range(t + 1, n):
                x = rt[j]
                if x:
                    q = x // p
                    for i in range(t, m):
                        if a[i][t]:
                            a[i][j] -= q * a[i][t]
                    if rt[j]:
                        clean = False
            if clean:
                break
            # a remainder survived: move the smallest one onto the pivot and repeat
            cand = [(abs(a[i][t]), i, t) for i in range(t + 1, m) if a[i][t]]
            cand += [(abs(a[t][j]), t, j) for j in range(t + 1, n) if a[t][j]]
            _, i, j = min(cand)
            if i != t:
                a[t], a[i] = a[i], a[t]
            else:
                for row in a:
                    row[t], row[j] = row[j], row[t]
        diag.append(abs(a[t][t]))
        t += 1
    # normalise to the divisibility chain
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            g = math.gcd(diag[i], diag[j])
            diag[i], diag[j] = g, diag[i] * diag[j] // g
    return sorted(diag)


def boundary_matrices(c) -> tuple[list[list[int]], list[list[int]], list, list]:
    """Boundary maps d1 (vertices x edges) and d2 (edges x triangles) of the flag 2-skeleton."""
    c = _flag(c)
    vindex = {v: i for i, v in enumerate(c.vertices)}
    edges = c.edges()
    eindex = {e: i for i, e in enumerate(edges)}
    tris = c.triangles()
    d1 = [[0] * len(edges) for _ in c.vertices]
    for k, (u, v) in enumerate(edges):
        d1[vindex[u]][k] -= 1
        d1[vindex[v]][k] += 1
    d2 = [[0] * len(tris) for _ in edges]
    for k, (a, b, cc) in enumerate(tris):
        d2[eindex[(b, cc)]][k] += 1
        d2[eindex[(a, cc)]][k] -= 1
        d2[eindex[(a, b)]][k] += 1
    return d1, d2, edges, tris


@dataclass(frozen=True)
class H1:
    rank: int
    torsion: tuple[int, ...] = ()

    @property
    def trivial(self) -> bool:
        return self.rank == 0 and not self.torsion


def homology_h1(c) -> H1:
    """First integral homology of the flag 2-skeleton: free rank and torsion."""
    d1, d2, edges, tris = boundary_matrices(c)
    r1 = len(smith_diagonal(d1, len(edges)))
    inv2 = smith_diagonal(d2, len(tris))
    return H1(len(edges) - r1 - len(inv2), tuple(x for x in inv2 if x > 1))


def homology_h1_rank(c) -> int:
    return homology_h1(c).rank


def components(c) -> list[list[int]]:
    g = _flag(c).skeleton
    seen: set[int] = set()
    out = []
    for v in g.vertices:
        if v in seen:
            continue
        comp = sorted(bfs_distances(g, [v]))
        seen.update(comp)
        out.append(comp)
    return out


@dataclass
class Pi1Data:
    """Spanning-tree presentation of pi1 and the loop represented by each generator."""

    presentation: Presentation
    basepoint: int
    parent: dict[int, int | None]
    generator_edges: dict[str, tuple[int, int]]

    def tree_path(self, v: int) -> list[int]:
        """Tree path from the basepoint to ``v``."""
        path = [v]
        while self.parent[path[-1]] is not None:
            path.append(self.parent[path[-1]])
        return path[::-1]

    def generator_loop(self, name: str) -> tuple[int, ...]:
        u, v = self.generator_edges[name]
        forward = self.tree_path(u)
        back = self.tree_path(v)[::-1]
        # closed path basepoint -> u -> v -> basepoint, without repeating the basepoint
        return tuple(forward + back[:-1])


def _edge_symbol(u: int, v: int) -> str:
    return f"e{u}_{v}"


def pi1_presentation(c, basepoint: int) -> Pi1Data:
    c = _flag(c)
    if basepoint not in c:
        raise UnknownVertex(basepoint)
    dist = bfs_distances(c, [basepoint])
    if len(dist) != len(c.vertices):
        raise InputError("pi1_presentation needs a connected complex")
    parent: dict[int, int | None] = {basepoint: None}
    for v in sorted(c.vertices, key=lambda v: (dist[v], v)):
        if v == basepoint:
            continue
        parent[v] = min(w for w in c.neighbors(v) if dist[w] == dist[v] - 1)
    tree = {(min(v, p), max(v, p)) for v, p in parent.items() if p is not None}
    gens = {}
    for u, v in c.edges():
        if (u, v) not in tree:
            gens[_edge_symbol(u, v)] = (u, v)

    def letter(u, v):
        if (min(u, v), max(u, v)) in tree:
            return []
        if u < v:
            return [_edge_symbol(u, v)]
        return [formal_inverse(_edge_symbol(v, u))]

    relators = []
    for a, b, cc in c.triangles():
        word = letter(a, b) + letter(b, cc) + letter(cc, a)
        relators.append(tuple(word))
    symbols = []
    for name in gens:
        symbols += [name, formal_inverse(name)]
    pres = Presentation(tuple(symbols), frozenset(), tuple(relators))
    return Pi1Data(pres, basepoint, parent, gens)


# -- loop contraction ----------------------------------------------------


@dataclass(frozen=True)
class Move:
    """An elementary homotopy of a closed edge path.

    kinds:
      ``fill``      loop of length <= 3 spanning a simplex shrinks to its first vertex
      ``backtrack`` x y x -> x  (removes positions i and i+1)
      ``collapse``  x y z -> x z across the triangle xyz (removes position i)
      ``swap``      x y z -> x w z across the triangles xyw, wyz (replaces position i)
      ``expand``    x z -> x w z across the triangle xwz (inserts after position i)
    """

    kind: str
    position: int = 0
    vertex: int | None = None

    def as_list(self) -> list:
        return [self.kind, self.position, self.vertex]


def _neighbours(loop, i):
    n = len(loop)
    return loop[(i - 1) % n], loop[(i + 1) % n]


def apply_move(c, loop: Sequence[int], move: Move) -> tuple[int, ...]:
    """Apply ``move`` to ``loop`` after checking it is legal in ``c``."""
    g = _flag(c).skeleton
    loop = tuple(loop)
    n = len(loop)
    i = move.position
    if not 0 <= i < max(n, 1):
        raise InputError(f"move position {i} out of range for loop of length {n}")
    if move.kind == "fill":
        if n == 1:
            raise InputError("loop is already a point")
        if any(not g.has_edge(a, b) for a in loop for b in loop if a != b) or len(set(loop)) != n or n > 3:
            raise InputError(f"fill needs a loop spanning a simplex, got {loop}")
        return loop[:1]
    if n < 3:
        raise InputError(f"{move.kind} needs a loop of length >= 3")
    x, z = _neighbours(loop, i)
    y = loop[i]
    if move.kind == "backtrack":
        if x != z:
            raise InputError(f"no backtrack at position {i}")
        drop = {i, (i + 1) % n}
        return tuple(v for k, v in enumerate(loop) if k not in drop)
    if move.kind == "collapse":
        if x == z or not g.has_edge(x, z):
            raise InputError(f"no triangle to collapse at position {i}")
        return loop[:i] + loop[i + 1 :]
    if move.kind == "swap":
        w = move.vertex
        if w in (x, y, z) or not (g.has_edge(w, x) and g.has_edge(w, y) and g.has_edge(w, z)):
            raise InputError(f"cannot swap position {i} to {w}")
        return loop[:i] + (w,) + loop[i + 1 :]
    if move.kind == "expand":
        w = move.vertex
        if w in (y, z) or not (g.has_edge(w, y) and g.has_edge(w, z)):
            raise InputError(f"cannot expand after position {i} with {w}")
        return loop[: i + 1] + (w,) + loop[i + 1 :]
    raise InputError(f"unknown move kind {move.kind!r}")


def move_triangles(loop: Sequence[int], move: Move) -> list[tuple[int, tuple[int, int, int]]]:
    """Signed oriented triangles whose boundaries sum to ``loop - apply_move(loop)``."""
    loop = tuple(loop)
    n = len(loop)
    i = move.position
    if move.kind == "fill":
        return [(1, (loop[0], loop[1], loop[2]))] if n == 3 else []
    x, z = _neighbours(loop, i)
    y = loop[i]
    if move.kind == "collapse":
        return [(1, (x, y, z))]
    if move.kind == "swap":
        w = move.vertex
        return [(1, (x, y, w)), (1, (w, y, z))]
    if move.kind == "expand":
        return [(-1, (y, move.vertex, z))]
    return []


def replay(c, loop: Sequence[int], moves: Iterable[Move]) -> tuple[int, ...]:
    loop = tuple(loop)
    for mv in moves:
        loop = apply_move(c, loop, mv)
    return loop


@dataclass
class NullHomotopy:
    verdict: str  # "contractible" or "unknown"
    moves: list[Move] = field(default_factory=list)
    explored: int = 0
    reason: str = ""

    @property
    def contractible(self) -> bool:
        return self.verdict == "contractible"


def _check_loop(g: SkeletonGraph, loop):
    if not loop:
        raise InputError("empty loop")
    for v in loop:
        if v not in g:
            raise InputError(f"loop vertex {v} is not in the complex")
    n = len(loop)
    if n == 1:
        return
    for k in range(n if n > 2 else 1):
        a, b = loop[k], loop[(k + 1) % n]
        if not g.has_edge(a, b):
            raise InputError(f"loop step ({a}, {b}) is not an edge of the complex")


def default_budget(c, loop_length: int) -> int:
    """4 * diameter * loop length, the default contraction budget."""
    g = _flag(c).skeleton
    diam = 0
    for v in g.vertices:
        d = bfs_distances(g, [v])
        diam = max(diam, max(d.values()))
    return max(1, 4 * max(diam, 1) * max(loop_length, 1))


def _rotation_key(loop):
    n = len(loop)
    return min(loop[i:] + loop[:i] for i in range(n))


def bounded_nullhomotopy(c, loop: Sequence[int], budget: int | None = None, max_states: int = 20000) -> NullHomotopy:
    """Search for at most ``budget`` elementary moves contracting ``loop`` to a point.

    Best-first search towards a central vertex of the loop; the returned
    move list replays with :func:`replay`.
    """
    c = _flag(c)
    g = c.skeleton
    loop = tuple(loop)
    _check_loop(g, loop)
    if budget is None:
        budget = default_budget(c, len(loop))
    if len(loop) == 1:
        return NullHomotopy("contractible", [], 0)

    best = None
    for p in sorted(set(loop)):
        d = bfs_distances(g, [p])
        if not all(v in d for v in loop):
            return NullHomotopy("unknown", [], 0, "loop meets several components")
        cand = (max(d[v] for v in loop), p)
        if best is None or cand < best[0]:
            best = (cand, d)
    # the loop's own vertices may be off-centre; also try their neighbours
    centre_d = best[1]
    for p in sorted({w for v in loop for w in g.adj[v]} - set(loop)):
        d = bfs_distances(g, [p], best[0][0])
        if all(v in d for v in loop):
            cand = (max(d[v] for v in loop), p)
            if cand < best[0]:
                best = (cand, bfs_distances(g, [p]))
    centre_d = best[1]

    def dist(v):
        return centre_d.get(v, len(g.vertices))

    def potential(state):
        return sum(dist(v) + 1 for v in state)

    def successors(state):
        n = len(state)
        out = []
        if n <= 3 and len(set(state)) == n and all(g.has_edge(a, b) for a in state for b in state if a != b):
            out.append(Move("fill"))
            return out
        for i in range(n):
            x, z = _neighbours(state, i)
            y = state[i]
            if x == z:
                out.append(Move("backtrack", i))
            elif g.has_edge(x, z):
                out.append(Move("collapse", i))
        for i in range(n):
            x, z = _neighbours(state, i)
            y = state[i]
            if x == z:
                continue
            for w in sorted(g.adj[x] & g.adj[y] & g.adj[z]):
                if w not in (x, z) and dist(w) < dist(y):
                    out.append(Move("swap", i, w))
        for i in range(n):
            y, z = state[i], state[(i + 1) % n]
            for w in sorted(g.adj[y] & g.adj[z]):
                if dist(w) < max(dist(y), dist(z)):
                    out.append(Move("expand", i, w))
        return out

    tie = count()
    heap = [(potential(loop), 0, next(tie), loop)]
    parent: dict[tuple, tuple] = {loop: None}
    seen = {_rotation_key(loop)}
    explored = 0
    while heap and explored < max_states:
        _, depth, _, state = heapq.heappop(heap)
        explored += 1
        if len(state) == 1:
            moves = []
            while parent[state] is not None:
                state, mv = parent[state]
                moves.append(mv)
            moves.reverse()
            return NullHomotopy("contractible", moves, explored)
        if depth >= budget:
            continue
        for mv in successors(state):
            nxt = apply_move(c, state, mv)
            key = _rotation_key(nxt)
            if key in seen:
                continue
            seen.add(key)
            parent[nxt] = (state, mv)
            heapq.heappush(heap, (potential(nxt), depth + 1, next(tie), nxt))
    reason = "search space exhausted" if not heap else "state limit reached"
    return NullHomotopy("unknown", [], explored, reason)


def chain_of_loop(loop: Sequence[int]) -> dict[tuple[int, int], int]:
    """The loop as a 1-chain on edges oriented from smaller to larger vertex."""
    chain: dict[tuple[int, int], int] = {}
    n = len(loop)
    if n == 1:
        return chain
    steps = n if n > 2 else 2
    for k in range(steps):
        a, b = loop[k % n], loop[(k + 1) % n]
        key, sign = ((a, b), 1) if a < b else ((b, a), -1)
        chain[key] = chain.get(key, 0) + sign
    return {k: v for k, v in chain.items() if v}


def boundary_of_triangles(tris: Iterable[tuple[int, tuple[int, int, int]]]) -> dict[tuple[int, int], int]:
    chain: dict[tuple[int, int], int] = {}
    for sign, (a, b, c) in tris:
        for (u, v), s in (((b, c), 1), ((a, c), -1), ((a, b), 1)):
            key, o = ((u, v), 1) if u < v else ((v, u), -1)
            chain[key] = chain.get(key, 0) + sign * s * o
    return {k: v for k, v in chain.items() if v}
