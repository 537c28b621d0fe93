"""Saturating Y with orbits of diagonal edges until no short cycle lacks a diagonal.

Each move takes a 4- or 5-cycle without a diagonal, picks a pair of its
vertices according to how f acts on the cycle, and adds the H-orbit of
that edge. The full move list is kept so a run can be replayed and
audited.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable

from .complex import Cycle, FlagComplex, SkeletonGraph, find_short_cycle_no_diagonal
from .construction import Report, YComplex, simple_connectivity_evidence
from .errors import BudgetExceeded, InputError, SystolicError, XNotSixLarge
from .group import format_word
from .homology import homology_h1

BIJECTIVE = "Bijective"
NON_CONSECUTIVE = "NonConsecutiveSameImage"
CONSECUTIVE = "ConsecutiveSameImage"


@dataclass(frozen=True)
class DiagonalMove:
    case: str
    bad_cycle: tuple[int, ...]
    chosen_pair: tuple[int, int]
    orbit: tuple[tuple[str, tuple[int, int], tuple], ...]
    skipped: tuple[str, ...] = ()
    x_diagonal: tuple[int, int] | None = None

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [e for _, e, _ in self.orbit]

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "bad_cycle": list(self.bad_cycle),
            "chosen_pair": list(self.chosen_pair),
            "x_diagonal": list(self.x_diagonal) if self.x_diagonal else None,
            "orbit": [
                {"h": h, "edge": list(e), "f_image": [img[0], img[1] if img[0] == "vertex" else list(img[1])]}
                for h, e, img in self.orbit
            ],
            "skipped": list(self.skipped),
        }

    @classmethod
    def from_json(cls, data: dict) -> DiagonalMove:
        orbit = []
        for rec in data["orbit"]:
            kind, val = rec["f_image"]
            orbit.append((rec["h"], tuple(rec["edge"]), (kind, val if kind == "vertex" else tuple(val))))
        return cls(
            case=data["case"],
            bad_cycle=tuple(data["bad_cycle"]),
            chosen_pair=tuple(data["chosen_pair"]),
            orbit=tuple(orbit),
            skipped=tuple(data.get("skipped", ())),
            x_diagonal=tuple(data["x_diagonal"]) if data.get("x_diagonal") else None,
        )


def _identity_only(h: int, y: int) -> int | None:
    return y if h == 0 else None


@dataclass
class FExtension:
    """A flag complex on Y's classes together with its map to X.

    ``translate(h, y)`` is the action of the h-th group element on classes
    (None where the window does not determine it); index 0 is the identity.
    """

    x: SkeletonGraph
    f: tuple[int, ...]
    adj: dict[int, set[int]]
    interior: frozenset[int]
    group: tuple[str, ...] = ("1",)
    translate: Callable[[int, int], int | None] = _identity_only
    base_edges: frozenset = frozenset()
    moves: list[DiagonalMove] = field(default_factory=list)

    @classmethod
    def from_y(cls, Y: YComplex, margin: int) -> FExtension:
        adj = {y: set(Y.complex.neighbors(y)) for y in Y.classes}
        return cls(
            x=Y.x,
            f=Y.f,
            adj=adj,
            interior=Y.interior(margin),
            group=tuple(format_word(h.word) for h in Y.ball),
            translate=Y.act,
            base_edges=frozenset(Y.complex.edges()),
        )

    @classmethod
    def standalone(cls, complex_, f, x, interior: Iterable[int] | None = None) -> FExtension:
        """An extension with trivial group action, for small hand-built examples."""
        c = complex_ if isinstance(complex_, FlagComplex) else FlagComplex(complex_)
        g = x.skeleton if isinstance(x, FlagComplex) else x
        if isinstance(f, dict):
            f = tuple(f[v] for v in range(len(c.vertices)))
        if tuple(c.vertices) != tuple(range(len(c.vertices))):
            raise InputError("class ids must be 0..n-1")
        return cls(
            x=g,
            f=tuple(f),
            adj={y: set(c.neighbors(y)) for y in c.vertices},
            interior=frozenset(c.vertices if interior is None else interior),
            base_edges=frozenset(c.edges()),
        )

    def copy(self) -> FExtension:
        return FExtension(
            x=self.x,
            f=self.f,
            adj={y: set(n) for y, n in self.adj.items()},
            interior=self.interior,
            group=self.group,
            translate=self.translate,
            base_edges=self.base_edges,
            moves=list(self.moves),
        )

    @property
    def complex(self) -> FlagComplex:
        verts = tuple(sorted(self.adj))
        return FlagComplex(SkeletonGraph(verts, {y: frozenset(self.adj[y]) for y in verts}))

    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u in self.adj for v in self.adj[u] if u < v)

    def edge_image(self, u: int, v: int) -> tuple:
        a, b = self.f[u], self.f[v]
        if a == b:
            return ("vertex", a)
        if not self.x.has_edge(a, b):
            raise SystolicError(f"edge ({u}, {v}) would map to the non-edge ({a}, {b}) of X")
        return ("edge", (min(a, b), max(a, b)))

    def add_edge(self, u: int, v: int) -> None:
        self.adj[u].add(v)
        self.adj[v].add(u)

    def apply(self, move: DiagonalMove) -> None:
        for _, (a, b), _ in move.orbit:
            self.add_edge(a, b)
        self.moves.append(move)

    def sidecar(self) -> dict:
        return {str(y): {"f": self.f[y]} for y in sorted(self.adj)}


def find_bad_loop(W: FExtension) -> Cycle | None:
    """Least interior 4- or 5-cycle of W without a diagonal."""
    return find_short_cycle_no_diagonal(W.complex, 6, W.interior)


def _choose(W: FExtension, alpha: Cycle):
    vs = alpha.vertices
    n = len(vs)
    images = [W.f[y] for y in vs]
    if len(set(images)) == n:
        diag = [
            (min(images[i], images[j]), max(images[i], images[j]), i, j)
            for i, j in combinations(range(n), 2)
            if j - i not in (1, n - 1) and W.x.has_edge(images[i], images[j])
        ]
        if not diag:
            raise XNotSixLarge(images)
        a, b, i, j = min(diag)
        return BIJECTIVE, (vs[i], vs[j]), (a, b)
    for i, j in combinations(range(n), 2):
        if j - i not in (1, n - 1) and images[i] == images[j]:
            return NON_CONSECUTIVE, (vs[i], vs[j]), None
    for i in range(n):
        if images[i] == images[(i + 1) % n]:
            # w, the other neighbour of v = vs[i + 1], has f(w) adjacent or equal to f(v) = f(u)
            return CONSECUTIVE, (vs[i], vs[(i + 2) % n]), None
    raise AssertionError("unreachable: a non-injective map identifies some pair")


def resolve_bad_loop(W: FExtension, alpha: Cycle) -> DiagonalMove:
    """The move that gives ``alpha`` a diagonal, with the orbit of the chosen edge."""
    if alpha.diagonals(W.complex):
        raise InputError(f"cycle {alpha.vertices} already has a diagonal")
    case, (u, v), x_diag = _choose(W, alpha)
    orbit = []
    skipped = []
    seen = set()
    for h in range(len(W.group)):
        a, b = W.translate(h, u), W.translate(h, v)
        if a is None or b is None:
            skipped.append(W.group[h])
            continue
        e = (min(a, b), max(a, b))
        if a == b or e in seen or b in W.adj[a]:
            continue
        seen.add(e)
        orbit.append((W.group[h], e, W.edge_image(*e)))
    return DiagonalMove(case, alpha.vertices, (u, v), tuple(orbit), tuple(skipped), x_diag)


def saturate(W: FExtension, max_moves: int | None = None) -> tuple[FExtension, list[DiagonalMove]]:
    out = W.copy()
    if max_moves is None:
        n = len(out.adj)
        max_moves = n * (n - 1) // 2 - len(out.edges())
    done: list[DiagonalMove] = []
    while True:
        alpha = find_bad_loop(out)
        if alpha is None:
            return out, done
        if len(done) >= max_moves:
            raise BudgetExceeded(len(done), alpha)
        move = resolve_bad_loop(out, alpha)
        out.apply(move)
        done.append(move)


def replay_moves(W: FExtension, moves: Iterable[DiagonalMove]) -> FExtension:
    out = W.copy()
    for mv in moves:
        out.apply(mv)
    return out


def _middle(cycle: tuple[int, ...], u: int, v: int) -> int | None:
    n = len(cycle)
    i, j = cycle.index(u), cycle.index(v)
    if (i + 2) % n == j:
        return cycle[(i + 1) % n]
    if (j + 2) % n == i:
        return cycle[(j + 1) % n]
    return None


def verify_homotopy_preservation(before: FExtension, after: FExtension, moves: Iterable[DiagonalMove]) -> Report:
    """Every added edge must close a triangle with two edges already present."""
    rep = Report("homotopy-preservation")
    state = before.copy()
    certificates = 0
    index = {label: k for k, label in enumerate(before.group)}
    for n_move, mv in enumerate(moves):
        cyc = mv.bad_cycle
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            if b not in state.adj[a]:
                rep.failures.append(("cycle", f"move {n_move}: recorded cycle edge ({a}, {b}) is missing"))
        if Cycle(cyc).diagonals(state.complex):
            rep.failures.append(("cycle", f"move {n_move}: recorded cycle already had a diagonal"))
        u, v = mv.chosen_pair
        mid = _middle(cyc, u, v)
        if mid is None:
            rep.failures.append(("pair", f"move {n_move}: chosen pair is not two steps apart on the cycle"))
            continue
        for label, (a, b), _ in mv.orbit:
            try:
                state.edge_image(a, b)
            except SystolicError as exc:
                rep.failures.append(("map", f"move {n_move}: {exc}"))
            h = index.get(label)
            m = state.translate(h, mid) if h is not None else None
            if m is None or not (m in state.adj[a] and m in state.adj[b]):
                common = state.adj[a] & state.adj[b]
                m = min(common) if common else None
            if m is None:
                rep.failures.append(("no-triangle", f"move {n_move}: edge ({a}, {b}) closes no triangle"))
            else:
                certificates += 1
        for _, (a, b), _ in mv.orbit:
            state.add_edge(a, b)
    if state.edges() != after.edges():
        rep.failures.append(("replay", "replaying the moves does not reproduce the final complex"))
    h_before = homology_h1(before.complex.span(before.interior))
    h_after = homology_h1(after.complex.span(after.interior))
    if h_after.rank > h_before.rank:
        rep.failures.append(("H1-grew", f"H1 rank grew from {h_before.rank} to {h_after.rank}"))
    if not h_after.trivial:
        rep.failures.append(("H1", f"final interior H1 rank {h_after.rank}, torsion {list(h_after.torsion)}"))
    rep.details.update(
        {
            "certificates": certificates,
            "H1_rank_before": h_before.rank,
            "H1_rank_after": h_after.rank,
            "H1_torsion_after": list(h_after.torsion),
        }
    )
    return rep


def verify_systolic(W: FExtension, budget: int | None = None, max_states: int = 20000) -> Report:
    c = W.complex
    rep = simple_connectivity_evidence(c, W.interior, budget, max_states, name="systolic")
    bad = find_short_cycle_no_diagonal(c, 6, W.interior)
    rep.details["six_large"] = bad is None
    if bad is not None:
        rep.failures.append(("six-large", f"interior cycle {bad.vertices} has no diagonal"))
        rep.details["witness"] = list(bad.vertices)
    for u, v in W.edges():
        try:
            W.edge_image(u, v)
        except SystolicError as exc:
            rep.failures.append(("map", str(exc)))
    fibres: dict[int, int] = {}
    for y in W.adj:
        fibres[W.f[y]] = fibres.get(W.f[y], 0) + 1
    rep.details["max_valence"] = max((len(n) for n in W.adj.values()), default=0)
    rep.details["max_interior_valence"] = max((len(W.adj[y]) for y in W.interior), default=0)
    rep.details["max_fibre"] = max(fibres.values(), default=0)

    orbit_of: dict[int, int] = {}
    max_stab = 0
    for y in sorted(W.interior):
        images = [W.translate(h, y) for h in range(len(W.group))]
        max_stab = max(max_stab, sum(1 for z in images if z == y))
        if y not in orbit_of:
            for z in images:
                if z is not None and z not in orbit_of:
                    orbit_of[z] = y
            orbit_of.setdefault(y, y)
    rep.details["interior_orbits"] = len({orbit_of[y] for y in W.interior})
    rep.details["max_stabilizer"] = max_stab
    return rep
