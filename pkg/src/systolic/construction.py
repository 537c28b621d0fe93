"""Short loops, the radius R, and the glued complex Y with its maps f and i_h.

Everything here works on a finite window: a patch of X (with an explicit
boundary), a ball of radius rho in H, and an interior margin. Classes of
Y near the window's edges are excluded from verification claims.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Sequence

from scipy.cluster.hierarchy import DisjointSet

from .complex import FlagComplex, SkeletonGraph, bfs_distances
from .errors import BallTooSmall, DomainEscape, PatchTooSmall
from .group import (
    Ball,
    EquivariantPathData,
    Presentation,
    VertexAction,
    build_gamma,
    concatenated_path,
    format_word,
    stabilizer_of,
    word_apply,
)
from .homology import bounded_nullhomotopy, components, default_budget, homology_h1, pi1_presentation

RELATOR = "relator"
STABILIZER = "stabilizer"
CROSSING = "crossing"


@dataclass(frozen=True)
class ShortLoop:
    """A closed path in Gamma, stored without repeating its first vertex.

    For crossing loops ``word`` is the geodesic replacement word
    p1...pk and ``crossing`` records ``(s, h, s', x)``: the path
    gamma_s meets h.gamma_s' at the vertex x outside the orbit of x0.
    """

    kind: str
    word: tuple[str, ...]
    loop: tuple[int, ...]
    crossing: tuple | None = None

    @property
    def length(self) -> int:
        return len(self.loop) if len(self.loop) > 1 else 0

    def to_json(self) -> dict:
        out = {"kind": self.kind, "word": list(self.word), "loop": list(self.loop)}
        if self.crossing is not None:
            s, h, s2, x = self.crossing
            out["crossing"] = {"s": s, "h": list(h), "s2": s2, "x": x}
        return out


def _close(path: Sequence[int]) -> tuple[int, ...]:
    if len(path) > 1 and path[0] == path[-1]:
        return tuple(path[:-1])
    return tuple(path)


def _cyclic_key(loop: Sequence[int]) -> tuple[int, ...]:
    loop = tuple(loop)
    rev = loop[::-1]
    n = len(loop)
    return min(min(loop[i:] + loop[:i], rev[i:] + rev[:i]) for i in range(n))


def _orbit_key(loop, ball: Ball) -> tuple[int, ...]:
    keys = []
    for h in ball:
        try:
            moved = [word_apply(ball.action, h.word, v) for v in loop]
        except DomainEscape:
            continue
        keys.append(_cyclic_key(moved))
    return min(keys)


def enumerate_short_loops(
    presentation: Presentation, action: VertexAction, d: EquivariantPathData, ball: Ball
) -> list[ShortLoop]:
    """Relator loops, stabilizer loops and crossing loops, one per H-orbit."""
    loops: list[ShortLoop] = []
    for r in presentation.relators:
        path = concatenated_path(d, action, r)
        loops.append(ShortLoop(RELATOR, r, _close(path)))

    for h in stabilizer_of(action, ball, d.x0):
        if h.word:
            loops.append(ShortLoop(STABILIZER, h.word, _close(concatenated_path(d, action, h.word))))

    orbit = set()
    for h in ball:
        try:
            orbit.add(word_apply(action, h.word, d.x0))
        except DomainEscape:
            pass
    inv = presentation.inverse
    for s in presentation.generators:
        base = d.gamma[s]
        base_set = set(base)
        s_index = ball.find((s,))
        for i, h in enumerate(ball):
            for s2 in presentation.generators:
                # the same Cayley edge as (1, s), seen from either end
                if (i == 0 and s2 == s) or (i == s_index and s2 == inv(s)):
                    continue
                try:
                    other = [word_apply(action, h.word, v) for v in d.gamma[s2]]
                except DomainEscape:
                    continue
                meets = [x for x in other if x in base_set and x not in orbit]
                if not meets:
                    continue
                end = ball.right(i, s2)
                if end is None:
                    raise BallTooSmall(
                        f"crossing of gamma_{s} with ({h}).gamma_{s2} needs the element {format_word(h.word + (s2,))}"
                    )
                x = meets[0]
                p = ball[end].word
                out = list(concatenated_path(d, action, p))
                # back along h.gamma_s2 from its far end to x, then along gamma_s back to x0
                k = max(j for j, v in enumerate(other) if v == x)
                out += list(reversed(other[k:-1]))
                j = base.index(x)
                out += list(reversed(base[:j]))
                loops.append(ShortLoop(CROSSING, p, _close(out), (s, h.word, s2, x)))

    unique: list[ShortLoop] = []
    seen = set()
    for lp in loops:
        key = _orbit_key(lp.loop, ball)
        if key in seen:
            continue
        seen.add(key)
        unique.append(lp)
    return unique


@dataclass
class RadiusCertificate:
    L: int
    loop_radii: list[int]
    R1: int
    R1prime: int
    R2: int
    N: int
    containment_ok: bool
    R_override: int | None = None

    @property
    def Rprime(self) -> int:
        return max(self.R1, self.R1prime, self.R2)

    @property
    def R_computed(self) -> int:
        return self.Rprime + self.L

    @property
    def R(self) -> int:
        return self.R_override if self.R_override is not None else self.R_computed

    @property
    def override_ok(self) -> bool:
        return self.R_override is None or self.R_override >= self.R_computed

    def to_json(self) -> dict:
        return {
            "L": self.L,
            "N": self.N,
            "R": self.R,
            "R1": self.R1,
            "R1prime": self.R1prime,
            "R2": self.R2,
            "R_computed": self.R_computed,
            "R_override": self.R_override,
            "Rprime": self.Rprime,
            "containment_ok": self.containment_ok,
            "loop_radii": self.loop_radii,
            "override_ok": self.override_ok,
        }


def loop_radius(x, loop: Sequence[int]) -> int:
    """Largest X-distance between two vertices of the loop."""
    verts = sorted(set(loop))
    best = 0
    for z in verts:
        dist = bfs_distances(x, [z])
        best = max(best, max(dist.get(w, math.inf) for w in verts))
    return best


def check_patch(x, boundary: Iterable[int], ball: Ball, x0: int, R: int) -> dict[int, int]:
    """Centres h.x0 of the balls B_h; raises PatchTooSmall when a ball reaches past the boundary."""
    boundary = list(boundary)
    to_boundary = bfs_distances(x, boundary) if boundary else {}
    centres = {}
    for i, h in enumerate(ball):
        try:
            c = word_apply(ball.action, h.word, x0)
        except DomainEscape:
            raise PatchTooSmall(str(h), None, R, 0) from None
        # a vertex outside the patch within R of c means a boundary vertex within R - 1
        available = to_boundary.get(c, math.inf)
        if available < R:
            raise PatchTooSmall(str(h), c, R, available)
        centres[i] = c
    return centres


def compute_R(
    loops: Sequence[ShortLoop],
    x,
    L: int,
    *,
    R_override: int | None = None,
    ball: Ball | None = None,
    x0: int | None = None,
    boundary: Iterable[int] = (),
) -> RadiusCertificate:
    radii = [loop_radius(x, lp.loop) for lp in loops]

    def class_max(kind):
        return max((r for r, lp in zip(radii, loops) if lp.kind == kind), default=0)

    rmax = max(radii, default=0)
    contained = True
    for lp in loops:
        for z in set(lp.loop):
            near = bfs_distances(x, [z], rmax)
            if any(v not in near for v in lp.loop):
                contained = False
    cert = RadiusCertificate(
        L=L,
        loop_radii=radii,
        R1=class_max(RELATOR),
        R1prime=class_max(STABILIZER),
        R2=class_max(CROSSING),
        N=max((len(lp.word) for lp in loops if lp.kind == CROSSING), default=0),
        containment_ok=contained,
        R_override=R_override,
    )
    if ball is not None:
        check_patch(x, boundary, ball, x0, cert.R)
    return cert


@dataclass
class YComplex:
    """The quotient of the disjoint union of balls B_h by the gluing relation.

    ``members[y]`` lists the labelled vertices ``(h index, v)`` of class y,
    ``sections[h][v]`` is i_h(v), ``f[y]`` is the X-vertex under y and
    ``generator_maps[s]`` is the partial action of s on classes.
    """

    ball: Ball
    R: int
    x0: int
    x: SkeletonGraph
    boundary: frozenset[int]
    centres: dict[int, int]
    complex: FlagComplex
    f: tuple[int, ...]
    members: tuple[tuple[tuple[int, int], ...], ...]
    sections: list[dict[int, int]]
    generator_maps: dict[str, dict[int, int]]
    cut: frozenset[int]

    @property
    def classes(self) -> tuple[int, ...]:
        return self.complex.vertices

    def class_of(self, h: int, v: int) -> int | None:
        return self.sections[h].get(v)

    def act(self, h: int, y: int) -> int | None:
        """h.y for the ball element with index h, when defined on the window."""
        hw = self.ball[h].word
        for g, v in self.members[y]:
            hg = self.ball.find(hw + self.ball[g].word)
            if hg is None:
                continue
            try:
                hv = word_apply(self.ball.action, hw, v)
            except DomainEscape:
                continue
            target = self.sections[hg].get(hv)
            if target is not None:
                return target
        return None

    def interior(self, margin: int) -> frozenset[int]:
        """Classes at least ``margin`` away from both truncation boundaries.

        The X side is measured from f(y) to the patch boundary, the H side
        is measured in Y from the classes whose gluing reaches outside the ball.
        """
        if margin <= 0:
            return frozenset(self.classes)
        far_x = self.classes
        if self.boundary:
            dx = bfs_distances(self.x, self.boundary, margin)
            far_x = [y for y in self.classes if self.f[y] not in dx or dx[self.f[y]] >= margin]
        if self.cut:
            dy = bfs_distances(self.complex, self.cut, margin)
            far_x = [y for y in far_x if y not in dy or dy[y] >= margin]
        return frozenset(far_x)

    def sidecar(self) -> dict:
        out = {}
        for y in self.classes:
            out[str(y)] = {
                "f": self.f[y],
                "members": [[list(self.ball[h].word), v] for h, v in self.members[y]],
            }
        return out


def build_Y(
    ball: Ball,
    R: int,
    x,
    x0: int,
    boundary: Iterable[int] = (),
    glue: Callable[[int, int, int], bool] | None = None,
) -> YComplex:
    """Glue the balls B_h = N^R(h.x0), h in ``ball``.

    ``glue(h, g, v)`` may veto individual generating identifications
    v^h ~ v^g; it exists for fault-injection experiments.
    """
    g_x = x.skeleton if isinstance(x, FlagComplex) else x
    boundary = frozenset(boundary)
    centres = check_patch(g_x, boundary, ball, x0, R)
    balls = {i: sorted(bfs_distances(g_x, [c], R)) for i, c in centres.items()}
    ball_sets = {i: set(b) for i, b in balls.items()}

    labelled = [(i, v) for i in sorted(balls) for v in balls[i]]
    ds = DisjointSet(labelled)
    gens = ball.presentation.generators
    for i in sorted(balls):
        for s in gens:
            j = ball.right(i, s)
            if j is None or j < i:
                continue
            for v in balls[i]:
                if v in ball_sets[j] and (glue is None or glue(i, j, v)):
                    ds.merge((i, v), (j, v))

    groups = sorted(tuple(sorted(sub)) for sub in ds.subsets())
    sections: list[dict[int, int]] = [dict() for _ in range(len(ball))]
    f = []
    for cls, members in enumerate(groups):
        f.append(members[0][1])
        for i, v in members:
            sections[i][v] = cls
    edges = set()
    for i, b in balls.items():
        sec = sections[i]
        for u in b:
            for w in g_x.adj[u]:
                if u < w and w in ball_sets[i]:
                    a, c = sec[u], sec[w]
                    edges.add((min(a, c), max(a, c)))
    complex_ = FlagComplex.from_edges(range(len(groups)), edges)

    gen_maps: dict[str, dict[int, int]] = {}
    for s in gens:
        m = {}
        for cls, members in enumerate(groups):
            for i, v in members:
                j = ball.find((s,) + ball[i].word)
                if j is None:
                    continue
                try:
                    sv = word_apply(ball.action, (s,), v)
                except DomainEscape:
                    continue
                target = sections[j].get(sv)
                if target is not None:
                    m[cls] = target
                    break
        gen_maps[s] = m

    cut = set()
    for i in balls:
        for s in gens:
            if ball.right(i, s) is not None:
                continue
            try:
                far = word_apply(ball.action, ball[i].word + (s,), x0)
                near = bfs_distances(g_x, [far], R)
            except (DomainEscape, KeyError):
                near = None
            for v in balls[i]:
                if near is None or v in near:
                    cut.add(sections[i][v])

    return YComplex(
        ball=ball,
        R=R,
        x0=x0,
        x=g_x,
        boundary=boundary,
        centres=centres,
        complex=complex_,
        f=tuple(f),
        members=tuple(groups),
        sections=sections,
        generator_maps=gen_maps,
        cut=frozenset(cut),
    )


@dataclass
class Report:
    """Outcome of a verification stage: failures are ``(code, message)`` pairs."""

    name: str
    failures: list[tuple[str, str]] = field(default_factory=list)
    unknown: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        if self.failures:
            return "fail"
        if self.unknown:
            return "unknown"
        return "pass"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def codes(self) -> set[str]:
        return {c for c, _ in self.failures}

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "failures": [list(f) for f in self.failures],
            "unknown": list(self.unknown),
            "details": self.details,
        }


def verify_sections(Y: YComplex) -> Report:
    rep = Report("sections")
    g = Y.x
    for i, sec in enumerate(Y.sections):
        if not sec:
            continue
        h = str(Y.ball[i])
        if len(set(sec.values())) != len(sec):
            rep.failures.append(("not-injective", f"i_({h}) identifies two vertices"))
        for v, y in sec.items():
            if Y.f[y] != v:
                rep.failures.append(("f-section", f"f(i_({h})({v})) = {Y.f[y]}"))
        verts = sorted(sec)
        for u, w in combinations(verts, 2):
            if g.has_edge(u, w) != Y.complex.has_edge(sec[u], sec[w]):
                rep.failures.append(
                    ("adjacency", f"i_({h}) does not preserve adjacency of ({u}, {w})")
                )
        for s in Y.ball.presentation.generators:
            j = Y.ball.right(i, s)
            if j is None:
                continue
            for v in verts:
                if v in Y.sections[j] and Y.sections[j][v] != sec[v]:
                    rep.failures.append(
                        ("disagree", f"i_({h}) and i_({Y.ball[j]}) differ at {v}")
                    )
    rep.details["sections"] = sum(1 for sec in Y.sections if sec)
    return rep


def verify_factorization(Y: YComplex, d: EquivariantPathData) -> Report:
    """Points of the Cayley graph identified in Gamma must be identified in Y."""
    rep = Report("factorization")
    ball = Y.ball
    gamma = build_gamma(d, ball.action, ball)
    by_vertex: dict[int, list[tuple[int, str, int]]] = {}
    for rec, x in sorted(gamma.records.items()):
        by_vertex.setdefault(x, []).append(rec)
    checked = skipped = 0
    for x, recs in sorted(by_vertex.items()):
        images = {}
        for rec in recs:
            y = Y.sections[rec[0]].get(x)
            if y is None:
                rep.failures.append(("outside-ball", f"{x} on ({ball[rec[0]]}).gamma_{rec[1]} is not in its ball"))
            images[rec] = y
        for r1, r2 in combinations(recs, 2):
            if images[r1] == images[r2]:
                checked += 1
                continue
            chain = _ball_chain(ball, r1[0], r2[0])
            if chain is None:
                skipped += 1
                continue
            checked += 1
            rep.failures.append(
                (
                    "not-identified",
                    f"{x} via ({ball[r1[0]]}, {r1[1]}) and ({ball[r2[0]]}, {r2[1]}) lands in classes "
                    f"{images[r1]} and {images[r2]}; chain "
                    + ", ".join(f"{ball[c]}:{'in' if x in Y.sections[c] else 'out'}" for c in chain),
                )
            )
    rep.details.update({"gamma_vertices": len(by_vertex), "pairs_checked": checked, "pairs_truncated": skipped})
    return rep


def _ball_chain(ball: Ball, a: int, b: int) -> list[int] | None:
    """Indices of a.p1...pl for the canonical word p of a^-1 b, if all lie in the ball."""
    p = ball.presentation
    k = ball.find(p.inverse_word(ball[a].word) + ball[b].word)
    if k is None:
        return None
    word = ball[k].word
    chain = [a]
    for l in range(1, len(word) + 1):
        c = ball.find(ball[a].word + word[:l])
        if c is None:
            return None
        chain.append(c)
    return chain


def verify_Y_simply_connected(Y: YComplex, margin: int, budget: int | None = None, max_states: int = 20000) -> Report:
    return simple_connectivity_evidence(Y.complex, Y.interior(margin), budget, max_states, name="Y-simply-connected")


def simple_connectivity_evidence(c: FlagComplex, interior, budget=None, max_states=20000, name="simply-connected") -> Report:
    rep = Report(name)
    inner = c.span(interior)
    h1 = homology_h1(inner)
    rep.details["interior_classes"] = len(inner.vertices)
    rep.details["H1_rank"] = h1.rank
    rep.details["H1_torsion"] = list(h1.torsion)
    if not h1.trivial:
        rep.failures.append(("H1", f"interior has H1 rank {h1.rank}, torsion {list(h1.torsion)}"))
    comps = components(inner)
    rep.details["interior_components"] = len(comps)
    contracted = 0
    for comp in comps:
        pi = pi1_presentation(inner.span(comp), comp[0])
        for name_ in sorted(pi.generator_edges, key=lambda n: pi.generator_edges[n]):
            loop = pi.generator_loop(name_)
            b = budget if budget is not None else default_budget(inner.span(comp), len(loop))
            res = bounded_nullhomotopy(c, loop, b, max_states)
            if res.contractible:
                contracted += 1
            else:
                rep.unknown.append(f"generator {name_} ({res.reason})")
    rep.details["generators_contracted"] = contracted
    return rep


def f_properness_stats(Y: YComplex) -> dict:
    fibres: dict[int, int] = {}
    for v in Y.f:
        fibres[v] = fibres.get(v, 0) + 1
    return {
        "max_fibre": max(fibres.values(), default=0),
        "max_valence": max((Y.complex.skeleton.degree(y) for y in Y.classes), default=0),
        "classes": len(Y.classes),
        "x_vertices_covered": len(fibres),
    }


def certify_short_loops(loops, x, cert: RadiusCertificate, budget=None, max_states=20000) -> Report:
    """Contract each short loop inside the ball N^(R-L)(z) around its first vertex."""
    rep = Report("short-loop-contraction")
    g = x.skeleton if isinstance(x, FlagComplex) else x
    radius = cert.R - cert.L
    for k, lp in enumerate(loops):
        z = lp.loop[0]
        nbhd = FlagComplex(g.induced(bfs_distances(g, [z], radius)))
        res = bounded_nullhomotopy(nbhd, lp.loop, budget, max_states)
        if not res.contractible:
            rep.unknown.append(f"loop {k} ({lp.kind})")
    rep.details["loops"] = len(loops)
    return rep
