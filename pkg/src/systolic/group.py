"""Finitely presented groups acting by partial maps on a finite patch of X.

Words are tuples of generator symbols. The formal inverse of ``"a"`` is
``"a^-1"``; an involution is its own inverse and has no separate symbol.
A word acts on the left: ``(s1 s2 ... sm).v = s1.(s2.(... sm.v))``, so
the translate ``s1...s(m-1).gamma_sm`` of a generator path is obtained
by applying the prefix word to every vertex of the path.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .complex import FlagComplex, bfs_distances
from .errors import DomainEscape, InputError

INVERSE_SUFFIX = "^-1"


def formal_inverse(symbol: str) -> str:
    if symbol.endswith(INVERSE_SUFFIX):
        return symbol[: -len(INVERSE_SUFFIX)]
    return symbol + INVERSE_SUFFIX


def free_reduce(word: Iterable[str]) -> tuple[str, ...]:
    out: list[str] = []
    for s in word:
        if out and out[-1] == formal_inverse(s):
            out.pop()
        else:
            out.append(s)
    return tuple(out)


def format_word(word: Iterable[str]) -> str:
    word = tuple(word)
    return " ".join(word) if word else "1"


def parse_word(text) -> tuple[str, ...]:
    if isinstance(text, str):
        return tuple(text.split())
    return tuple(text)


@dataclass(frozen=True)
class Presentation:
    """A finite presentation <S | R> with S closed under inversion."""

    generators: tuple[str, ...]
    involutions: frozenset[str] = frozenset()
    relators: tuple[tuple[str, ...], ...] = ()

    def __post_init__(self):
        gens = set(self.generators)
        for s in self.generators:
            if self.inverse(s) not in gens:
                raise InputError(f"generating set is not symmetric: {s} lacks an inverse")
        for r in self.relators:
            for s in r:
                if s not in gens:
                    raise InputError(f"relator {format_word(r)} uses unknown symbol {s}")

    def inverse(self, s: str) -> str:
        return s if s in self.involutions else formal_inverse(s)

    def inverse_word(self, word: Iterable[str]) -> tuple[str, ...]:
        return tuple(self.inverse(s) for s in reversed(tuple(word)))

    def reduce(self, word: Iterable[str]) -> tuple[str, ...]:
        out: list[str] = []
        for s in word:
            if out and out[-1] == self.inverse(s):
                out.pop()
            else:
                out.append(s)
        return tuple(out)

    @property
    def base_generators(self) -> tuple[str, ...]:
        return tuple(s for s in self.generators if not s.endswith(INVERSE_SUFFIX))


def symmetrize(raw: Mapping) -> Presentation:
    """Close a raw presentation under inverses and detect involutions.

    ``raw`` has keys ``generators`` (base symbols), optional ``involutions``
    and ``relators`` (words, as lists or whitespace separated strings).
    Relators of the form ``s s`` mark ``s`` as an involution.
    """
    base = list(raw.get("generators", ()))
    if len(set(base)) != len(base):
        raise InputError("duplicate generator symbols")
    for s in base:
        if not isinstance(s, str) or not s or s.endswith(INVERSE_SUFFIX) or " " in s:
            raise InputError(f"bad generator symbol {s!r}")
    known = set(base)
    relators = []
    for r in raw.get("relators", ()):
        word = parse_word(r)
        for s in word:
            if formal_inverse(s) not in known and s not in known:
                raise InputError(f"relator {format_word(word)} uses unknown symbol {s}")
        word = free_reduce(word)
        if word:
            relators.append(word)
    involutions = set(raw.get("involutions", ()))
    for s in involutions:
        if s not in known:
            raise InputError(f"involution {s} is not a generator")
    for r in relators:
        if len(r) == 2 and r[0] == r[1] and r[0] in known:
            involutions.add(r[0])

    def fold(s):
        return s[: -len(INVERSE_SUFFIX)] if formal_inverse(s) in involutions else s

    gens: list[str] = []
    for s in base:
        gens.append(s)
        if s not in involutions:
            gens.append(formal_inverse(s))
    seen = []
    for r in relators:
        w = tuple(fold(s) for s in r)
        if w not in seen:
            seen.append(w)
    return Presentation(tuple(gens), frozenset(involutions), tuple(seen))


@dataclass
class VertexAction:
    """Each symbol of S as a partial bijection of the vertices of X."""

    maps: dict[str, dict[int, int]]

    @classmethod
    def from_generator_maps(cls, presentation: Presentation, generator_maps: Mapping) -> VertexAction:
        maps: dict[str, dict[int, int]] = {}
        for s, m in generator_maps.items():
            if s not in presentation.generators:
                raise InputError(f"action given for unknown generator {s}")
            maps[s] = {int(k): int(v) for k, v in m.items()}
        for s in presentation.generators:
            if s in maps:
                continue
            inv = presentation.inverse(s)
            if inv not in maps:
                raise InputError(f"no action given for generator {s} or its inverse")
            m = maps[inv]
            if len(set(m.values())) != len(m):
                raise InputError(f"map of {inv} is not injective")
            maps[s] = {w: v for v, w in m.items()}
        return cls(maps)

    def domain(self, s: str) -> frozenset[int]:
        return frozenset(self.maps[s])

    def check(self, presentation: Presentation, x=None) -> list[tuple[str, str]]:
        """Consistency problems as ``(code, message)`` pairs."""
        problems = []
        for s in presentation.generators:
            m = self.maps[s]
            if len(set(m.values())) != len(m):
                problems.append(("not-injective", f"map of {s} is not injective"))
            inv = self.maps[presentation.inverse(s)]
            for v, w in sorted(m.items()):
                if w in inv and inv[w] != v:
                    problems.append(("inverse-mismatch", f"{presentation.inverse(s)} does not undo {s} at {v}"))
                    break
            if x is not None:
                g = x.skeleton if isinstance(x, FlagComplex) else x
                for v, w in sorted(m.items()):
                    if v not in g or w not in g:
                        problems.append(("unknown-vertex", f"map of {s} mentions a vertex outside X at {v}"))
                        break
                else:
                    for u, v in g.edges():
                        if u in m and v in m and not g.has_edge(m[u], m[v]):
                            problems.append(("not-simplicial", f"{s} sends edge ({u}, {v}) to a non-edge"))
                            break
        for r in presentation.relators:
            for v in sorted(self.maps[r[-1]]):
                try:
                    w = word_apply(self, r, v)
                except DomainEscape:
                    continue
                if w != v:
                    problems.append(("relator", f"relator {format_word(r)} moves {v} to {w}"))
                    break
        return problems


def word_apply(action: VertexAction, word: Iterable[str], v: int) -> int:
    """Image of ``v`` under the group element spelled by ``word``."""
    word = tuple(word)
    for pos in range(len(word) - 1, -1, -1):
        m = action.maps[word[pos]]
        if v not in m:
            raise DomainEscape(v, pos)
        v = m[v]
    return v


@dataclass(frozen=True)
class Element:
    """A group element of the truncation: its canonical word and its action on the probe set."""

    word: tuple[str, ...]
    key: tuple[int, ...]

    def __str__(self) -> str:
        return format_word(self.word)


class Ball(Sequence):
    """Elements of word length at most ``rho``, in shortlex order.

    Two words name the same element when they act identically on the probe
    vertices; this is exact as long as the action on the probe set is
    faithful.
    """

    def __init__(self, presentation, action, probe, rho, elements):
        self.presentation = presentation
        self.action = action
        self.probe = tuple(probe)
        self.rho = rho
        self.elements = list(elements)
        self._by_key = {e.key: i for i, e in enumerate(self.elements)}

    def __getitem__(self, i):
        return self.elements[i]

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"Ball(rho={self.rho}, elements=[{', '.join(map(str, self.elements))}])"

    def key_of(self, word) -> tuple[int, ...]:
        return tuple(word_apply(self.action, word, v) for v in self.probe)

    def find(self, word) -> int | None:
        """Index of the element spelled by ``word``, or None outside the ball/patch."""
        try:
            key = self.key_of(word)
        except DomainEscape:
            return None
        return self._by_key.get(key)

    def index_of(self, element: Element) -> int:
        return self._by_key[element.key]

    def length(self, i: int) -> int:
        return len(self.elements[i].word)

    def right(self, i: int, s: str) -> int | None:
        return self.find(self.elements[i].word + (s,))

    def is_closed(self) -> bool:
        """True when the ball is the whole group (closed under right multiplication)."""
        return all(self.right(i, s) is not None for i in range(len(self)) for s in self.presentation.generators)


def enumerate_ball(presentation: Presentation, action: VertexAction, rho: int, probe: Iterable[int]) -> Ball:
    if rho < 0:
        raise InputError("rho must be non-negative")
    probe = tuple(probe)
    if not probe:
        raise InputError("probe set must be non-empty")
    identity = Element((), probe)
    elements = [identity]
    seen = {identity.key}
    layer = [identity]
    for _ in range(rho):
        nxt = []
        for h in layer:
            for s in presentation.generators:
                word = h.word + (s,)
                key = tuple(word_apply(action, word, v) for v in probe)
                if key not in seen:
                    seen.add(key)
                    e = Element(word, key)
                    nxt.append(e)
        elements.extend(nxt)
        layer = nxt
        if not layer:
            break
    return Ball(presentation, action, probe, rho, elements)


def stabilizer_of(action: VertexAction, ball: Iterable[Element], v: int) -> list[Element]:
    return [h for h in ball if word_apply(action, h.word, v) == v]


@dataclass(frozen=True)
class CayleyGraph:
    """Cayley graph of the truncation.

    Each undirected edge ``{h, hs}`` is stored once as ``(i, s, j)``; an
    edge labelled by an involution stands for the two parallel edges of
    the oriented Cayley graph.
    """

    elements: tuple[Element, ...]
    edges: tuple[tuple[int, str, int], ...]
    involutions: frozenset[str]

    def oriented_edges(self) -> list[tuple[int, str, int]]:
        out = []
        for i, s, j in self.edges:
            out.append((i, s, j))
            out.append((j, s if s in self.involutions else formal_inverse(s), i))
        return out


def cayley_graph(ball: Ball) -> CayleyGraph:
    p = ball.presentation
    edges = []
    seen = set()
    for i in range(len(ball)):
        for s in p.generators:
            j = ball.right(i, s)
            if j is None:
                continue
            key = (i, s, j)
            if (j, p.inverse(s), i) in seen:
                continue
            seen.add(key)
            edges.append(key)
    return CayleyGraph(tuple(ball), tuple(edges), p.involutions)


@dataclass(frozen=True)
class EquivariantPathData:
    """Base vertex x0 and, per symbol s, an edge path gamma_s from x0 to s.x0."""

    x0: int
    gamma: Mapping[str, tuple[int, ...]]

    @property
    def L(self) -> int:
        return max((len(p) - 1 for p in self.gamma.values()), default=0)

    @classmethod
    def complete(cls, presentation: Presentation, action: VertexAction, x0: int, gamma: Mapping) -> EquivariantPathData:
        """Fill in gamma for missing symbols as the translate of the reversed inverse path."""
        paths = {s: tuple(int(v) for v in p) for s, p in gamma.items()}
        for s in paths:
            if s not in presentation.generators:
                raise InputError(f"path given for unknown generator {s}")
        for s in presentation.generators:
            if s in paths:
                continue
            inv = presentation.inverse(s)
            if inv not in paths:
                raise InputError(f"no path given for {s} or its inverse")
            paths[s] = tuple(word_apply(action, (s,), v) for v in reversed(paths[inv]))
        return cls(x0, {s: paths[s] for s in presentation.generators})


@dataclass
class PathDataReport:
    failures: list[tuple[str, str]] = field(default_factory=list)
    lengths: dict[str, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures


def validate_path_data(d: EquivariantPathData, action: VertexAction, presentation: Presentation, x=None) -> PathDataReport:
    report = PathDataReport(lengths={s: len(p) - 1 for s, p in d.gamma.items()})
    g = None
    if x is not None:
        g = x.skeleton if isinstance(x, FlagComplex) else x
    for s in presentation.generators:
        path = d.gamma.get(s)
        if not path:
            report.failures.append(("missing", f"gamma[{s}] is missing"))
            continue
        if path[0] != d.x0:
            report.failures.append(("start", f"gamma[{s}] starts at {path[0]}, expected x0 = {d.x0}"))
        try:
            target = word_apply(action, (s,), d.x0)
        except DomainEscape:
            report.failures.append(("domain-escape", f"{s} is undefined at x0 = {d.x0}"))
            continue
        if path[-1] != target:
            report.failures.append(("endpoint", f"gamma[{s}] ends at {path[-1]}, expected {s}.x0 = {target}"))
        if g is not None:
            for u, v in zip(path, path[1:]):
                if not g.has_edge(u, v):
                    report.failures.append(("not-edge-path", f"gamma[{s}] steps ({u}, {v}) which is not an edge"))
                    break
        inv = presentation.inverse(s)
        try:
            expected = tuple(word_apply(action, (inv,), v) for v in reversed(path))
        except DomainEscape:
            report.failures.append(("domain-escape", f"{inv} is undefined along gamma[{s}]"))
            continue
        if d.gamma.get(inv) != expected:
            report.failures.append(("inverse-mismatch", f"gamma[{inv}] is not {inv} applied to reversed gamma[{s}]"))
    return report


def concatenated_path(d: EquivariantPathData, action: VertexAction, word: Iterable[str]) -> tuple[int, ...]:
    """gamma_{s1} * s1.gamma_{s2} * ... * (s1...s(m-1)).gamma_{sm}."""
    word = tuple(word)
    path = [d.x0]
    for i, s in enumerate(word):
        prefix = word[:i]
        segment = [word_apply(action, prefix, v) for v in d.gamma[s]]
        path.extend(segment[1:])
    return tuple(path)


@dataclass
class Gamma:
    """Union of the translates h.gamma_s over Cayley edges {h, hs} inside the ball.

    ``records`` maps ``(h index, s, position)`` to the X-vertex reached;
    ``edge_records`` maps each Gamma edge to the ``(h index, s, segment)``
    triples that traverse it.
    """

    complex: FlagComplex
    records: dict[tuple[int, str, int], int]
    edge_records: dict[tuple[int, int], list[tuple[int, str, int]]]


def build_gamma(d: EquivariantPathData, action: VertexAction, ball: Ball) -> Gamma:
    records: dict[tuple[int, str, int], int] = {}
    edge_records: dict[tuple[int, int], list[tuple[int, str, int]]] = {}
    vertices = set()
    for i, h in enumerate(ball):
        for s in ball.presentation.generators:
            if ball.right(i, s) is None:
                continue
            path = [word_apply(action, h.word, v) for v in d.gamma[s]]
            for k, v in enumerate(path):
                records[(i, s, k)] = v
                vertices.add(v)
            for k, (u, v) in enumerate(zip(path, path[1:])):
                if u != v:
                    edge_records.setdefault((min(u, v), max(u, v)), []).append((i, s, k))
    if not vertices:
        vertices.add(word_apply(action, ball[0].word, d.x0))
    return Gamma(FlagComplex.from_edges(vertices, edge_records), records, edge_records)


def probe_set(x, x0: int, radius: int = 1) -> tuple[int, ...]:
    """Vertices within ``radius`` of x0: the default set used to tell elements apart."""
    return tuple(sorted(bfs_distances(x, [x0], radius)))


def abelianization(presentation: Presentation) -> tuple[int, tuple[int, ...]]:
    """Free rank and torsion coefficients of the abelianized group."""
    from .homology import smith_diagonal

    base = presentation.base_generators
    col = {s: i for i, s in enumerate(base)}
    rows = []
    for r in presentation.relators:
        row = [0] * len(base)
        for s in r:
            if s in col:
                row[col[s]] += 1
            else:
                row[col[formal_inverse(s)]] -= 1
        rows.append(row)
    diag = smith_diagonal(rows, len(base))
    rank = len(base) - len(diag)
    return rank, tuple(d for d in diag if d > 1)


__all__ = [
    "Presentation",
    "symmetrize",
    "formal_inverse",
    "free_reduce",
    "format_word",
    "parse_word",
    "VertexAction",
    "word_apply",
    "Element",
    "Ball",
    "enumerate_ball",
    "stabilizer_of",
    "CayleyGraph",
    "cayley_graph",
    "EquivariantPathData",
    "PathDataReport",
    "validate_path_data",
    "concatenated_path",
    "Gamma",
    "build_gamma",
    "probe_set",
    "abelianization",
]
