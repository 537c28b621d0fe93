"""File formats, canonical JSON serialization and DOT export."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .complex import FlagComplex, SimplicialComplexInput, SkeletonGraph
from .errors import InputError
from .group import EquivariantPathData, Presentation, VertexAction, symmetrize


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(canonical_dumps(obj))


def digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def read_json(path):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"{p}: cannot read ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{p}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"{where}: expected an integer, got {value!r}")
    return value


def _int_list(value, where: str) -> list[int]:
    if not isinstance(value, list):
        raise InputError(f"{where}: expected a list")
    return [_int(v, f"{where}[{k}]") for k, v in enumerate(value)]


def _object(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise InputError(f"{where}: expected an object")
    return value


def _field(data: dict, key: str, where: str):
    if key not in data:
        raise InputError(f"{where}: missing field {key!r}")
    return data[key]


# complexes


@dataclass
class ComplexFile:
    complex: FlagComplex
    boundary: tuple[int, ...] = ()
    maximal_simplices: tuple[tuple[int, ...], ...] | None = None

    @property
    def simplicial_input(self) -> SimplicialComplexInput | None:
        if self.maximal_simplices is None:
            return None
        return SimplicialComplexInput(self.complex.vertices, self.maximal_simplices)


def complex_to_json(c, boundary: Iterable[int] = (), maximal_simplices=None) -> dict:
    g = c.skeleton if isinstance(c, FlagComplex) else c
    out = {"vertices": sorted(g.vertices), "edges": [list(e) for e in g.edges()]}
    if maximal_simplices is not None:
        out["maximal_simplices"] = sorted(sorted(s) for s in maximal_simplices)
    boundary = sorted(boundary)
    if boundary:
        out["boundary"] = boundary
    return out


def complex_from_json(data, where: str = "complex") -> ComplexFile:
    data = _object(data, where)
    vertices = _int_list(_field(data, "vertices", where), f"{where}.vertices")
    if len(set(vertices)) != len(vertices):
        raise InputError(f"{where}.vertices: duplicate vertex")
    edges = []
    for k, e in enumerate(_field(data, "edges", where)):
        pair = _int_list(e, f"{where}.edges[{k}]")
        if len(pair) != 2:
            raise InputError(f"{where}.edges[{k}]: expected two endpoints")
        edges.append(pair)
    simplices = None
    if data.get("maximal_simplices") is not None:
        simplices = []
        for k, s in enumerate(data["maximal_simplices"]):
            simplices.append(tuple(sorted(_int_list(s, f"{where}.maximal_simplices[{k}]"))))
            for a in simplices[-1]:
                for b in simplices[-1]:
                    if a < b:
                        edges.append([a, b])
        simplices = tuple(simplices)
    boundary = tuple(sorted(_int_list(data.get("boundary", []), f"{where}.boundary")))
    vset = set(vertices)
    for v in boundary:
        if v not in vset:
            raise InputError(f"{where}.boundary: unknown vertex {v}")
    try:
        g = SkeletonGraph.from_edges(vertices, edges)
    except InputError as exc:
        raise InputError(f"{where}: {exc}") from None
    return ComplexFile(FlagComplex(g), boundary, simplices)


def load_complex(path) -> ComplexFile:
    return complex_from_json(read_json(path), str(path))


# group data


def presentation_to_json(p: Presentation) -> dict:
    return {
        "generators": list(p.base_generators),
        "involutions": sorted(p.involutions),
        "relators": [list(r) for r in p.relators],
    }


def presentation_from_json(data, where: str = "presentation") -> Presentation:
    data = _object(data, where)
    _field(data, "generators", where)
    try:
        return symmetrize(data)
    except InputError as exc:
        raise InputError(f"{where}: {exc}") from None


def action_to_json(action: VertexAction, presentation: Presentation) -> dict:
    maps = {}
    for s in presentation.base_generators:
        maps[s] = {str(v): action.maps[s][v] for v in sorted(action.maps[s])}
    return {"generator_maps": maps}


def action_from_json(data, presentation: Presentation, where: str = "action") -> VertexAction:
    data = _object(data, where)
    maps = _object(_field(data, "generator_maps", where), f"{where}.generator_maps")
    parsed = {}
    for s, m in maps.items():
        m = _object(m, f"{where}.generator_maps.{s}")
        entry = {}
        for k, v in m.items():
            try:
                key = int(k)
            except ValueError:
                raise InputError(f"{where}.generator_maps.{s}: key {k!r} is not a vertex id") from None
            entry[key] = _int(v, f"{where}.generator_maps.{s}.{k}")
        parsed[s] = entry
    try:
        return VertexAction.from_generator_maps(presentation, parsed)
    except InputError as exc:
        raise InputError(f"{where}: {exc}") from None


def path_data_to_json(d: EquivariantPathData, presentation: Presentation) -> dict:
    return {"x0": d.x0, "gamma": {s: list(d.gamma[s]) for s in presentation.base_generators}}


def path_data_from_json(data, presentation: Presentation, action: VertexAction, where: str = "path_data") -> EquivariantPathData:
    data = _object(data, where)
    x0 = _int(_field(data, "x0", where), f"{where}.x0")
    gamma = _object(_field(data, "gamma", where), f"{where}.gamma")
    paths = {s: _int_list(p, f"{where}.gamma.{s}") for s, p in gamma.items()}
    try:
        return EquivariantPathData.complete(presentation, action, x0, paths)
    except InputError as exc:
        raise InputError(f"{where}: {exc}") from None


# run configuration

CONFIG_NAME = "config.json"


@dataclass
class RunConfig:
    complex: Path
    presentation: Path
    action: Path
    path_data: Path
    rho: int
    interior_margin: int = 1
    R_override: int | None = None
    budget: int | None = None
    max_moves: int | None = None
    max_states: int = 20000
    output_dir: Path = Path("out")
    allow_unknown: bool = False
    timestamps: bool = False

    def __post_init__(self):
        if self.rho < 0:
            raise InputError("config.rho: must be non-negative")
        if self.interior_margin < 0:
            raise InputError("config.interior_margin: must be non-negative")
        for name in ("budget", "max_moves", "R_override"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise InputError(f"config.{name}: must be positive")

    @classmethod
    def from_json(cls, data, base_dir=".") -> RunConfig:
        data = _object(data, "config")
        base = Path(base_dir)
        known = set(cls.__dataclass_fields__)
        for key in data:
            if key not in known:
                raise InputError(f"config: unknown field {key!r}")
        kwargs = {}
        for key in ("complex", "presentation", "action", "path_data"):
            value = _field(data, key, "config")
            if not isinstance(value, str):
                raise InputError(f"config.{key}: expected a path")
            kwargs[key] = base / value
        kwargs["rho"] = _int(_field(data, "rho", "config"), "config.rho")
        for key in ("interior_margin", "max_states"):
            if key in data:
                kwargs[key] = _int(data[key], f"config.{key}")
        for key in ("R_override", "budget", "max_moves"):
            if data.get(key) is not None:
                kwargs[key] = _int(data[key], f"config.{key}")
        if "output_dir" in data:
            kwargs["output_dir"] = base / data["output_dir"]
        for key in ("allow_unknown", "timestamps"):
            if key in data:
                if not isinstance(data[key], bool):
                    raise InputError(f"config.{key}: expected true or false")
                kwargs[key] = data[key]
        return cls(**kwargs)

    def to_json(self) -> dict:
        out = {}
        for key in self.__dataclass_fields__:
            v = getattr(self, key)
            out[key] = str(v) if isinstance(v, Path) else v
        return out


def load_config(path) -> RunConfig:
    p = Path(path)
    return RunConfig.from_json(read_json(p), p.parent)


# move logs


def moves_to_json(moves) -> list:
    return [m.to_json() for m in moves]


def moves_from_json(data, where: str = "moves") -> list:
    from .saturation import DiagonalMove

    if not isinstance(data, list):
        raise InputError(f"{where}: expected a list of moves")
    out = []
    for k, rec in enumerate(data):
        try:
            out.append(DiagonalMove.from_json(rec))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{where}[{k}]: malformed move ({exc})") from None
    return out


def sidecar_f(sidecar: Mapping, where: str = "sidecar") -> dict[int, int]:
    _object(sidecar, where)
    return {int(k): _int(v["f"], f"{where}.{k}.f") for k, v in sidecar.items()}


# DOT


def to_dot(c, labels: Mapping[int, object] | None = None, highlight: Iterable[tuple[int, int]] = (), name: str = "G") -> str:
    """One-skeleton as an undirected DOT graph, vertices and edges in sorted order."""
    g = c.skeleton if isinstance(c, FlagComplex) else c
    marked = {(min(u, v), max(u, v)) for u, v in highlight}
    lines = [f"graph {name} {{"]
    for v in sorted(g.vertices):
        if labels is not None and v in labels:
            lines.append(f'  {v} [label="{v}:{labels[v]}"];')
        else:
            lines.append(f"  {v};")
    for u, v in g.edges():
        style = ' [style=dashed, color=red]' if (u, v) in marked else ""
        lines.append(f"  {u} -- {v}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"
