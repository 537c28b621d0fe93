"""Small complexes and complete pipeline inputs used by tests and examples.

Run ``python -m systolic.fixtures NAME DIR`` to write a pipeline fixture
(complex, presentation, action, path data and config) into DIR.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

from .complex import FlagComplex, SimplicialComplexInput
from .io import complex_to_json, write_json


def cycle(n: int) -> FlagComplex:
    return FlagComplex.from_edges(range(n), [(i, (i + 1) % n) for i in range(n)])


def wheel(n: int) -> FlagComplex:
    """Hub 0 joined to the rim cycle 1..n."""
    rim = [(i, i % n + 1) for i in range(1, n + 1)]
    spokes = [(0, i) for i in range(1, n + 1)]
    return FlagComplex.from_edges(range(n + 1), rim + spokes)


def octahedron() -> FlagComplex:
    opposite = {(0, 1), (2, 3), (4, 5)}
    edges = [(u, v) for u in range(6) for v in range(u + 1, 6) if (u, v) not in opposite]
    return FlagComplex.from_edges(range(6), edges)


def filled_triangle() -> FlagComplex:
    return FlagComplex.from_edges(range(3), [(0, 1), (1, 2), (0, 2)])


def empty_triangle() -> SimplicialComplexInput:
    return SimplicialComplexInput((0, 1, 2), ((0, 1), (1, 2), (0, 2)))


def path_complex(lo: int, hi: int) -> FlagComplex:
    return FlagComplex.from_edges(range(lo, hi + 1), [(v, v + 1) for v in range(lo, hi)])


_DIRECTIONS = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)]


def _rotate(p):
    q, r = p
    return (-r, q + r)


def hex_ring(k: int) -> list[tuple[int, int]]:
    """Axial coordinates of the lattice points at distance k, walking counterclockwise from (k, 0)."""
    if k == 0:
        return [(0, 0)]
    out = []
    q, r = k, 0
    # walk the six sides, each of length k
    for dq, dr in _DIRECTIONS[2:] + _DIRECTIONS[:2]:
        for _ in range(k):
            out.append((q, r))
            q, r = q + dq, r + dr
    return out


@dataclass
class TriangularPatch:
    """The ball of radius ``radius`` in the equilateral triangulation of the plane."""

    radius: int
    complex: FlagComplex
    coords: dict[int, tuple[int, int]]
    ids: dict[tuple[int, int], int]
    rings: list[list[int]]

    @property
    def boundary(self) -> list[int]:
        return self.rings[-1]

    def rotation(self) -> dict[int, int]:
        return {v: self.ids[_rotate(p)] for v, p in self.coords.items()}


def triangular_patch(radius: int) -> TriangularPatch:
    coords: dict[int, tuple[int, int]] = {}
    rings = []
    for k in range(radius + 1):
        ring = []
        for p in hex_ring(k):
            coords[len(coords)] = p
            ring.append(len(coords) - 1)
        rings.append(ring)
    ids = {p: v for v, p in coords.items()}
    edges = []
    for v, (q, r) in coords.items():
        for dq, dr in _DIRECTIONS:
            w = ids.get((q + dq, r + dr))
            if w is not None and v < w:
                edges.append((v, w))
    return TriangularPatch(radius, FlagComplex.from_edges(coords, edges), coords, ids, rings)


@dataclass
class PipelineFixture:
    name: str
    complex: FlagComplex
    boundary: list[int]
    presentation: dict
    generator_maps: dict[str, dict[int, int]]
    x0: int
    gamma: dict[str, list[int]]
    rho: int
    interior_margin: int = 1
    config_extra: dict = field(default_factory=dict)

    def write(self, directory) -> Path:
        """Write all input files and a config into ``directory``; returns the config path."""
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        write_json(d / "complex.json", complex_to_json(self.complex, self.boundary))
        write_json(d / "presentation.json", self.presentation)
        maps = {s: {str(k): v for k, v in sorted(m.items())} for s, m in self.generator_maps.items()}
        write_json(d / "action.json", {"generator_maps": maps})
        write_json(d / "path_data.json", {"x0": self.x0, "gamma": self.gamma})
        config = {
            "complex": "complex.json",
            "presentation": "presentation.json",
            "action": "action.json",
            "path_data": "path_data.json",
            "rho": self.rho,
            "interior_margin": self.interior_margin,
            "output_dir": "out",
        }
        config.update(self.config_extra)
        write_json(d / "config.json", config)
        return d / "config.json"


def line_fixture() -> PipelineFixture:
    """X the line -8..8, H generated by the shift by two, x0 = 0."""
    shift = {v: v + 2 for v in range(-8, 7)}
    return PipelineFixture(
        name="line",
        complex=path_complex(-8, 8),
        boundary=[-8, 8],
        presentation={"generators": ["s"], "relators": []},
        generator_maps={"s": shift},
        x0=0,
        gamma={"s": [0, 1, 2]},
        rho=2,
    )


def torsion_fixture(radius: int = 4) -> PipelineFixture:
    """Rotations by sixty degrees of a triangular patch, x0 a vertex next to the centre."""
    patch = triangular_patch(radius)
    return PipelineFixture(
        name="torsion",
        complex=patch.complex,
        boundary=patch.boundary,
        presentation={"generators": ["r"], "relators": [["r"] * 6]},
        generator_maps={"r": patch.rotation()},
        x0=1,
        gamma={"r": [1, 2]},
        rho=3,
    )


PIPELINE_FIXTURES = {"line": line_fixture, "torsion": torsion_fixture}


def main(argv=None) -> int:
    args = sys.argv[1:] if argv is None else argv
    if len(args) != 2 or args[0] not in PIPELINE_FIXTURES:
        print(f"usage: python -m systolic.fixtures {{{','.join(PIPELINE_FIXTURES)}}} DIR", file=sys.stderr)
        return 2
    print(PIPELINE_FIXTURES[args[0]]().write(args[1]))
    return 0


if __name__ == "__main__":
    sys.exit(main())
