import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from systolic.construction import build_Y, compute_R, enumerate_short_loops  # noqa: E402
from systolic.fixtures import line_fixture, torsion_fixture  # noqa: E402
from systolic.group import (  # noqa: E402
    EquivariantPathData,
    VertexAction,
    enumerate_ball,
    probe_set,
    symmetrize,
)


class Built:
    """All intermediate objects for one pipeline fixture, computed in memory."""

    def __init__(self, fx, rho=None, loops_only=False):
        self.fx = fx
        self.x = fx.complex
        self.P = symmetrize(fx.presentation)
        self.A = VertexAction.from_generator_maps(self.P, fx.generator_maps)
        self.d = EquivariantPathData.complete(self.P, self.A, fx.x0, fx.gamma)
        self.ball = enumerate_ball(self.P, self.A, fx.rho if rho is None else rho, probe_set(self.x, fx.x0))
        self.loops = enumerate_short_loops(self.P, self.A, self.d, self.ball)
        if loops_only:
            return
        self.cert = compute_R(self.loops, self.x, self.d.L, ball=self.ball, x0=fx.x0, boundary=fx.boundary)
        self.Y = build_Y(self.ball, self.cert.R, self.x, fx.x0, fx.boundary)


@pytest.fixture(scope="session")
def line():
    return Built(line_fixture())


@pytest.fixture(scope="session")
def torsion():
    return Built(torsion_fixture())


ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        name, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n} [{'PASS' if ok else 'FAIL'}] {name}: {detail}")
