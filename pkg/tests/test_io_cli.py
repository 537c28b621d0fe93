import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from systolic import cli
from systolic.errors import InputError
from systolic.fixtures import empty_triangle, line_fixture, octahedron, path_complex, torsion_fixture, wheel
from systolic.io import (
    RunConfig,
    canonical_dumps,
    complex_from_json,
    complex_to_json,
    load_complex,
    presentation_from_json,
    presentation_to_json,
    read_json,
    to_dot,
    write_json,
)


def write_complex(path, c, **extra):
    data = complex_to_json(c)
    data.update(extra)
    write_json(path, data)
    return str(path)


def run_cli(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@settings(max_examples=60)
@given(
    st.integers(1, 8).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1])),
        )
    )
)
def test_complex_round_trip(g):
    n, edges = g
    raw = {"vertices": list(reversed(range(n))), "edges": [list(e) for e in edges]}
    once = complex_to_json(complex_from_json(raw).complex)
    twice = complex_to_json(complex_from_json(json.loads(canonical_dumps(once))).complex)
    assert once == twice
    assert once["vertices"] == sorted(once["vertices"])
    assert once["edges"] == sorted(once["edges"])


def test_presentation_round_trip():
    p = presentation_from_json({"generators": ["r", "x"], "relators": ["r r r", "x x"]})
    assert presentation_from_json(presentation_to_json(p)) == p


def test_parse_errors_have_context(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": [0, 1],\n "edges": [[0, 1]')
    with pytest.raises(InputError, match="line 2"):
        read_json(bad)
    with pytest.raises(InputError, match=r"edges\[1\]"):
        complex_from_json({"vertices": [0, 1], "edges": [[0, 1], [0, "a"]]})
    with pytest.raises(InputError, match="missing field 'edges'"):
        complex_from_json({"vertices": [0]})
    with pytest.raises(InputError, match="unknown vertex 7"):
        complex_from_json({"vertices": [0, 1], "edges": [[0, 7]]})


def test_config_validation(tmp_path):
    base = {"complex": "c", "presentation": "p", "action": "a", "path_data": "d", "rho": 1}
    cfg = RunConfig.from_json(base, tmp_path)
    assert cfg.complex == tmp_path / "c"
    with pytest.raises(InputError, match="interior_margin"):
        RunConfig.from_json(dict(base, interior_margin=-1), tmp_path)
    with pytest.raises(InputError, match="budget"):
        RunConfig.from_json(dict(base, budget=0), tmp_path)
    with pytest.raises(InputError, match="unknown field"):
        RunConfig.from_json(dict(base, radius=3), tmp_path)


def test_check_octahedron(tmp_path, capsys):
    code, out, _ = run_cli(["check", write_complex(tmp_path / "o.json", octahedron())], capsys)
    assert code == 1
    assert json.loads(out)["largeness"]["witness"] == [0, 2, 1, 3]


def test_check_wheel(tmp_path, capsys):
    code, out, _ = run_cli(["check", write_complex(tmp_path / "w.json", wheel(6))], capsys)
    assert code == 0
    assert json.loads(out)["H1"] == {"rank": 0, "torsion": []}


def test_check_empty_triangle(tmp_path, capsys):
    t = empty_triangle()
    path = write_complex(tmp_path / "t.json", path_complex(0, 2), maximal_simplices=[list(s) for s in t.maximal_simplices])
    code, out, _ = run_cli(["check", path], capsys)
    assert code == 1
    assert json.loads(out)["flag"] == {"verdict": "fail", "missing": [0, 1, 2]}


def test_check_bad_file(tmp_path, capsys):
    p = tmp_path / "x.json"
    p.write_text("{")
    code, _, err = run_cli(["check", str(p)], capsys)
    assert code == 2 and "line 1" in err


def test_pipeline_line(tmp_path, capsys):
    cfg = line_fixture().write(tmp_path)
    code, out, _ = run_cli(["pipeline", str(cfg)], capsys)
    assert code == 0
    assert json.loads(out)["R"] == 2
    ybar = load_complex(tmp_path / "out" / "Ybar.json").complex
    assert max(ybar.skeleton.degree(v) for v in ybar.vertices) == 2
    report = read_json(tmp_path / "out" / "report.json")
    assert report["stages"]["systolic"]["verdict"] == "pass"
    assert set(report["provenance"]) == {"complex", "presentation", "action", "path_data"}


def test_pipeline_torsion(tmp_path, capsys):
    cfg = torsion_fixture().write(tmp_path)
    code, out, _ = run_cli(["pipeline", str(cfg)], capsys)
    assert code == 0
    assert json.loads(out)["R"] == 3
    ball = read_json(tmp_path / "out" / "ball.json")
    assert ball["stabilizer_x0"] == ["1"]
    loops = read_json(tmp_path / "out" / "short_loops.json")
    assert [lp["kind"] for lp in loops] == ["relator"]


def test_patch_too_small(tmp_path, capsys):
    cfg = line_fixture().write(tmp_path)
    code, _, err = run_cli(["pipeline", str(cfg), "--R-override", "7"], capsys)
    assert code == 2
    assert "(h = s)" in err


def test_budget_exhausted(tmp_path, capsys):
    cfg = torsion_fixture().write(tmp_path)
    code, _, _ = run_cli(["pipeline", str(cfg), "--budget", "1"], capsys)
    assert code == 3
    code, _, _ = run_cli(["pipeline", str(cfg), "--budget", "1", "--allow-unknown"], capsys)
    assert code == 0


def test_stage_commands_and_verify(tmp_path, capsys):
    cfg = str(line_fixture().write(tmp_path))
    for cmd, artifact in [
        ("build-gamma", "gamma.json"),
        ("short-loops", "short_loops.json"),
        ("compute-r", "radius.json"),
        ("build-y", "Y.map.json"),
        ("saturate", "moves.json"),
    ]:
        code, _, _ = run_cli([cmd, cfg], capsys)
        assert code == 0 and (tmp_path / "out" / artifact).exists()
    assert read_json(tmp_path / "out" / "gamma.json")["vertices"] == [-4, -3, -2, -1, 0, 1, 2, 3, 4]
    code, out, _ = run_cli(["verify", cfg], capsys)
    assert code == 0 and json.loads(out)["replay_matches"]


def test_verify_detects_tampering(tmp_path, capsys):
    cfg = str(line_fixture().write(tmp_path))
    run_cli(["pipeline", cfg], capsys)
    ybar = read_json(tmp_path / "out" / "Ybar.json")
    ybar["edges"].append([0, 6])
    write_json(tmp_path / "out" / "Ybar.json", ybar)
    code, out, _ = run_cli(["verify", cfg], capsys)
    assert code == 1 and not json.loads(out)["replay_matches"]


def test_config_from_environment(tmp_path, capsys, monkeypatch):
    line_fixture().write(tmp_path)
    monkeypatch.setenv(cli.CONFIG_ENV, str(tmp_path))
    code, out, _ = run_cli(["compute-r"], capsys)
    assert code == 0 and json.loads(out)["R"] == 2


def test_missing_config(capsys, monkeypatch):
    monkeypatch.delenv(cli.CONFIG_ENV, raising=False)
    code, _, _ = run_cli(["pipeline"], capsys)
    assert code == 2


def test_dot_examples(tmp_path, capsys):
    text = to_dot(path_complex(0, 4))
    assert text.count(" -- ") == 4 and text.count(";") == 9
    assert to_dot(complex_from_json({"vertices": [], "edges": []}).complex) == "graph G {\n}\n"


def test_dot_highlights_moves(tmp_path, capsys):
    from systolic.complex import FlagComplex
    from systolic.saturation import DiagonalMove

    square = FlagComplex.from_edges(range(4), [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
    c = write_complex(tmp_path / "c.json", square)
    mv = DiagonalMove("Bijective", (0, 1, 2, 3), (0, 2), (("1", (0, 2), ("edge", (0, 2))),))
    write_json(tmp_path / "m.json", [mv.to_json()])
    code, out, _ = run_cli(["export-dot", c, "--moves", str(tmp_path / "m.json")], capsys)
    assert code == 0
    assert "  0 -- 2 [style=dashed, color=red];" in out
    assert out.count("dashed") == 1


def test_pipeline_deterministic(tmp_path, capsys):
    cfg = torsion_fixture().write(tmp_path)
    run_cli(["pipeline", str(cfg)], capsys)
    first = {p.name: p.read_bytes() for p in (tmp_path / "out").iterdir()}
    run_cli(["pipeline", str(cfg)], capsys)
    second = {p.name: p.read_bytes() for p in (tmp_path / "out").iterdir()}
    assert first == second
