"""Command-line entry point.

Exit status: 0 pass, 1 verification failure, 2 input or config error,
3 budget exhausted.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .complex import check_flag, is_m_large
from .errors import InputError, SystolicError
from .homology import homology_h1
from .io import (
    CONFIG_NAME,
    canonical_dumps,
    complex_from_json,
    load_complex,
    load_config,
    moves_from_json,
    read_json,
    sidecar_f,
    to_dot,
)
from .pipeline import EXIT_FAIL, EXIT_INPUT, EXIT_PASS, StageError, run_stages
from .saturation import replay_moves, verify_homotopy_preservation, verify_systolic

CONFIG_ENV = "SYSTOLIC_CONFIG_DIR"


def resolve_config(arg: str | None) -> Path:
    """The config path given, or config.json in the directory named by the environment."""
    if arg:
        p = Path(arg)
        if p.is_dir():
            p = p / CONFIG_NAME
        if p.exists() or not os.environ.get(CONFIG_ENV):
            return p
        return Path(os.environ[CONFIG_ENV]) / arg
    env = os.environ.get(CONFIG_ENV)
    if not env:
        raise InputError(f"no config given and {CONFIG_ENV} is not set")
    return Path(env) / CONFIG_NAME


def _config(args):
    cfg = load_config(resolve_config(args.config))
    for name in ("rho", "R_override", "interior_margin", "budget", "max_moves"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, name, v)
    if getattr(args, "output_dir", None):
        cfg.output_dir = Path(args.output_dir)
    if getattr(args, "allow_unknown", False):
        cfg.allow_unknown = True
    if getattr(args, "timestamps", False):
        cfg.timestamps = True
    cfg.__post_init__()
    return cfg


def cmd_check(args) -> int:
    cf = load_complex(args.complex)
    c = cf.complex
    out = {"vertices": len(c.vertices), "edges": len(c.edges())}
    ok = True
    if cf.simplicial_input is not None:
        w = check_flag(cf.simplicial_input)
        out["flag"] = {"verdict": "pass" if w.passed else "fail", "missing": list(w.missing) if w.missing else None}
        ok &= w.passed
    interior = None
    if args.interior_margin and cf.boundary:
        from .complex import bfs_distances

        d = bfs_distances(c, cf.boundary)
        interior = [v for v in c.vertices if d.get(v, args.interior_margin) >= args.interior_margin]
    lw = is_m_large(c, args.m, interior)
    out["largeness"] = {
        "m": args.m,
        "verdict": lw.verdict,
        "witness": list(lw.bad_cycle.vertices) if lw.bad_cycle else None,
    }
    ok &= lw.passed
    if not args.no_homology:
        h = homology_h1(c)
        out["H1"] = {"rank": h.rank, "torsion": list(h.torsion)}
    out["verdict"] = "pass" if ok else "fail"
    sys.stdout.write(canonical_dumps(out))
    return EXIT_PASS if ok else EXIT_FAIL


def _stage_command(upto: str):
    def run(args) -> int:
        code, rep, _ = run_stages(_config(args), upto)
        summary = {"exit_code": code, "stages": {k: v["verdict"] for k, v in rep["stages"].items()}}
        if "R" in rep:
            summary["R"] = rep["R"]
        if "moves" in rep:
            summary["moves"] = rep["moves"]
        for stage in rep["stages"].values():
            for code_, msg in stage["failures"]:
                print(f"{code_}: {msg}", file=sys.stderr)
        sys.stdout.write(canonical_dumps(summary))
        return code

    return run


def cmd_verify(args) -> int:
    """Rebuild Y from the config, replay the stored move log and re-verify the stored final complex."""
    cfg = _config(args)
    out = Path(cfg.output_dir)
    code, rep, run = run_stages(cfg, "Y", write=False)
    if code != EXIT_PASS:
        sys.stdout.write(canonical_dumps({"exit_code": code, "stages": rep["stages"]}))
        return code
    moves = moves_from_json(read_json(out / "moves.json"), str(out / "moves.json"))
    stored = complex_from_json(read_json(out / "Ybar.json"), str(out / "Ybar.json")).complex
    before = run.W
    after = replay_moves(before, moves)
    result = {"replay_matches": after.edges() == stored.edges()}
    hp = verify_homotopy_preservation(before, after, moves)
    sysrep = verify_systolic(after, cfg.budget, cfg.max_states)
    result["homotopy_preservation"] = hp.to_json()
    result["systolic"] = sysrep.to_json()
    ok = result["replay_matches"] and hp.passed and (sysrep.passed or (cfg.allow_unknown and not sysrep.failures))
    result["verdict"] = "pass" if ok else "fail"
    sys.stdout.write(canonical_dumps(result))
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_export_dot(args) -> int:
    c = load_complex(args.complex).complex
    labels = sidecar_f(read_json(args.map), args.map) if args.map else None
    highlight = []
    if args.moves:
        for mv in moves_from_json(read_json(args.moves), args.moves):
            highlight.extend(mv.edges)
    text = to_dot(c, labels, highlight)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS


def _add_config_flags(p):
    p.add_argument("config", nargs="?", help=f"config file or directory (default: ${CONFIG_ENV}/{CONFIG_NAME})")
    p.add_argument("--rho", type=int)
    p.add_argument("--R-override", dest="R_override", type=int)
    p.add_argument("--interior-margin", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--max-moves", type=int)
    p.add_argument("--output-dir")
    p.add_argument("--allow-unknown", action="store_true")
    p.add_argument("--timestamps", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="systolic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="flagness, m-largeness and H1 of a complex file")
    p.add_argument("complex")
    p.add_argument("-m", type=int, default=6)
    p.add_argument("--interior-margin", type=int, default=0)
    p.add_argument("--no-homology", action="store_true")
    p.set_defaults(func=cmd_check)

    stages = [
        ("build-gamma", "gamma", "enumerate the ball and build the Cayley image"),
        ("short-loops", "short_loops", "enumerate relator, stabilizer and crossing loops"),
        ("compute-r", "radius", "compute the radius certificate"),
        ("build-y", "Y", "glue Y and verify sections, factorization and simple connectivity"),
        ("saturate", "saturate", "saturate Y and verify the result"),
        ("pipeline", "saturate", "run every stage and write all artifacts"),
    ]
    for name, upto, text in stages:
        p = sub.add_parser(name, help=text)
        _add_config_flags(p)
        p.set_defaults(func=_stage_command(upto))

    p = sub.add_parser("verify", help="replay a stored move log and re-verify the final complex")
    _add_config_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export-dot", help="write the one-skeleton of a complex file as DOT")
    p.add_argument("complex")
    p.add_argument("--map", help="sidecar file; labels vertices with their f-images")
    p.add_argument("--moves", help="move log; added edges are drawn dashed")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export_dot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SystolicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
