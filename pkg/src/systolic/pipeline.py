"""The end-to-end run: inputs, each construction stage, verification and artifacts."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

from .complex import bfs_distances, check_flag, is_m_large
from .construction import (
    Report,
    build_Y,
    certify_short_loops,
    compute_R,
    enumerate_short_loops,
    f_properness_stats,
    verify_factorization,
    verify_sections,
    verify_Y_simply_connected,
)
from .errors import BallTooSmall, BudgetExceeded, DomainEscape, InputError, PatchTooSmall, SystolicError
from .group import build_gamma, enumerate_ball, format_word, probe_set, stabilizer_of, validate_path_data
from .io import (
    RunConfig,
    action_from_json,
    complex_from_json,
    complex_to_json,
    digest,
    moves_to_json,
    path_data_from_json,
    presentation_from_json,
    read_json,
    write_json,
)
from .saturation import FExtension, saturate, verify_homotopy_preservation, verify_systolic

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3

HINTS = {
    PatchTooSmall: "or lower R_override and rho",
    BudgetExceeded: "raise max_moves",
}


class StageError(SystolicError):
    """A stage could not run; carries the stage name and the exit status to use."""

    def __init__(self, stage: str, cause: Exception, code: int):
        hint = next((h for t, h in HINTS.items() if isinstance(cause, t)), None)
        text = f"stage {stage}: {cause}"
        if hint:
            text += f" ({hint})"
        super().__init__(text)
        self.stage = stage
        self.cause = cause
        self.code = code


@dataclass
class Run:
    """Lazily evaluated pipeline stages for one configuration.

    Accessing a stage property computes it and everything it depends on.
    Verification reports are collected in ``reports`` in stage order.
    """

    config: RunConfig
    reports: dict[str, Report] = field(default_factory=dict)
    timing: dict[str, float] = field(default_factory=dict)

    def _stage(self, name, fn):
        start = time.perf_counter()
        try:
            return fn()
        except BudgetExceeded as exc:
            raise StageError(name, exc, EXIT_BUDGET) from exc
        except (InputError, PatchTooSmall, BallTooSmall, DomainEscape) as exc:
            raise StageError(name, exc, EXIT_INPUT) from exc
        except SystolicError as exc:
            raise StageError(name, exc, EXIT_FAIL) from exc
        finally:
            self.timing[name] = round(time.perf_counter() - start, 6)

    # inputs

    @cached_property
    def inputs(self):
        def load():
            cfg = self.config
            cf = complex_from_json(read_json(cfg.complex), str(cfg.complex))
            pres = presentation_from_json(read_json(cfg.presentation), str(cfg.presentation))
            action = action_from_json(read_json(cfg.action), pres, str(cfg.action))
            d = path_data_from_json(read_json(cfg.path_data), pres, action, str(cfg.path_data))
            return cf, pres, action, d

        return self._stage("load", load)

    @property
    def x(self):
        return self.inputs[0].complex

    @property
    def boundary(self):
        return self.inputs[0].boundary

    @property
    def presentation(self):
        return self.inputs[1]

    @property
    def action(self):
        return self.inputs[2]

    @property
    def path_data(self):
        return self.inputs[3]

    def provenance(self) -> dict:
        cfg = self.config
        return {k: digest(getattr(cfg, k)) for k in ("complex", "presentation", "action", "path_data")}

    def x_interior(self) -> list[int]:
        if not self.boundary:
            return list(self.x.vertices)
        d = bfs_distances(self.x, self.boundary)
        return [v for v in self.x.vertices if d.get(v, self.config.interior_margin) >= self.config.interior_margin]

    @cached_property
    def validation(self) -> Report:
        def run():
            rep = Report("validate")
            cf = self.inputs[0]
            if cf.simplicial_input is not None:
                w = check_flag(cf.simplicial_input)
                if not w.passed:
                    rep.failures.append(("not-flag", f"clique {list(w.missing)} spans no simplex"))
            for code, msg in self.action.check(self.presentation, self.x):
                rep.failures.append((code, msg))
            pd = validate_path_data(self.path_data, self.action, self.presentation, self.x)
            rep.failures.extend(pd.failures)
            lw = is_m_large(self.x, 6, self.x_interior())
            if not lw.passed:
                rep.failures.append(("X-not-6-large", f"interior cycle {list(lw.bad_cycle.vertices)} has no diagonal"))
            rep.details.update({"L": self.path_data.L, "path_lengths": pd.lengths, "x_vertices": len(self.x)})
            return rep

        rep = self._stage("validate", run)
        self.reports["validate"] = rep
        if not rep.passed:
            raise StageError("validate", InputError("; ".join(m for _, m in rep.failures)), EXIT_INPUT)
        return rep

    # construction stages

    @cached_property
    def ball(self):
        self.validation

        def run():
            probe = probe_set(self.x, self.path_data.x0)
            return enumerate_ball(self.presentation, self.action, self.config.rho, probe)

        return self._stage("ball", run)

    @cached_property
    def gamma(self):
        return self._stage("gamma", lambda: build_gamma(self.path_data, self.action, self.ball))

    @cached_property
    def short_loops(self):
        return self._stage(
            "short_loops", lambda: enumerate_short_loops(self.presentation, self.action, self.path_data, self.ball)
        )

    @cached_property
    def radius(self):
        cfg = self.config

        def run():
            return compute_R(
                self.short_loops,
                self.x,
                self.path_data.L,
                R_override=cfg.R_override,
                ball=self.ball,
                x0=self.path_data.x0,
                boundary=self.boundary,
            )

        cert = self._stage("radius", run)
        rep = self._stage(
            "short_loop_contraction",
            lambda: certify_short_loops(self.short_loops, self.x, cert, cfg.budget, cfg.max_states),
        )
        if not cert.containment_ok:
            rep.failures.append(("containment", "a short loop is not contained in the ball of radius R' around its vertices"))
        if not cert.override_ok:
            rep.failures.append(("R-override", f"R_override {cert.R_override} is below the computed {cert.R_computed}"))
        self.reports["short_loop_contraction"] = rep
        return cert

    @cached_property
    def Y(self):
        cfg = self.config
        cert = self.radius
        Y = self._stage("Y", lambda: build_Y(self.ball, cert.R, self.x, self.path_data.x0, self.boundary))
        self.reports["sections"] = self._stage("sections", lambda: verify_sections(Y))
        self.reports["sections"].details.update(f_properness_stats(Y))
        self.reports["factorization"] = self._stage("factorization", lambda: verify_factorization(Y, self.path_data))
        self.reports["Y_simply_connected"] = self._stage(
            "Y_simply_connected",
            lambda: verify_Y_simply_connected(Y, cfg.interior_margin, cfg.budget, cfg.max_states),
        )
        return Y

    @cached_property
    def W(self) -> FExtension:
        return FExtension.from_y(self.Y, self.config.interior_margin)

    @cached_property
    def saturated(self):
        out, moves = self._stage("saturate", lambda: saturate(self.W, self.config.max_moves))
        self.reports["homotopy_preservation"] = self._stage(
            "homotopy_preservation", lambda: verify_homotopy_preservation(self.W, out, moves)
        )
        self.reports["systolic"] = self._stage(
            "systolic", lambda: verify_systolic(out, self.config.budget, self.config.max_states)
        )
        return out, moves

    # artifacts

    def ball_json(self) -> dict:
        b = self.ball
        return {
            "closed": b.is_closed(),
            "elements": [format_word(h.word) for h in b],
            "rho": b.rho,
            "stabilizer_x0": [format_word(h.word) for h in stabilizer_of(self.action, b, self.path_data.x0)],
        }

    def gamma_json(self) -> dict:
        g = self.gamma
        out = complex_to_json(g.complex)
        out["translates"] = sorted(
            [format_word(self.ball[h].word), s, [pos, v]] for (h, s, pos), v in g.records.items()
        )
        return out

    def short_loops_json(self) -> list:
        return [lp.to_json() for lp in self.short_loops]

    def write_artifacts(self, stages) -> list[Path]:
        out = Path(self.config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []

        def put(name, obj):
            write_json(out / name, obj)
            written.append(out / name)

        if "ball" in stages:
            put("ball.json", self.ball_json())
        if "gamma" in stages:
            put("gamma.json", self.gamma_json())
        if "short_loops" in stages:
            put("short_loops.json", self.short_loops_json())
        if "radius" in stages:
            put("radius.json", self.radius.to_json())
        if "Y" in stages:
            put("Y.json", complex_to_json(self.Y.complex))
            put("Y.map.json", self.Y.sidecar())
        if "saturate" in stages:
            final, moves = self.saturated
            put("Ybar.json", complex_to_json(final.complex))
            put("Ybar.map.json", self.Y.sidecar())
            put("moves.json", moves_to_json(moves))
        return written

    def report(self, error: StageError | None = None) -> dict:
        cfg = self.config
        stages = {name: rep.to_json() for name, rep in self.reports.items()}
        failed = any(r.failures for r in self.reports.values())
        unknown = any(r.unknown for r in self.reports.values())
        if error is not None:
            stages.setdefault(error.stage, {"verdict": "fail", "failures": [], "unknown": [], "details": {}})
            stages[error.stage]["verdict"] = "fail"
            stages[error.stage]["failures"].append(["error", str(error)])
            code = error.code
        elif failed:
            code = EXIT_FAIL
        elif unknown and not cfg.allow_unknown:
            code = EXIT_BUDGET
        else:
            code = EXIT_PASS
        base = Path(cfg.output_dir).parent
        echo = {}
        for k, v in cfg.to_json().items():
            if k in ("complex", "presentation", "action", "path_data", "output_dir"):
                v = os.path.relpath(v, base)
            echo[k] = v
        out = {
            "config": echo,
            "exit_code": code,
            "stages": stages,
            "verdict": "pass" if code == EXIT_PASS else "fail",
        }
        try:
            out["provenance"] = self.provenance()
        except OSError:
            out["provenance"] = None
        if "radius" in self.__dict__:
            out["R"] = self.radius.R
        if "saturated" in self.__dict__:
            out["moves"] = len(self.saturated[1])
        if cfg.timestamps:
            out["timing"] = dict(self.timing)
            out["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
        return out


STAGE_ORDER = ["ball", "gamma", "short_loops", "radius", "Y", "saturate"]


def run_stages(config: RunConfig, upto: str = "saturate", write: bool = True) -> tuple[int, dict, Run]:
    """Run stages up to ``upto`` and write their artifacts plus report.json."""
    run = Run(config)
    stages = STAGE_ORDER[: STAGE_ORDER.index(upto) + 1]
    error = None
    try:
        for s in stages:
            getattr(run, "saturated" if s == "saturate" else s)
        if write:
            run.write_artifacts(stages)
    except StageError as exc:
        error = exc
    rep = run.report(error)
    if write:
        Path(config.output_dir).mkdir(parents=True, exist_ok=True)
        write_json(Path(config.output_dir) / "report.json", rep)
    return rep["exit_code"], rep, run
