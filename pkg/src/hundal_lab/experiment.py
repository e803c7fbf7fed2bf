"""Experiment configuration, execution and export."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import re
import tempfile
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from . import _kernel
from .algorithms import ALGORITHMS, run
from .cone import DEFAULT_STEP, ConeError, NnlsConvergenceError, build_cone
from .diagnostics import (
    COUPLING_TOL,
    DEFAULT_PROBES,
    DEFAULT_SEED,
    U_NORM_TOL,
    Report,
    collapse_check,
    column_max_check,
    coordinate_decay,
    coupling_check,
    fejer_check,
    firm_nonexpansiveness_audit,
    norm_floor,
    spingarn_reduction_check,
    summability_check,
)
from .hilbert import DEFAULT_DIM, HilbertVector, basis_vector

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

CSV_COLUMNS = ("algorithm", "n", "norm_iterate", "norm_y", "u_norm", "v_residual", "fejer_delta", "coupling_residual")
CHOICES = ALGORITHMS + ("compare-all",)


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    algorithm: str = "compare-all"
    dim: int = DEFAULT_DIM
    xi_max: float | None = None
    grid_step: float = DEFAULT_STEP
    iterations: int = 200
    probes: tuple = DEFAULT_PROBES
    seed: int = DEFAULT_SEED
    output_path: str | None = None
    format: str = "csv"
    init: str = "e2"
    audit_samples: int = 100
    refine_steps: tuple | None = None

    @property
    def effective_xi_max(self) -> float:
        return float(self.dim - 3) if self.xi_max is None else float(self.xi_max)

    @property
    def effective_output(self) -> str:
        return self.output_path or f"hundal_{self.algorithm}.{self.format}"

    def init_vector(self) -> HilbertVector:
        if self.init == "zero":
            return HilbertVector.zeros(self.dim)
        return basis_vector(int(self.init[1:]), self.dim)

    def validate(self) -> "ExperimentConfig":
        if self.algorithm not in CHOICES:
            raise ConfigError(f"algorithm must be one of {CHOICES}, got {self.algorithm!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.dim < 4:
            raise ConfigError(f"dim must be >= 4, got {self.dim}")
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if self.audit_samples < 0:
            raise ConfigError("audit samples must be >= 0")
        xi_max = self.effective_xi_max
        if not (math.isfinite(xi_max) and xi_max > 0):
            raise ConfigError(f"xi-max must be positive, got {xi_max}")
        if math.floor(xi_max) + 2 >= self.dim:
            raise ConfigError(f"dim={self.dim} too small for xi-max={xi_max} (needs dim >= {math.floor(xi_max) + 3})")
        steps = (self.grid_step,) + tuple(self.refine_steps or ())
        for step in steps:
            if not (math.isfinite(step) and 0 < step <= xi_max):
                raise ConfigError(f"grid step must satisfy 0 < step <= xi-max, got {step}")
        if self.refine_steps is not None and len(self.refine_steps) < 2:
            raise ConfigError("a refinement study needs at least two grid steps")
        if not self.probes:
            raise ConfigError("need at least one probe index")
        for k in self.probes:
            if not 0 <= k < self.dim:
                raise ConfigError(f"probe index {k} out of range for dim {self.dim}")
        m = re.fullmatch(r"e(\d+)", self.init)
        if self.init != "zero" and (m is None or int(m.group(1)) >= self.dim):
            raise ConfigError(f"init must be 'zero' or e<k> with k < dim, got {self.init!r}")
        if self.algorithm in ("spingarn", "compare-all") and self.init == "e0":
            raise ConfigError("Spingarn needs x0 in V; e0 is orthogonal to V")
        return self

    def as_dict(self) -> dict:
        d = asdict(self)
        d["xi_max"] = self.effective_xi_max
        d["output_path"] = self.effective_output
        d["probes"] = list(self.probes)
        if self.refine_steps is not None:
            d["refine_steps"] = list(self.refine_steps)
        return d


# ---------------------------------------------------------------- parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _step(text: str) -> float:
    # accepts 0.03125 or 1/32
    try:
        if "/" in text:
            num, den = text.split("/")
            return float(num) / float(den)
        return float(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid grid step {text!r}") from None


def _step_list(text: str) -> tuple:
    return tuple(_step(t) for t in text.replace(" ", "").split(",") if t)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="hundal-lab",
        description="Run Douglas-Rachford, Spingarn and alternating projections on a discretized Hundal cone.",
        argument_default=argparse.SUPPRESS,
    )
    p.add_argument("--algorithm", choices=CHOICES)
    p.add_argument("--dim", type=int, help="truncation level N (default 64)")
    p.add_argument("--xi-max", dest="xi_max", type=float, help="largest curve parameter (default dim-3)")
    p.add_argument("--grid-step", dest="grid_step", type=_step, help="xi grid spacing (default 1/32)")
    p.add_argument("--iterations", type=int, help="number of trace rows (default 200)")
    p.add_argument("--probes", type=_int_list, help="comma-separated coordinate indices (default 0,...,5)")
    p.add_argument("--seed", type=int, help="seed of the firm-nonexpansiveness audit (default 42)")
    p.add_argument("--output", dest="output_path", help="output file")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--init", help="initial vector: e<k> or zero (default e2)")
    p.add_argument("--audit-samples", dest="audit_samples", type=int, help="random pairs in the audit (default 100)")
    p.add_argument("--refine-steps", dest="refine_steps", type=_step_list,
                   help="run a grid refinement study over these steps, e.g. 1/8,1/16,1/32")
    p.add_argument("--config", dest="config_file", help="JSON file of flag-name/value pairs")
    p.add_argument("-v", "--verbose", action="store_true", default=False)
    return p


_FILE_KEYS = {
    "algorithm": str,
    "dim": int,
    "xi_max": float,
    "grid_step": lambda v: _step(str(v)),
    "iterations": int,
    "probes": lambda v: tuple(int(k) for k in v) if isinstance(v, list) else _int_list(str(v)),
    "seed": int,
    "output": str,
    "format": str,
    "init": str,
    "audit_samples": int,
    "refine_steps": lambda v: tuple(_step(str(s)) for s in v) if isinstance(v, list) else _step_list(str(v)),
}


def load_config_file(path) -> dict:
    """Read a flat JSON object whose keys mirror the CLI flag names."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config file must hold a flat key-value object")
    out = {}
    for key, value in raw.items():
        name = key.lstrip("-").replace("-", "_")
        if name not in _FILE_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            out["output_path" if name == "output" else name] = _FILE_KEYS[name](value)
        except (TypeError, ValueError, argparse.ArgumentTypeError) as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}") from None
    return out


def parse_config(args=None, config_file=None) -> ExperimentConfig:
    """Flags override config-file values, which override defaults."""
    ns = vars(build_parser().parse_args(args))
    ns.pop("verbose", None)
    path = ns.pop("config_file", None) or config_file
    values = load_config_file(path) if path else {}
    values.update(ns)
    try:
        cfg = ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return cfg.validate()


# ---------------------------------------------------------------- running


@dataclass
class ExperimentResult:
    status: int
    summary: dict = field(default_factory=dict)
    path: str | None = None
    message: str = ""
    traces: dict = field(default_factory=dict, repr=False)


def _checks_for(name, trace) -> list[Report]:
    checks = [fejer_check(trace), summability_check(trace)]
    if name == "dr":
        checks.append(column_max_check("dr_coupling_residual", trace, "coupling_residual", COUPLING_TOL))
        checks.append(collapse_check(trace))
    elif name == "spingarn":
        checks.append(column_max_check("spingarn_coupling_residual", trace, "coupling_residual", COUPLING_TOL))
        checks.append(column_max_check("spingarn_u_norm", trace, "u_norm", U_NORM_TOL))
    return [replace(c, name=f"{name}.{c.name}") for c in checks]


def execute(config: ExperimentConfig, cone=None) -> tuple[dict, dict]:
    """Run the configured algorithms; return ``(traces, summary)`` without writing anything."""
    if cone is None:
        cone = build_cone(config.effective_xi_max, config.grid_step, config.dim)
    init = config.init_vector()
    names = ALGORITHMS if config.algorithm == "compare-all" else (config.algorithm,)
    traces = {}
    for name in names:
        rows = config.iterations
        if config.algorithm == "compare-all" and name == "altproj":
            # one extra row so z_{n+1} exists for every DR row
            rows += 1
        traces[name] = run(cone, name, init, rows, config.probes)

    checks = []
    for name, trace in traces.items():
        checks.extend(_checks_for(name, trace))
    if config.algorithm == "compare-all":
        checks.append(coupling_check(traces["dr"], traces["altproj"]))
        checks.append(spingarn_reduction_check(traces["spingarn"], traces["altproj"]))
    if config.audit_samples > 0:
        checks.append(firm_nonexpansiveness_audit(cone, config.audit_samples, config.seed))

    measured = {}
    for name, trace in traces.items():
        floor, where = norm_floor(trace)
        measured[name] = {
            "norm_floor": floor,
            "norm_floor_at": where,
            "final_coord_proxies": dict(zip(map(str, trace.probes), trace[-1].coord_proxies)),
            "coordinate_decay": coordinate_decay(trace),
        }
    summary = {
        "config": config.as_dict(),
        "cone": {"generators": cone.size, "dim": cone.dim, "xi_max": cone.xi_max, "step": cone.step},
        "nnls_backend": _kernel.BACKEND,
        "checks": [c.as_dict() for c in checks],
        "all_passed": all(c.passed for c in checks),
        "measured": measured,
    }
    return traces, summary


def _fmt(x: float) -> str:
    return format(x, ".17g")


def trace_csv(traces: dict, probes) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS + tuple(f"coord_{k}" for k in probes))
    for trace in traces.values():
        for row in trace:
            writer.writerow(
                [row.algorithm, row.n]
                + [_fmt(getattr(row, c)) for c in CSV_COLUMNS[2:]]
                + [_fmt(v) for v in row.coord_proxies]
            )
    return buf.getvalue()


def trace_records(traces: dict, probes) -> list[dict]:
    out = []
    for trace in traces.values():
        for row in trace:
            rec = {c: getattr(row, c) for c in CSV_COLUMNS}
            rec.update({f"coord_{k}": v for k, v in zip(probes, row.coord_proxies)})
            out.append(rec)
    return out


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_atomic(files: dict) -> None:
    """Write ``{path: text}`` so that either every file appears complete or none is touched."""
    staged = []
    try:
        for path, text in files.items():
            path = Path(path)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
            staged.append((tmp, path))
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        for tmp, path in staged:
            os.replace(tmp, path)
    except BaseException:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)
        raise


def summary_path(output: str) -> str:
    return output + ".summary.json"


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run, check and export one experiment (or a refinement study).

    CSV output goes to the output path with the summary beside it in
    ``<output>.summary.json``; JSON output holds config, rows and summary in
    one document. Status: 0 all checks passed, 1 a check failed,
    2 configuration or I/O problem, 3 numerical failure.
    """
    try:
        config.validate()
    except ConfigError as exc:
        return ExperimentResult(EXIT_USAGE, message=str(exc))
    if config.refine_steps is not None:
        return _run_refinement(config)
    out = config.effective_output
    try:
        traces, summary = execute(config)
    except NnlsConvergenceError as exc:
        return ExperimentResult(EXIT_NUMERICAL, message=f"numerical failure: {exc}")
    except (ConeError, ValueError) as exc:
        return ExperimentResult(EXIT_USAGE, message=str(exc))

    if config.format == "csv":
        files = {out: trace_csv(traces, config.probes), summary_path(out): _dumps(summary)}
    else:
        doc = {"rows": trace_records(traces, config.probes), "summary": summary}
        files = {out: _dumps(doc)}
    try:
        write_atomic(files)
    except OSError as exc:
        return ExperimentResult(EXIT_USAGE, summary, message=f"cannot write {out}: {exc}", traces=traces)
    status = EXIT_OK if summary["all_passed"] else EXIT_CHECK_FAILED
    return ExperimentResult(status, summary, path=out, traces=traces)


# ---------------------------------------------------------------- refinement


@dataclass
class RefineReport:
    steps: tuple
    deltas: list
    non_increasing: bool
    algorithm: str

    def as_dict(self) -> dict:
        return asdict(self)


def refine_study(config: ExperimentConfig, steps) -> RefineReport:
    """Rerun at each grid step and compare consecutive refinements.

    For each consecutive pair of steps reports the largest difference in
    ``norm_iterate`` over the horizon. ``compare-all`` is studied through its
    alternating-projection sequence.
    """
    steps = tuple(float(s) for s in steps)
    if len(steps) < 2:
        raise ConfigError("a refinement study needs at least two grid steps")
    algorithm = "altproj" if config.algorithm == "compare-all" else config.algorithm
    norms = []
    for step in steps:
        sub = replace(config, grid_step=step, refine_steps=None, algorithm=algorithm).validate()
        cone = build_cone(sub.effective_xi_max, step, sub.dim)
        trace = run(cone, algorithm, sub.init_vector(), sub.iterations, sub.probes)
        norms.append([row.norm_iterate for row in trace])
    deltas = []
    for a, b, s0, s1 in zip(norms, norms[1:], steps, steps[1:]):
        deltas.append({"step_coarse": s0, "step_fine": s1, "max_norm_delta": max(abs(p - q) for p, q in zip(a, b))})
    values = [d["max_norm_delta"] for d in deltas]
    return RefineReport(steps, deltas, all(y <= x for x, y in zip(values, values[1:])), algorithm)


def _run_refinement(config: ExperimentConfig) -> ExperimentResult:
    out = config.effective_output
    try:
        report = refine_study(config, config.refine_steps)
    except NnlsConvergenceError as exc:
        return ExperimentResult(EXIT_NUMERICAL, message=f"numerical failure: {exc}")
    summary = {"config": config.as_dict(), "refinement": report.as_dict()}
    if config.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("step_coarse", "step_fine", "max_norm_delta"))
        for d in report.deltas:
            writer.writerow([_fmt(d["step_coarse"]), _fmt(d["step_fine"]), _fmt(d["max_norm_delta"])])
        files = {out: buf.getvalue(), summary_path(out): _dumps(summary)}
    else:
        files = {out: _dumps(summary)}
    try:
        write_atomic(files)
    except OSError as exc:
        return ExperimentResult(EXIT_USAGE, summary, message=f"cannot write {out}: {exc}")
    return ExperimentResult(EXIT_OK, summary, path=out)
