"""Batch entry point: evaluate, optimize, verify, and sweep from the shell.

Configurations are plain key=value files (``#`` starts a comment); two
presets ship with the package.  JSON is the canonical report format and is
byte-reproducible for a fixed config and seed - timing and environment go
into a separate ``meta`` object so the rest of the document can be diffed.
Sweeps and optimizer traces come out as CSV.

Exit codes: 0 success, 2 configuration error, 3 numerical failure
(non-finite values or an unusable aggregate), 4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
import time
import warnings
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import resources

import numpy as np

# Environment chatter, not actionable for CLI users: numba falls back to a
# different threading layer by itself when TBB is too old.
warnings.filterwarnings(
    "ignore", message="The TBB threading layer requires TBB version"
)

from .kappa import BoundReport, InvalidAggregateError, evaluate_bound
from .mollifier import (
    ConfigError,
    GridSettings,
    MODE_KAPPA,
    MODE_KAPPA_STAR,
    MollifierConfig,
    PolynomialSpec,
    THETA_SUPREMA,
)
from .optimizer import optimize
from .quadrature import GridSpec, NonFiniteIntegrandError
from .terms import TERM_NAMES
from .verify import (
    check_int_identity,
    check_operator_reduction_c31,
    check_partial_fraction,
)

__all__ = [
    "RunConfig",
    "cmd_eval",
    "cmd_optimize",
    "cmd_sweep",
    "cmd_verify",
    "main",
]

PRESETS = ("paper_kappa", "paper_kappa_star")

_EXIT_OK = 0
_EXIT_CONFIG = 2
_EXIT_NUMERICAL = 3
_EXIT_VERIFY = 4

# Residual ceilings for `verify` (fixed once, from the identity test suite).
VERIFY_THRESHOLDS = {
    "int_identity": 1e-11,
    "partial_fraction": 1e-12,
    "operator_reduction_c31": 1e-6,
}


@dataclass(frozen=True)
class RunConfig:
    """Everything one invocation needs, resolved from flags."""

    command: str
    config_path: str | None = None
    preset: str | None = None
    nodes_low_dim: int | None = None
    nodes_high_dim: int | None = None
    output: str | None = None
    workers: int | None = None
    seed: int = 0
    report_format: str = "json"
    # command-specific knobs
    budget: int = 2000
    restarts: int = 3
    search_nodes_low: int | None = None
    search_nodes_high: int | None = None
    trace_csv: str | None = None
    r_min: float | None = None
    r_max: float | None = None
    r_count: int = 1

    def __post_init__(self):
        if (self.config_path is None) == (self.preset is None):
            raise ConfigError("exactly one of --config / --preset is required")
        if self.preset is not None and self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}; choose from {PRESETS}")
        if self.report_format not in ("json", "csv"):
            raise ConfigError(f"unknown report format {self.report_format!r}")


# ---------------------------------------------------------------------------
# key=value configuration files
# ---------------------------------------------------------------------------

_SCALAR_KEYS = {"mode", "r", "theta1", "theta2", "theta3", "strict"}
_VECTOR_KEYS = {"p1": 5, "p2": 3, "p3": 2}  # q length depends on mode
_GRID_KEYS = {"nodes_low_dim", "nodes_high_dim"} | {f"nodes_{t}" for t in TERM_NAMES}
_ALL_KEYS = _SCALAR_KEYS | set(_VECTOR_KEYS) | {"q"} | _GRID_KEYS


def _parse_config_text(text: str, source: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if key not in _ALL_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"{source}:{lineno}: empty value for {key!r}")
        entries[key] = value
    return entries


def _floats(key: str, value: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in value.split())
    except ValueError as e:
        raise ConfigError(f"key {key!r}: {e}") from None


def _build_config(entries: dict[str, str], run: RunConfig) -> MollifierConfig:
    mode = entries.get("mode", MODE_KAPPA).lower()
    if mode not in (MODE_KAPPA, MODE_KAPPA_STAR):
        raise ConfigError(f"key 'mode': must be {MODE_KAPPA} or {MODE_KAPPA_STAR}")

    polys_kw = {}
    for key, width in _VECTOR_KEYS.items():
        if key not in entries:
            raise ConfigError(f"missing required key {key!r}")
        vals = _floats(key, entries[key])
        if len(vals) != width:
            raise ConfigError(f"key {key!r}: expected {width} numbers, got {len(vals)}")
        polys_kw[key] = vals
    if "q" not in entries:
        raise ConfigError("missing required key 'q'")
    q = _floats("q", entries["q"])

    def scalar(key: str, default: float) -> float:
        if key not in entries:
            return default
        vals = _floats(key, entries[key])
        if len(vals) != 1:
            raise ConfigError(f"key {key!r}: expected one number")
        return vals[0]

    thetas = tuple(
        scalar(f"theta{i}", THETA_SUPREMA[i - 1]) for i in (1, 2, 3)
    )
    r = scalar("r", 1.26 if mode == MODE_KAPPA else 1.12)
    strict = entries.get("strict", "true").lower()
    if strict not in ("true", "false"):
        raise ConfigError("key 'strict': must be true or false")

    per_term = {}
    for term in TERM_NAMES:
        key = f"nodes_{term}"
        if key in entries:
            per_term[term] = _int_entry(key, entries[key])
    low = run.nodes_low_dim or (
        _int_entry("nodes_low_dim", entries["nodes_low_dim"])
        if "nodes_low_dim" in entries
        else 24
    )
    high = run.nodes_high_dim or (
        _int_entry("nodes_high_dim", entries["nodes_high_dim"])
        if "nodes_high_dim" in entries
        else 16
    )
    grid = GridSettings(low, high, per_term)

    polys = PolynomialSpec(polys_kw["p1"], polys_kw["p2"], polys_kw["p3"], q, mode)
    return MollifierConfig(*thetas, r, polys, grid, mode, strict=(strict == "true"))


def _int_entry(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"key {key!r}: expected an integer, got {value!r}") from None


def load_config(run: RunConfig) -> MollifierConfig:
    """Resolve the run's mollifier configuration (preset or file)."""
    if run.preset is not None:
        text = (
            resources.files("critprop.presets").joinpath(f"{run.preset}.cfg").read_text()
        )
        source = f"preset:{run.preset}"
    else:
        try:
            with open(run.config_path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise ConfigError(f"cannot read config file: {e}") from None
        source = run.config_path
    return _build_config(_parse_config_text(text, source), run)


# ---------------------------------------------------------------------------
# report plumbing
# ---------------------------------------------------------------------------


def _config_dict(cfg: MollifierConfig) -> dict:
    return {
        "mode": cfg.mode,
        "R": cfg.R,
        "theta1": cfg.theta1,
        "theta2": cfg.theta2,
        "theta3": cfg.theta3,
        "p1": list(cfg.polys.p1_coeffs),
        "p2": list(cfg.polys.p2_coeffs),
        "p3": list(cfg.polys.p3_coeffs),
        "q": list(cfg.polys.q_coeffs),
        "strict": cfg.strict,
        "grid": {
            "nodes_low_dim": cfg.grid.nodes_low_dim,
            "nodes_high_dim": cfg.grid.nodes_high_dim,
            "per_term": dict(cfg.grid.per_term),
        },
    }


def _bound_dict(report: BoundReport) -> dict:
    return {
        "mode": report.mode,
        "R": report.R,
        "c_total": report.c_total,
        "bound": report.bound,
        "max_refinement_delta": report.max_refinement_delta,
        "terms": {
            name: {
                "value": tv.value,
                "refinement_delta": tv.refinement_delta,
                "n_evals": tv.n_evals,
            }
            for name, tv in report.breakdown.as_dict().items()
        },
    }


def _meta(started: float, run: RunConfig) -> dict:
    return {
        "timestamp_utc": datetime.now(timezone.utc).isoformat(),
        "wall_time_s": time.perf_counter() - started,
        "workers": run.workers or 1,
    }


def _check_writable(path: str | None) -> None:
    """Reject an unwritable report path up front, before any computation."""
    if path is None:
        return
    parent = os.path.dirname(path) or "."
    if not os.path.isdir(parent):
        raise ConfigError(f"output directory does not exist: {parent}")


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        try:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as e:
            raise ConfigError(f"cannot write report: {e}") from None


def _emit_json(document: dict, path: str | None) -> None:
    _emit(json.dumps(document, sort_keys=True, indent=2), path)


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _apply_workers(run: RunConfig) -> None:
    if run.workers is None:
        return
    import numba

    if not 1 <= run.workers <= numba.config.NUMBA_NUM_THREADS:
        raise ConfigError(
            f"--workers must be in [1, {numba.config.NUMBA_NUM_THREADS}] here, "
            f"got {run.workers}"
        )
    numba.set_num_threads(run.workers)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_eval(run: RunConfig) -> int:
    cfg = load_config(run)
    started = time.perf_counter()
    report = evaluate_bound(cfg)
    if run.report_format == "csv":
        rows = [
            [name, tv.value, tv.refinement_delta, tv.n_evals]
            for name, tv in report.breakdown.as_dict().items()
        ]
        rows.append(["c_total", report.c_total, None, None])
        rows.append(["bound", report.bound, None, None])
        _emit(_csv_text(["quantity", "value", "refinement_delta", "n_evals"], rows), run.output)
    else:
        _emit_json(
            {
                "command": "eval",
                "config": _config_dict(cfg),
                "result": _bound_dict(report),
                "meta": _meta(started, run),
            },
            run.output,
        )
    print(
        f"asymptotic lower bound {report.bound:.10f} "
        f"(c_total {report.c_total:.10f}, R {report.R}, mode {report.mode})",
        file=sys.stderr,
    )
    return _EXIT_OK


def cmd_optimize(run: RunConfig) -> int:
    cfg = load_config(run)
    started = time.perf_counter()
    schedule = None
    if run.search_nodes_low is not None or run.search_nodes_high is not None:
        schedule = (
            GridSettings(run.search_nodes_low or 12, run.search_nodes_high or 10),
            cfg.grid,
        )

    def announce(evals, rep):
        print(f"  eval {evals:5d}  bound {rep.bound:.10f}", file=sys.stderr)

    result = optimize(
        cfg,
        budget=run.budget,
        grid_schedule=schedule,
        seed=run.seed,
        restarts=run.restarts,
        progress=announce,
    )
    if run.trace_csv is not None:
        _emit(
            _csv_text(["evaluation", "bound"], [list(entry) for entry in result.trace]),
            run.trace_csv,
        )
    _emit_json(
        {
            "command": "optimize",
            "config": _config_dict(cfg),
            "result": {
                "start_bound": result.start_bound,
                "best_bound": result.best_bound,
                "improvement": result.best_bound - result.start_bound,
                "iterations": result.iterations,
                "converged": result.converged,
                "best_config": _config_dict(result.best_config),
                "trace": [list(entry) for entry in result.trace],
            },
            "meta": _meta(started, run),
        },
        run.output,
    )
    print(
        f"optimize: {result.start_bound:.10f} -> {result.best_bound:.10f} "
        f"in {result.iterations} evaluations (converged={result.converged})",
        file=sys.stderr,
    )
    return _EXIT_OK


def cmd_verify(run: RunConfig) -> int:
    cfg = load_config(run)
    started = time.perf_counter()
    rng = np.random.default_rng(run.seed)
    grid_1d = GridSpec(1, 24)

    worst_int = 0.0
    for _ in range(100):
        s = rng.uniform(-3.0, 3.0)
        z_log = rng.uniform(0.01, 3.0)
        worst_int = max(worst_int, check_int_identity(z_log, s, grid_1d))

    worst_pf = 0.0
    done = 0
    while done < 100:
        a, b, c = rng.uniform(-5.0, 5.0, size=3)
        if min(abs(a + c), abs(b + c), abs(b - a)) < 0.3:
            continue
        worst_pf = max(worst_pf, check_partial_fraction(a, b, c))
        done += 1

    reduction = check_operator_reduction_c31(cfg)

    checks = {
        "int_identity": worst_int,
        "partial_fraction": worst_pf,
        "operator_reduction_c31": reduction,
    }
    results = {
        name: {
            "residual": float(residual),
            "threshold": VERIFY_THRESHOLDS[name],
            "pass": bool(residual < VERIFY_THRESHOLDS[name]),
        }
        for name, residual in checks.items()
    }
    all_pass = all(entry["pass"] for entry in results.values())
    _emit_json(
        {
            "command": "verify",
            "config": _config_dict(cfg),
            "result": {"checks": results, "all_pass": all_pass},
            "meta": _meta(started, run),
        },
        run.output,
    )
    for name, entry in results.items():
        flag = "pass" if entry["pass"] else "FAIL"
        print(f"  {flag}  {name}: residual {entry['residual']:.3e}", file=sys.stderr)
    return _EXIT_OK if all_pass else _EXIT_VERIFY


def cmd_sweep(run: RunConfig) -> int:
    cfg = load_config(run)
    r_min = cfg.R if run.r_min is None else run.r_min
    r_max = r_min if run.r_max is None else run.r_max
    if not (np.isfinite(r_min) and np.isfinite(r_max)) or r_min <= 0:
        raise ConfigError("sweep range must be positive and finite")
    if r_max < r_min:
        raise ConfigError(f"empty sweep range [{r_min}, {r_max}]")
    if run.r_count < 1 or (run.r_count == 1 and r_max != r_min):
        raise ConfigError("r_count must be >= 1, and >= 2 for a nontrivial range")

    rows = []
    for r in np.linspace(r_min, r_max, run.r_count):
        swept = dataclasses.replace(cfg, R=float(r))
        report = evaluate_bound(swept, refine=False)
        rows.append([float(r), report.c_total, report.bound])
    _emit(_csv_text(["R", "c_total", "bound"], rows), run.output)
    best = max(rows, key=lambda row: row[2])
    print(
        f"sweep: {len(rows)} points, best bound {best[2]:.10f} at R = {best[0]:.6f}",
        file=sys.stderr,
    )
    return _EXIT_OK


_DISPATCH = {
    "eval": cmd_eval,
    "optimize": cmd_optimize,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="critprop",
        description="Evaluate and optimize lower bounds for the proportion of "
        "critical zeros via the three-piece mollified second moment.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        source = p.add_mutually_exclusive_group(required=True)
        source.add_argument("--config", help="key=value configuration file")
        source.add_argument("--preset", choices=PRESETS, help="bundled configuration")
        p.add_argument("--nodes-low", type=int, default=None, dest="nodes_low_dim",
                       help="override nodes per axis for <=3-dimensional integrals")
        p.add_argument("--nodes-high", type=int, default=None, dest="nodes_high_dim",
                       help="override nodes per axis for 4/5-dimensional integrals")
        p.add_argument("--output", default=None, help="report path (default: stdout)")
        p.add_argument("--workers", type=int, default=None,
                       help="worker threads (results are identical for any value)")
        p.add_argument("--seed", type=int, default=0)

    p_eval = sub.add_parser("eval", help="evaluate the six constants and the bound")
    common(p_eval)
    p_eval.add_argument("--format", choices=("json", "csv"), default="json",
                        dest="report_format")

    p_opt = sub.add_parser("optimize", help="maximize the bound from the given start")
    common(p_opt)
    p_opt.add_argument("--budget", type=int, default=2000,
                       help="objective evaluation budget")
    p_opt.add_argument("--restarts", type=int, default=3)
    p_opt.add_argument("--search-nodes-low", type=int, default=None)
    p_opt.add_argument("--search-nodes-high", type=int, default=None)
    p_opt.add_argument("--trace-csv", default=None, help="also write the trace as CSV")

    p_verify = sub.add_parser("verify", help="machine-check the structural identities")
    common(p_verify)

    p_sweep = sub.add_parser("sweep", help="bound as a function of R at fixed polynomials")
    common(p_sweep)
    p_sweep.add_argument("--r-min", type=float, default=None)
    p_sweep.add_argument("--r-max", type=float, default=None)
    p_sweep.add_argument("--r-count", type=int, default=1)

    return parser


def main(argv=None) -> int:
    ns = _build_parser().parse_args(argv)
    fields = {f.name for f in dataclasses.fields(RunConfig)}
    kwargs = {k: v for k, v in vars(ns).items() if k in fields and v is not None}
    kwargs["config_path"] = getattr(ns, "config", None)
    try:
        run = RunConfig(**kwargs)
        _check_writable(run.output)
        _check_writable(run.trace_csv)
        _apply_workers(run)
        return _DISPATCH[run.command](run)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return _EXIT_CONFIG
    except NonFiniteIntegrandError as e:
        print(f"numerical failure: non-finite integrand at {e.point}", file=sys.stderr)
        return _EXIT_NUMERICAL
    except InvalidAggregateError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return _EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
