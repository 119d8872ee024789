"""Command-line front end.

Every run writes ``resolved_config.json`` (all options after defaults are
filled in) and ``provenance.txt`` next to its results. Passing the resolved
file back through ``--config`` reproduces the run.

Exit codes: 0 on success (including negative scientific outcomes), 1 on
numerical or I/O failure, 2 on invalid input or parameters outside the
supported domain.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import platform
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .core import ReactionKind, cubic_reaction, make_params
from .errors import CFLError, DnlwError, InsufficientData, StepFailure
from .phase_plane import IntegrationOptions, integrate_Tc, null_isocline, write_trajectory_csv
from .pde_sim import (
    barenblatt_error, barenblatt_k, barenblatt_k_residual, compact_bump, line_grid,
    make_not_reacting_datum, make_reacting_datum, measure_speed, radial_grid,
    saturation_experiment, simulate,
)
from .wave_finder import (
    change_sign_tw, critical_delta, find_cstar, increasing_a_to_1_tw, write_profile_csv,
    write_result_json, zero_to_a_tw,
)

DEFAULT_OUT = "dnlw_out"
JUMP_LIMIT = 0.05
EXTINCT_LEVEL = 1e-3
INVADED_LEVEL = 0.95

COMMANDS = ("cstar", "trajectory", "isocline", "profile", "simulate", "threshold",
            "saturate", "barenblatt", "sweep")
WAVES = ("critical", "cs", "zero-to-a", "a-to-zero", "a-to-1")
DATA = ("bump", "reacting", "not-reacting")

# per-command defaults; None means "derived at run time" or "required"
DEFAULTS: dict[str, dict] = {
    "cstar": {"tol": 1e-6, "eps": 1e-5},
    "trajectory": {"c": None, "eps": 1e-5, "x_min": 1e-4},
    "isocline": {"c": None, "n_points": 201},
    "profile": {"wave": "critical", "tol": 1e-6, "c": None, "delta": None, "eps": None,
                "anchor": None},
    "simulate": {"datum": "bump", "c": None, "L": 50.0, "dx": 0.1, "t_end": 50.0, "N": 1,
                 "R": 0.0, "height": 1.0, "width": 10.0, "level": 0.5, "sample_dt": 1.0,
                 "snap_times": []},
    "threshold": {"c": None, "L": 150.0, "dx": 0.05, "t_end": 200.0, "t_extinct": 100.0,
                  "inner": 20.0, "plateau": 20.0, "sample_dt": 1.0},
    "saturate": {"eps": 0.05, "L": 100.0, "dx": 0.1, "t_end": 200.0, "height": 1.0,
                 "width": 10.0, "sample_dt": 1.0},
    "barenblatt": {"N": 1, "C": 1.0, "L": 20.0, "dx": 0.04, "levels": 3, "t0": 1.0,
                   "t1": 2.0},
    "sweep": {"tol": 1e-6, "eps": 1e-5, "pairs": None, "line": None, "p_range": None,
              "n_points": 10, "jobs": None},
}
KIND_DEFAULT = {"saturate": "Cprime"}
NEEDS_MP = set(COMMANDS) - {"sweep"}


class ConfigError(ValueError):
    """Invalid combination of command-line options."""


@dataclass
class RunConfig:
    """Fully resolved inputs of one run."""

    command: str
    m: float | None = None
    p: float | None = None
    kind: str = "C"
    a: float = 0.3
    options: dict = field(default_factory=dict)
    out: str = DEFAULT_OUT

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls(**json.loads(text))


# ------------------------------------------------------------------ parsing

def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _pairs(text: str) -> list[list[float]]:
    out = []
    for item in text.split(","):
        if not item.strip():
            continue
        m, _, p = item.partition(":")
        out.append([float(m), float(p)])
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model")
    g.add_argument("--m", type=float)
    g.add_argument("--p", type=float)
    g.add_argument("--kind", choices=["C", "Cprime"])
    g.add_argument("--a", type=float)
    g = common.add_argument_group("numerics")
    g.add_argument("--tol", type=float)
    g.add_argument("--c", type=float, help="wave speed")
    g.add_argument("--delta", type=float, help="peak offset of change-sign waves")
    g.add_argument("--eps", type=float)
    g.add_argument("--L", type=float, help="half-width (or radius) of the domain")
    g.add_argument("--dx", type=float)
    g.add_argument("--t-end", dest="t_end", type=float)
    g.add_argument("--N", type=int, help="space dimension")
    g.add_argument("--jobs", type=int)
    g.add_argument("--out", help=f"output directory (default $DNLW_OUT/<command> or {DEFAULT_OUT}/<command>)")
    g.add_argument("--config", help="resolved_config.json of an earlier run")

    parser = argparse.ArgumentParser(prog="dnlw", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"dnlw {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("cstar", parents=[common], help="critical speed and profile")
    sp = sub.add_parser("trajectory", parents=[common], help="saddle separatrix for a speed")
    sp.add_argument("--x-min", dest="x_min", type=float)
    sp = sub.add_parser("isocline", parents=[common], help="null isocline table")
    sp.add_argument("--n-points", dest="n_points", type=int)
    sp = sub.add_parser("profile", parents=[common], help="wave profile export")
    sp.add_argument("--wave", choices=WAVES)
    sp.add_argument("--anchor", type=float, help="value of the critical profile at xi = 0")
    sp = sub.add_parser("simulate", parents=[common], help="PDE run from a chosen datum")
    sp.add_argument("--datum", choices=DATA)
    sp.add_argument("--R", type=float, help="plateau half-width of reacting and not-reacting data")
    sp.add_argument("--height", type=float)
    sp.add_argument("--width", type=float)
    sp.add_argument("--level", type=float)
    sp.add_argument("--sample-dt", dest="sample_dt", type=float)
    sp.add_argument("--snap-times", dest="snap_times", type=_float_list)
    sp = sub.add_parser("threshold", parents=[common], help="extinction versus invasion")
    sp.add_argument("--t-extinct", dest="t_extinct", type=float)
    sp.add_argument("--inner", type=float)
    sp.add_argument("--plateau", type=float, help="half-width of the not-reacting plateau at a")
    sp.add_argument("--sample-dt", dest="sample_dt", type=float)
    sp = sub.add_parser("saturate", parents=[common], help="settling at the intermediate zero")
    sp.add_argument("--height", type=float)
    sp.add_argument("--width", type=float)
    sp.add_argument("--sample-dt", dest="sample_dt", type=float)
    sp = sub.add_parser("barenblatt", parents=[common], help="grid convergence on the source solution")
    sp.add_argument("--C", type=float)
    sp.add_argument("--levels", type=int)
    sp.add_argument("--t0", type=float)
    sp.add_argument("--t1", type=float)
    sp = sub.add_parser("sweep", parents=[common], help="critical speed over many (m, p)")
    sp.add_argument("--pairs", type=_pairs, help="comma-separated m:p cells")
    sp.add_argument("--line", type=float, help="sample the curve m(p-1) = LINE")
    sp.add_argument("--p-range", dest="p_range", type=float, nargs=2, metavar=("P0", "P1"))
    sp.add_argument("--n-points", dest="n_points", type=int)
    return parser


def resolve_config(args: argparse.Namespace, environ=os.environ) -> RunConfig:
    """Merge defaults, an optional config file and explicit flags (highest priority)."""
    cmd = args.command
    base = RunConfig(command=cmd, kind=KIND_DEFAULT.get(cmd, "C"),
                     options=dict(DEFAULTS[cmd]))
    base.out = str(Path(environ.get("DNLW_OUT", DEFAULT_OUT)) / cmd)
    if getattr(args, "config", None):
        loaded = RunConfig.from_json(Path(args.config).read_text(encoding="utf-8"))
        if loaded.command != cmd:
            raise ConfigError(f"config is for '{loaded.command}', not '{cmd}'")
        base.m, base.p, base.kind, base.a, base.out = (loaded.m, loaded.p, loaded.kind,
                                                       loaded.a, loaded.out)
        base.options.update({k: v for k, v in loaded.options.items() if k in base.options})
    for name in ("m", "p", "kind", "a", "out"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(base, name, v)
    for key in base.options:
        v = getattr(args, key, None)
        if v is not None:
            base.options[key] = v
    if cmd in NEEDS_MP and (base.m is None or base.p is None):
        raise ConfigError("--m and --p are required")
    return base


# ------------------------------------------------------------------ output

def _fmt(v) -> str:
    if v is None:
        return "nan"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _finite(obj):
    """Replace non-finite floats by None so the output is strict JSON."""
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_finite(obj), fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def provenance_line() -> str:
    return (f"dnlw {__version__}; python {platform.python_version()}; "
            f"numpy {np.__version__}; scipy {scipy.__version__}")


def _prepare_out(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "resolved_config.json").write_text(cfg.to_json(), encoding="utf-8")
    (out / "provenance.txt").write_text(provenance_line() + "\n", encoding="utf-8")
    return out


def _model(cfg: RunConfig):
    return make_params(cfg.m, cfg.p), cubic_reaction(cfg.kind, cfg.a)


def _cstar(params, reaction, tol: float = 1e-7) -> float:
    return find_cstar(params, reaction, tol=tol, with_profile=False).c_star


# ---------------------------------------------------------------- commands

def cmd_cstar(cfg: RunConfig, out: Path) -> int:
    params, reaction = _model(cfg)
    o = cfg.options
    res = find_cstar(params, reaction, tol=o["tol"], eps=o["eps"])
    write_result_json(res, out / "result.json")
    if res.profile is not None:
        write_profile_csv(res.profile, out / "profile.csv")
    print(repr(res.c_star))
    return 0


def cmd_trajectory(cfg: RunConfig, out: Path) -> int:
    params, reaction = _model(cfg)
    o = cfg.options
    if o["c"] is None:
        raise ConfigError("--c is required")
    tr = integrate_Tc(params, reaction, o["c"],
                      IntegrationOptions(eps=o["eps"], x_min=o["x_min"]))
    write_trajectory_csv(tr, out / "trajectory.csv")
    write_json(out / "result.json", {"c": o["c"], "fate": tr.fate.value,
                                     "z_target": tr.z_target, "n": len(tr)})
    print(tr.fate.value)
    return 0


def cmd_isocline(cfg: RunConfig, out: Path) -> int:
    params, reaction = _model(cfg)
    o = cfg.options
    if o["c"] is None:
        raise ConfigError("--c is required")
    grid = np.union1d(np.linspace(0.0, 1.0, o["n_points"]), [reaction.a, reaction.saddle])
    rows = []
    for X in grid:
        for i, z in enumerate(null_isocline(params, reaction, o["c"], float(X))):
            rows.append((float(X), float(z), i))
    write_csv(out / "isocline.csv", ["X", "Z", "root"], rows)
    return 0


def cmd_profile(cfg: RunConfig, out: Path) -> int:
    params, reaction = _model(cfg)
    o = cfg.options
    wave = o["wave"]
    meta: dict = {"wave": wave}
    if wave == "critical":
        res = find_cstar(params, reaction, tol=o["tol"], eps=o["eps"] or 1e-5,
                         anchor=o["anchor"])
        prof = res.profile
        meta["c"] = res.c_star
    else:
        c_star = _cstar(params, reaction, o["tol"])
        meta["c_star"] = c_star
        if wave == "cs":
            c = 0.5 * c_star if o["c"] is None else o["c"]
            delta = o["delta"]
            if delta is None:
                top = 1.0 - reaction.a if reaction.kind is ReactionKind.TypeC else reaction.a
                d_c = critical_delta(params, reaction, c)
                delta = d_c + 0.5 * (top - d_c)
            prof = change_sign_tw(params, reaction, c, delta)
            meta["delta"] = delta
        elif wave in ("zero-to-a", "a-to-zero"):
            c = c_star if o["c"] is None else o["c"]
            prof = zero_to_a_tw(params, reaction, c, eps=o["eps"] or 1e-3, c_star=c_star,
                                reflect=wave == "a-to-zero")
        else:
            c = 1.0 if o["c"] is None else o["c"]
            prof = increasing_a_to_1_tw(params, reaction, c, eps=o["eps"] or 1e-5)
        meta["c"] = c
    meta["kind"] = prof.kind.value
    meta["fb"] = None if prof.fb is None else list(prof.fb)
    write_profile_csv(prof, out / "profile.csv")
    write_json(out / "result.json", meta)
    return 0


def _grid(o: dict):
    if o["N"] <= 1:
        return line_grid(o["L"], o["dx"])
    return radial_grid(o["L"], o["dx"], o["N"])


def _speed(trace, which="level") -> float:
    try:
        return measure_speed(trace, which=which)
    except InsufficientData:
        return math.nan


def _write_trace(path: Path, trace) -> None:
    t, pos, edge = trace.as_arrays()
    write_csv(path, ["t", "front_pos", "support_edge"], zip(t, pos, edge))


def cmd_simulate(cfg: RunConfig, out: Path) -> int:
    params, reaction = _model(cfg)
    o = cfg.options
    grid = _grid(o)
    c_star = None
    if o["datum"] == "bump":
        u0 = compact_bump(grid, o["height"], o["width"])
    else:
        c_star = _cstar(params, reaction)
        if o["datum"] == "reacting":
            c = 0.5 * c_star if o["c"] is None else o["c"]
            u0 = make_reacting_datum(params, reaction, grid, c, R=o["R"], c_star=c_star)
        else:
            u0 = make_not_reacting_datum(params, reaction, grid, c_star=c_star, plateau=o["R"])
    snaps = sorted(float(t) for t in o["snap_times"])
    pending = list(snaps)

    def snapshot(st) -> None:
        while pending and st.t >= pending[0] - 1e-9:
            t_req = pending.pop(0)
            write_csv(out / f"snapshot_t{t_req:g}.csv", ["x", "u"], zip(grid.x, st.u))

    state, trace = simulate(params, reaction, grid, u0, o["t_end"], callbacks=[snapshot],
                            sample_dt=o["sample_dt"], level=o["level"])
    _write_trace(out / "trace.csv", trace)
    write_csv(out / "final.csv", ["x", "u"], zip(grid.x, state.u))
    write_json(out / "report.json", {
        "t_end": state.t, "mass": state.mass, "max_u": float(state.u.max()),
        "front_speed": _speed(trace), "edge_speed": _speed(trace, "edge"), "c_star": c_star,
        "missed_snapshots": pending,
    })
    return 0


def cmd_threshold(cfg: RunConfig, out: Path) -> int:
    params, reaction = _model(cfg)
    o = cfg.options
    if reaction.kind is not ReactionKind.TypeC:
        raise ConfigError("threshold runs need --kind C")
    grid = line_grid(o["L"], o["dx"])
    c_star = _cstar(params, reaction)
    u_nr = make_not_reacting_datum(params, reaction, grid, c_star=c_star, plateau=o["plateau"])
    st_nr, tr_nr = simulate(params, reaction, grid, u_nr, o["t_extinct"],
                            sample_dt=o["sample_dt"],
                            stop=lambda s: float(s.u.max()) < EXTINCT_LEVEL)
    extinct = float(st_nr.u.max()) < EXTINCT_LEVEL
    c = 0.5 * c_star if o["c"] is None else o["c"]
    u_r = make_reacting_datum(params, reaction, grid, c, c_star=c_star)
    st_r, tr_r = simulate(params, reaction, grid, u_r, o["t_end"], sample_dt=o["sample_dt"])
    inner = np.abs(grid.x) <= o["inner"]
    min_inner = float(st_r.u[inner].min())
    _write_trace(out / "trace_not_reacting.csv", tr_nr)
    _write_trace(out / "trace_reacting.csv", tr_r)
    write_json(out / "report.json", {
        "c_star": c_star, "datum_speed": c,
        "not_reacting": {"extinct": extinct, "t_stop": st_nr.t,
                         "max_u": float(st_nr.u.max())},
        "reacting": {"t_end": st_r.t, "min_u_inner": min_inner,
                     "invaded": min_inner >= INVADED_LEVEL,
                     "front_speed": _speed(tr_r), "edge_speed": _speed(tr_r, "edge")},
    })
    return 0


def cmd_saturate(cfg: RunConfig, out: Path) -> int:
    params, reaction = _model(cfg)
    o = cfg.options
    grid = line_grid(o["L"], o["dx"])
    u0 = compact_bump(grid, o["height"], o["width"])
    report = saturation_experiment(params, reaction, grid, u0, o["eps"], t_end=o["t_end"],
                                   sample_dt=o["sample_dt"])
    write_json(out / "report.json", report)
    return 0


def cmd_barenblatt(cfg: RunConfig, out: Path) -> int:
    params = make_params(cfg.m, cfg.p)
    o = cfg.options
    N = o["N"]
    rows = []
    prev = None
    for level in range(o["levels"]):
        dx = o["dx"] / 2 ** level
        grid = line_grid(o["L"], dx) if N <= 1 else radial_grid(o["L"], dx, N)
        err = barenblatt_error(params, grid, o["C"], o["t0"], o["t1"])
        rows.append((dx, err, math.nan if prev is None else prev / err))
        prev = err
    write_csv(out / "convergence.csv", ["dx", "l1_error", "ratio"], rows)
    k = barenblatt_k(params, N)
    write_json(out / "report.json", {
        "k": k, "k_residual": barenblatt_k_residual(params, N, k_guess=k),
        "k_without_1_over_m": params.m * k,
        "errors": [r[1] for r in rows], "ratios": [r[2] for r in rows[1:]],
    })
    return 0


def sweep_cell(job: tuple) -> dict:
    """One isolated sweep entry; errors are recorded, not raised."""
    m, p, kind, a, tol, eps = job
    row = {"m": m, "p": p, "gamma": m * (p - 1.0) - 1.0, "c_star": math.nan, "status": "ok"}
    try:
        row["c_star"] = find_cstar(make_params(m, p), cubic_reaction(kind, a), tol=tol,
                                   eps=eps, with_profile=False).c_star
    except Exception as exc:  # noqa: BLE001 - any failure belongs in the table
        row["status"] = f"error: {type(exc).__name__}: {exc}".replace("\n", " ")
    return row


def sweep_cells(o: dict) -> list[tuple[float, float]]:
    cells = [tuple(c) for c in (o["pairs"] or [])]
    if o["line"] is not None:
        if o["p_range"] is None:
            raise ConfigError("--line needs --p-range")
        p0, p1 = o["p_range"]
        for p in np.linspace(p0, p1, o["n_points"]):
            cells.append((o["line"] / (p - 1.0), float(p)))
    if not cells:
        raise ConfigError("give --pairs or --line with --p-range")
    return [(float(m), float(p)) for m, p in cells]


def flag_jumps(rows: list[dict], limit: float = JUMP_LIMIT) -> float:
    """Mark rows whose c* differs from the previous valid row by more than ``limit``."""
    worst = 0.0
    prev = None
    for row in rows:
        row["jump"] = ""
        if row["status"] != "ok":
            continue
        if prev is not None:
            rel = abs(row["c_star"] - prev) / max(abs(prev), 1e-300)
            worst = max(worst, rel)
            if rel > limit:
                row["jump"] = "JUMP"
        prev = row["c_star"]
    return worst


def cmd_sweep(cfg: RunConfig, out: Path) -> int:
    o = cfg.options
    cells = sweep_cells(o)
    jobs = [(m, p, cfg.kind, cfg.a, o["tol"], o["eps"]) for m, p in cells]
    workers = o["jobs"] or os.cpu_count() or 1
    if workers <= 1 or len(jobs) == 1:
        rows = [sweep_cell(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            rows = list(pool.map(sweep_cell, jobs))
    worst = flag_jumps(rows)
    header = ["m", "p", "gamma", "c_star", "status", "jump"]
    write_csv(out / "sweep.csv", header, ([r[h] for h in header] for r in rows))
    write_json(out / "report.json", {
        "max_adjacent_jump": worst, "n_cells": len(rows),
        "n_errors": sum(r["status"] != "ok" for r in rows),
        "flagged": sum(r["jump"] == "JUMP" for r in rows),
    })
    for r in rows:
        print(f"{r['m']!r} {r['p']!r} {_fmt(r['c_star'])} {r['status']} {r['jump']}".rstrip())
    return 0


HANDLERS = {
    "cstar": cmd_cstar, "trajectory": cmd_trajectory, "isocline": cmd_isocline,
    "profile": cmd_profile, "simulate": cmd_simulate, "threshold": cmd_threshold,
    "saturate": cmd_saturate, "barenblatt": cmd_barenblatt, "sweep": cmd_sweep,
}


def run(cfg: RunConfig) -> int:
    """Execute a resolved configuration and map failures to exit codes."""
    try:
        if cfg.command in NEEDS_MP:
            make_params(cfg.m, cfg.p)
        out = _prepare_out(cfg)
        return HANDLERS[cfg.command](cfg, out)
    except (StepFailure, CFLError, OSError) as exc:
        print(f"dnlw: error: {exc}", file=sys.stderr)
        return 1
    except (DnlwError, ConfigError, ValueError) as exc:
        print(f"dnlw: error: {exc}", file=sys.stderr)
        return 2


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"dnlw: error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
