"""Command-line entry point: single runs, convergence studies, symbol dumps.

Subcommands
-----------
simulate : run one splitting scheme and write the trajectory (csv or json)
           plus a JSON sidecar with the echoed config and run diagnostics.
converge : run a self-convergence study, write per-cell dt/error tables and
           a JSON summary with fitted slopes.
symbol   : dump the linear symbols and their growth rates as JSON.

Exit codes: 0 ok, 2 invalid configuration, 3 runtime failure (blow-up, CFL,
failed study cells), 4 study-quality gate (error floor reached).

Configuration can come from a flat key=value file (--config); explicit
command-line flags override file values.  All numeric output is serialized
with full round-trip precision, and reruns of the same configuration produce
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .convergence import (
    INITIAL_DATA_IDS,
    ConvergenceReport,
    StudySpec,
    make_initial_data,
    run_study,
)
from .errors import FowlerSplitError, InvalidConfig, SpatialFloorReached
from .operators import SymbolSpec, alpha0, beta0, symbol_phi, symbol_psi
from .spectral import SpectralGrid
from .splitting import SchemeKind, SchemeSpec, evolve

__all__ = ["RunConfig", "main", "entrypoint", "cmd_simulate", "cmd_converge", "cmd_symbol"]

THREADS_ENV = "FOWLER_SPLIT_THREADS"

_SCHEME_NAMES = tuple(k.value for k in SchemeKind)
_DEFAULT_LADDER = (50, 100, 200, 400, 800)


@dataclass
class RunConfig:
    """Validated flat configuration shared by the subcommands."""

    n_nodes: int = 1024
    length: float = 4.0
    epsilon: float = 0.5
    lam: float = 4.0 / 3.0
    a_i: float | None = None
    b_i: float | None = None
    scheme: str = "lie_xy"
    dt: float = 1e-3
    t_final: float = 0.1
    capture_every: int = 10
    init: str = "bump_single"
    init_params: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "csv"
    seed: int = 0
    cfl_safety: float = 0.9
    schemes: tuple[str, ...] = _SCHEME_NAMES
    inits: tuple[str, ...] = ("bump_single", "bump_double", "bump_asym")
    dts: tuple[float, ...] | None = None

    def validate(self) -> None:
        n = self.n_nodes
        if n < 16 or (n & (n - 1)) != 0:
            raise InvalidConfig(f"n must be a power of two >= 16, got {n}")
        if not self.length > 0:
            raise InvalidConfig(f"length must be positive, got {self.length}")
        if not 0.0 < self.epsilon < 1.0:
            raise InvalidConfig(f"epsilon must lie strictly in (0, 1), got {self.epsilon}")
        if not 0.0 < self.lam < 2.0:
            raise InvalidConfig(f"lambda must lie in (0, 2), got {self.lam}")
        for name, value in (("a_i", self.a_i), ("b_i", self.b_i)):
            if value is not None and not value > 0:
                raise InvalidConfig(f"{name} must be positive, got {value}")
        if self.scheme not in _SCHEME_NAMES:
            raise InvalidConfig(f"scheme must be one of {_SCHEME_NAMES}, got {self.scheme!r}")
        if not self.dt > 0:
            raise InvalidConfig(f"dt must be positive, got {self.dt}")
        if self.t_final < 0:
            raise InvalidConfig(f"t_final must be nonnegative, got {self.t_final}")
        if self.capture_every < 1:
            raise InvalidConfig(f"capture_every must be >= 1, got {self.capture_every}")
        if self.init not in INITIAL_DATA_IDS:
            raise InvalidConfig(f"init must be one of {INITIAL_DATA_IDS}, got {self.init!r}")
        if self.format not in ("csv", "json"):
            raise InvalidConfig(f"format must be csv or json, got {self.format!r}")
        if not 0.0 < self.cfl_safety <= 1.0:
            raise InvalidConfig(f"cfl_safety must lie in (0, 1], got {self.cfl_safety}")
        for s in self.schemes:
            if s not in _SCHEME_NAMES:
                raise InvalidConfig(f"unknown scheme {s!r} in schemes")
        for i in self.inits:
            if i not in INITIAL_DATA_IDS:
                raise InvalidConfig(f"unknown init {i!r} in inits")
        n_steps = int(round(self.t_final / self.dt)) if self.t_final > 0 else 0
        if abs(n_steps * self.dt - self.t_final) > 1e-12 * max(self.t_final, self.dt):
            raise InvalidConfig(f"dt {self.dt} must divide t_final {self.t_final}")

    def symbol_spec(self) -> SymbolSpec:
        return SymbolSpec(self.epsilon, self.lam, self.a_i, self.b_i)

    def grid(self) -> SpectralGrid:
        return SpectralGrid(self.n_nodes, self.length)

    def echo(self) -> dict:
        """Flat key/value view; feeding it back as a config file reproduces the run."""
        out = {
            "n": self.n_nodes,
            "length": self.length,
            "epsilon": self.epsilon,
            "lambda": self.lam,
            "a_i": self.a_i,
            "b_i": self.b_i,
            "scheme": self.scheme,
            "dt": self.dt,
            "t_final": self.t_final,
            "capture_every": self.capture_every,
            "init": self.init,
            "out": self.out,
            "format": self.format,
            "seed": self.seed,
            "cfl_safety": self.cfl_safety,
            "schemes": ",".join(self.schemes),
            "inits": ",".join(self.inits),
            "dts": ",".join(_fmt(d) for d in self.dts) if self.dts else None,
        }
        for key, value in self.init_params.items():
            out[f"init_{key}"] = value
        return out


def _fmt(value) -> str:
    """Serialize a number losslessly (shortest round-trip representation)."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _json_dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def parse_config_file(path: str) -> dict[str, str]:
    """Read a flat key=value config file ('#' starts a comment)."""
    values: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise InvalidConfig(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
                key, value = line.split("=", 1)
                values[key.strip()] = value.strip()
    except OSError as exc:
        raise InvalidConfig(f"cannot read config file {path}: {exc}") from exc
    return values


_FLOAT_KEYS = {"length", "epsilon", "lambda", "dt", "t_final", "cfl_safety", "a_i", "b_i"}
_INT_KEYS = {"n", "capture_every", "seed"}
_STR_KEYS = {"scheme", "init", "out", "format"}
_LIST_KEYS = {"schemes", "inits", "dts"}
_INIT_PARAM_KEYS = {"init_amplitude", "init_center", "init_width", "init_mode"}


def _merge_config(file_values: dict[str, str], cli_values: dict) -> RunConfig:
    config = RunConfig()
    merged: dict = {}
    for key, raw in file_values.items():
        if key in _FLOAT_KEYS:
            merged[key] = float(raw)
        elif key in _INT_KEYS:
            merged[key] = int(raw)
        elif key in _STR_KEYS:
            merged[key] = raw
        elif key in _LIST_KEYS:
            merged[key] = raw
        elif key in _INIT_PARAM_KEYS:
            merged[key] = float(raw) if key != "init_mode" else int(raw)
        else:
            raise InvalidConfig(f"unknown config key {key!r}")
    for key, value in cli_values.items():
        if value is not None:
            merged[key] = value

    if "n" in merged:
        config.n_nodes = int(merged["n"])
    for name, attr in (
        ("length", "length"),
        ("epsilon", "epsilon"),
        ("lambda", "lam"),
        ("a_i", "a_i"),
        ("b_i", "b_i"),
        ("dt", "dt"),
        ("t_final", "t_final"),
        ("cfl_safety", "cfl_safety"),
    ):
        if name in merged:
            setattr(config, attr, float(merged[name]))
    for name, attr in (("scheme", "scheme"), ("init", "init"), ("out", "out"), ("format", "format")):
        if name in merged:
            setattr(config, attr, str(merged[name]))
    for name, attr in (("capture_every", "capture_every"), ("seed", "seed")):
        if name in merged:
            setattr(config, attr, int(merged[name]))
    if "schemes" in merged:
        config.schemes = _split_list(merged["schemes"])
    if "inits" in merged:
        config.inits = _split_list(merged["inits"])
    if "dts" in merged:
        config.dts = tuple(float(v) for v in _split_list(merged["dts"]))
    for key in _INIT_PARAM_KEYS:
        if key in merged and merged[key] is not None:
            param = key.removeprefix("init_")
            config.init_params[param] = merged[key]
    return config


def _split_list(raw) -> tuple[str, ...]:
    if isinstance(raw, (tuple, list)):
        return tuple(raw)
    return tuple(item.strip() for item in str(raw).split(",") if item.strip())


def _sidecar(config: RunConfig, spec: SymbolSpec, trajectory) -> dict:
    return {
        "config": config.echo(),
        "alpha0": alpha0(spec),
        "beta0": beta0(spec),
        "a_I": spec.a_i,
        "b_I": spec.b_i,
        "n_steps": trajectory.scheme.n_steps,
        "substeps_per_step": list(trajectory.substeps),
        "times": [float(t) for t in trajectory.times],
        "l2_history": [float(v) for v in trajectory.l2_history],
    }


def cmd_simulate(config: RunConfig) -> int:
    config.validate()
    if not config.out:
        raise InvalidConfig("simulate requires --out")
    grid = config.grid()
    spec = config.symbol_spec()
    u0 = make_initial_data(config.init, grid, **config.init_params)
    scheme = SchemeSpec(SchemeKind(config.scheme), config.dt, config.t_final, config.capture_every)
    trajectory = evolve(scheme, spec, u0, cfl_safety=config.cfl_safety)

    meta = _sidecar(config, spec, trajectory)
    if config.format == "csv":
        lines = ["t,x,u"]
        for t, snap in zip(trajectory.times, trajectory.snapshots):
            ts = _fmt(t)
            for x, u in zip(grid.nodes, snap.values):
                lines.append(f"{ts},{_fmt(x)},{_fmt(u)}")
        _write_text(f"{config.out}.csv", "\n".join(lines) + "\n")
        _write_text(f"{config.out}.meta.json", _json_dumps(meta))
    else:
        payload = {
            "meta": meta,
            "x": [float(x) for x in grid.nodes],
            "snapshots": [
                {"t": float(t), "u": [float(v) for v in snap.values]}
                for t, snap in zip(trajectory.times, trajectory.snapshots)
            ],
        }
        _write_text(f"{config.out}.json", _json_dumps(payload))
    return 0


def _report_dict(report: ConvergenceReport) -> dict:
    return {
        "scheme": report.scheme.value,
        "init": report.data_id,
        "rows": [[dt, err] for dt, err in report.rows],
        "slope": report.slope,
        "slope_ci": report.slope_ci,
        "floor_gap": report.floor_gap,
        "error": report.error,
    }


def cmd_converge(config: RunConfig) -> int:
    config.validate()
    if not config.out:
        raise InvalidConfig("converge requires --out")
    dts = config.dts or tuple(config.t_final / k for k in _DEFAULT_LADDER)
    study = StudySpec(
        dts=dts,
        kinds=tuple(SchemeKind(s) for s in config.schemes),
        data_ids=config.inits,
        t_final=config.t_final,
        grid=config.grid(),
        spec=config.symbol_spec(),
        cfl_safety=config.cfl_safety,
    )
    max_workers = int(os.environ.get(THREADS_ENV, "0") or "0")
    reports = run_study(study, max_workers=max_workers)

    for report in reports:
        lines = ["dt,error_l2"]
        for dt, err in report.rows:
            lines.append(f"{_fmt(dt)},{_fmt(err)}")
        _write_text(f"{config.out}_{report.scheme.value}_{report.data_id}.csv", "\n".join(lines) + "\n")
    summary = {
        "config": config.echo(),
        "alpha0": alpha0(study.spec),
        "beta0": beta0(study.spec),
        "reports": [_report_dict(r) for r in reports],
    }
    _write_text(f"{config.out}_summary.json", _json_dumps(summary))
    if any(r.error for r in reports):
        print("converge: one or more cells failed; see summary", file=sys.stderr)
        return 3
    return 0


def cmd_symbol(config: RunConfig, xis: list[float]) -> int:
    config.validate()
    spec = config.symbol_spec()
    a0 = alpha0(spec)
    b0 = beta0(spec)
    rows = []
    for xi in xis:
        psi = symbol_psi(spec, xi)
        phi = symbol_phi(spec, xi)
        rows.append(
            {
                "xi": float(xi),
                "re_psi": psi.real,
                "im_psi": psi.imag,
                "re_phi": phi.real,
                "im_phi": phi.imag,
                "alpha0": a0,
                "beta0": b0,
                "a_I": spec.a_i,
                "b_I": spec.b_i,
            }
        )
    text = _json_dumps(rows)
    if config.out:
        _write_text(config.out, text)
    else:
        sys.stdout.write(text)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fowler-split",
        description="Split-step Fourier solver for a nonlocal dune-growth conservation law.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="flat key=value config file; flags override file values")
        p.add_argument("--n", type=int, help="grid nodes (power of two >= 16)")
        p.add_argument("--length", type=float, help="domain length")
        p.add_argument("--epsilon", type=float, help="nonlinear-flow viscosity in (0,1)")
        p.add_argument("--lambda", dest="lam", type=float, help="anti-diffusion order in (0,2)")
        p.add_argument("--a-i", dest="a_i", type=float, help="override multiplier coefficient a")
        p.add_argument("--b-i", dest="b_i", type=float, help="override multiplier coefficient b")
        p.add_argument("--out", help="output path (or prefix for converge)")
        p.add_argument("--format", choices=["csv", "json"], help="trajectory output format")
        p.add_argument("--seed", type=int, help="reserved; runs are deterministic")
        p.add_argument("--cfl-safety", dest="cfl_safety", type=float, help="CFL safety factor")

    sim = sub.add_parser("simulate", help="run one scheme and write the trajectory")
    add_common(sim)
    sim.add_argument("--scheme", choices=_SCHEME_NAMES)
    sim.add_argument("--dt", type=float)
    sim.add_argument("--t-final", dest="t_final", type=float)
    sim.add_argument("--capture-every", dest="capture_every", type=int)
    sim.add_argument("--init", choices=INITIAL_DATA_IDS)
    sim.add_argument("--init-amplitude", dest="init_amplitude", type=float)
    sim.add_argument("--init-center", dest="init_center", type=float)
    sim.add_argument("--init-width", dest="init_width", type=float)
    sim.add_argument("--init-mode", dest="init_mode", type=int)

    conv = sub.add_parser("converge", help="run a self-convergence study")
    add_common(conv)
    conv.add_argument("--t-final", dest="t_final", type=float)
    conv.add_argument("--schemes", help="comma-separated scheme list")
    conv.add_argument("--inits", help="comma-separated initial-data list")
    conv.add_argument("--dts", help="comma-separated dt ladder (descending, ratio 2)")

    symb = sub.add_parser("symbol", help="dump symbols and growth rates as JSON")
    add_common(symb)
    symb.add_argument("--xi", help="comma-separated frequencies")
    symb.add_argument("--xi-range", dest="xi_range", help="start:stop:count linear range")

    return parser


def _collect_cli_values(args: argparse.Namespace) -> dict:
    keys = (
        "n",
        "length",
        "epsilon",
        "lam",
        "a_i",
        "b_i",
        "scheme",
        "dt",
        "t_final",
        "capture_every",
        "init",
        "out",
        "format",
        "seed",
        "cfl_safety",
        "schemes",
        "inits",
        "dts",
        "init_amplitude",
        "init_center",
        "init_width",
        "init_mode",
    )
    values: dict = {}
    for key in keys:
        if hasattr(args, key):
            # normalize argparse dests back to config-file key names
            name = {"lam": "lambda", "n": "n"}.get(key, key)
            values[name] = getattr(args, key)
    return values


def _parse_xis(args: argparse.Namespace) -> list[float]:
    xis: list[float] = []
    if getattr(args, "xi", None):
        xis.extend(float(v) for v in args.xi.split(","))
    if getattr(args, "xi_range", None):
        parts = args.xi_range.split(":")
        if len(parts) != 3:
            raise InvalidConfig(f"--xi-range expects start:stop:count, got {args.xi_range!r}")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        xis.extend(float(v) for v in np.linspace(start, stop, count))
    if not xis:
        raise InvalidConfig("symbol requires --xi or --xi-range")
    return xis


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    try:
        file_values = parse_config_file(args.config) if args.config else {}
        config = _merge_config(file_values, _collect_cli_values(args))
        if args.command == "simulate":
            return cmd_simulate(config)
        if args.command == "converge":
            return cmd_converge(config)
        return cmd_symbol(config, _parse_xis(args))
    except InvalidConfig as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError,) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SpatialFloorReached as exc:
        print(f"study-quality gate: {exc}", file=sys.stderr)
        _write_diagnostic(args, exc)
        return 4
    except FowlerSplitError as exc:
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        _write_diagnostic(args, exc)
        return 3


def _write_diagnostic(args: argparse.Namespace, exc: Exception) -> None:
    out = getattr(args, "out", None)
    if out:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        try:
            _write_text(f"{out}.error.json", _json_dumps(payload))
        except OSError:
            pass


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
