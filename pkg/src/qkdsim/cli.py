"""Command-line surface: topology export, sweeps, figure recipes and fits.

Subcommands:
  topo   write a topology adjacency file
  sweep  run a distance or burst sweep (or a named figure recipe)
  fit    fit a model (sigmoid, poly3, logcubic) to an x,y CSV

A flat `key = value` config file (# comments) can seed any sweep option;
explicit flags override file values, and the QKDSIM_SEED environment
variable is the seed fallback.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import analysis, protocols
from .channel import ChannelParams
from .experiments import (DEFAULT_DISTANCES, SweepConfig, SweepResult,
                          run_burst_sweep, run_distance_sweep)
from .protocols import ProtocolSpec
from .topology import build_topology, format_topology

RECIPES = ("fig-direct", "fig-topologies-3stage", "fig-torus",
           "fig-burst-line", "fig-logcubic")
FORMATS = ("csv", "json", "plotdata")


def _parse_grid(text: str) -> tuple[float, ...]:
    """Accept '1:60:1' ranges or '10,20,30' comma lists."""
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) == 2:
            start, stop, step = parts[0], parts[1], 1.0
        elif len(parts) == 3:
            start, stop, step = parts
        else:
            raise ValueError("range must be start:stop[:step]")
        if step <= 0 or stop < start:
            raise ValueError("bad range bounds")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(start + i * step for i in range(n))
    return tuple(float(p) for p in text.split(","))


def _load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line (expected key = value): {raw!r}")
        key, val = line.split("=", 1)
        values[key.strip().replace("-", "_")] = val.strip()
    return values


def _shape_params(args) -> dict:
    params = {}
    if args.kind == "line":
        params["n_trusted"] = args.n_trusted if args.n_trusted is not None else 1
    elif args.kind == "grid":
        params["g"] = args.g if args.g is not None else 3
    elif args.kind == "torus":
        params["k"] = args.k if args.k is not None else 3
    elif args.kind == "ring":
        params["m"] = args.m if args.m is not None else 4
    elif args.kind == "star":
        params["n_leaves"] = args.n_leaves if args.n_leaves is not None else 2
    return params


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("QKDSIM_SEED")
    if env is not None:
        return int(env)
    return 0


def _build_spec(args) -> ProtocolSpec:
    kwargs = {}
    if args.burst is not None:
        kwargs["burst_size"] = args.burst
    if args.redundancy is not None:
        kwargs["redundancy"] = args.redundancy
    if args.sifting is not None:
        kwargs["sifting_fraction"] = args.sifting
    if args.protocol == protocols.THREE_STAGE:
        kwargs.setdefault("sifting_fraction", 1.0)
    return ProtocolSpec(args.protocol, **kwargs)


def _build_channel(args) -> ChannelParams:
    kwargs = {}
    if args.alpha is not None:
        kwargs["alpha"] = args.alpha
    if args.decoherence is not None:
        kwargs["decoherence"] = args.decoherence
    if args.bsm is not None:
        kwargs["bsm_success"] = args.bsm
    if args.redundancy is not None:
        kwargs["redundancy"] = args.redundancy
    return ChannelParams(**kwargs)


_QUIET = False


def _write(path: Path, content: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content)
    if not _QUIET:
        print(f"wrote {path}")


def _plotdata(result: SweepResult) -> str:
    lines = ["# x key_rate delivered qber"]
    for p in result.points:
        q = "nan" if math.isnan(p.qber) else f"{p.qber:.8g}"
        lines.append(f"{p.x:.10g} {p.key_rate:.10g} {p.delivered} {q}")
    return "\n".join(lines) + "\n"


def _emit_result(result: SweepResult, out_dir: Path, base: str,
                 formats: tuple[str, ...]) -> None:
    if "csv" in formats:
        _write(out_dir / f"{base}.csv", result.to_csv())
    if "json" in formats:
        _write(out_dir / f"{base}.json", result.to_json())
    if "plotdata" in formats:
        _write(out_dir / f"{base}.dat", _plotdata(result))


def cmd_topo(args) -> int:
    """Build a topology and write its plain-text adjacency file."""
    topo = build_topology(args.kind, args.L, **_shape_params(args))
    out = Path(args.out) if args.out else Path(f"topology_{args.kind}.txt")
    _write(out, format_topology(topo))
    return 0


def _sweep_config(args, **overrides) -> SweepConfig:
    cfg = dict(
        kind=args.kind,
        protocol=_build_spec(args),
        channel=_build_channel(args),
        shape_params=_shape_params(args),
        rounds=args.rounds if args.rounds is not None else 100_000,
        master_seed=_resolve_seed(args),
        max_paths=args.max_paths if args.max_paths is not None else 4,
        threads=args.threads if args.threads is not None else 1,
    )
    if args.distances:
        cfg["distances"] = _parse_grid(args.distances)
    if args.bursts:
        cfg["bursts"] = tuple(int(b) for b in _parse_grid(args.bursts))
    cfg.update(overrides)
    return SweepConfig(**cfg)


def cmd_sweep(args) -> int:
    """Run one sweep (or a figure recipe) and write its result files."""
    formats = tuple(args.format.split(",")) if args.format else ("csv",)
    for f in formats:
        if f not in FORMATS:
            raise ValueError(f"unknown format {f!r}")
    out_dir = Path(args.out) if args.out else Path(".")

    if args.recipe:
        return _run_recipe(args, out_dir, formats)

    if args.bursts:
        cfg = _sweep_config(args)
        family = run_burst_sweep(cfg)
        for b, result in family.curves:
            _emit_result(result, out_dir, f"sweep_b{b}", formats)
        return 0

    cfg = _sweep_config(args)
    result = run_distance_sweep(cfg)
    _emit_result(result, out_dir, "sweep", formats)
    return 0


def _recipe_rounds(args, default: int) -> int:
    return args.rounds if args.rounds is not None else default


def _run_recipe(args, out_dir: Path, formats: tuple[str, ...]) -> int:
    recipe = args.recipe
    seed = _resolve_seed(args)
    threads = args.threads if args.threads is not None else 1
    rounds = _recipe_rounds(args, 20_000)
    common = dict(rounds=rounds, master_seed=seed, threads=threads)

    if recipe == "fig-direct":
        distances = _parse_grid(args.distances) if args.distances else DEFAULT_DISTANCES
        curves = {
            "decoy": SweepConfig("direct", ProtocolSpec(protocols.DECOY),
                                 distances=distances, **common),
            "three_stage": SweepConfig("direct",
                                       ProtocolSpec(protocols.THREE_STAGE, sifting_fraction=1.0),
                                       distances=distances, **common),
            "e91": SweepConfig("direct", ProtocolSpec(protocols.E91),
                               distances=distances, **common),
            # Repeater variant: one midpoint repeater, redundant swaps.
            "e91_repeaters": SweepConfig("line",
                                         ProtocolSpec(protocols.E91, swap_redundancy=True),
                                         shape_params={"n_trusted": 1},
                                         distances=distances, **common),
        }
        for label, cfg in curves.items():
            _emit_result(run_distance_sweep(cfg), out_dir, f"{recipe}_{label}", formats)
        return 0

    if recipe == "fig-topologies-3stage":
        distances = _parse_grid(args.distances) if args.distances else DEFAULT_DISTANCES
        spec = ProtocolSpec(protocols.THREE_STAGE, sifting_fraction=1.0)
        shapes = {
            "line": ("line", {"n_trusted": 1}),
            "ring": ("ring", {"m": 4}),
            "star": ("star", {"n_leaves": 2}),
            "grid": ("grid", {"g": 3}),
        }
        for label, (kind, params) in shapes.items():
            cfg = SweepConfig(kind, spec, shape_params=params,
                              distances=distances, **common)
            _emit_result(run_distance_sweep(cfg), out_dir, f"{recipe}_{label}", formats)
        return 0

    if recipe == "fig-torus":
        distances = _parse_grid(args.distances) if args.distances else DEFAULT_DISTANCES
        for label, spec in (
            ("three_stage", ProtocolSpec(protocols.THREE_STAGE, sifting_fraction=1.0)),
            ("e91", ProtocolSpec(protocols.E91)),
        ):
            cfg = SweepConfig("torus", spec, shape_params={"k": 3},
                              distances=distances, **common)
            _emit_result(run_distance_sweep(cfg), out_dir, f"{recipe}_{label}", formats)
        return 0

    if recipe == "fig-burst-line":
        distances = _parse_grid(args.distances) if args.distances else DEFAULT_DISTANCES
        bursts = (tuple(int(b) for b in _parse_grid(args.bursts)) if args.bursts
                  else (10, 50, 100, 200, 400, 800, 1200))
        cfg = SweepConfig("line", ProtocolSpec(protocols.THREE_STAGE, sifting_fraction=1.0),
                          shape_params={"n_trusted": 1}, distances=distances,
                          bursts=bursts, **common)
        for b, result in run_burst_sweep(cfg).curves:
            _emit_result(result, out_dir, f"{recipe}_b{b}", formats)
        return 0

    if recipe == "fig-logcubic":
        # Stable-distance law: decade bursts, a grid wide enough to contain
        # every turning point, smoothing, then the cubic fit in log10(burst).
        distances = (_parse_grid(args.distances) if args.distances
                     else tuple(float(x) for x in range(1, 256, 2)))
        bursts = (tuple(int(b) for b in _parse_grid(args.bursts)) if args.bursts
                  else (10, 100, 1000, 10_000, 100_000, 1_000_000))
        cfg = SweepConfig("line", ProtocolSpec(protocols.THREE_STAGE, sifting_fraction=1.0),
                          shape_params={"n_trusted": 1}, distances=distances,
                          bursts=bursts, **common)
        family = run_burst_sweep(cfg)
        stable = []
        for b, result in family.curves:
            _emit_result(result, out_dir, f"{recipe}_b{b}", formats)
            smooth = analysis.savgol_smooth(result.key_rates())
            stable.append(analysis.turning_point(result.xs(), smooth))
        fit = analysis.fit_log_cubic(list(family.burst_sizes()), stable)
        lines = ["burst,log10_burst,stable_km"]
        for b, d in zip(family.burst_sizes(), stable):
            lines.append(f"{b},{math.log10(b):.10g},{d:.10g}")
        _write(out_dir / f"{recipe}_stable.csv", "\n".join(lines) + "\n")
        _write(out_dir / f"{recipe}_fit.txt",
               analysis.format_fit_report("logcubic", _PARAM_NAMES["logcubic"],
                                          fit.coefficients, fit.diagnostics,
                                          len(stable)))
        return 0

    raise ValueError(f"unknown recipe {recipe!r}")


_PARAM_NAMES = {
    "sigmoid": ("plateau", "decay_rate", "midpoint_km"),
    "poly3": ("c3", "c2", "c1", "c0"),
    "logcubic": ("c3", "c2", "c1", "c0"),
}


def _read_xy_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    rows = Path(path).read_text().strip().splitlines()
    if not rows:
        raise ValueError("empty input file")
    header = [h.strip() for h in rows[0].split(",")]
    y_col = 1
    if "key_rate" in header:
        y_col = header.index("key_rate")
        rows = rows[1:]
    elif not _is_number(header[0]):
        rows = rows[1:]
    xs, ys = [], []
    for row in rows:
        cells = row.split(",")
        xs.append(float(cells[0]))
        ys.append(float(cells[y_col]))
    return np.asarray(xs), np.asarray(ys)


def _is_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def cmd_fit(args) -> int:
    """Fit a model to an x,y CSV and write report plus residuals."""
    xs, ys = _read_xy_csv(args.input)
    out_dir = Path(args.out) if args.out else Path(".")
    extra = ""
    if args.model == "sigmoid":
        fit = analysis.fit_sigmoid(xs, ys)
        params = (fit.plateau, fit.decay_rate, fit.midpoint_km)
        model_values = fit.predict(xs)
        diag = fit.diagnostics
        extra = f"converged: {str(fit.converged).lower()}\n"
    elif args.model == "poly3":
        pf = analysis.fit_polynomial(xs, ys, degree=3)
        params, diag = pf.coefficients, pf.diagnostics
        model_values = pf.predict(xs)
    elif args.model == "logcubic":
        pf = analysis.fit_log_cubic(xs, ys)
        params, diag = pf.coefficients, pf.diagnostics
        model_values = pf.predict(np.log10(xs))
    else:
        raise ValueError(f"unknown model {args.model!r}")

    report = analysis.format_fit_report(args.model, _PARAM_NAMES[args.model],
                                        params, diag, len(xs)) + extra
    _write(out_dir / "fit_report.txt", report)
    _write(out_dir / "fit_residuals.csv",
           analysis.format_residuals_csv(xs, ys, model_values))
    return 0


def _add_common_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", choices=("direct", "line", "star", "ring", "grid", "torus"))
    p.add_argument("--L", type=float, help="Alice-Bob distance in km")
    p.add_argument("--k", type=int, help="torus side length")
    p.add_argument("--g", type=int, help="grid side length")
    p.add_argument("--n-trusted", type=int, help="interior trusted nodes (line)")
    p.add_argument("--m", type=int, help="ring node count")
    p.add_argument("--n-leaves", type=int, help="star leaf count")


def main(argv=None) -> int:
    global _QUIET
    parser = argparse.ArgumentParser(prog="qkdsim",
                                     description="QKD network Monte Carlo simulator")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress per-file progress lines")
    sub = parser.add_subparsers(dest="command", required=True)

    p_topo = sub.add_parser("topo", help="write a topology adjacency file")
    _add_common_args(p_topo)
    p_topo.add_argument("--out")

    p_sweep = sub.add_parser("sweep", help="run a key-rate sweep or recipe")
    _add_common_args(p_sweep)
    p_sweep.add_argument("--config", help="flat key = value config file")
    p_sweep.add_argument("--protocol", choices=protocols.PROTOCOLS)
    p_sweep.add_argument("--burst", type=int, help="3-stage burst size")
    p_sweep.add_argument("--rounds", type=int)
    p_sweep.add_argument("--seed", type=int)
    p_sweep.add_argument("--alpha", type=float)
    p_sweep.add_argument("--decoherence", type=float)
    p_sweep.add_argument("--bsm", type=float)
    p_sweep.add_argument("--redundancy", type=int)
    p_sweep.add_argument("--sifting", type=float)
    p_sweep.add_argument("--distances", help="km grid: start:stop[:step] or comma list")
    p_sweep.add_argument("--bursts", help="burst grid: comma list")
    p_sweep.add_argument("--max-paths", type=int)
    p_sweep.add_argument("--out")
    p_sweep.add_argument("--format", help="comma list of csv,json,plotdata")
    p_sweep.add_argument("--recipe", choices=RECIPES)
    p_sweep.add_argument("--threads", type=int)

    p_fit = sub.add_parser("fit", help="fit a model to an x,y CSV")
    p_fit.add_argument("input", help="CSV with x in the first column")
    p_fit.add_argument("--model", choices=("sigmoid", "poly3", "logcubic"),
                       required=True)
    p_fit.add_argument("--out")

    args = parser.parse_args(argv)
    _QUIET = args.quiet
    try:
        if args.command == "topo":
            if args.kind is None or args.L is None:
                raise ValueError("topo requires --kind and --L")
            return cmd_topo(args)
        if args.command == "sweep":
            if args.config:
                _apply_config_file(args)
            if not args.recipe:
                if args.kind is None:
                    raise ValueError("sweep requires --kind (or --recipe)")
                if args.protocol is None:
                    raise ValueError("sweep requires --protocol (or --recipe)")
            return cmd_sweep(args)
        if args.command == "fit":
            return cmd_fit(args)
        raise ValueError(f"unknown command {args.command!r}")
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


_CONFIG_KEYS = {
    "kind": str, "L": float, "k": int, "g": int, "n_trusted": int, "m": int,
    "n_leaves": int, "protocol": str, "burst": int, "rounds": int, "seed": int,
    "alpha": float, "decoherence": float, "bsm": float, "redundancy": int,
    "sifting": float, "distances": str, "bursts": str, "max_paths": int,
    "out": str, "format": str, "threads": int,
}


def _apply_config_file(args) -> None:
    """Fill unset sweep options from a key = value file (flags win)."""
    values = _load_config_file(args.config)
    for key, raw in values.items():
        if key not in _CONFIG_KEYS:
            raise ValueError(f"unknown config key {key!r}")
        if getattr(args, key, None) is None:
            setattr(args, key, _CONFIG_KEYS[key](raw))


if __name__ == "__main__":
    sys.exit(main())
