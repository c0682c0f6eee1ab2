"""Command-line front end.

Subcommands: ``check`` (structure conditions), ``verify`` (integral
identities), ``flow`` (conformal flow plus monotonicity audit),
``cmc`` (CMC corpus experiments), ``models`` (list built-ins).

A run is described by a JSON config document; every flag overrides
the matching config key, and the output directory resolves as flag,
then WARPCMC_OUTDIR, then config, then the working directory.  Output
files are plain comma-separated tables (or json-lines) with '#'
header lines carrying the tool version, model spec, and resolution;
nothing time-dependent is written, so identical runs produce
byte-identical files.

Exit codes: 0 success, 1 internal error, 2 hypothesis or parameter
violation, 3 audited inequality violation.
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import sys

import numpy as np

from . import __version__
from .cmc import find_cmc, umbilicity_verdict
from .errors import (
    DomainError,
    HypothesisError,
    NotApplicableError,
    ParameterError,
    WarpcmcError,
)
from .flow import area_floor_check, monotonicity_audit, run_flow
from .identities import hk_check, minkowski_check, minkowski_weighted_check
from .models import OmegaBackedWarping, make_model
from .surface import (
    GraphSurface,
    axisym_grid,
    full_sphere_grid,
    perturb_slice,
    slice_surface,
)
from .warping import check_conditions, scan_monotonicity_extrema

__all__ = ["main"]

DEFAULTS = {
    "model": {"family": "schwarzschild", "n": 3},
    "grid": {"mode": "axisym", "size": 128, "condition_size": 256},
    "surface": {"radius": None, "s": None, "modes": []},
    "flow": {"t_end": 1.0, "dt_max": None, "record_every": 1, "epsilon_cut": 1e-4},
    "cmc": {
        "tol": 1e-7,
        "max_iter": 2000,
        "dt": None,
        "corpus": {"count": 0, "seed": 1, "amplitude": 0.05, "max_degree": 4},
    },
    "tolerances": {"condition": 1e-9, "minkowski": 1e-8, "heintze_karcher": 1e-6},
    "output": {"dir": None, "format": "table"},
}

MODEL_PARAM_KEYS = ("m", "q", "kappa", "curvature", "r_bar", "s_max", "knots", "path")

FAMILY_TABLE = [
    ("euclidean", "ball", "r_bar"),
    ("sphere", "ball", "curvature, r_bar"),
    ("hyperbolic", "ball", "curvature, r_bar"),
    ("schwarzschild", "boundary", "m, s_max, knots"),
    ("desitter-schwarzschild", "boundary", "m, kappa, s_max, knots"),
    ("reissner-nordstrom", "boundary", "m, q, s_max, knots"),
    ("omega-table", "boundary", "path, s_max, knots"),
]


def _deep_update(base: dict, other: dict) -> dict:
    for key, value in other.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _deep_update(base[key], value)
        else:
            base[key] = value
    return base


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _jsonable(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


class Emitter:
    """Writes delimited tables with deterministic headers."""

    def __init__(self, outdir: str, fmt: str, model_line: str, resolution_line: str):
        if fmt not in ("table", "json-lines"):
            raise ParameterError(f"unknown report format {fmt!r}")
        self.outdir = outdir
        self.fmt = fmt
        self.model_line = model_line
        self.resolution_line = resolution_line
        os.makedirs(outdir, exist_ok=True)

    def write(self, stem: str, columns, rows, extra_comments=()) -> str:
        ext = "csv" if self.fmt == "table" else "jsonl"
        path = os.path.join(self.outdir, f"{stem}.{ext}")
        lines = []
        if self.fmt == "table":
            lines.append(f"# warpcmc {__version__}")
            lines.append(f"# model: {self.model_line}")
            lines.append(f"# resolution: {self.resolution_line}")
            for comment in extra_comments:
                lines.append(f"# {comment}")
            lines.append("# columns: " + ",".join(columns))
            for row in rows:
                lines.append(",".join(_fmt(v) for v in row))
        else:
            head = {
                "warpcmc": __version__,
                "model": self.model_line,
                "resolution": self.resolution_line,
            }
            for comment in extra_comments:
                head.setdefault("notes", []).append(comment)
            lines.append(json.dumps(head, sort_keys=True))
            for row in rows:
                lines.append(
                    json.dumps(
                        {c: _jsonable(v) for c, v in zip(columns, row)}, sort_keys=True
                    )
                )
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        return path


# ---------------------------------------------------------------------------
# config assembly


def _load_config(path: str | None) -> dict:
    cfg = copy.deepcopy(DEFAULTS)
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise ParameterError(f"{path}: config must be a JSON object")
        _deep_update(cfg, loaded)
    return cfg


def _apply_flags(cfg: dict, args: argparse.Namespace) -> dict:
    model = cfg["model"]
    if args.model is not None:
        model["family"] = args.model
    if args.n is not None:
        model["n"] = args.n
    for key in MODEL_PARAM_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            model[key] = value
    if getattr(args, "variant", None) is not None:
        model["variant"] = args.variant

    if getattr(args, "grid_mode", None) is not None:
        cfg["grid"]["mode"] = args.grid_mode
    if getattr(args, "grid_size", None) is not None:
        cfg["grid"]["size"] = args.grid_size

    if getattr(args, "radius", None) is not None:
        cfg["surface"]["radius"] = args.radius
    if getattr(args, "s", None) is not None:
        cfg["surface"]["s"] = args.s
    if getattr(args, "modes", None) is not None:
        cfg["surface"]["modes"] = _parse_modes(args.modes)

    for flag, keys in (
        ("t_end", ("flow", "t_end")),
        ("dt_max", ("flow", "dt_max")),
        ("record_every", ("flow", "record_every")),
        ("epsilon_cut", ("flow", "epsilon_cut")),
        ("cmc_tol", ("cmc", "tol")),
        ("max_iter", ("cmc", "max_iter")),
        ("corpus_count", ("cmc", "corpus", "count")),
        ("corpus_seed", ("cmc", "corpus", "seed")),
        ("corpus_amplitude", ("cmc", "corpus", "amplitude")),
        ("corpus_max_degree", ("cmc", "corpus", "max_degree")),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            node = cfg
            for key in keys[:-1]:
                node = node[key]
            node[keys[-1]] = value

    if args.out is not None:
        cfg["output"]["dir"] = args.out
    elif os.environ.get("WARPCMC_OUTDIR"):
        cfg["output"]["dir"] = os.environ["WARPCMC_OUTDIR"]
    if args.format is not None:
        cfg["output"]["format"] = args.format
    if cfg["output"]["dir"] is None:
        cfg["output"]["dir"] = "."

    for name, value in cfg["tolerances"].items():
        if not (float(value) > 0.0):
            raise ParameterError(f"tolerance {name} must be positive")
    size = int(cfg["grid"]["size"])
    if not (8 <= size <= 4096):
        raise ParameterError("grid size must lie in [8, 4096]")
    return cfg


def _parse_modes(text: str):
    modes = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 3:
            raise ParameterError(f"mode {chunk!r} must be degree,order,amplitude")
        modes.append((int(parts[0]), int(parts[1]), float(parts[2])))
    return modes


# ---------------------------------------------------------------------------
# shared builders


def _build_model(cfg: dict):
    model = cfg["model"]
    family = model["family"]
    n = int(model["n"])
    params = {k: model[k] for k in MODEL_PARAM_KEYS if model.get(k) is not None}
    w = make_model(family, n, **params)
    wanted = model.get("variant")
    if wanted is not None and wanted != w.variant:
        raise ParameterError(
            f"family {family!r} is a {w.variant}-type ambient, not {wanted!r}"
        )
    return w


def _model_line(cfg: dict, w) -> str:
    model = cfg["model"]
    parts = [f"family={model['family']}", f"n={w.dim}", f"variant={w.variant}"]
    for key in MODEL_PARAM_KEYS:
        if model.get(key) is not None:
            parts.append(f"{key}={model[key]}")
    return " ".join(parts)


def _build_engine(cfg: dict, w):
    mode = cfg["grid"]["mode"]
    size = int(cfg["grid"]["size"])
    if mode == "full":
        return full_sphere_grid(size)
    if mode == "axisym":
        return axisym_grid(w.dim, size)
    raise ParameterError(f"unknown grid mode {mode!r}")


def _base_radius(cfg: dict, w) -> float:
    surface = cfg["surface"]
    if surface.get("radius") is not None:
        return float(surface["radius"])
    if surface.get("s") is not None:
        if not isinstance(w, OmegaBackedWarping):
            raise ParameterError("an area-radius surface spec needs a horizon family")
        return float(w.distance_of_area_radius(float(surface["s"])))
    return 0.5 * w.r_bar


def _build_surface(cfg: dict, w, engine):
    radius = _base_radius(cfg, w)
    modes = cfg["surface"].get("modes") or []
    if modes:
        return perturb_slice(w, engine, radius, modes)
    return slice_surface(w, engine, radius)


# ---------------------------------------------------------------------------
# commands


def cmd_check(cfg: dict) -> int:
    w = _build_model(cfg)
    tol = float(cfg["tolerances"]["condition"])
    grid = int(cfg["grid"]["condition_size"])
    report = check_conditions(w, grid_size=grid, tol=tol)
    records = scan_monotonicity_extrema(w)

    emitter = Emitter(
        cfg["output"]["dir"],
        cfg["output"]["format"],
        _model_line(cfg, w),
        f"mode=radial size={grid}",
    )
    order = ["regularity", "monotonicity", "scalar_monotonicity", "ricci_gap"]
    rows = [
        (name, report.status[name], report.min_margin[name], report.worst_radius[name])
        for name in order
    ]
    path = emitter.write(
        f"conditions_{w.name}",
        ("condition", "status", "min_margin", "worst_radius"),
        rows,
        extra_comments=(
            f"required_pass: {_fmt(report.required_pass)}",
            f"conclusion: {report.conclusion}",
        ),
    )
    margin_rows = list(
        zip(
            report.radii,
            report.margins["monotonicity"],
            report.margins["scalar_monotonicity"],
            report.margins["ricci_gap"],
        )
    )
    emitter.write(
        f"margins_{w.name}",
        ("radius", "monotonicity", "scalar_monotonicity", "ricci_gap"),
        margin_rows,
    )
    emitter.write(
        f"extrema_{w.name}",
        ("radius", "kind", "value", "ricci_distinct"),
        [(rec.radius, rec.kind, rec.value, rec.ricci_distinct) for rec in records],
    )

    for name in order:
        print(f"{name}: {report.status[name]} (min margin {report.min_margin[name]:.3e})")
    print(f"conclusion: {report.conclusion}")
    print(f"wrote {path}")
    return 0 if report.required_pass else 3


def cmd_verify(cfg: dict) -> int:
    w = _build_model(cfg)
    engine = _build_engine(cfg, w)
    surface = _build_surface(cfg, w, engine)
    reports = [minkowski_check(surface, tol=float(cfg["tolerances"]["minkowski"]))]
    if w.variant == "boundary":
        reports.append(
            minkowski_weighted_check(surface, tol=float(cfg["tolerances"]["minkowski"]))
        )
    reports.append(hk_check(surface, tol=float(cfg["tolerances"]["heintze_karcher"])))

    emitter = Emitter(
        cfg["output"]["dir"],
        cfg["output"]["format"],
        _model_line(cfg, w),
        f"mode={engine.kind} size={cfg['grid']['size']}",
    )
    rows = [
        (rep.name, rep.lhs, rep.rhs, rep.residual, rep.tol, rep.verdict)
        for rep in reports
    ]
    path = emitter.write(
        f"identities_{w.name}",
        ("identity", "lhs", "rhs", "residual", "tol", "verdict"),
        rows,
    )
    for rep in reports:
        print(f"{rep.name}: {rep.verdict} (residual {rep.residual:.3e})")
    print(f"wrote {path}")
    return 0 if all(rep.verdict != "violated" for rep in reports) else 3


def cmd_flow(cfg: dict) -> int:
    w = _build_model(cfg)
    engine = _build_engine(cfg, w)
    surface = _build_surface(cfg, w, engine)
    flow_cfg = cfg["flow"]
    trace, final = run_flow(
        surface,
        float(flow_cfg["t_end"]),
        dt_max=None if flow_cfg["dt_max"] is None else float(flow_cfg["dt_max"]),
        record_every=int(flow_cfg["record_every"]),
        jacobian_cut=float(flow_cfg["epsilon_cut"]),
    )
    audit = monotonicity_audit(trace, trace.swept_weighted_volume)

    emitter = Emitter(
        cfg["output"]["dir"],
        cfg["output"]["format"],
        _model_line(cfg, w),
        f"mode={engine.kind} size={cfg['grid']['size']}",
    )
    trace_rows = list(
        zip(
            trace.times,
            trace.q_values,
            trace.areas,
            trace.min_alignment,
            trace.swept_weighted_volume,
            trace.active_counts,
        )
    )
    path = emitter.write(
        f"flow_trace_{w.name}",
        ("t", "Q", "area", "min_alignment", "swept_weighted_volume", "active_count"),
        trace_rows,
    )
    audit_rows = [
        ("q_decreasing", audit.q_slack, audit.q_tol, audit.q_ok),
        ("swept_dominated", audit.swept_slack, audit.swept_tol, audit.swept_ok),
        ("riccati_bound", audit.riccati_slack, audit.riccati_tol, audit.riccati_ok),
        ("area_decreasing", audit.area_slack, audit.area_tol, audit.area_ok),
    ]
    passed = audit.passed
    if w.variant == "boundary" and bool(np.any(final.active)):
        floor = area_floor_check(final)
        audit_rows.extend(
            [
                ("area_floor", floor.area - floor.area_floor, 1e-6, floor.area_ok),
                (
                    "weighted_minkowski",
                    floor.minkowski_lhs - floor.minkowski_bound,
                    1e-6 * max(floor.area, 1.0),
                    floor.minkowski_ok,
                ),
                ("q_floor", floor.q_value - floor.q_floor, 1e-6, floor.q_ok),
            ]
        )
        passed = passed and floor.passed
    emitter.write(
        f"flow_audit_{w.name}", ("check", "slack", "tol", "ok"), audit_rows
    )
    for name, slack, tol, ok in audit_rows:
        print(f"{name}: {'ok' if ok else 'VIOLATED'} (slack {slack:.3e})")
    print(f"wrote {path}")
    return 0 if passed else 3


def _corpus_surfaces(cfg: dict, w, engine):
    corpus = cfg["cmc"]["corpus"]
    count = int(corpus["count"])
    radius = _base_radius(cfg, w)
    if count <= 0:
        yield 0, _build_surface(cfg, w, engine)
        return
    amplitude = float(corpus["amplitude"])
    if not (0.0 < amplitude <= 0.1 * radius):
        raise ParameterError(
            "corpus amplitude must lie in (0, 0.1 radius] to stay in the graph class"
        )
    max_degree = int(corpus["max_degree"])
    if max_degree < 1 or max_degree > engine.lmax:
        raise ParameterError("corpus max_degree outside the resolved range")
    rng = np.random.default_rng(int(corpus["seed"]))
    for index in range(count):
        nmodes = int(rng.integers(1, 4))
        field = np.zeros(engine.theta.shape if engine.kind == "axisym" else (engine.nlat, engine.nlon))
        for _ in range(nmodes):
            l = int(rng.integers(1, max_degree + 1))
            m = int(rng.integers(-l, l + 1)) if engine.kind == "full" else 0
            field = field + rng.uniform(-1.0, 1.0) * engine.mode(l, m)
        top = float(np.max(np.abs(field)))
        if top == 0.0:
            field = engine.mode(2, 0)
            top = float(np.max(np.abs(field)))
        yield index, GraphSurface(w, engine, radius + field * (amplitude / top))


def cmd_cmc(cfg: dict) -> int:
    w = _build_model(cfg)
    engine = _build_engine(cfg, w)
    emitter = Emitter(
        cfg["output"]["dir"],
        cfg["output"]["format"],
        _model_line(cfg, w),
        f"mode={engine.kind} size={cfg['grid']['size']}",
    )
    rows = []
    alarms = 0
    for index, surface in _corpus_surfaces(cfg, w, engine):
        result = find_cmc(
            surface,
            cmc_tol=float(cfg["cmc"]["tol"]),
            max_iter=int(cfg["cmc"]["max_iter"]),
            dt=None if cfg["cmc"]["dt"] is None else float(cfg["cmc"]["dt"]),
        )
        if result.converged:
            verdict = umbilicity_verdict(result, w)
            alarm = verdict.alarm
            conclusion = verdict.conclusion
            alarms += int(alarm)
        else:
            alarm = False
            conclusion = "not-converged"
        rows.append(
            (
                index,
                result.converged,
                result.reason,
                result.iterations,
                result.cmc_residual,
                result.umbilicity_deficit,
                result.is_slice,
                result.mean_H,
                alarm,
                conclusion,
            )
        )
        print(
            f"run {index}: converged={_fmt(result.converged)} "
            f"residual={result.cmc_residual:.3e} deficit={result.umbilicity_deficit:.3e} "
            f"is_slice={_fmt(result.is_slice)} {conclusion}"
        )
    path = emitter.write(
        f"cmc_results_{w.name}",
        (
            "run",
            "converged",
            "reason",
            "iterations",
            "cmc_residual",
            "umbilicity_deficit",
            "is_slice",
            "mean_H",
            "alarm",
            "conclusion",
        ),
        rows,
    )
    print(f"wrote {path}")
    return 0 if alarms == 0 else 3


def cmd_models(_cfg: dict) -> int:
    print(f"warpcmc {__version__} built-in families:")
    for family, variant, params in FAMILY_TABLE:
        print(f"  {family:24s} variant={variant:9s} params: {params}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--model", help="model family name")
    parser.add_argument("--n", type=int, help="ambient dimension")
    parser.add_argument("--m", type=float, help="mass parameter")
    parser.add_argument("--q", type=float, help="charge parameter")
    parser.add_argument("--kappa", type=float, help="cosmological curvature")
    parser.add_argument("--curvature", type=float, help="space-form curvature")
    parser.add_argument("--r-bar", dest="r_bar", type=float, help="chart radius")
    parser.add_argument("--s-max", dest="s_max", type=float, help="outer area radius")
    parser.add_argument("--knots", type=int, help="warp spline knots")
    parser.add_argument("--path", help="omega table path")
    parser.add_argument("--variant", choices=("boundary", "ball"), help="expected variant")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--format", choices=("table", "json-lines"), help="report format")


def _add_surface(parser: argparse.ArgumentParser):
    parser.add_argument("--grid-mode", choices=("full", "axisym"), help="spectral mode")
    parser.add_argument("--grid-size", type=int, help="grid resolution")
    parser.add_argument("--radius", type=float, help="slice radius (arc length)")
    parser.add_argument("--s", type=float, help="slice area radius (horizon families)")
    parser.add_argument("--modes", help="perturbation list degree,order,amp;...")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="warpcmc",
        description="curvature conditions, identities, flows and CMC experiments "
        "in warped product ambients",
    )
    parser.add_argument("--version", action="version", version=f"warpcmc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="structure-condition suite")
    _add_common(p_check)

    p_verify = sub.add_parser("verify", help="integral identity checks")
    _add_common(p_verify)
    _add_surface(p_verify)

    p_flow = sub.add_parser("flow", help="conformal flow with audit")
    _add_common(p_flow)
    _add_surface(p_flow)
    p_flow.add_argument("--t-end", dest="t_end", type=float, help="flow end time")
    p_flow.add_argument("--dt-max", dest="dt_max", type=float, help="largest step")
    p_flow.add_argument(
        "--record-every", dest="record_every", type=int, help="steps between records"
    )
    p_flow.add_argument(
        "--epsilon-cut", dest="epsilon_cut", type=float, help="jacobian deactivation cut"
    )

    p_cmc = sub.add_parser("cmc", help="CMC solves and rigidity corpus")
    _add_common(p_cmc)
    _add_surface(p_cmc)
    p_cmc.add_argument("--cmc-tol", dest="cmc_tol", type=float, help="residual tolerance")
    p_cmc.add_argument("--max-iter", dest="max_iter", type=int, help="iteration cap")
    p_cmc.add_argument(
        "--corpus-count", dest="corpus_count", type=int, help="random corpus size"
    )
    p_cmc.add_argument("--corpus-seed", dest="corpus_seed", type=int, help="corpus seed")
    p_cmc.add_argument(
        "--corpus-amplitude",
        dest="corpus_amplitude",
        type=float,
        help="perturbation amplitude",
    )
    p_cmc.add_argument(
        "--corpus-max-degree",
        dest="corpus_max_degree",
        type=int,
        help="largest perturbed degree",
    )

    p_models = sub.add_parser("models", help="list built-in families")
    _add_common(p_models)
    return parser


COMMANDS = {
    "check": cmd_check,
    "verify": cmd_verify,
    "flow": cmd_flow,
    "cmc": cmd_cmc,
    "models": cmd_models,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        cfg = _apply_flags(cfg, args)
        return COMMANDS[args.command](cfg)
    except (ParameterError, DomainError, HypothesisError, NotApplicableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except WarpcmcError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
