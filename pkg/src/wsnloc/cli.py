"""Command-line front end.

Subcommands: ``gen`` (simulate a deployment and its measurements), ``solve``
(localize from a measurement file), ``bench`` (run a sweep and write CSVs),
``plot`` (render a summary CSV as SVG).  Parameter precedence is flags over
config-file values over built-in defaults.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass

from . import charts
from .bench import (
    DEFAULT_SWEEPS,
    ExperimentConfig,
    ExperimentReport,
    run_experiment,
    write_summary_csv,
    write_trials_csv,
)
from .estimator import METHODS, LocalizationResult, localize
from .network import Scenario
from .simulate import ChannelParams, MeasurementSet, make_measurements, generate_scenario, measurement_rng
from .solver import SolverError

_DEFAULTS = {
    "n": 15,
    "m": 5,
    "gamma_p": 3.0,
    "sigma_db": 3.5,
    "epsilon": 0.01,
    "d_max": 0.5,
    "trials": 50,
    "seed": 0,
    "jobs": 1,
    "method": "proposed",
    "sweep": None,
    "values": None,
    "methods": ("proposed", "plain"),
    "name": "",
}


@dataclass
class CliConfig:
    """Resolved settings for one invocation."""

    command: str
    n: int
    m: int
    gamma_p: float
    sigma_db: float
    epsilon: float
    d_max: float
    trials: int
    seed: int
    jobs: int
    method: str
    sweep: str | None
    values: tuple | None
    methods: tuple[str, ...]
    name: str
    in_path: str | None = None
    out_path: str | None = None

    def channel_params(self) -> ChannelParams:
        return ChannelParams(gamma_p=self.gamma_p, sigma_db=self.sigma_db,
                             epsilon=self.epsilon, d_max=self.d_max)


def _resolve(command: str, args: argparse.Namespace, file_values: dict | None = None) -> CliConfig:
    merged = dict(_DEFAULTS)
    merged.update(file_values or {})
    for key in _DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    if getattr(args, "jobs", None) is None and "jobs" not in (file_values or {}):
        env_jobs = os.environ.get("WSNLOC_JOBS")
        if env_jobs:
            merged["jobs"] = int(env_jobs)
    return CliConfig(
        command=command,
        n=int(merged["n"]),
        m=int(merged["m"]),
        gamma_p=float(merged["gamma_p"]),
        sigma_db=float(merged["sigma_db"]),
        epsilon=float(merged["epsilon"]),
        d_max=float(merged["d_max"]),
        trials=int(merged["trials"]),
        seed=int(merged["seed"]),
        jobs=int(merged["jobs"]),
        method=str(merged["method"]),
        sweep=merged["sweep"],
        values=tuple(merged["values"]) if merged["values"] is not None else None,
        methods=tuple(merged["methods"]),
        name=str(merged["name"]),
        in_path=getattr(args, "in_path", None),
        out_path=getattr(args, "out", None),
    )


def _parse_scalar(text: str):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_config_file(path: str) -> dict:
    """Experiment config as JSON or as ``key = value`` lines.

    List values in the line format are comma separated.  Recognized keys
    mirror the CLI flags plus sweep/values/methods/name.
    """
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        raw = json.loads(text)
    else:
        raw = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, value = line.split("=", 1)
            parts = [p for p in value.split(",") if p.strip()]
            if len(parts) > 1:
                raw[key.strip()] = [_parse_scalar(p) for p in parts]
            else:
                raw[key.strip()] = _parse_scalar(value)

    aliases = {"swept_parameter": "sweep", "base_seed": "seed", "eps": "epsilon",
               "dmax": "d_max", "experiment": "name", "sigma_dB": "sigma_db", "M": "m", "N": "n"}
    out = {}
    for key, value in raw.items():
        canon = aliases.get(key, key)
        if canon not in _DEFAULTS:
            raise ValueError(f"unknown config key {key!r}")
        if canon in ("values", "methods") and not isinstance(value, (list, tuple)):
            value = [value]
        if canon == "methods":
            value = [str(v) for v in value]
        if canon == "sweep":
            value = str(value).lower()
        out[canon] = value
    return out


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _load_measurements(path: str) -> MeasurementSet:
    with open(path) as fh:
        obj = json.load(fh)
    if "measurements" in obj:
        obj = obj["measurements"]
    return MeasurementSet.from_json_dict(obj)


def cmd_gen(args: argparse.Namespace) -> int:
    cfg = _resolve("gen", args)
    params = cfg.channel_params()
    scenario = generate_scenario(cfg.n, cfg.m, params, cfg.seed)
    meas = make_measurements(scenario, params, measurement_rng(cfg.seed))
    doc = {"scenario": scenario.to_json_dict(), "measurements": meas.to_json_dict()}
    _write_text(cfg.out_path, json.dumps(doc, indent=2) + "\n")
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    cfg = _resolve("solve", args)
    if cfg.in_path is None:
        raise ValueError("solve needs --in MEASUREMENTS.json")
    meas = _load_measurements(cfg.in_path)
    result = localize(meas, cfg.method)
    _write_text(cfg.out_path, result.dumps())
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    file_values = read_config_file(args.config) if args.config else {}
    cfg = _resolve("bench", args, file_values)
    if cfg.sweep is None:
        raise ValueError("bench needs a sweep parameter (config key 'sweep' = m | d_max | sigma_db | epsilon)")
    if cfg.sweep not in DEFAULT_SWEEPS:
        raise ValueError(f"unknown sweep parameter {cfg.sweep!r}; expected m, d_max, sigma_db or epsilon")
    values = cfg.values if cfg.values is not None else DEFAULT_SWEEPS[cfg.sweep]
    exp = ExperimentConfig(
        swept=cfg.sweep,
        values=tuple(values),
        n=cfg.n,
        m=cfg.m,
        params=cfg.channel_params(),
        trials=cfg.trials,
        base_seed=cfg.seed,
        methods=cfg.methods,
        name=cfg.name,
    )
    report = run_experiment(exp, jobs=cfg.jobs)
    prefix = cfg.out_path or exp.name
    write_trials_csv(report, f"{prefix}_trials.csv")
    write_summary_csv(report, f"{prefix}_summary.csv")
    if args.svg:
        _write_text(f"{prefix}_rmse.svg", _report_rmse_svg(report))
        _write_text(f"{prefix}_box.svg", _report_box_svg(report))
    return 0


def _report_rmse_svg(report: ExperimentReport) -> str:
    series: dict[str, list[tuple[float, float]]] = {}
    for s in report.summaries:
        series.setdefault(s.method, []).append((float(s.setting), s.rmse))
    return charts.line_chart(series, title=f"{report.experiment}: RMSE",
                             x_label=report.config.swept, y_label="RMSE")


def _report_box_svg(report: ExperimentReport) -> str:
    boxes = []
    for s in report.summaries:
        if s.box is None:
            continue
        boxes.append(charts.ChartBox(
            label=str(s.setting), method=s.method, median=s.box.median, q1=s.box.q1,
            q3=s.box.q3, whisker_lo=s.box.whisker_lo, whisker_hi=s.box.whisker_hi,
            outliers=s.box.outliers,
        ))
    return charts.box_chart(boxes, title=f"{report.experiment}: trial errors",
                            x_label=report.config.swept, y_label="E_i")


def cmd_plot(args: argparse.Namespace) -> int:
    cfg = _resolve("plot", args)
    if cfg.in_path is None:
        raise ValueError("plot needs --in SUMMARY.csv")
    with open(cfg.in_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{cfg.in_path}: no data rows")
    if args.kind == "rmse":
        series: dict[str, list[tuple[float, float]]] = {}
        for row in rows:
            if row["rmse"]:
                series.setdefault(row["method"], []).append((float(row["setting"]), float(row["rmse"])))
        svg = charts.line_chart(series, title=f"{rows[0]['experiment']}: RMSE",
                                x_label="setting", y_label="RMSE")
    else:
        boxes = [
            charts.ChartBox(label=row["setting"], method=row["method"], median=float(row["median"]),
                            q1=float(row["q1"]), q3=float(row["q3"]))
            for row in rows if row["median"]
        ]
        svg = charts.box_chart(boxes, title=f"{rows[0]['experiment']}: quartiles",
                               x_label="setting", y_label="E_i")
    _write_text(cfg.out_path, svg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="number of LU nodes (default 15)")
    common.add_argument("--m", type=int, help="number of anchors (default 5)")
    common.add_argument("--gamma-p", dest="gamma_p", type=float, help="path-loss exponent (default 3)")
    common.add_argument("--sigma-db", dest="sigma_db", type=float, help="fading std in dB (default 3.5)")
    common.add_argument("--eps", dest="epsilon", type=float, help="anchor error scale in m (default 0.01)")
    common.add_argument("--dmax", dest="d_max", type=float, help="ranging limit in m (default 0.5)")
    common.add_argument("--seed", type=int, help="base seed (default 0)")

    parser = argparse.ArgumentParser(prog="wsnloc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate a deployment and measurements")
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", parents=[common], help="localize from a measurement file")
    p.add_argument("--in", dest="in_path", required=True, help="measurement JSON (or gen output)")
    p.add_argument("--method", choices=METHODS, help="estimation method (default proposed)")
    p.add_argument("--out", help="result JSON path (default stdout)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", parents=[common], help="run a Monte-Carlo sweep, write CSVs")
    p.add_argument("--config", help="experiment config file (JSON or key=value lines)")
    p.add_argument("--trials", type=int, help="trials per setting (default 50)")
    p.add_argument("--jobs", type=int, help="parallel workers (default 1, or WSNLOC_JOBS)")
    p.add_argument("--out", help="output path prefix (default experiment name)")
    p.add_argument("--svg", action="store_true", help="also write RMSE and box charts")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("plot", help="render a summary CSV as SVG")
    p.add_argument("--in", dest="in_path", required=True, help="summary CSV from bench")
    p.add_argument("--kind", choices=("rmse", "box"), default="rmse")
    p.add_argument("--out", help="SVG path (default stdout)")
    p.set_defaults(func=cmd_plot)
    return parser


def dispatch(argv: list[str]) -> int:
    """Parse and run; returns a process exit code instead of raising."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, RuntimeError, json.JSONDecodeError, SolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
