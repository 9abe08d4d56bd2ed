"""Monte-Carlo benchmark harness.

Runs seeded trials over a swept parameter, scoring each method on the same
measurement realization (paired design), and aggregates per-trial errors
into RMSE and box-and-whisker statistics.  Reports are deterministic
functions of the configuration, whatever the worker count.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .estimator import METHODS, localize
from .simulate import ChannelParams, simulate_trial
from .solver import SolverError, SolverOptions

SWEEPABLE = ("m", "d_max", "sigma_db", "epsilon")

# Default sweep grids, centered on the typical parameter values.
DEFAULT_SWEEPS = {
    "m": (3, 4, 5, 6, 7),
    "d_max": (0.3, 0.4, 0.5, 0.6),
    "sigma_db": (1.0, 2.0, 3.5, 5.0, 6.0),
    "epsilon": (0.0, 0.01, 0.02, 0.05),
}

TRIALS_CSV_HEADER = ["experiment", "setting", "method", "trial", "E_i", "C", "kappa", "tightness", "status"]
SUMMARY_CSV_HEADER = ["experiment", "setting", "method", "rmse", "median", "q1", "q3", "n_outliers", "n_failed"]


def trial_error(est, truth) -> float:
    """Root of the summed squared per-node position errors for one trial."""
    if len(est) != len(truth):
        raise ValueError(f"length mismatch: {len(est)} estimates vs {len(truth)} true positions")
    total = 0.0
    for p, q in zip(est, truth):
        total += (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2
    return math.sqrt(total)


def rmse(errors) -> float:
    """Root mean square of per-trial errors."""
    errors = list(errors)
    if not errors:
        raise ValueError("rmse of an empty list")
    return math.sqrt(sum(e * e for e in errors) / len(errors))


@dataclass(frozen=True)
class BoxStats:
    """Median, quartiles, Tukey whiskers and outliers of one error sample."""

    median: float
    q1: float
    q3: float
    whisker_lo: float
    whisker_hi: float
    outliers: tuple[float, ...]


def _quantile_sorted(x, p: float) -> float:
    """Linear interpolation between order statistics at position p*(n-1)."""
    pos = p * (len(x) - 1)
    lo = math.floor(pos)
    hi = min(lo + 1, len(x) - 1)
    frac = pos - lo
    return x[lo] + frac * (x[hi] - x[lo])


def boxplot_stats(errors) -> BoxStats:
    """Box-and-whisker statistics with quartiles by linear interpolation.

    Quartiles interpolate between order statistics (quantile position
    p*(n-1)+1).  Whiskers reach the most extreme data within 1.5*IQR of the
    box; anything beyond is an outlier.
    """
    x = sorted(float(v) for v in errors)
    if not x:
        raise ValueError("boxplot of an empty list")
    q1 = _quantile_sorted(x, 0.25)
    med = _quantile_sorted(x, 0.50)
    q3 = _quantile_sorted(x, 0.75)
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    inside = [v for v in x if lo_fence <= v <= hi_fence]
    outliers = tuple(v for v in x if v < lo_fence or v > hi_fence)
    return BoxStats(
        median=med,
        q1=q1,
        q3=q3,
        whisker_lo=min(inside),
        whisker_hi=max(inside),
        outliers=outliers,
    )


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: which parameter varies, its values, and the fixed setup."""

    swept: str
    values: tuple
    n: int = 15
    m: int = 5
    params: ChannelParams = ChannelParams()
    trials: int = 50
    base_seed: int = 0
    methods: tuple[str, ...] = ("proposed", "plain")
    name: str = ""

    def __post_init__(self):
        if self.swept not in SWEEPABLE:
            raise ValueError(f"swept parameter must be one of {SWEEPABLE}, got {self.swept!r}")
        if not self.values:
            raise ValueError("sweep values must be nonempty")
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if self.base_seed < 0:
            raise ValueError("base_seed must be nonnegative")
        for method in self.methods:
            if method not in METHODS:
                raise ValueError(f"unknown method {method!r}")
        if not self.methods:
            raise ValueError("need at least one method")
        if not self.name:
            object.__setattr__(self, "name", f"sweep_{self.swept}")

    def setting_for(self, value) -> tuple[int, int, ChannelParams]:
        """(n, m, params) with the swept parameter overridden by ``value``."""
        if self.swept == "m":
            return self.n, int(value), self.params
        return self.n, self.m, replace(self.params, **{self.swept: float(value)})


@dataclass(frozen=True)
class TrialRecord:
    setting: float
    method: str
    trial: int
    error: float  # NaN when the trial failed
    connectivity: float
    kappa: float
    tightness: float
    status: str  # "ok", "solver-failed" or "generation-failed"


@dataclass(frozen=True)
class SettingSummary:
    setting: float
    method: str
    errors: tuple[float, ...]  # successful trials only, in trial order
    rmse: float  # NaN when no trial succeeded
    box: BoxStats | None
    n_failed: int


@dataclass(frozen=True)
class ExperimentReport:
    experiment: str
    config: ExperimentConfig
    trials: tuple[TrialRecord, ...]
    summaries: tuple[SettingSummary, ...]


def trial_seed(base_seed: int, setting_index: int, trial_index: int) -> int:
    """Stable, well-mixed per-trial seed."""
    return int(np.random.SeedSequence([base_seed, setting_index, trial_index]).generate_state(1)[0])


def _run_trial(task) -> list[TrialRecord]:
    setting_value, n, m, params, seed, methods, opts = task
    nan = float("nan")
    try:
        scenario, meas = simulate_trial(n, m, params, seed)
    except RuntimeError:
        return [
            TrialRecord(setting_value, method, -1, nan, nan, nan, nan, "generation-failed")
            for method in methods
        ]
    records = []
    for method in methods:
        try:
            result = localize(meas, method, opts)
        except SolverError:
            records.append(TrialRecord(setting_value, method, -1, nan, nan, nan, nan, "solver-failed"))
            continue
        error = trial_error(result.positions, scenario.unknowns)
        records.append(
            TrialRecord(setting_value, method, -1, error, result.connectivity,
                        result.kappa_used, result.tightness, "ok")
        )
    return records


def run_experiment(cfg: ExperimentConfig, jobs: int = 1, opts: SolverOptions | None = None) -> ExperimentReport:
    """Run the full sweep and aggregate.

    Per trial, one deployment and one measurement set are generated and
    every configured method is scored against the same data.  Trial seeds
    derive from (base_seed, setting index, trial index), so the report is
    reproducible and independent of ``jobs``.  Failed trials are recorded
    with a status and excluded from the aggregates.
    """
    tasks = []
    for si, value in enumerate(cfg.values):
        n, m, params = cfg.setting_for(value)
        for ti in range(cfg.trials):
            tasks.append((value, n, m, params, trial_seed(cfg.base_seed, si, ti), cfg.methods, opts))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_trial = list(pool.map(_run_trial, tasks, chunksize=1))
    else:
        per_trial = [_run_trial(t) for t in tasks]

    records = []
    for task_index, recs in enumerate(per_trial):
        ti = task_index % cfg.trials
        for r in recs:
            records.append(replace(r, trial=ti))

    summaries = []
    for value in cfg.values:
        for method in cfg.methods:
            rows = [r for r in records if r.setting == value and r.method == method]
            ok_errors = tuple(r.error for r in rows if r.status == "ok")
            n_failed = len(rows) - len(ok_errors)
            summaries.append(
                SettingSummary(
                    setting=value,
                    method=method,
                    errors=ok_errors,
                    rmse=rmse(ok_errors) if ok_errors else float("nan"),
                    box=boxplot_stats(ok_errors) if ok_errors else None,
                    n_failed=n_failed,
                )
            )
    return ExperimentReport(
        experiment=cfg.name, config=cfg, trials=tuple(records), summaries=tuple(summaries)
    )


def _fmt(value) -> str:
    if isinstance(value, float) and math.isnan(value):
        return ""
    return repr(value) if isinstance(value, (int, float)) else str(value)


def write_trials_csv(report: ExperimentReport, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRIALS_CSV_HEADER)
        for r in report.trials:
            writer.writerow([
                report.experiment, _fmt(r.setting), r.method, r.trial,
                _fmt(r.error), _fmt(r.connectivity), _fmt(r.kappa), _fmt(r.tightness), r.status,
            ])


def write_summary_csv(report: ExperimentReport, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_CSV_HEADER)
        for s in report.summaries:
            box = s.box
            writer.writerow([
                report.experiment, _fmt(s.setting), s.method, _fmt(s.rmse),
                _fmt(box.median) if box else "", _fmt(box.q1) if box else "",
                _fmt(box.q3) if box else "", len(box.outliers) if box else 0, s.n_failed,
            ])
