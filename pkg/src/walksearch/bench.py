"""Experiment harness: sweeps, CSV persistence and the head-to-head scaling study.

One experiment runs an algorithm over a list of lattice sides, probing the
evolution across a step window around the predicted turning point
pi / (2 alpha).  Every probed window point becomes one CSV row; the scaling
report then compares the charged step counts against their theoretical
composites and fits the scaling law.

CSV files start with a ``# walksearch-csv v1`` version line followed by a
header row; floats are serialized in full-precision scientific notation so
records round-trip losslessly.  A peak that lands on the window boundary is
flagged by storing the peak step with a negative sign.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from .amplify import akr_preparation, amplify, marked_coin_target, optimal_rounds
from .controlled import tuned_delta, run_controlled
from .lattice import ProblemInstance, site_distribution
from .spectral import (
    DENSE_SIDE_CAP,
    build_blocks,
    dense_oracle,
    expand_target,
    solve_alpha,
)
from .walk import ProbeLog, charged_time_steps, default_probe_stride, run_akr

CSV_VERSION_LINE = "# walksearch-csv v1"
SUMMARY_SCHEMA = "walksearch-summary v1"

ALGOS = ("akr", "akr+qaa", "controlled")

RECORD_FIELDS = [
    "side",
    "N",
    "algo",
    "delta",
    "steps",
    "time_steps_charged",
    "marked_probability",
    "overlap_target",
    "alpha_predicted",
    "alpha_dense",
    "T_predicted",
    "T_peak_empirical",
    "wall_clock",
]


@dataclass
class ExperimentSpec:
    """Sweep configuration; JSON config files mirror these fields."""

    algo: str = "controlled"
    sides: list[int] = field(default_factory=lambda: [8, 16, 32, 64, 128])
    c_delta: list[float] = field(default_factory=lambda: [0.5, 1.0, 2.0])
    window: tuple[float, float, int] = (0.5, 1.5, 25)
    probe_stride: int | None = None
    seed: int = 0
    out: str | None = None
    marked: tuple[int, int] | None = None
    randomize_marked: bool = False
    workers: int = 1

    def validate(self) -> None:
        if self.algo not in ALGOS:
            raise ValueError(f"algo must be one of {ALGOS}, got {self.algo!r}")
        if not self.sides:
            raise ValueError("at least one side required")
        for s in self.sides:
            if s < 2 or s % 2:
                raise ValueError(f"sides must be even and >= 2, got {s}")
        lo, hi, points = self.window
        if not (0 < lo <= hi) or points < 1:
            raise ValueError(f"bad step window {self.window}")
        if self.algo == "controlled" and not self.c_delta:
            raise ValueError("controlled sweep needs at least one c_delta")

    def to_json(self) -> str:
        d = asdict(self)
        d["window"] = list(self.window)
        return json.dumps(d, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentSpec":
        d = json.loads(text)
        if "window" in d:
            d["window"] = tuple(d["window"])
        if d.get("marked") is not None:
            d["marked"] = tuple(d["marked"])
        return cls(**d)


@dataclass
class ExperimentRecord:
    """One probed window point (or one amplified run for akr+qaa)."""

    side: int
    n_sites: int
    algo: str
    delta: float
    steps: int
    time_steps_charged: int
    marked_probability: float
    overlap_target: float
    alpha_predicted: float
    alpha_dense: float | None
    t_predicted: int
    t_peak_empirical: float
    wall_clock: float

    def to_row(self) -> list[str]:
        return [
            str(self.side),
            str(self.n_sites),
            self.algo,
            _fmt(self.delta),
            str(self.steps),
            str(self.time_steps_charged),
            _fmt(self.marked_probability),
            _fmt(self.overlap_target),
            _fmt(self.alpha_predicted),
            "" if self.alpha_dense is None else _fmt(self.alpha_dense),
            str(self.t_predicted),
            _fmt(self.t_peak_empirical),
            _fmt(self.wall_clock),
        ]

    @classmethod
    def from_row(cls, row: list[str]) -> "ExperimentRecord":
        return cls(
            side=int(row[0]),
            n_sites=int(row[1]),
            algo=row[2],
            delta=float(row[3]),
            steps=int(row[4]),
            time_steps_charged=int(row[5]),
            marked_probability=float(row[6]),
            overlap_target=float(row[7]),
            alpha_predicted=float(row[8]),
            alpha_dense=None if row[9] == "" else float(row[9]),
            t_predicted=int(row[10]),
            t_peak_empirical=float(row[11]),
            wall_clock=float(row[12]),
        )

    def sort_key(self) -> tuple:
        return (self.side, self.algo, self.delta, self.steps)


def _fmt(x: float) -> str:
    return format(x, ".17e")


def parabolic_peak(steps: np.ndarray, values: np.ndarray) -> tuple[float, bool]:
    """Peak location from a parabola through the three best probe points.

    Returns (step, at_boundary).  At a window edge the argmax step itself
    is returned and flagged.
    """
    i = int(np.argmax(values))
    if i == 0 or i == len(values) - 1:
        return float(steps[i]), True
    x1, x2, x3 = (float(steps[j]) for j in (i - 1, i, i + 1))
    y1, y2, y3 = (float(values[j]) for j in (i - 1, i, i + 1))
    num = (x2 - x1) ** 2 * (y2 - y3) - (x2 - x3) ** 2 * (y2 - y1)
    den = (x2 - x1) * (y2 - y3) - (x2 - x3) * (y2 - y1)
    if den == 0.0:
        return x2, False
    return x2 - 0.5 * num / den, False


def _instance_for(spec: ExperimentSpec, side: int) -> ProblemInstance:
    if spec.marked is not None:
        return ProblemInstance(side, spec.marked)
    if spec.randomize_marked:
        rng = np.random.default_rng([spec.seed, side])
        return ProblemInstance(side, (int(rng.integers(side)), int(rng.integers(side))))
    return ProblemInstance(side)


def _window_steps(spec: ExperimentSpec, t_star: float) -> list[int]:
    lo, hi, points = spec.window
    mults = np.linspace(lo, hi, points)
    return sorted({max(1, int(round(m * t_star))) for m in mults})


def _run_task(spec: ExperimentSpec, side: int, c_delta: float | None) -> list[ExperimentRecord]:
    t0 = time.perf_counter()
    instance = _instance_for(spec, side)
    blocks = build_blocks(instance)

    if spec.algo == "controlled":
        config = tuned_delta(instance, c_delta)
        delta = config.delta
        expansion = expand_target(blocks, instance, delta)
    else:
        delta = 0.0
        expansion = expand_target(blocks, instance)
    solution = solve_alpha(expansion)

    alpha_dense = None
    if side <= DENSE_SIDE_CAP:
        mode = "controlled" if spec.algo == "controlled" else "akr"
        alpha_dense = dense_oracle(
            instance, mode, delta if spec.algo == "controlled" else None
        ).smallest_positive_phase()

    t_star = math.pi / (2.0 * solution.alpha)
    window_steps = _window_steps(spec, t_star)
    max_steps = max(window_steps)
    stride = spec.probe_stride or default_probe_stride(side, max_steps)

    if spec.algo == "controlled":
        _, log = run_controlled(instance, config, max_steps, stride, set(window_steps))
        peak_series = log.marked_prob
    else:
        _, log = run_akr(instance, max_steps, stride, set(window_steps))
        peak_series = np.abs(log.overlap) ** 2
    t_peak, at_boundary = parabolic_peak(log.steps, peak_series)
    t_peak_field = -t_peak if at_boundary else t_peak

    wall = time.perf_counter() - t0

    if spec.algo == "akr+qaa":
        return [_qaa_record(instance, solution, alpha_dense, log, t_peak_field, t0)]

    records = []
    by_step = {int(s): i for i, s in enumerate(log.steps)}
    for ws in window_steps:
        i = by_step[ws]
        records.append(
            ExperimentRecord(
                side=side,
                n_sites=instance.n_sites,
                algo=spec.algo,
                delta=delta,
                steps=ws,
                time_steps_charged=charged_time_steps(instance, ws),
                marked_probability=float(log.marked_prob[i]),
                overlap_target=float(abs(log.overlap[i])),
                alpha_predicted=solution.alpha,
                alpha_dense=alpha_dense,
                t_predicted=solution.predicted_steps,
                t_peak_empirical=t_peak_field,
                wall_clock=wall,
            )
        )
    return records


def _qaa_record(instance, solution, alpha_dense, log: ProbeLog, t_peak_field, t0) -> ExperimentRecord:
    """Amplify the walk state prepared at the best probed overlap step."""
    t_inner, amp = log.peak_overlap()
    rounds = optimal_rounds(amp)
    prep = akr_preparation(instance, t_inner)
    final, total_cost = amplify(prep, marked_coin_target(instance), rounds)
    prob = site_distribution(final).marked_probability(instance)
    return ExperimentRecord(
        side=instance.side,
        n_sites=instance.n_sites,
        algo="akr+qaa",
        delta=0.0,
        steps=t_inner,
        time_steps_charged=total_cost,
        marked_probability=prob,
        overlap_target=amp,
        alpha_predicted=solution.alpha,
        alpha_dense=alpha_dense,
        t_predicted=solution.predicted_steps,
        t_peak_empirical=t_peak_field,
        wall_clock=time.perf_counter() - t0,
    )


def run_experiment(spec: ExperimentSpec) -> list[ExperimentRecord]:
    """Run the sweep; deterministic given the spec and seed."""
    spec.validate()
    tasks: list[tuple[int, float | None]] = []
    for side in spec.sides:
        if spec.algo == "controlled":
            tasks.extend((side, c) for c in spec.c_delta)
        else:
            tasks.append((side, None))

    if spec.workers > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            chunks = list(pool.map(lambda t: _run_task(spec, *t), tasks))
    else:
        chunks = [_run_task(spec, side, c) for side, c in tasks]

    records = [r for chunk in chunks for r in chunk]
    records.sort(key=ExperimentRecord.sort_key)
    if spec.out:
        write_records(Path(spec.out), records, append=True)
    return records


# ---------------------------------------------------------------------------
# persistence


def write_records(path: Path, records: list[ExperimentRecord], append: bool = False) -> None:
    """Write records; with ``append`` new rows go after any existing ones."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fresh = not (append and path.exists())
    if not fresh:
        with path.open() as fh:
            if fh.readline().strip() != CSV_VERSION_LINE:
                raise ValueError(f"cannot append to {path}: unrecognized version line")
    with path.open("w" if fresh else "a", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if fresh:
            fh.write(CSV_VERSION_LINE + "\n")
            writer.writerow(RECORD_FIELDS)
        for rec in records:
            writer.writerow(rec.to_row())


def read_records(path: Path) -> list[ExperimentRecord]:
    path = Path(path)
    with path.open() as fh:
        first = fh.readline().strip()
        if first != CSV_VERSION_LINE:
            raise ValueError(f"unrecognized CSV version line: {first!r}")
        reader = csv.reader(fh)
        header = next(reader)
        if header != RECORD_FIELDS:
            raise ValueError(f"CSV header mismatch: {header}")
        return [ExperimentRecord.from_row(row) for row in reader if row]


# ---------------------------------------------------------------------------
# scaling report


def _composite(algo: str, n: int) -> float:
    ln_n = math.log(n)
    if algo == "akr+qaa":
        return math.sqrt(n) * ln_n
    return math.sqrt(n * ln_n)


def _series_for(records: list[ExperimentRecord]) -> dict[int, dict]:
    """Per-side peak probability and the charged cost at the empirical peak."""
    out: dict[int, dict] = {}
    for side in sorted({r.side for r in records}):
        rows = [r for r in records if r.side == side]
        best = max(rows, key=lambda r: r.marked_probability)
        if best.algo == "akr+qaa":
            cost = best.time_steps_charged
        else:
            t_peak = abs(best.t_peak_empirical)
            cost = 2 * side + 2 * int(round(t_peak))
        # for the plain walk the interesting hit rate is the target overlap
        prob = (
            max(r.overlap_target**2 for r in rows)
            if best.algo == "akr"
            else best.marked_probability
        )
        out[side] = {
            "side": side,
            "N": best.n_sites,
            "peak_probability": prob,
            "cost": cost,
            "cost_per_success": cost / prob,
            "t_peak": abs(best.t_peak_empirical),
            "boundary_flag": best.t_peak_empirical < 0,
        }
    return out


def _band(values: list[float]) -> dict:
    return {
        "min": min(values),
        "max": max(values),
        "ratio": max(values) / min(values) if min(values) > 0 else math.inf,
    }


def _loglog_fit(composites: list[float], costs: list[float]) -> dict:
    x = np.log(np.asarray(composites))
    y = np.log(np.asarray(costs))
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    return {
        "slope": float(slope),
        "intercept": float(intercept),
        "residuals": [float(r) for r in residuals],
    }


def c_delta_of(record: ExperimentRecord) -> float:
    """Recover the tuning constant cos(delta) * sqrt(ln N) from a record."""
    return round(math.cos(record.delta) * math.sqrt(math.log(record.n_sites)), 9)


def _best_c_delta(records: list[ExperimentRecord]) -> float:
    """The c_delta series maximizing the min-over-sides peak probability."""
    by_c: dict[float, list[ExperimentRecord]] = {}
    for r in records:
        by_c.setdefault(c_delta_of(r), []).append(r)

    def min_peak(rows: list[ExperimentRecord]) -> float:
        per_side: dict[int, float] = {}
        for r in rows:
            per_side[r.side] = max(per_side.get(r.side, 0.0), r.marked_probability)
        return min(per_side.values())

    return max(by_c, key=lambda c: (min_peak(by_c[c]), -c))


def scaling_report(records: list[ExperimentRecord]) -> dict:
    """Bands and log-log fits of charged cost against the theory composites.

    Cross-algorithm improvement is judged on expected cost per success
    (charged steps divided by hit probability), which normalizes runs that
    stop at different success levels.
    """
    report: dict = {"schema": SUMMARY_SCHEMA, "algos": {}}
    by_algo: dict[str, list[ExperimentRecord]] = {}
    for r in records:
        by_algo.setdefault(r.algo, []).append(r)

    for algo, recs in sorted(by_algo.items()):
        if algo == "controlled":
            best_c = _best_c_delta(recs)
            recs = [r for r in recs if c_delta_of(r) == best_c]
        if len({r.side for r in recs}) < 3:
            raise ValueError(f"scaling report needs >= 3 distinct sides for {algo}")
        series = _series_for(recs)
        sides = sorted(series)
        costs = [series[s]["cost"] for s in sides]
        comps = [_composite(algo, series[s]["N"]) for s in sides]
        normalized = [c / comp for c, comp in zip(costs, comps)]
        eff = [series[s]["cost_per_success"] / comp for s, comp in zip(sides, comps)]
        entry = {
            "sides": sides,
            "composite": "sqrt(N)*ln(N)" if algo == "akr+qaa" else "sqrt(N*ln(N))",
            "points": [series[s] for s in sides],
            "cost_over_composite": normalized,
            "band": _band(normalized),
            "cost_per_success_over_composite": eff,
            "band_per_success": _band(eff),
            "fit": _loglog_fit(comps, costs),
        }
        if algo == "controlled":
            entry["c_delta"] = best_c
        report["algos"][algo] = entry

    if "akr+qaa" in report["algos"] and "controlled" in report["algos"]:
        qaa = {p["side"]: p for p in report["algos"]["akr+qaa"]["points"]}
        ctl = {p["side"]: p for p in report["algos"]["controlled"]["points"]}
        shared = sorted(set(qaa) & set(ctl))
        ratios = [
            qaa[s]["cost_per_success"] / ctl[s]["cost_per_success"] for s in shared
        ]
        report["ratio"] = {
            "sides": shared,
            "cost_per_success_ratio": ratios,
            "grows": bool(ratios and ratios[-1] > ratios[0]),
        }
    return report


def write_report(path: Path, report: dict) -> None:
    Path(path).write_text(json.dumps(report, indent=2) + "\n")
