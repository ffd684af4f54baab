"""Bifurcation sweeps, attractor extrema and largest Lyapunov exponents."""

from __future__ import annotations

import csv
import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .integrate import IntegrationError, SolverOptions, Trajectory, integrate, integrate_with_tangent
from .model import REFERENCE_PARAMS, PARAM_NAMES, DomainError, ModelParams

__all__ = [
    "SweepSpec",
    "SweepRecord",
    "Threshold",
    "NoThresholdError",
    "attractor_extrema",
    "largest_lyapunov",
    "classify_regime",
    "evaluate_point",
    "sweep",
    "locate_threshold",
    "write_sweep_csv",
]

VARIABLES = ("x", "y", "z")
DEFAULT_V0 = (1.0, 1.0, 1.0)


class NoThresholdError(LookupError):
    """No verdict change of the requested kind along the grid."""


@dataclass(frozen=True)
class SweepSpec:
    param: str
    grid: tuple[float, ...]
    base: ModelParams = REFERENCE_PARAMS
    initial: tuple[float, float, float] = (1.0, 1.0, 1.0)
    transient: float = 2000.0
    sample: float = 1000.0
    opts: SolverOptions = field(default_factory=SolverOptions)
    lle_time: float | None = None  # defaults to transient + sample
    lle_threshold: float = 0.01
    spread_tol: float = 1e-4

    def __post_init__(self):
        if self.param not in PARAM_NAMES:
            raise DomainError(f"unknown sweep parameter {self.param!r}")
        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise DomainError("sweep grid is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise DomainError("sweep grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        if not (self.transient > 0 and self.sample > 0):
            raise DomainError("transient and sample times must be positive")
        if self.lle_time is not None and not self.lle_time > 0:
            raise DomainError("lle_time must be positive")

    @property
    def total_time(self) -> float:
        return self.transient + self.sample

    def params_at(self, value: float) -> ModelParams:
        return self.base.replace(**{self.param: value})


@dataclass(frozen=True)
class SweepRecord:
    value: float
    extrema: dict[str, dict[str, np.ndarray]] | None
    lle: float
    verdict: str  # stable-point | periodic | chaotic | failed
    error: str | None = None

    def spread(self, var: str) -> float:
        return _spread(self.extrema[var])


@dataclass(frozen=True)
class Threshold:
    lo: float
    hi: float
    iterations: int
    probes: tuple[SweepRecord, ...] = ()

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)


def attractor_extrema(traj: Trajectory, transient: float) -> dict[str, dict[str, np.ndarray]]:
    """Strict local maxima and minima of each variable after ``transient``."""
    keep = traj.times >= transient
    if not np.any(keep):
        raise DomainError(f"no samples after transient {transient}")
    window = traj.states[keep]
    out = {}
    for j, var in enumerate(VARIABLES):
        v = window[:, j]
        mid = v[1:-1]
        out[var] = {
            "max": mid[(mid > v[:-2]) & (mid > v[2:])].copy(),
            "min": mid[(mid < v[:-2]) & (mid < v[2:])].copy(),
        }
    return out


def largest_lyapunov(p: ModelParams, s0: Sequence[float], total_time: float = 5000.0,
                     opts: SolverOptions | None = None, *, transient_fraction: float = 0.2,
                     v0: Sequence[float] = DEFAULT_V0, renorm_tau: float = 1.0) -> float:
    """Benettin estimate of the largest Lyapunov exponent.

    Renormalisation intervals starting before ``transient_fraction * total_time``
    are discarded.
    """
    if not 0.0 <= transient_fraction < 1.0:
        raise ValueError("transient_fraction must be in [0, 1)")
    opts = dataclasses.replace(opts or SolverOptions(), sample_dt=max(1.0, renorm_tau))
    _, log = integrate_with_tangent(p, s0, v0, total_time, opts, renorm_tau=renorm_tau)
    return log.exponent(transient_fraction * total_time)


def classify_regime(extrema, lle: float, lle_threshold: float = 0.01,
                    spread_tol: float = 1e-4) -> str:
    if lle > lle_threshold:
        return "chaotic"
    flat = all(_spread(extrema[v]) < spread_tol for v in VARIABLES)
    if flat and lle < -lle_threshold:
        return "stable-point"
    return "periodic"


def _spread(ex) -> float:
    vals = np.concatenate([ex["max"], ex["min"]])
    return float(vals.max() - vals.min()) if len(vals) > 1 else 0.0


def evaluate_point(spec: SweepSpec, value: float) -> SweepRecord:
    """Extrema, LLE and verdict at one parameter value; failures are recorded, not raised."""
    try:
        p = spec.params_at(value)
        traj = integrate(p, spec.initial, spec.total_time, spec.opts)
        ex = attractor_extrema(traj, spec.transient)
        lle = largest_lyapunov(p, spec.initial, spec.lle_time or spec.total_time, spec.opts)
    except (IntegrationError, DomainError, ValueError) as exc:
        return SweepRecord(float(value), None, math.nan, "failed", str(exc))
    verdict = classify_regime(ex, lle, spec.lle_threshold, spec.spread_tol)
    return SweepRecord(float(value), ex, lle, verdict)


def _evaluate_task(args):
    return evaluate_point(*args)


def sweep(spec: SweepSpec, jobs: int = 1) -> list[SweepRecord]:
    """Evaluate every grid value independently; results come back in grid order."""
    tasks = [(spec, v) for v in spec.grid]
    if jobs <= 1 or len(tasks) == 1:
        return [evaluate_point(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_evaluate_task, tasks))


def _before_side(transition: str) -> Callable[[SweepRecord], bool]:
    if transition == "chaos":
        return lambda r: r.verdict == "chaotic"
    if transition == "stability":
        return lambda r: r.verdict != "stable-point"
    raise ValueError(f"unknown transition kind {transition!r}")


def locate_threshold(spec: SweepSpec, lle_threshold: float | None = None, *,
                     records: Sequence[SweepRecord] | None = None,
                     transition: str = "stability", max_iter: int = 12, jobs: int = 1,
                     evaluate: Callable[[float], SweepRecord] | None = None) -> Threshold:
    """Bracket the last regime change along the sweep grid and refine it by bisection.

    ``transition="chaos"`` looks for the last chaotic -> non-chaotic change;
    ``transition="stability"`` for the last change from any oscillating regime
    into a stable point.  ``evaluate`` replaces the per-value computation
    (default: :func:`evaluate_point` on ``spec``).
    """
    if lle_threshold is not None:
        spec = dataclasses.replace(spec, lle_threshold=lle_threshold)
    if records is None:
        records = [evaluate(v) for v in spec.grid] if evaluate else sweep(spec, jobs)
    if evaluate is None:
        def evaluate(v, _spec=spec):
            return evaluate_point(_spec, v)
    before = _before_side(transition)

    idx = None
    for i in range(len(records) - 1):
        a, b = records[i], records[i + 1]
        if "failed" in (a.verdict, b.verdict):
            continue
        if before(a) and not before(b):
            idx = i
    if idx is None:
        raise NoThresholdError(f"no {transition} threshold in range")

    lo, hi = records[idx].value, records[idx + 1].value
    probes = []
    it = 0
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        rec = evaluate(mid)
        probes.append(rec)
        if rec.verdict == "failed":
            it -= 1
            break
        if before(rec):
            lo = mid
        else:
            hi = mid
    return Threshold(lo, hi, it, tuple(probes))


def write_sweep_csv(spec: SweepSpec, records: Sequence[SweepRecord], extrema_path, summary_path) -> None:
    """Write the extrema table and the per-value summary table."""
    with open(extrema_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["param", "value", "variable", "extremum_kind", "extremum_value"])
        for r in records:
            if r.extrema is None:
                continue
            for var in VARIABLES:
                for kind in ("max", "min"):
                    for v in r.extrema[var][kind]:
                        w.writerow([spec.param, f"{r.value:.17g}", var, kind, f"{v:.17g}"])
    with open(summary_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["param", "value", "lle", "verdict"])
        for r in records:
            w.writerow([spec.param, f"{r.value:.17g}", f"{r.lle:.17g}", r.verdict])
