"""Adaptive Dormand-Prince 5(4) integration of the food-web model.

The stepping loop is compiled with numba.  Besides the model it can integrate
a constant-coefficient linear field ``s' = A s`` (``FIELD_LINEAR``, with the
nine entries of A passed as the parameter vector), whose exact solution is
known; this is how the tangent-flow machinery is checked.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

from .model import ModelParams, as_state, jac_kernel, rhs_kernel

__all__ = [
    "SolverOptions",
    "Trajectory",
    "TangentLog",
    "IntegrationError",
    "integrate",
    "integrate_with_tangent",
    "write_trajectory_csv",
]


class IntegrationError(RuntimeError):
    def __init__(self, message: str, t_reached: float):
        super().__init__(f"{message} (t = {t_reached:.17g})")
        self.t_reached = t_reached


@dataclass(frozen=True)
class SolverOptions:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_step: float = 0.1
    initial_step: float = 1e-3
    max_steps: int = 10_000_000
    sample_dt: float = 0.01

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step", "initial_step", "max_steps", "sample_dt"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"solver option {name} must be positive, got {v!r}")
        if self.rel_tol < 1e-14:
            raise ValueError("rel_tol must be >= 1e-14")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (n, 3)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


@dataclass(frozen=True)
class TangentLog:
    """ln|v| recorded just before each renormalisation of the tangent vector."""

    times: np.ndarray  # end time of each renormalisation interval
    logs: np.ndarray
    v_final: np.ndarray

    def exponent(self, t_from: float = 0.0) -> float:
        """Average log-growth rate over the intervals starting at or after ``t_from``."""
        starts = np.concatenate(([0.0], self.times[:-1]))
        keep = starts >= t_from - 1e-9
        if not np.any(keep):
            raise ValueError("no renormalisation intervals after t_from")
        span = self.times[keep][-1] - starts[keep][0]
        return float(np.sum(self.logs[keep]) / span)


# --- Dormand-Prince tableau ------------------------------------------------

C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# 5th-order minus embedded 4th-order weights
E1, E3, E4, E5, E6, E7 = 71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40
# dense output (Hairer & Wanner, contd5)
D1, D3, D4 = -12715105075 / 11282082432, 87487479700 / 32700410799, -10690763975 / 1880347072
D5, D6, D7 = 701980252875 / 199316789632, -1453857185 / 822651844, 69997945 / 29380423

OK, ERR_MAX_STEPS, ERR_UNDERFLOW, ERR_NONFINITE = 0, 1, 2, 3


FIELD_MODEL, FIELD_LINEAR = 0, 1


@njit(cache=True)
def _linear_rhs(s, a, out):
    for i in range(3):
        out[i] = a[3 * i] * s[0] + a[3 * i + 1] * s[1] + a[3 * i + 2] * s[2]


@njit(cache=True)
def _linear_jac(s, a, out):
    for i in range(3):
        for j in range(3):
            out[i, j] = a[3 * i + j]


@njit(cache=True)
def _eval(field, y, p, tangent, J, out):
    if field == FIELD_MODEL:
        rhs_kernel(y[:3], p, out[:3])
        if tangent:
            jac_kernel(y[:3], p, J)
    else:
        _linear_rhs(y[:3], p, out[:3])
        if tangent:
            _linear_jac(y[:3], p, J)
    if tangent:
        for i in range(3):
            out[3 + i] = J[i, 0] * y[3] + J[i, 1] * y[4] + J[i, 2] * y[5]


@njit(cache=True)
def _dopri(field, p, y0, tangent, t_end, rtol, atol, max_step, h0, max_steps,
           sample_dt, renorm_tau):
    n = 6 if tangent else 3
    y = y0.copy()
    J = np.empty((3, 3))
    k1 = np.empty(n); k2 = np.empty(n); k3 = np.empty(n); k4 = np.empty(n)
    k5 = np.empty(n); k6 = np.empty(n); k7 = np.empty(n)
    ys = np.empty(n); yn = np.empty(n); r5 = np.empty(n)

    n_grid = int(math.floor(t_end / sample_dt + 1e-9)) + 1
    extra = 1 if (n_grid - 1) * sample_dt < t_end * (1 - 1e-12) else 0
    times = np.empty(n_grid + extra)
    states = np.empty((n_grid + extra, 3))
    times[0] = 0.0
    states[0, :] = y[:3]
    k_samp = 1

    n_log = int(math.ceil(t_end / renorm_tau - 1e-9)) if tangent else 0
    logs = np.empty(max(n_log, 1))
    log_times = np.empty(max(n_log, 1))
    k_log = 0

    if tangent:
        nv = math.sqrt(y[3] ** 2 + y[4] ** 2 + y[5] ** 2)
        for i in range(3, 6):
            y[i] /= nv
        t_renorm = min(renorm_tau, t_end)
    else:
        t_renorm = t_end

    t = 0.0
    h = min(h0, max_step)
    facold = 1e-4
    last_rejected = False
    status = OK
    steps = 0
    _eval(field, y, p, tangent, J, k1)

    while t < t_end:
        if steps >= max_steps:
            status = ERR_MAX_STEPS
            break
        if h < 1e-14:
            status = ERR_UNDERFLOW
            break
        t_stop = min(t_end, t_renorm)
        hs = h
        hit = False
        if t + hs >= t_stop - 1e-12 * max(1.0, t_stop):
            hs = t_stop - t
            hit = True
        steps += 1

        for i in range(n):
            ys[i] = y[i] + hs * A21 * k1[i]
        _eval(field, ys, p, tangent, J, k2)
        for i in range(n):
            ys[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i])
        _eval(field, ys, p, tangent, J, k3)
        for i in range(n):
            ys[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
        _eval(field, ys, p, tangent, J, k4)
        for i in range(n):
            ys[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
        _eval(field, ys, p, tangent, J, k5)
        for i in range(n):
            ys[i] = y[i] + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i])
        _eval(field, ys, p, tangent, J, k6)
        for i in range(n):
            yn[i] = y[i] + hs * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i])
        _eval(field, yn, p, tangent, J, k7)

        # error norm on the population components only; the tangent rides along
        err = 0.0
        for i in range(3):
            e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
            sk = atol + rtol * max(abs(y[i]), abs(yn[i]))
            err += (e / sk) ** 2
        err = math.sqrt(err / 3.0)
        if not math.isfinite(err):
            if hs < 1e-14:
                status = ERR_NONFINITE
                break
            h = hs * 0.1
            last_rejected = True
            continue

        fac11 = err ** 0.17
        fac = fac11 / facold ** 0.04
        fac = max(0.1, min(5.0, fac / 0.9))
        h_new = hs / fac

        if err > 1.0:
            h = hs / min(5.0, fac11 / 0.9)
            last_rejected = True
            continue

        # nonnegative orthant: clamp tiny undershoots, otherwise retry smaller
        neg = False
        clamped = False
        for i in range(3):
            if yn[i] < 0.0:
                if yn[i] >= -atol:
                    yn[i] = 0.0
                    clamped = True
                else:
                    neg = True
        if neg:
            h = hs * 0.5
            last_rejected = True
            continue
        if clamped:
            _eval(field, yn, p, tangent, J, k7)

        facold = max(err, 1e-4)
        t_new = t_stop if hit else t + hs

        # dense output for the sample grid inside (t, t_new]
        while k_samp < n_grid and k_samp * sample_dt <= t_new * (1 + 1e-14):
            ts = k_samp * sample_dt
            theta = (ts - t) / hs
            th1 = 1.0 - theta
            for i in range(3):
                dy = yn[i] - y[i]
                bspl = hs * k1[i] - dy
                r5[i] = hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
                val = y[i] + theta * (dy + th1 * (bspl + theta * (dy - hs * k7[i] - bspl + th1 * r5[i])))
                states[k_samp, i] = max(val, 0.0)
            times[k_samp] = ts
            k_samp += 1

        for i in range(n):
            y[i] = yn[i]
            k1[i] = k7[i]
        t = t_new

        if tangent and hit and t >= t_renorm:
            nv = math.sqrt(y[3] ** 2 + y[4] ** 2 + y[5] ** 2)
            logs[k_log] = math.log(nv)
            log_times[k_log] = t
            k_log += 1
            for i in range(3, 6):
                y[i] /= nv
            for i in range(3, 6):
                k1[i] /= nv
            t_renorm = min((k_log + 1) * renorm_tau, t_end)

        h = min(h_new, max_step)
        if last_rejected:
            h = min(h, hs)
        last_rejected = False

    if status == OK and extra == 1:
        times[k_samp] = t_end
        states[k_samp, :] = y[:3]
        k_samp += 1
    return status, t, steps, times[:k_samp], states[:k_samp], logs[:k_log], log_times[:k_log], y


_MESSAGES = {
    ERR_MAX_STEPS: "step budget exceeded",
    ERR_UNDERFLOW: "step size underflow",
    ERR_NONFINITE: "non-finite solution",
}


def _run(p, s0, t_end, opts, v0=None, renorm_tau=1.0, field=FIELD_MODEL, params=None):
    if not (math.isfinite(t_end) and t_end > 0):
        raise ValueError(f"t_end must be positive, got {t_end!r}")
    opts = opts or SolverOptions()
    tangent = v0 is not None
    y0 = np.empty(6 if tangent else 3)
    y0[:3] = as_state(s0)
    if tangent:
        v = np.asarray(v0, dtype=float)
        if v.shape != (3,) or not np.all(np.isfinite(v)) or not np.any(v != 0):
            raise ValueError("tangent vector must be a finite nonzero 3-vector")
        y0[3:] = v
    pa = p.as_array() if params is None else np.asarray(params, dtype=float)
    args = (pa, y0, tangent, float(t_end), opts.rel_tol, opts.abs_tol, opts.max_step,
        opts.initial_step, int(opts.max_steps), opts.sample_dt, float(renorm_tau))
    out = _dopri(field, *args)
    status, t, _, times, states, logs, log_times, y = out
    if status != OK:
        raise IntegrationError(_MESSAGES[status], float(t))
    return Trajectory(times, states), logs, log_times, y


def integrate(p: ModelParams, s0: Sequence[float], t_end: float,
              opts: SolverOptions | None = None) -> Trajectory:
    """Integrate from ``s0`` over [0, t_end], sampled every ``opts.sample_dt``."""
    traj, *_ = _run(p, s0, t_end, opts)
    return traj


def integrate_with_tangent(p: ModelParams, s0: Sequence[float], v0: Sequence[float],
                           t_end: float, opts: SolverOptions | None = None,
                           renorm_tau: float = 1.0) -> tuple[Trajectory, TangentLog]:
    """Integrate the state together with the linearised flow ``v' = J(s) v``.

    ``v`` is normalised at t = 0 and renormalised every ``renorm_tau``;
    ``ln|v|`` is logged just before each renormalisation.
    """
    if not renorm_tau > 0:
        raise ValueError("renorm_tau must be positive")
    traj, logs, log_times, y = _run(p, s0, t_end, opts, v0=v0, renorm_tau=renorm_tau)
    return traj, TangentLog(log_times, logs, y[3:].copy())


def write_trajectory_csv(traj: Trajectory, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "x", "y", "z"])
        for t, (x, y, z) in zip(traj.times, traj.states):
            w.writerow([f"{t:.17g}", f"{x:.17g}", f"{y:.17g}", f"{z:.17g}"])
