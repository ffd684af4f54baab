"""Steady states E0-E4 and their local stability."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import DomainError, ModelParams, State, as_state, jac_kernel, jacobian, vector_field

__all__ = [
    "Equilibrium",
    "BoundaryStability",
    "RouthHurwitzReport",
    "boundary_equilibria",
    "boundary_stability",
    "classify",
    "solve_coexistence",
    "linear_coexistence",
    "routh_hurwitz",
    "jacobian_coefficients",
    "hurwitz_stable",
]

DEGENERATE_TOL = 1e-12
MARGINAL_TOL = 1e-10


@dataclass(frozen=True)
class Equilibrium:
    kind: str
    point: State | None
    feasible: bool
    stability: str = "not-assessed"  # stable | unstable | marginal | not-assessed
    note: str = ""


@dataclass(frozen=True)
class BoundaryStability:
    kind: str
    inequality: str
    lhs: tuple[float, ...]
    rhs: tuple[float, ...]
    inequality_holds: bool
    eigenvalues: np.ndarray = field(repr=False)
    stability: str = "not-assessed"


@dataclass(frozen=True)
class RouthHurwitzReport:
    V: tuple[float, ...]  # V1..V8
    sigma1: float
    sigma2: float
    sigma3: float
    hurwitz: bool
    # The same coefficients read off the analytic Jacobian, for cross-checking.
    jacobian_sigmas: tuple[float, float, float] = (np.nan, np.nan, np.nan)

    @property
    def margin(self) -> float:
        """sigma1*sigma2 - sigma3; positive iff the third Hurwitz condition holds."""
        return self.sigma1 * self.sigma2 - self.sigma3

    @property
    def consistent(self) -> bool:
        ours = np.array([self.sigma1, self.sigma2, self.sigma3])
        theirs = np.array(self.jacobian_sigmas)
        return bool(np.all(np.abs(ours - theirs) <= 1e-8 * (1.0 + np.abs(theirs))))


def classify(eigenvalues: np.ndarray) -> str:
    top = float(np.max(np.real(eigenvalues)))
    if top < -MARGINAL_TOL:
        return "stable"
    if top > MARGINAL_TOL:
        return "unstable"
    return "marginal"


def boundary_equilibria(p: ModelParams) -> list[Equilibrium]:
    """Closed-form E0, E1, E2, E3.

    E2 and E3 are reported infeasible (with ``point=None``) when their closed
    form divides by a zero rate.
    """
    out = [Equilibrium("E0", State(0.0, 0.0, 0.0), True,
                       "unstable" if p.b1 > 0 else "not-assessed",
                       "prey grows logistically along the invariant x-axis" if p.b1 > 0 else "")]

    x1 = p.b1 / p.a11
    out.append(_assessed("E1", State(x1, 0.0, 0.0), p))

    if p.a31 > 0 and p.a13 > 0:
        x2 = p.b3 / p.a31
        z2 = (p.b1 - p.a11 * x2) / p.a13
        out.append(_boundary("E2", x2, 0.0, z2, z2, p))
    else:
        out.append(Equilibrium("E2", None, False, note="a31 or a13 is zero"))

    if p.a21 > 0 and p.a12 > 0:
        x3 = p.b2 / p.a21
        y3 = (p.b1 - p.a11 * x3) / p.a12
        out.append(_boundary("E3", x3, y3, 0.0, y3, p))
    else:
        out.append(Equilibrium("E3", None, False, note="a21 or a12 is zero"))
    return out


def _boundary(kind, x, y, z, free, p):
    note = ""
    if abs(free) <= DEGENERATE_TOL:
        note = "degenerate: coincides with E1"
        if kind == "E2":
            z = 0.0
        else:
            y = 0.0
    elif free < 0:
        return Equilibrium(kind, State(x, y, z), False, note="negative component")
    return _assessed(kind, State(x, y, z), p, note)


def _assessed(kind, point, p, note=""):
    ev = np.linalg.eigvals(jacobian(point, p))
    return Equilibrium(kind, point, True, classify(ev), note)


def boundary_stability(p: ModelParams, e: Equilibrium) -> BoundaryStability:
    """Printed threshold conditions for E1-E3 next to the Jacobian spectrum.

    The classification is taken from the eigenvalues; the inequality is
    reported for comparison only.
    """
    if e.kind not in ("E1", "E2", "E3"):
        raise DomainError(f"boundary_stability applies to E1, E2, E3, not {e.kind}")
    if not e.feasible or e.point is None:
        raise DomainError(f"{e.kind} is not feasible for these parameters")
    x, y, z = e.point
    if e.kind == "E1":
        lhs = (p.a21 * p.b1, p.a31 * p.b1)
        rhs = (p.a11 * p.b2, p.a11 * p.b3)
        holds = lhs[0] < rhs[0] and lhs[1] < rhs[1]
        text = "a21*b1 < a11*b2 and a31*b1 < a11*b3"
    elif e.kind == "E2":
        lhs = (p.a31 * p.b2,)
        rhs = (p.a21 * p.b3,)
        holds = lhs[0] > rhs[0]
        text = "a31*b2 > a21*b3"
    else:
        threshold = p.a31 * x * x / (x + p.c * y) + p.a32 * y * y / (y + p.c * x)
        lhs = (p.b3,)
        rhs = (threshold,)
        holds = p.b3 > threshold
        text = "b3 > a31*x3^2/(x3+c*y3) + a32*y3^2/(y3+c*x3)"
    ev = np.linalg.eigvals(jacobian(e.point, p))
    return BoundaryStability(e.kind, text, lhs, rhs, bool(holds), ev, classify(ev))


# --- coexistence -------------------------------------------------------------


def _per_capita(s: np.ndarray, p: ModelParams) -> np.ndarray:
    x, y, z = s
    c = p.c
    fx = x / (x + c * y)
    fy = y / (y + c * x)
    return np.array([
        p.b1 - p.a11 * x - p.a12 * y - p.a13 * fx * z,
        -p.b2 + p.a21 * x - p.a23 * fy * z,
        -p.b3 + p.a31 * x * fx + p.a32 * y * fy,
    ])


def _per_capita_jac(s: np.ndarray, F: np.ndarray, pa: np.ndarray) -> np.ndarray:
    # f = diag(s) F  =>  DF = diag(1/s) (Df - diag(F))
    J = np.empty((3, 3))
    jac_kernel(s, pa, J)
    return (J - np.diag(F)) / s[:, None]


def linear_coexistence(p: ModelParams) -> np.ndarray | None:
    """Exact coexistence point of the switching-free (c = 0) system, or None."""
    M = np.array([[p.a11, p.a12, p.a13], [p.a21, 0.0, -p.a23], [p.a31, p.a32, 0.0]])
    try:
        s = np.linalg.solve(M, np.array([p.b1, p.b2, p.b3]))
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(s)):
        return None
    return s


def _residual_ok(s: np.ndarray, p: ModelParams) -> bool:
    r = np.linalg.norm(vector_field(s, p))
    return r <= 1e-10 * (1.0 + np.linalg.norm(s))


def _newton(s0: np.ndarray, p: ModelParams, pa: np.ndarray, max_iter: int = 100) -> np.ndarray | None:
    s = np.array(s0, dtype=float)
    F = _per_capita(s, p)
    fnorm = np.linalg.norm(F)
    for _ in range(max_iter):
        try:
            step = np.linalg.solve(_per_capita_jac(s, F, pa), -F)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(step)):
            return None
        small = np.linalg.norm(step) < 1e-12 * (1.0 + np.linalg.norm(s))
        if small and _residual_ok(s, p):
            return s
        lam = 1.0
        for _ in range(51):
            trial = s + lam * step
            if np.all(trial > 0):
                Ft = _per_capita(trial, p)
                ft = np.linalg.norm(Ft)
                if ft < (1.0 - 1e-4 * lam) * fnorm or ft == 0.0:
                    break
            lam *= 0.5
        else:
            # No decrease possible: either at machine precision or stuck.
            return s if _residual_ok(s, p) else None
        s, F, fnorm = trial, Ft, ft
        if fnorm == 0.0:
            return s
    return s if _residual_ok(s, p) else None


def _start_schedule(p: ModelParams, guess) -> list[np.ndarray]:
    starts = []
    if guess is not None:
        starts.append(np.array(as_state(guess), dtype=float))
    lin = linear_coexistence(p)
    if lin is not None and np.all(lin > 0):
        starts.append(lin)
    pts = [e.point for e in boundary_equilibria(p) if e.feasible and e.point is not None]
    starts.append(np.maximum(np.mean(np.array(pts, dtype=float), axis=0), 1e-2))
    rng = np.random.default_rng(20100)
    starts.extend(10.0 ** rng.uniform(-2.0, 2.0, size=(20, 3)))
    return starts


def solve_coexistence(p: ModelParams, guess=None) -> Equilibrium | None:
    """Strictly positive equilibrium E4, or None if none is found.

    For c = 0 the per-capita equations are linear and solved directly.
    Otherwise a damped Newton iteration on the per-capita equations is run
    from a fixed schedule of starting points; the first strictly positive
    root with small residual wins.
    """
    if p.c == 0.0:
        s = linear_coexistence(p)
        if s is None or not np.all(s > 0):
            return None
        return _e4(s, p)

    pa = p.as_array()
    for s0 in _start_schedule(p, guess):
        if not np.all(s0 > 0):
            continue
        s = _newton(s0, p, pa)
        if s is not None and np.all(s > 0) and _residual_ok(s, p):
            return _e4(s, p)
    return None


def _e4(s: np.ndarray, p: ModelParams) -> Equilibrium:
    point = State(*(float(v) for v in s))
    ev = np.linalg.eigvals(jacobian(point, p))
    return Equilibrium("E4", point, True, classify(ev))


# --- Routh-Hurwitz -------------------------------------------------------------


def jacobian_coefficients(J: np.ndarray) -> tuple[float, float, float]:
    """(-trace, sum of principal 2-minors, -det) of a 3x3 matrix."""
    minors = (
        J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        + J[0, 0] * J[2, 2] - J[0, 2] * J[2, 0]
        + J[1, 1] * J[2, 2] - J[1, 2] * J[2, 1]
    )
    return float(-np.trace(J)), float(minors), float(-np.linalg.det(J))


def hurwitz_stable(s1: float, s2: float, s3: float) -> bool:
    """Routh-Hurwitz test for lambda**3 + s1*lambda**2 + s2*lambda + s3."""
    return bool(s1 > 0 and s3 > 0 and s1 * s2 > s3)


def routh_hurwitz(p: ModelParams, e4) -> RouthHurwitzReport:
    """Characteristic-polynomial coefficients at a coexistence point via V1..V8."""
    x, y, z = as_state(e4)
    if min(x, y, z) <= 0:
        raise DomainError("routh_hurwitz needs a strictly positive point")
    c = p.c
    dx = x + c * y
    dy = y + c * x
    V1 = p.a11 * x + p.a13 * c * x * y * z / dx ** 2
    V2 = -p.a12 * x + p.a13 * c * x * x * z / dx ** 2
    V3 = p.a13 * x * x / dx
    V4 = p.a21 * y + p.a23 * c * y * y * z / dy ** 2
    V5 = p.a23 * c * x * y * z / dy ** 2
    V6 = p.a23 * y * y / dy
    V7 = (p.a31 * x * x * z + 2 * p.a31 * c * x * y * z) / dx ** 2 - p.a32 * c * y * y * z / dy ** 2
    V8 = -p.a31 * c * x * x * z / dx ** 2 + (p.a32 * y * y * z + 2 * p.a32 * c * x * y * z) / dy ** 2

    s1 = V1 + V5
    s2 = V1 * V5 - V2 * V4 + V3 * V7 + V6 * V8
    s3 = V1 * V6 * V8 + V2 * V6 * V7 + V3 * V4 * V8 + V3 * V5 * V7
    return RouthHurwitzReport(
        (V1, V2, V3, V4, V5, V6, V7, V8), s1, s2, s3, hurwitz_stable(s1, s2, s3),
        jacobian_coefficients(jacobian((x, y, z), p)),
    )
