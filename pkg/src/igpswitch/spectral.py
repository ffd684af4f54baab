"""Characteristic-cubic analysis at the coexistence equilibrium.

The cubic is written ``lam**3 + 3*A1*lam**2 + 3*A2*lam + A3`` with
``3*A1 = sigma1``, ``3*A2 = sigma2``, ``A3 = sigma3``.  Shifting
``lam = rho - A1`` gives the depressed form ``rho**3 + 3*H*rho + G`` which is
solved in closed form (Cardano).  The saddle-focus test then looks at the real
root ``gamma`` and the complex pair ``alpha +/- i*beta``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

__all__ = ["CubicAnalysis", "SilnikovVerdict", "cardano_roots", "silnikov_check"]

OMEGA = complex(-0.5, math.sqrt(3.0) / 2.0)
OMEGA2 = OMEGA.conjugate()

# |Delta| below this fraction of max(G**2, |4 H**3|) counts as a repeated root.
DEGENERATE_RTOL = 1e-12


@dataclass(frozen=True)
class CubicAnalysis:
    A1: float
    A2: float
    A3: float
    H: float
    G: float
    Delta: float
    R: complex
    roots: tuple[complex, complex, complex]
    degenerate: bool = False
    residuals: tuple[float, float, float] = field(default=(0.0, 0.0, 0.0), repr=False)

    @property
    def n_real(self) -> int:
        return sum(1 for r in self.roots if r.imag == 0.0)

    @property
    def H_over_R(self) -> complex:
        return self.H / self.R if self.R != 0 else 0j


@dataclass(frozen=True)
class SilnikovVerdict:
    gamma: float | None
    alpha: float | None
    beta: float | None
    # None marks a condition that does not apply (no complex pair).
    conditions: dict[str, bool | None]
    expression_form: dict[str, float | bool | None]
    chaotic: bool
    marginal: bool = False
    forms_agree: bool | None = None


def _poly(r: complex, a1: float, a2: float, a3: float) -> complex:
    return ((r + 3.0 * a1) * r + 3.0 * a2) * r + a3


def cardano_roots(sigma1: float, sigma2: float, sigma3: float) -> CubicAnalysis:
    """Roots of ``lam**3 + sigma1*lam**2 + sigma2*lam + sigma3`` by Cardano's formula.

    Returns the real root first.  When all three roots are real they are sorted
    ascending; otherwise the complex pair follows with the positive imaginary
    part first.  ``R`` is the cube root ``(-G/2 + sqrt(Delta)/2) ** (1/3)``
    (real branch when Delta >= 0, principal branch when Delta < 0).
    """
    for v in (sigma1, sigma2, sigma3):
        if not math.isfinite(v):
            raise ValueError(f"cubic coefficients must be finite, got {v!r}")
    a1 = sigma1 / 3.0
    a2 = sigma2 / 3.0
    a3 = float(sigma3)
    h = a2 - a1 * a1
    g = a3 - 3.0 * a1 * a2 + 2.0 * a1 ** 3
    delta = g * g + 4.0 * h ** 3

    scale = max(g * g, abs(4.0 * h ** 3))
    degenerate = scale == 0.0 or abs(delta) <= DEGENERATE_RTOL * scale

    if scale == 0.0:
        # H = G = 0: triple root at -A1.
        R: complex = 0.0
        rhos = [0.0, 0.0, 0.0]
    elif degenerate:
        # Double root: rho**3 + 3H rho + G = (rho - 2u)(rho + u)**2 with u**3 = -G/2.
        u = float(_real_cbrt(-g / 2.0))
        R = u
        rhos = [2.0 * u, -u, -u]
    elif delta > 0.0:
        sq = math.sqrt(delta)
        # The two cube roots multiply to -H.  Take the one free of cancellation
        # and recover the other from the product.
        if g > 0.0:
            v = _real_cbrt((-g - sq) / 2.0)
            R = -h / v if h != 0.0 else v
        else:
            R = _real_cbrt((-g + sq) / 2.0)
            if R == 0.0:
                R = _real_cbrt((-g - sq) / 2.0)
        hr = h / R
        s = R - hr
        im = math.sqrt(3.0) / 2.0 * abs(R + hr)
        rhos = [s, complex(-s / 2.0, im), complex(-s / 2.0, -im)]
    else:
        # Three distinct real roots (H < 0): trigonometric form.
        m = math.sqrt(-h)
        cos3 = max(-1.0, min(1.0, -g / (2.0 * m ** 3)))
        theta = math.acos(cos3)
        R = cmath.rect(m, theta / 3.0)
        rhos = sorted(2.0 * m * math.cos((theta + 2.0 * math.pi * k) / 3.0) for k in range(3))

    roots = []
    for rho in rhos:
        lam = rho - a1
        roots.append(complex(lam) if isinstance(lam, complex) else complex(lam, 0.0))
    if all(r.imag == 0.0 for r in roots):
        roots.sort(key=lambda r: r.real)
    residuals = tuple(abs(_poly(r, a1, a2, a3)) for r in roots)
    return CubicAnalysis(a1, a2, a3, h, g, delta, R, tuple(roots), degenerate, residuals)


def _real_cbrt(v: float) -> float:
    return math.copysign(abs(v) ** (1.0 / 3.0), v)


def silnikov_check(analysis: CubicAnalysis) -> SilnikovVerdict:
    """Saddle-focus (Sil'nikov) eigenvalue conditions for a characteristic cubic.

    Evaluates the conditions directly on the eigenvalues (beta != 0,
    gamma*alpha < 0, |gamma| > |alpha|) and, independently, on the
    Cardano quantities R, H, A1, A3.
    """
    a = analysis
    one_real = not a.degenerate and a.Delta > 0.0
    if not one_real:
        na = {"beta_nonzero": None, "gamma_alpha_opposite": None, "gamma_dominates": None}
        expr = {
            "Delta": a.Delta,
            "Delta_pos": a.Delta > 0.0 and not a.degenerate,
            "RplusHR": None,
            "RplusHR_nonzero": None,
            "magnitude_gap": None,
            "sign_branch_value": None,
            "sign_branch": None,
        }
        return SilnikovVerdict(None, None, None, na, expr, False, marginal=a.degenerate)

    R = float(a.R.real) if isinstance(a.R, complex) else float(a.R)
    hr = a.H / R
    gamma = a.roots[0].real
    alpha = a.roots[1].real
    beta = abs(a.roots[1].imag)
    cond = {
        "beta_nonzero": beta != 0.0,
        "gamma_alpha_opposite": gamma * alpha < 0.0,
        "gamma_dominates": abs(gamma) > abs(alpha),
    }
    chaotic = all(cond.values())

    branch = R - hr + 2.0 * a.A1
    gap = abs(R - hr - a.A1) - 0.5 * abs(branch)
    sign_ok = (branch > 0.0 and a.A3 < 0.0) or (branch < 0.0 and a.A3 > 0.0)
    expr = {
        "Delta": a.Delta,
        "Delta_pos": True,
        "RplusHR": R + hr,
        "RplusHR_nonzero": (R + hr) != 0.0,
        "magnitude_gap": gap,
        "sign_branch_value": branch,
        "sign_branch": sign_ok,
    }
    expr_verdict = expr["RplusHR_nonzero"] and gap > 0.0 and sign_ok
    return SilnikovVerdict(
        gamma, alpha, beta, cond, expr, chaotic, forms_agree=(expr_verdict == chaotic)
    )
