"""Three-species intraguild predation model with top-predator feeding switching.

The top predator z eats both the bottom prey x and the intermediate predator y.
Its attack rate on each prey is damped by the relative abundance of the other
prey through the switching factor ``1 / (1 + c * other / self)``.  The
switching terms are evaluated in the equivalent rational form
``u**2 / (u + c*w)``, which is finite on the coordinate planes; only the line
x = y = 0 needs special treatment.
"""

from __future__ import annotations

import dataclasses
import math
from typing import NamedTuple, Sequence

import numpy as np
from numba import njit

__all__ = [
    "DomainError",
    "ModelParams",
    "State",
    "Derivative",
    "REFERENCE_PARAMS",
    "vector_field",
    "jacobian",
    "as_state",
]

# Order of the parameter vector handed to the compiled kernels.
PARAM_NAMES = ("b1", "b2", "b3", "c", "a11", "a12", "a13", "a21", "a23", "a31", "a32")


class DomainError(ValueError):
    """Input outside the domain where an operation is defined."""


@dataclasses.dataclass(frozen=True)
class ModelParams:
    b1: float = 5.0
    b2: float = 1.0
    b3: float = 1.25
    c: float = 1.0
    a11: float = 0.4
    a12: float = 1.0
    a13: float = 1.5
    a21: float = 1.0
    a23: float = 1.0
    a31: float = 0.1
    a32: float = 1.0

    def __post_init__(self):
        for name in PARAM_NAMES:
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0:
                raise DomainError(f"parameter {name} must be finite and >= 0, got {value!r}")
            object.__setattr__(self, name, value)
        if self.a11 <= 0:
            raise DomainError("a11 must be > 0 (prey carrying capacity b1/a11)")

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in PARAM_NAMES], dtype=np.float64)

    def as_dict(self) -> dict[str, float]:
        return {n: getattr(self, n) for n in PARAM_NAMES}


#: Reference parameter set (c = 1, a13 = 1.5).
REFERENCE_PARAMS = ModelParams()


class State(NamedTuple):
    x: float
    y: float
    z: float


class Derivative(NamedTuple):
    dx: float
    dy: float
    dz: float


def as_state(s: Sequence[float] | State) -> State:
    """Validate a population triple and return it as a :class:`State`."""
    if len(s) != 3:
        raise DomainError(f"state must have 3 components, got {len(s)}")
    x, y, z = (float(v) for v in s)
    for name, v in zip("xyz", (x, y, z)):
        if not math.isfinite(v):
            raise DomainError(f"state component {name} is not finite: {v!r}")
        if v < 0:
            raise DomainError(f"state component {name} is negative: {v!r}")
    return State(x, y, z)


# --- compiled kernels ------------------------------------------------------
# p = [b1, b2, b3, c, a11, a12, a13, a21, a23, a31, a32]


@njit(cache=True)
def _switch(u, w, c):
    """u**2/(u + c*w) and its partials with respect to u and w.

    Zero (with zero partials) where the denominator vanishes, i.e. u = 0 and
    c*w = 0.  For c = 0 the term reduces to u exactly.
    """
    if c == 0.0:
        return u, 1.0, 0.0
    d = u + c * w
    if d == 0.0:
        return 0.0, 0.0, 0.0
    # r = u/d lies in [0, 1]; working with it avoids underflow in d**2
    r = u / d
    return u * r, r * (2.0 - r), -c * r * r


@njit(cache=True)
def rhs_kernel(s, p, out):
    x = s[0]
    y = s[1]
    z = s[2]
    c = p[3]
    gx, _, _ = _switch(x, y, c)
    gy, _, _ = _switch(y, x, c)
    out[0] = (p[0] - p[4] * x) * x - p[5] * x * y - p[6] * gx * z
    out[1] = -p[1] * y + p[7] * x * y - p[8] * gy * z
    out[2] = -p[2] * z + p[9] * gx * z + p[10] * gy * z


@njit(cache=True)
def jac_kernel(s, p, out):
    x = s[0]
    y = s[1]
    z = s[2]
    c = p[3]
    gx, gx_x, gx_y = _switch(x, y, c)
    gy, gy_y, gy_x = _switch(y, x, c)
    out[0, 0] = p[0] - 2.0 * p[4] * x - p[5] * y - p[6] * z * gx_x
    out[0, 1] = -p[5] * x - p[6] * z * gx_y
    out[0, 2] = -p[6] * gx
    out[1, 0] = p[7] * y - p[8] * z * gy_x
    out[1, 1] = -p[1] + p[7] * x - p[8] * z * gy_y
    out[1, 2] = -p[8] * gy
    out[2, 0] = p[9] * z * gx_x + p[10] * z * gy_x
    out[2, 1] = p[9] * z * gx_y + p[10] * z * gy_y
    out[2, 2] = -p[2] + p[9] * gx + p[10] * gy


# --- public API ------------------------------------------------------------


def vector_field(s: Sequence[float] | State, p: ModelParams) -> Derivative:
    """Right-hand side of the switched food-web model at state ``s``.

    On the line x = y = 0 every predation term is defined as 0, so the result
    there is (0, 0, -b3*z); at the origin this is (0, 0, 0).
    """
    st = np.array(as_state(s), dtype=np.float64)
    out = np.empty(3)
    rhs_kernel(st, p.as_array(), out)
    return Derivative(float(out[0]), float(out[1]), float(out[2]))


def jacobian(s: Sequence[float] | State, p: ModelParams) -> np.ndarray:
    """Analytic 3x3 Jacobian of :func:`vector_field`.

    Raises :class:`DomainError` on the singular line x = y = 0 (for c > 0),
    where the switching terms are not differentiable.
    """
    st = as_state(s)
    if st.x == 0.0 and st.y == 0.0 and p.c > 0.0:
        raise DomainError("Jacobian undefined on the singular line x = y = 0")
    out = np.empty((3, 3))
    jac_kernel(np.array(st, dtype=np.float64), p.as_array(), out)
    return out
