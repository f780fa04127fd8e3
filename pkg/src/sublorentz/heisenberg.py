"""Geodesics of the Lorentzian Heisenberg group.

Geodesics through the origin are projections of solutions of the
Hamiltonian system with symbol

    H = (-xi^2 + eta^2)/2 - (-x^2 + y^2) th^2 / 8 + (-y xi - x eta) th / 2.

The center momentum th is constant, the reduced velocity equations are
linear, and everything integrates in closed form.  With u = th * t,

    xdot(t) =  vx cosh(u) - vy sinh(u)
    ydot(t) = -vx sinh(u) + vy cosh(u)
    x(t) = (vx sinh(u) - vy (cosh(u) - 1)) / th
    y(t) = (vy sinh(u) - vx (cosh(u) - 1)) / th
    z(t) = n2 / (2 th^2) * (u - sinh(u)),     n2 = -vx^2 + vy^2.

The momentum is kept with its sign; for th > 0 these reduce to the usual
|th| form, and th < 0 mirrors z.  The speed Q(v, v) = n2 is constant, so
the causal character never changes along a geodesic.

Two-point connection: an endpoint (x, y, z) at time 1 determines th through
the strictly decreasing ratio function

    endpoint_ratio(tau) = tau / sinh(tau)^2 - coth(tau) = 4 z / (y^2 - x^2)

at tau = th / 2 (limits +-1 at -+infinity, so exactly one solution exists
iff the target ratio lies in (-1, 1)), and then the initial velocity by
inverting the time-1 coordinate map.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, unique

import numpy as np

from .groups import Group, GroupPoint, heisenberg_point
from .paths import GeodesicPath, build_path

__all__ = [
    "HeisIVP",
    "HeisTarget",
    "TargetClass",
    "NoSolutionError",
    "UnreachableTargetError",
    "endpoint_ratio",
    "endpoint_ratio_derivative",
    "solve_endpoint_ratio",
    "shoot",
    "shoot_arrays",
    "sample_path",
    "classify_target",
    "connect",
    "geodesic_length",
    "hamiltonian",
    "hamiltonian_rhs",
    "covector_from_velocity",
    "velocity_from_covector",
]


class NoSolutionError(ValueError):
    """The ratio equation has no solution (|ratio| >= 1)."""


class UnreachableTargetError(ValueError):
    """No geodesic from the origin reaches the requested endpoint."""


# --- the monotone ratio function --------------------------------------------

# Taylor coefficients of tau/sinh(tau)^2 - coth(tau) (odd powers 1, 3, ..., 13).
_RATIO_SERIES = (
    -2.0 / 3.0,
    4.0 / 45.0,
    -4.0 / 315.0,
    8.0 / 4725.0,
    -4.0 / 18711.0,
    5528.0 / 212837625.0,
    -8.0 / 2606175.0,
)

_SERIES_WINDOW = 0.2


def endpoint_ratio(tau: float) -> float:
    """tau / sinh(tau)^2 - coth(tau); odd, strictly decreasing from 1 to -1."""
    t = float(tau)
    if abs(t) < _SERIES_WINDOW:
        # near 0 both terms blow up like 1/tau; the series avoids the cancellation
        t2 = t * t
        acc = 0.0
        for c in reversed(_RATIO_SERIES):
            acc = acc * t2 + c
        return acc * t
    if abs(t) > 300.0:  # sinh(t)^2 would overflow; the tail is +-1 to 1 ulp
        return -1.0 if t > 0 else 1.0
    s = np.sinh(t)
    return t / (s * s) - np.cosh(t) / s


def endpoint_ratio_derivative(tau: float) -> float:
    t = float(tau)
    if abs(t) < _SERIES_WINDOW:
        t2 = t * t
        acc = 0.0
        for n in reversed(range(len(_RATIO_SERIES))):
            acc = acc * t2 + (2 * n + 1) * _RATIO_SERIES[n]
        return acc
    if abs(t) > 300.0:
        return 0.0
    s = np.sinh(t)
    return 2.0 * (1.0 - t * np.cosh(t) / s) / (s * s)


def solve_endpoint_ratio(r: float) -> float:
    """Unique tau with endpoint_ratio(tau) = r, for r in (-1, 1).

    Bracketing bisection (strict monotonicity guarantees convergence)
    followed by a few Newton steps.
    """
    r = float(r)
    if not -1.0 < r < 1.0:
        raise NoSolutionError(f"ratio {r} outside (-1, 1)")
    if r == 0.0:
        return 0.0
    # ratio is decreasing: positive r needs negative tau
    lo, hi = (-1.0, 0.0) if r > 0 else (0.0, 1.0)
    while endpoint_ratio(lo) <= r:
        lo *= 2.0
    while endpoint_ratio(hi) >= r:
        hi *= 2.0
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if endpoint_ratio(mid) > r:
            lo = mid
        else:
            hi = mid
    tau = 0.5 * (lo + hi)
    for _ in range(4):
        d = endpoint_ratio_derivative(tau)
        if d == 0.0:
            break
        step = (endpoint_ratio(tau) - r) / d
        nxt = tau - step
        if not lo <= nxt <= hi:
            break
        tau = nxt
    return tau


# --- closed-form flow ---------------------------------------------------------

@dataclass(frozen=True)
class HeisIVP:
    """Initial data of a geodesic from the origin: velocity and momentum."""

    vx: float
    vy: float
    theta: float

    @property
    def speed(self) -> float:
        """Q(v, v), conserved along the geodesic."""
        return -self.vx * self.vx + self.vy * self.vy


_SHOOT_WINDOW = 0.05


def _sinh_over(u, theta, t):
    """sinh(theta t)/theta, series-patched where theta t is small."""
    small = np.abs(u) < _SHOOT_WINDOW
    u2 = np.where(small, u * u, 0.0)
    series = t * (1.0 + u2 / 6.0 * (1.0 + u2 / 20.0 * (1.0 + u2 / 42.0)))
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.where(small, 0.0, np.sinh(np.where(small, 1.0, u)) / theta)
    return np.where(small, series, direct)


def _coshm1_over(u, theta, t):
    """(cosh(theta t) - 1)/theta, series-patched."""
    small = np.abs(u) < _SHOOT_WINDOW
    u2 = np.where(small, u * u, 0.0)
    series = theta * t * t * 0.5 * (1.0 + u2 / 12.0 * (1.0 + u2 / 30.0 * (1.0 + u2 / 56.0)))
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.where(small, 0.0, (np.cosh(np.where(small, 1.0, u)) - 1.0) / theta)
    return np.where(small, series, direct)


def _u_minus_sinh_over(u, theta, t):
    """(theta t - sinh(theta t))/theta^2, series-patched (cubic cancellation)."""
    small = np.abs(u) < _SHOOT_WINDOW
    u2 = np.where(small, u * u, 0.0)
    series = -theta * t**3 / 6.0 * (1.0 + u2 / 20.0 * (1.0 + u2 / 42.0 * (1.0 + u2 / 72.0)))
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.where(small, 0.0, (u - np.sinh(np.where(small, 1.0, u))) / (theta * theta))
    return np.where(small, series, direct)


def shoot_arrays(ivp: HeisIVP, ts) -> tuple[np.ndarray, ...]:
    """Vectorized closed form: returns (x, y, z, xdot, ydot) over `ts`."""
    ts = np.asarray(ts, dtype=float)
    vx, vy, th = ivp.vx, ivp.vy, ivp.theta
    n2 = ivp.speed
    if th == 0.0:
        zero = np.zeros_like(ts)
        return vx * ts, vy * ts, zero, np.full_like(ts, vx), np.full_like(ts, vy)
    u = th * ts
    ch, sh = np.cosh(u), np.sinh(u)
    S = _sinh_over(u, th, ts)
    C = _coshm1_over(u, th, ts)
    W = _u_minus_sinh_over(u, th, ts)
    x = vx * S - vy * C
    y = vy * S - vx * C
    z = 0.5 * n2 * W
    return x, y, z, vx * ch - vy * sh, vy * ch - vx * sh


def shoot(ivp: HeisIVP, t: float) -> tuple[GroupPoint, np.ndarray]:
    """Point and horizontal velocity of the geodesic at time t."""
    x, y, z, xd, yd = (float(a) for a in shoot_arrays(ivp, np.asarray(t, dtype=float)))
    return heisenberg_point(x, y, z), np.array([xd, yd])


def sample_path(ivp: HeisIVP, ts) -> GeodesicPath:
    x, y, z, xd, yd = shoot_arrays(ivp, ts)
    ts = np.asarray(ts, dtype=float)
    return build_path(
        Group.HEISENBERG_L, ts,
        np.column_stack([x, y]), z[:, None], np.column_stack([xd, yd]),
        thetas=np.full((len(ts), 1), ivp.theta),
    )


# --- two-point connection -----------------------------------------------------

@dataclass(frozen=True)
class HeisTarget:
    x: float
    y: float
    z: float


@unique
class TargetClass(Enum):
    TIMELIKE_FUTURE = "timelike future-connectable"
    TIMELIKE_PAST = "timelike past-connectable"
    SPACELIKE = "spacelike connectable"
    LIGHTLIKE_RAY = "lightlike ray"
    UNREACHABLE = "unreachable"

    @property
    def connectable(self) -> bool:
        return self in (TargetClass.TIMELIKE_FUTURE, TargetClass.TIMELIKE_PAST,
                        TargetClass.SPACELIKE)


def classify_target(target: HeisTarget, atol: float = 0.0) -> TargetClass:
    """Which kind of geodesic from the origin (if any) reaches the target.

    Timelike: -x^2+y^2 < 0 and 4|z| < x^2-y^2, future or past by the sign
    of x.  Spacelike: -x^2+y^2 > 0 and 4|z| < -x^2+y^2.  Lightlike rays fill
    x = +-y, z = 0.  Everything else is unreachable by geodesics.
    """
    x, y, z = target.x, target.y, target.z
    d = -x * x + y * y
    if abs(abs(x) - abs(y)) <= atol and abs(z) <= atol:
        return TargetClass.LIGHTLIKE_RAY
    if d < 0 and 4.0 * abs(z) < -d:
        return TargetClass.TIMELIKE_FUTURE if x > 0 else TargetClass.TIMELIKE_PAST
    if d > 0 and 4.0 * abs(z) < d:
        return TargetClass.SPACELIKE
    return TargetClass.UNREACHABLE


def _theta_times_coth(u: float) -> float:
    """u * coth(u) with the removable singularity filled."""
    if abs(u) < _SHOOT_WINDOW:
        u2 = u * u
        return 1.0 + u2 / 3.0 - u2 * u2 / 45.0 + 2.0 * u2 * u2 * u2 / 945.0
    return u * np.cosh(u) / np.sinh(u)


def connect(target: HeisTarget, samples: int = 201) -> tuple[HeisIVP, GeodesicPath]:
    """The unique geodesic from the origin reaching `target` at time 1.

    Solves the ratio equation for the momentum (kept signed, so targets on
    either side of z = 0 work), recovers the initial velocity from the
    time-1 coordinate map, and returns the sampled path on [0, 1].
    """
    cls = classify_target(target)
    if not cls.connectable:
        raise UnreachableTargetError(f"target {target} is {cls.value}")
    x, y, z = target.x, target.y, target.z
    d = -x * x + y * y
    ratio = 4.0 * z / d
    if not -1.0 < ratio < 1.0:
        raise UnreachableTargetError(f"endpoint ratio {ratio} outside (-1, 1)")
    theta = 2.0 * solve_endpoint_ratio(ratio)
    half = 0.5 * theta
    tc = _theta_times_coth(half)
    vx = x * tc + y * half
    vy = y * tc + x * half
    ivp = HeisIVP(vx, vy, theta)
    ts = np.linspace(0.0, 1.0, samples)
    return ivp, sample_path(ivp, ts)


def geodesic_length(ivp: HeisIVP, t_end: float = 1.0) -> float:
    """Length of the geodesic on [0, t_end].

    The speed is constant, so this is |Q(v0,v0)|^(1/2) * t_end; for nonzero
    momentum it is evaluated through the endpoint data at t_end,

        l = |theta| * sqrt(|y(t)^2 - x(t)^2| + 4|z(t)|)
            / sqrt(2 (| |theta t| - sinh|theta t| | + 2 sinh(|theta t|/2)^2)),

    which agrees with the constant-speed value identically.
    """
    th = abs(ivp.theta) * t_end
    if th == 0.0:
        return float(np.sqrt(abs(ivp.speed))) * t_end
    p, _ = shoot(ivp, t_end)
    h2 = -p.x[0] ** 2 + p.x[1] ** 2
    num = ivp.theta ** 2 * (abs(h2) + 4.0 * abs(p.z[0]))
    den = 2.0 * (abs(th - np.sinh(th)) + 2.0 * np.sinh(0.5 * th) ** 2)
    return float(np.sqrt(num / den)) * t_end


# --- Hamiltonian layer (used by the numerical integrator) ---------------------

def hamiltonian(x, y, z, xi, eta, theta):
    """Hamiltonian symbol; accepts scalars or equal-shape arrays."""
    return (0.5 * (-xi * xi + eta * eta)
            - 0.125 * (-x * x + y * y) * theta * theta
            + 0.5 * (-y * xi - x * eta) * theta)


def hamiltonian_rhs(state: np.ndarray) -> np.ndarray:
    """Right-hand side of the Hamiltonian system.

    State layout (last axis): (x, y, z, xi, eta, theta).  The theta slot
    receives an exact zero so integrators keep it bit-identical.
    """
    x, y, z, xi, eta, th = (state[..., i] for i in range(6))
    out = np.empty_like(state)
    out[..., 0] = -xi - 0.5 * y * th
    out[..., 1] = eta - 0.5 * x * th
    out[..., 2] = -0.25 * (-x * x + y * y) * th + 0.5 * (-y * xi - x * eta)
    out[..., 3] = -0.25 * x * th * th + 0.5 * eta * th
    out[..., 4] = 0.25 * y * th * th + 0.5 * xi * th
    out[..., 5] = 0.0
    return out


def covector_from_velocity(x, y, vx, vy, theta):
    """Momenta (xi, eta) giving horizontal velocity (vx, vy) at (x, y)."""
    return -vx - 0.5 * y * theta, vy + 0.5 * x * theta


def velocity_from_covector(state: np.ndarray) -> np.ndarray:
    """Horizontal velocity (xdot, ydot) recovered from the full state."""
    x, y, _, xi, eta, th = (state[..., i] for i in range(6))
    return np.stack([-xi - 0.5 * y * th, eta - 0.5 * x * th], axis=-1)
