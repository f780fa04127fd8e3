"""Reachable sets of the quaternion group: cone functions, region
predicates, timelike rays, sampling-based inclusion checks, and the
reduction of coordinate slices to the Lorentzian Heisenberg group.

The cone function with parameter alpha (|alpha| <= 4/sqrt(3)) is

    eta(alpha, p) = -x1^2 + x2^2 + x3^2 + x4^2 + alpha (|z1| + |z2| + |z3|),

and the open region {eta < 0, x1 > 0} contains every point reachable from
the origin along a timelike future-directed horizontal curve.  A companion
family of regions is cut out by the sign of Q(grad, grad) for the
horizontal gradient of the cone function.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum, unique
from typing import Callable, Iterable

import numpy as np

from .causal import MAX_CONE_PARAMETER, classify_coefficients, CausalKind, q_form
from .groups import DiscreteCurve, Group, GroupPoint, heisenberg_point
from .integrate import PiecewiseControls, integrate_controls

__all__ = [
    "MAX_CONE_PARAMETER",
    "cone_function",
    "Region",
    "in_region",
    "RayParams",
    "ray_point",
    "ray_velocity",
    "HeisSlice",
    "OffSliceError",
    "bslice_reduce",
    "slice_momentum_index",
    "random_control_curve",
    "InclusionReport",
    "verify_inclusion",
]

_CROSS_AXIS = np.array([1.0, -1.0, -1.0]) / np.sqrt(3.0)


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if abs(alpha) > MAX_CONE_PARAMETER + 1e-12:
        raise ValueError(f"|alpha| must not exceed 4/sqrt(3), got {alpha}")
    return alpha


def cone_function(alpha: float, p: GroupPoint) -> float:
    """eta(alpha, p); all center orthants are treated uniformly via |z_b|."""
    if p.group is not Group.QUATERNION_H:
        raise ValueError("the cone function lives on the quaternion group")
    alpha = _check_alpha(alpha)
    x = p.x_vec
    return float(-x[0] ** 2 + x[1] ** 2 + x[2] ** 2 + x[3] ** 2
                 + alpha * np.sum(np.abs(p.z_vec)))


@unique
class _RegionKind(Enum):
    CONE = "cone"
    GRADIENT = "gradient"
    SLICE = "slice"


@unique
class HeisSlice(Enum):
    """Coordinate slices on which the flow reduces to the Heisenberg group."""

    X34 = "x3=x4=0"
    X23 = "x2=x3=0"
    X24 = "x2=x4=0"


@dataclass(frozen=True)
class Region(object):
    """A membership predicate on the quaternion group.

    Region.cone(alpha):      {eta(alpha, .) < 0, x1 > 0} (open; boundary out)
    Region.gradient(alpha):  where the cone-function gradient is timelike
                             with x1 > 0
    Region.heis_slice(s):    the named coordinate slice (with the center
                             components that vanish on horizontal curves)
    """

    kind: _RegionKind
    alpha: float = 0.0
    slice_id: HeisSlice | None = None
    tol: float = 0.0

    @classmethod
    def cone(cls, alpha: float) -> "Region":
        return cls(_RegionKind.CONE, _check_alpha(alpha))

    @classmethod
    def gradient(cls, alpha: float) -> "Region":
        return cls(_RegionKind.GRADIENT, _check_alpha(alpha))

    @classmethod
    def heis_slice(cls, slice_id: HeisSlice, tol: float = 0.0) -> "Region":
        return cls(_RegionKind.SLICE, 0.0, slice_id, tol)

    def contains(self, p: GroupPoint) -> bool:
        if p.group is not Group.QUATERNION_H:
            raise ValueError("regions live on the quaternion group")
        x = p.x_vec
        if self.kind is _RegionKind.CONE:
            return cone_function(self.alpha, p) < 0.0 and x[0] > 0.0
        if self.kind is _RegionKind.GRADIENT:
            y = x[1:]
            lead = (-1.0 + 3.0 * self.alpha ** 2 / 16.0) * (x[0] ** 2 - y @ y)
            cross = np.cross(y, _CROSS_AXIS)
            return lead + (3.0 * self.alpha ** 2 / 8.0) * float(cross @ cross) < 0.0 \
                and x[0] > 0.0
        zero_x, _, zero_z = _SLICE_LAYOUT[self.slice_id]
        vals = [abs(x[i]) for i in zero_x] + [abs(p.z_vec[i]) for i in zero_z]
        return max(vals) <= self.tol


def in_region(region: Region, p: GroupPoint) -> bool:
    return region.contains(p)


# --- straight timelike rays ----------------------------------------------------

@dataclass(frozen=True)
class RayParams:
    """Hyperbolic angle plus spherical direction angles of a straight ray."""

    rapidity: float
    azimuth: float = 0.0
    inclination: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.azimuth <= 2.0 * np.pi + 1e-12:
            raise ValueError("azimuth must lie in [0, 2 pi]")
        if not 0.0 <= self.inclination <= np.pi + 1e-12:
            raise ValueError("inclination must lie in [0, pi]")

    def direction(self) -> np.ndarray:
        sh, ch = np.sinh(self.rapidity), np.cosh(self.rapidity)
        return np.array([
            ch,
            sh * np.sin(self.azimuth) * np.cos(self.inclination),
            sh * np.sin(self.azimuth) * np.sin(self.inclination),
            sh * np.cos(self.azimuth),
        ])


def ray_point(params: RayParams, t: float) -> GroupPoint:
    """Point at parameter t > 0 on the straight ray; the center stays at 0
    because <J_b v, v> = 0 along rays through the origin."""
    if t <= 0:
        raise ValueError("rays are parametrized by t > 0")
    return GroupPoint(Group.QUATERNION_H, tuple(t * params.direction()), (0.0, 0.0, 0.0))


def ray_velocity(params: RayParams) -> np.ndarray:
    """Frame coefficients of the ray velocity; Q(v, v) = -1 identically."""
    return params.direction()


# --- slice reduction ------------------------------------------------------------

class OffSliceError(ValueError):
    pass


# slice -> (zero x-indices, (kept x-index, sign), zero z-indices, kept z-index)
_SLICE_LAYOUT: dict[HeisSlice, tuple[tuple[int, int], tuple[int, float], tuple[int, int]]] = {
    HeisSlice.X34: ((2, 3), (1, 1.0), (1, 2)),
    HeisSlice.X23: ((1, 2), (3, -1.0), (0, 2)),
    HeisSlice.X24: ((1, 3), (2, -1.0), (0, 1)),
}


def slice_momentum_index(slice_id: HeisSlice) -> int:
    """Index of the center momentum that survives on the slice."""
    return {HeisSlice.X34: 0, HeisSlice.X23: 1, HeisSlice.X24: 2}[slice_id]


def bslice_reduce(p: GroupPoint, slice_id: HeisSlice, tol: float = 1e-9) -> GroupPoint:
    """Map a point on a coordinate slice to the Heisenberg group.

    The slice x3 = x4 = 0 carries (x1, x2, z1) straight across; the other
    two slices need a sign flip on the surviving spatial coordinate so the
    constraint zdot = (y xdot - x ydot)/2 comes out with the Heisenberg
    orientation: x2 = x3 = 0 maps to (x1, -x4, z2) and x2 = x4 = 0 to
    (x1, -x3, z3).
    """
    if p.group is not Group.QUATERNION_H:
        raise ValueError("slice reduction starts from the quaternion group")
    zero_x, (keep_x, sign), zero_z = _SLICE_LAYOUT[slice_id]
    off = [abs(p.x[i]) for i in zero_x] + [abs(p.z[i]) for i in zero_z]
    if max(off) > tol:
        raise OffSliceError(
            f"point is off the slice {slice_id.value} by {max(off):.3e} (tol {tol:.1e})"
        )
    keep_z = slice_momentum_index(slice_id)
    return heisenberg_point(p.x[0], sign * p.x[keep_x], p.z[keep_z])


# --- sampling-based inclusion checks --------------------------------------------

def random_control_curve(rng: np.random.Generator, mode: str = "timelike",
                         segments: tuple[int, int] = (8, 64),
                         samples_per_segment: int = 6) -> DiscreteCurve:
    """A random horizontal curve from the origin with controlled causality.

    Piecewise-constant frame controls u with u1 > 0 and |u_spatial| <= u1:
    strictly less for mode 'timelike', while mode 'nonspacelike' allows
    null segments (|u_spatial| = u1).
    """
    if mode not in ("timelike", "nonspacelike"):
        raise ValueError("mode must be 'timelike' or 'nonspacelike'")
    n_seg = int(rng.integers(segments[0], segments[1] + 1))
    durations = rng.uniform(0.02, 0.15, size=n_seg)
    breaks = np.concatenate([[0.0], np.cumsum(durations)])
    values = []
    for _ in range(n_seg):
        u1 = rng.uniform(0.3, 1.5)
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        if mode == "timelike":
            frac = rng.uniform(0.0, 0.9)
        else:
            frac = 1.0 if rng.uniform() < 0.3 else rng.uniform(0.0, 1.0)
        values.append((u1, *(frac * u1 * direction)))
    controls = PiecewiseControls(tuple(breaks), tuple(values))
    return integrate_controls(Group.QUATERNION_H, controls,
                              samples_per_segment=samples_per_segment)


@dataclass
class InclusionReport:
    """Outcome of an endpoint-inclusion sweep."""

    region: str
    n_curves: int
    n_checked: int
    violations: list = field(default_factory=list)
    monotonicity_violations: list = field(default_factory=list)
    max_endpoint_slack: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.violations and not self.monotonicity_violations

    def to_json(self) -> str:
        return json.dumps({
            "region": self.region,
            "n_curves": self.n_curves,
            "n_checked": self.n_checked,
            "violations": self.violations,
            "monotonicity_violations": self.monotonicity_violations,
            "max_endpoint_slack": self.max_endpoint_slack,
            "passed": self.passed,
        }, sort_keys=True)


def verify_inclusion(sampler: Callable[[], DiscreteCurve], region: Region,
                     n: int, given: Region | None = None,
                     monotone_tol: float | None = None) -> InclusionReport:
    """Check that sampled curve endpoints land inside `region`.

    Every curve must start at the origin and be nonspacelike future
    directed; the sampler is trusted for smoothness but causality is
    re-checked from the sampled velocities.  With `given` set, only
    endpoints inside `given` are required to lie in `region`.  With
    `monotone_tol` set, the cone function eta(0, .) must be non-increasing
    along each curve up to that slack.
    """
    label = f"{region.kind.value}({region.alpha})"
    report = InclusionReport(region=label, n_curves=n, n_checked=0)
    for i in range(n):
        curve = sampler()
        _require_nspc_fd(curve, i)
        end = curve.endpoint()
        if given is not None and not given.contains(end):
            continue
        report.n_checked += 1
        if not region.contains(end):
            report.violations.append({"curve": i, "endpoint": list(end.coords())})
        x = end.x_vec
        report.max_endpoint_slack = max(
            report.max_endpoint_slack,
            float(np.sqrt(x[1:] @ x[1:]) - x[0]),
        )
        if monotone_tol is not None:
            eta0 = -curve.xs[:, 0] ** 2 + np.sum(curve.xs[:, 1:] ** 2, axis=1)
            jumps = np.diff(eta0)
            worst = float(np.max(jumps)) if len(jumps) else 0.0
            if worst > monotone_tol:
                report.monotonicity_violations.append({"curve": i, "jump": worst})
    return report


def _require_nspc_fd(curve: DiscreteCurve, index: int) -> None:
    if np.any(np.abs(curve.xs[0]) > 0) or np.any(np.abs(curve.zs[0]) > 0):
        raise ValueError(f"curve {index} does not start at the origin")
    vel = curve.coordinate_velocities()[:, :curve.xs.shape[1]]
    q = q_form(vel, vel)
    # central differences across control corners average two admissible
    # controls, which stays nonspacelike; allow discretization slack
    if np.any(q > 1e-9) or np.any(vel[:, 0] < -1e-12):
        raise ValueError(f"curve {index} is not nonspacelike future directed")
