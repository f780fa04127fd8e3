"""Exponential-coordinate models of two step-2 nilpotent groups.

Both groups share one multiplication shape.  Writing a point as (x, z) with
x in the generating layer and z in the center,

    (x, z) o (x', z') = (x + x',  z_b + z'_b + <J_b x, x'> / 2),

where {J_b} is a family of skew-symmetric matrices: a single 2x2 rotation
generator for the 3-dimensional Heisenberg group, and the three imaginary
quaternion units (as real 4x4 matrices) for the 7-dimensional group.  The
same matrices generate everything else used downstream:

    left-invariant frame   X_a = d/dx_a + (1/2) sum_b (J_b x)_a d/dz_b
    vertical frame         Z_b = d/dz_b
    dual one-forms         v_b = dz_b - (1/2) <J_b x, dx>
    commutators            [X_i, X_j] = - sum_b (J_b)_{ij} Z_b

A curve is horizontal when every v_b annihilates its velocity, i.e. when
zdot_b = <J_b x, xdot> / 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, unique
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Group",
    "GroupPoint",
    "FrameVector",
    "DiscreteCurve",
    "GroupMismatchError",
    "horizontal_dim",
    "center_dim",
    "structure_matrices",
    "origin",
    "heisenberg_point",
    "quaternion_point",
    "multiply",
    "inverse",
    "frame_coefficients",
    "frame_matrix",
    "bracket",
    "dual_form",
    "horizontality_defect",
]


@unique
class Group(Enum):
    """The two supported groups."""

    HEISENBERG_L = "heis"
    QUATERNION_H = "quat"


class GroupMismatchError(ValueError):
    """Raised when an operation mixes points of different groups."""


_J_HEIS = (np.array([[0.0, 1.0], [-1.0, 0.0]]),)

_J_QUAT = (
    np.array([[0.0, 1.0, 0.0, 0.0],
              [-1.0, 0.0, 0.0, 0.0],
              [0.0, 0.0, 0.0, 1.0],
              [0.0, 0.0, -1.0, 0.0]]),
    np.array([[0.0, 0.0, 0.0, -1.0],
              [0.0, 0.0, -1.0, 0.0],
              [0.0, 1.0, 0.0, 0.0],
              [1.0, 0.0, 0.0, 0.0]]),
    np.array([[0.0, 0.0, -1.0, 0.0],
              [0.0, 0.0, 0.0, 1.0],
              [1.0, 0.0, 0.0, 0.0],
              [0.0, -1.0, 0.0, 0.0]]),
)

for _m in _J_HEIS + _J_QUAT:
    _m.setflags(write=False)


def horizontal_dim(group: Group) -> int:
    return 2 if group is Group.HEISENBERG_L else 4


def center_dim(group: Group) -> int:
    return 1 if group is Group.HEISENBERG_L else 3


def structure_matrices(group: Group) -> tuple[np.ndarray, ...]:
    """The skew matrices J_b defining the group law (read-only views)."""
    return _J_HEIS if group is Group.HEISENBERG_L else _J_QUAT


@dataclass(frozen=True)
class GroupPoint:
    """A point (x, z) of one of the groups, in exponential coordinates."""

    group: Group
    x: tuple[float, ...]
    z: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "z", tuple(float(v) for v in self.z))
        if len(self.x) != horizontal_dim(self.group) or len(self.z) != center_dim(self.group):
            raise ValueError(
                f"point dimensions {len(self.x)}+{len(self.z)} do not match {self.group}"
            )

    @property
    def x_vec(self) -> np.ndarray:
        return np.array(self.x)

    @property
    def z_vec(self) -> np.ndarray:
        return np.array(self.z)

    def coords(self) -> np.ndarray:
        """All coordinates as one vector (x first, then z)."""
        return np.array(self.x + self.z)


def origin(group: Group) -> GroupPoint:
    return GroupPoint(group, (0.0,) * horizontal_dim(group), (0.0,) * center_dim(group))


def heisenberg_point(x: float, y: float, z: float) -> GroupPoint:
    return GroupPoint(Group.HEISENBERG_L, (x, y), (z,))


def quaternion_point(x: Sequence[float], z: Sequence[float]) -> GroupPoint:
    return GroupPoint(Group.QUATERNION_H, tuple(x), tuple(z))


def _require_same_group(p: GroupPoint, q: GroupPoint) -> None:
    if p.group is not q.group:
        raise GroupMismatchError(f"cannot combine {p.group} with {q.group}")


def multiply(p: GroupPoint, q: GroupPoint) -> GroupPoint:
    """Group product p o q."""
    _require_same_group(p, q)
    xp, xq = p.x_vec, q.x_vec
    zs = [zp + zq + 0.5 * float(J @ xp @ xq)
          for zp, zq, J in zip(p.z, q.z, structure_matrices(p.group))]
    return GroupPoint(p.group, tuple(xp + xq), tuple(zs))


def inverse(p: GroupPoint) -> GroupPoint:
    """Group inverse; coordinate negation, since the law is 2-step."""
    return GroupPoint(p.group, tuple(-v for v in p.x), tuple(-v for v in p.z))


@dataclass(frozen=True)
class FrameVector:
    """One left-invariant frame field evaluated at a base point.

    kind "x" picks the horizontal field X_index, kind "z" the vertical field
    Z_index.  Indices are 1-based.
    """

    kind: str
    index: int
    base: GroupPoint

    def __post_init__(self):
        if self.kind not in ("x", "z"):
            raise ValueError("kind must be 'x' or 'z'")
        top = horizontal_dim(self.base.group) if self.kind == "x" else center_dim(self.base.group)
        if not 1 <= self.index <= top:
            raise ValueError(f"index {self.index} out of range for {self.kind} frame")


def frame_coefficients(v: FrameVector) -> np.ndarray:
    """Coordinate components of a frame field at its base point.

    Returned in the coordinate basis d/dx_1..d/dx_h, d/dz_1..d/dz_c.
    """
    group = v.base.group
    h, c = horizontal_dim(group), center_dim(group)
    out = np.zeros(h + c)
    if v.kind == "z":
        out[h + v.index - 1] = 1.0
        return out
    out[v.index - 1] = 1.0
    x = v.base.x_vec
    for b, J in enumerate(structure_matrices(group)):
        out[h + b] = 0.5 * (J @ x)[v.index - 1]
    return out


def frame_matrix(p: GroupPoint) -> np.ndarray:
    """Rows are the coordinate components of X_1..X_h at p."""
    group = p.group
    h, c = horizontal_dim(group), center_dim(group)
    C = np.zeros((h, h + c))
    C[:, :h] = np.eye(h)
    x = p.x_vec
    for b, J in enumerate(structure_matrices(group)):
        C[:, h + b] = 0.5 * (J @ x)
    return C


def bracket(group: Group, i: int, j: int) -> np.ndarray:
    """Structure constants of [X_i, X_j] in the Z basis (1-based i, j)."""
    h = horizontal_dim(group)
    if not (1 <= i <= h and 1 <= j <= h):
        raise ValueError("bracket indices must be horizontal")
    return np.array([-J[i - 1, j - 1] for J in structure_matrices(group)])


def dual_form(beta: int, w: Sequence[float], base: GroupPoint) -> float:
    """Evaluate the one-form v_beta at `base` on a coordinate tangent vector."""
    group = base.group
    h = horizontal_dim(group)
    w = np.asarray(w, dtype=float)
    if w.shape != (h + center_dim(group),):
        raise ValueError("tangent vector has wrong dimension")
    J = structure_matrices(group)[beta - 1]
    return float(w[h + beta - 1] - 0.5 * (J @ base.x_vec) @ w[:h])


@dataclass(frozen=True)
class DiscreteCurve:
    """A sampled curve: strictly increasing times, one group tag."""

    group: Group
    ts: np.ndarray
    xs: np.ndarray  # (n, horizontal_dim)
    zs: np.ndarray  # (n, center_dim)

    def __post_init__(self):
        ts = np.asarray(self.ts, dtype=float)
        xs = np.asarray(self.xs, dtype=float)
        zs = np.asarray(self.zs, dtype=float)
        if ts.ndim != 1 or len(ts) < 2:
            raise ValueError("need at least two samples")
        if np.any(np.diff(ts) <= 0):
            raise ValueError("times must be strictly increasing")
        if xs.shape != (len(ts), horizontal_dim(self.group)):
            raise ValueError("x samples have wrong shape")
        if zs.shape != (len(ts), center_dim(self.group)):
            raise ValueError("z samples have wrong shape")
        for a in (ts, xs, zs):
            a.setflags(write=False)
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "zs", zs)

    @classmethod
    def from_points(cls, ts: Iterable[float], points: Sequence[GroupPoint]) -> "DiscreteCurve":
        points = list(points)
        group = points[0].group
        for p in points:
            _require_same_group(points[0], p)
        return cls(group,
                   np.asarray(list(ts), dtype=float),
                   np.array([p.x for p in points]),
                   np.array([p.z for p in points]))

    def __len__(self) -> int:
        return len(self.ts)

    def point(self, i: int) -> GroupPoint:
        return GroupPoint(self.group, tuple(self.xs[i]), tuple(self.zs[i]))

    def endpoint(self) -> GroupPoint:
        return self.point(len(self) - 1)

    def coordinate_velocities(self) -> np.ndarray:
        """Finite-difference velocities, (n, dim): central in the interior,
        one-sided at the ends."""
        coords = np.hstack([self.xs, self.zs])
        return np.gradient(coords, self.ts, axis=0)


def horizontality_defect(curve: DiscreteCurve) -> float:
    """Max over interior samples and center indices of |v_b(velocity)|.

    Zero (to discretization accuracy) means the curve is horizontal.
    """
    if len(curve) < 3:
        raise ValueError("need at least three samples to form interior velocities")
    if np.any(np.diff(curve.ts) <= 1e-300):
        raise ValueError("degenerate grid spacing")
    h = horizontal_dim(curve.group)
    vel = curve.coordinate_velocities()[1:-1]
    xs = curve.xs[1:-1]
    worst = 0.0
    for b, J in enumerate(structure_matrices(curve.group)):
        vals = vel[:, h + b] - 0.5 * np.einsum("ni,ij,nj->n", xs, J.T, vel[:, :h])
        worst = max(worst, float(np.max(np.abs(vals))))
    return worst
