"""Lorentzian metric on the horizontal bundle and causal classification.

On the frame X_1..X_h the metric is Q = diag(-1, 1, ..., 1); X_1 is the
time orientation.  A horizontal vector v is timelike / null / spacelike
according to the sign of Q(v, v), and a nonspacelike v is future directed
when Q(v, X_1) < 0, i.e. when its first frame coefficient is positive.

The co-metric g maps covectors to horizontal vectors through
Q(Y, g xi) = xi(Y); in coordinates g = C^T diag(-1,1,..,1) C where the
rows of C are the coordinate components of the frame.  It is degenerate of
rank h with exactly one negative eigenvalue.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, unique
from typing import Callable, Sequence

import numpy as np

from .groups import (
    DiscreteCurve,
    Group,
    GroupMismatchError,
    GroupPoint,
    frame_matrix,
    horizontal_dim,
    horizontality_defect,
)

__all__ = [
    "CausalKind",
    "Orientation",
    "CausalClass",
    "HorizontalVector",
    "NotHorizontalError",
    "signature",
    "q_form",
    "q_inner",
    "classify",
    "classify_coefficients",
    "co_metric",
    "cone_function_gradient",
    "horizontal_gradient_fd",
    "LengthReport",
    "curve_length",
]

MAX_CONE_PARAMETER = 4.0 / np.sqrt(3.0)


@unique
class CausalKind(Enum):
    TIMELIKE = "timelike"
    SPACELIKE = "spacelike"
    NULL = "null"
    ZERO = "zero"


@unique
class Orientation(Enum):
    FUTURE = "future"
    PAST = "past"
    NONE = "unoriented"


@dataclass(frozen=True)
class CausalClass:
    kind: CausalKind
    orientation: Orientation

    def __str__(self) -> str:
        if self.orientation is Orientation.NONE:
            return self.kind.value
        return f"{self.kind.value} {self.orientation.value}-directed"


@dataclass(frozen=True)
class HorizontalVector:
    """Coefficients in the frame {X_a}, attached to a base point."""

    group: Group
    coeffs: tuple[float, ...]
    base: GroupPoint

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(v) for v in self.coeffs))
        if len(self.coeffs) != horizontal_dim(self.group):
            raise ValueError("coefficient count does not match group")
        if self.base.group is not self.group:
            raise GroupMismatchError("base point belongs to a different group")

    @property
    def coeff_vec(self) -> np.ndarray:
        return np.array(self.coeffs)


class NotHorizontalError(ValueError):
    """A curve failed the horizontality precondition."""


def signature(group: Group) -> np.ndarray:
    s = np.ones(horizontal_dim(group))
    s[0] = -1.0
    return s


def q_form(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Q on raw frame coefficients: -u_1 v_1 + sum_{a>=2} u_a v_a.

    Works on stacked arrays; the last axis is the frame index.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return np.sum(u * v, axis=-1) - 2.0 * u[..., 0] * v[..., 0]


def q_inner(u: HorizontalVector, v: HorizontalVector) -> float:
    if u.group is not v.group:
        raise GroupMismatchError("metric needs vectors from one group")
    if u.base != v.base:
        raise GroupMismatchError("metric needs vectors at one base point")
    return float(q_form(u.coeff_vec, v.coeff_vec))


def classify_coefficients(coeffs: Sequence[float], atol: float = 0.0) -> CausalClass:
    """Causal class of raw frame coefficients.

    `atol` widens the null band: |Q(v,v)| <= atol counts as null.  The zero
    vector is its own class and carries no orientation.
    """
    c = np.asarray(coeffs, dtype=float)
    if np.all(c == 0.0):
        return CausalClass(CausalKind.ZERO, Orientation.NONE)
    q = float(q_form(c, c))
    if q > atol:
        return CausalClass(CausalKind.SPACELIKE, Orientation.NONE)
    kind = CausalKind.NULL if abs(q) <= atol else CausalKind.TIMELIKE
    # Q(v, X_1) = -v_1, so future-directed means v_1 > 0.
    if c[0] > 0:
        orient = Orientation.FUTURE
    elif c[0] < 0:
        orient = Orientation.PAST
    else:
        orient = Orientation.NONE
    return CausalClass(kind, orient)


def classify(v: HorizontalVector, atol: float = 0.0) -> CausalClass:
    return classify_coefficients(v.coeffs, atol=atol)


def co_metric(p: GroupPoint) -> np.ndarray:
    """The degenerate co-metric g at p as a full coordinate matrix.

    7x7 for the quaternion group, 3x3 for the Heisenberg group.  Symmetric,
    rank equal to the horizontal dimension, index 1.
    """
    C = frame_matrix(p)
    return C.T @ (signature(p.group)[:, None] * C)


def cone_function_gradient(alpha: float, p: GroupPoint) -> HorizontalVector:
    """Horizontal gradient of the cone function -x1^2+|y|^2+alpha*sum|z_b|
    on the quaternion group, evaluated on the orthant of nonnegative z.

    Closed form; the metric sign flip on X_1 is already folded in, so
    Q(result, w) is the derivative of the cone function along w.
    """
    if p.group is not Group.QUATERNION_H:
        raise ValueError("cone function gradient is defined on the quaternion group")
    x1, x2, x3, x4 = p.x
    e = 0.5 * alpha
    return HorizontalVector(
        Group.QUATERNION_H,
        (
            2.0 * x1 - e * (x2 - x3 - x4),
            2.0 * x2 + e * (-x1 - x3 + x4),
            2.0 * x3 + e * (x1 + x2 + x4),
            2.0 * x4 + e * (x1 - x2 - x3),
        ),
        p,
    )


def horizontal_gradient_fd(f: Callable[[GroupPoint], float], p: GroupPoint,
                           h: float = 1e-5) -> HorizontalVector:
    """Finite-difference horizontal gradient of a scalar field.

    Central differences of f along the coordinate directions of each frame
    field, assembled with the metric sign flip on X_1 so that
    Q(v, grad f) = d_v f for horizontal v.
    """
    group = p.group
    hd = horizontal_dim(group)
    C = frame_matrix(p)
    base = p.coords()
    sig = signature(group)
    coeffs = []
    for a in range(hd):
        step = h * C[a]
        fp = f(GroupPoint(group, tuple(base[:hd] + step[:hd]), tuple(base[hd:] + step[hd:])))
        fm = f(GroupPoint(group, tuple(base[:hd] - step[:hd]), tuple(base[hd:] - step[hd:])))
        coeffs.append(sig[a] * (fp - fm) / (2.0 * h))
    return HorizontalVector(group, tuple(coeffs), p)


@dataclass(frozen=True)
class LengthReport:
    length: float
    classes: tuple[CausalClass, ...]


def curve_length(curve: DiscreteCurve, horizontality_tol: float = 1e-6,
                 class_atol: float = 0.0) -> LengthReport:
    """Length of a horizontal curve: trapezoidal quadrature of |Q(v,v)|^(1/2).

    The horizontal velocity enters through its x-components only (the frame
    has identity x-part), so Q(v,v) = -xdot_1^2 + sum xdot_a^2.  Raises
    NotHorizontalError when the sampled curve is not horizontal to the given
    tolerance.
    """
    defect = horizontality_defect(curve)
    if defect > horizontality_tol:
        raise NotHorizontalError(
            f"horizontality defect {defect:.3e} exceeds tolerance {horizontality_tol:.3e}"
        )
    hd = horizontal_dim(curve.group)
    vel = curve.coordinate_velocities()[:, :hd]
    q = q_form(vel, vel)
    length = float(np.trapezoid(np.sqrt(np.abs(q)), curve.ts))
    classes = tuple(classify_coefficients(v, atol=class_atol) for v in vel)
    return LengthReport(length, classes)
