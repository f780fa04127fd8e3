"""Numerical integration of the Hamiltonian systems and of horizontal
control systems, with conservation monitoring.

This is the independent check on every closed form in the package: a plain
fixed-step RK4 (default) or adaptive RK45 on the full first-order system.
The center momenta never appear in their own force slots, so both steppers
keep them bit-identical; the Hamiltonian value is recorded per sample so
drift can be reported.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import heisenberg, quaternion
from .groups import (
    DiscreteCurve,
    Group,
    GroupPoint,
    center_dim,
    horizontal_dim,
    origin,
    structure_matrices,
)
from .paths import GeodesicPath, build_path

__all__ = [
    "CovectorState",
    "IntegrationConfig",
    "ConservationReport",
    "IntegrationError",
    "PiecewiseControls",
    "integrate",
    "integrate_batch",
    "integrate_controls",
    "conservation_report",
]


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class CovectorState:
    """Full phase-space state: position plus momenta (xi, theta)."""

    point: GroupPoint
    xi: tuple[float, ...]
    theta: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "xi", tuple(float(v) for v in self.xi))
        object.__setattr__(self, "theta", tuple(float(v) for v in self.theta))
        g = self.point.group
        if len(self.xi) != horizontal_dim(g) or len(self.theta) != center_dim(g):
            raise ValueError("momenta dimensions do not match the group")

    @classmethod
    def from_velocity(cls, group: Group, v0: Sequence[float],
                      theta: Sequence[float]) -> "CovectorState":
        """State at the origin whose initial horizontal velocity is v0."""
        v0 = tuple(float(v) for v in v0)
        theta = tuple(float(v) for v in theta)
        if group is Group.HEISENBERG_L:
            xi, eta = heisenberg.covector_from_velocity(0.0, 0.0, v0[0], v0[1], theta[0])
            return cls(origin(group), (xi, eta), theta)
        xi = quaternion.covector_from_velocity(np.zeros(4), np.array(v0), np.array(theta))
        return cls(origin(group), tuple(xi), theta)

    def flat(self) -> np.ndarray:
        return np.array(self.point.x + self.point.z + self.xi + self.theta)


@dataclass(frozen=True)
class IntegrationConfig:
    """method 'rk4' (fixed step) or 'rk45' (adaptive, scipy)."""

    method: str = "rk4"
    step: float = 1e-3
    tolerance: float = 1e-10
    t_span: tuple[float, float] = (0.0, 1.0)
    samples: int | None = None

    def __post_init__(self):
        if self.method not in ("rk4", "rk45"):
            raise ValueError("method must be 'rk4' or 'rk45'")
        if self.step <= 0 or self.tolerance <= 0:
            raise ValueError("step and tolerance must be positive")
        if self.t_span[1] <= self.t_span[0]:
            raise ValueError("t_span must be increasing")


def _system(group: Group):
    if group is Group.HEISENBERG_L:
        return heisenberg.hamiltonian_rhs, heisenberg.velocity_from_covector, _heis_h, 6
    return quaternion.hamiltonian_rhs, quaternion.velocity_from_covector, _quat_h, 14


def _heis_h(states: np.ndarray) -> np.ndarray:
    return heisenberg.hamiltonian(*(states[..., i] for i in range(6)))


def _quat_h(states: np.ndarray) -> np.ndarray:
    return quaternion.hamiltonian(states[..., 0:4], states[..., 4:7],
                                  states[..., 7:11], states[..., 11:14])


def _rk4_sweep(rhs: Callable, y0: np.ndarray, t0: float, t1: float,
               step: float) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-step RK4 over [t0, t1]; returns (times, states) at every step.

    States may be a batch: leading axes are carried through the stepper.
    """
    n_steps = max(1, round((t1 - t0) / step))
    h = (t1 - t0) / n_steps
    ts = t0 + h * np.arange(n_steps + 1)
    out = np.empty((n_steps + 1,) + y0.shape)
    out[0] = y0
    y = y0.astype(float, copy=True)
    for i in range(n_steps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = y
    return ts, out


def _downsample(ts: np.ndarray, states: np.ndarray, samples: int | None):
    if samples is None or samples >= len(ts):
        return ts, states
    idx = np.unique(np.round(np.linspace(0, len(ts) - 1, samples)).astype(int))
    return ts[idx], states[idx]


def integrate(group: Group, init: CovectorState, cfg: IntegrationConfig = IntegrationConfig()
              ) -> GeodesicPath:
    """Trajectory of the full Hamiltonian system from `init`."""
    if init.point.group is not group:
        raise ValueError("initial state belongs to a different group")
    rhs, vel, ham, dim = _system(group)
    y0 = init.flat()
    t0, t1 = cfg.t_span
    if cfg.method == "rk4":
        ts, states = _rk4_sweep(rhs, y0, t0, t1, cfg.step)
        ts, states = _downsample(ts, states, cfg.samples)
    else:
        from scipy.integrate import solve_ivp

        ts = np.linspace(t0, t1, cfg.samples or 201)
        sol = solve_ivp(lambda _t, y: rhs(y), (t0, t1), y0, method="RK45",
                        t_eval=ts, rtol=cfg.tolerance, atol=cfg.tolerance)
        if not sol.success:
            raise IntegrationError(sol.message)
        states = sol.y.T
    if not np.isfinite(states).all():
        raise IntegrationError("non-finite state encountered during integration")
    return _path_from_states(group, ts, states)


def _path_from_states(group: Group, ts: np.ndarray, states: np.ndarray) -> GeodesicPath:
    rhs, vel, ham, dim = _system(group)
    hd, cd = horizontal_dim(group), center_dim(group)
    return build_path(group, ts, states[:, :hd], states[:, hd:hd + cd],
                      vel(states), h_values=ham(states),
                      thetas=states[:, dim - cd:])


def integrate_batch(group: Group, inits: np.ndarray, cfg: IntegrationConfig
                    ) -> tuple[np.ndarray, np.ndarray]:
    """RK4 over a batch of flat initial states, shape (B, dim).

    Returns (times, states) with states of shape (n_times, B, dim); used by
    the cross-validation sweeps where per-path reporting is not needed.
    """
    rhs, _, _, dim = _system(group)
    inits = np.asarray(inits, dtype=float)
    if inits.ndim != 2 or inits.shape[1] != dim:
        raise ValueError(f"batch must have shape (B, {dim})")
    ts, states = _rk4_sweep(rhs, inits, cfg.t_span[0], cfg.t_span[1], cfg.step)
    if not np.isfinite(states).all():
        raise IntegrationError("non-finite state encountered during integration")
    return ts, states


@dataclass(frozen=True)
class PiecewiseControls:
    """Piecewise-constant frame controls: values[i] on [breaks[i], breaks[i+1])."""

    breaks: tuple[float, ...]
    values: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if len(self.breaks) != len(self.values) + 1:
            raise ValueError("need one more breakpoint than control values")
        if any(b >= a for a, b in zip(self.breaks[1:], self.breaks[:-1])):
            raise ValueError("breakpoints must increase")

    @property
    def duration(self) -> float:
        return self.breaks[-1] - self.breaks[0]


def integrate_controls(group: Group, controls: PiecewiseControls,
                       samples_per_segment: int = 8) -> DiscreteCurve:
    """Horizontal curve from the origin driven by frame controls.

    For piecewise-constant controls the layer is piecewise linear and the
    constraint integral zdot_b = <J_b x, u>/2 is quadrature-free: the
    quadratic term drops because <J_b u, u> = 0, so each segment is exact.
    """
    hd, cd = horizontal_dim(group), center_dim(group)
    Js = structure_matrices(group)
    ts = [float(controls.breaks[0])]
    xs = [np.zeros(hd)]
    zs = [np.zeros(cd)]
    for seg, u in enumerate(controls.values):
        u = np.asarray(u, dtype=float)
        if u.shape != (hd,):
            raise ValueError("control dimension does not match the group")
        t0, t1 = controls.breaks[seg], controls.breaks[seg + 1]
        x0, z0 = xs[-1], zs[-1]
        zrate = np.array([0.5 * float((J @ x0) @ u) for J in Js])
        for f in np.linspace(0.0, 1.0, samples_per_segment + 1)[1:]:
            dt = f * (t1 - t0)
            ts.append(t0 + dt)
            xs.append(x0 + u * dt)
            zs.append(z0 + zrate * dt)
    return DiscreteCurve(group, np.array(ts), np.vstack(xs), np.vstack(zs))


def conservation_report(path: GeodesicPath) -> "ConservationReport":
    """Relative Hamiltonian drift and absolute center-momentum drift."""
    h0 = float(path.h_values[0])
    h_drift = float(np.max(np.abs(path.h_values - h0))) / max(abs(h0), 1.0)
    theta_drift = float(np.max(np.abs(path.thetas - path.thetas[0])))
    return ConservationReport(h_drift, theta_drift)


@dataclass(frozen=True)
class ConservationReport:
    h_drift: float
    theta_drift: float
