"""Sampled geodesics: positions, horizontal velocities, conserved quantities."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO

import numpy as np

from .causal import CausalClass, classify_coefficients, q_form
from .groups import DiscreteCurve, Group, GroupPoint, center_dim, horizontal_dim

__all__ = ["GeodesicPath", "build_path", "path_csv_header"]


@dataclass(frozen=True)
class GeodesicPath:
    """A geodesic sampled on a strictly increasing time grid.

    Per sample: position (xs, zs), horizontal velocity in the frame (which
    for these groups equals the coordinate x-velocity), the Hamiltonian
    value, the center momenta, and the accumulated curve length
    int |Q(v,v)|^(1/2) dt.
    """

    group: Group
    ts: np.ndarray
    xs: np.ndarray
    zs: np.ndarray
    velocities: np.ndarray
    h_values: np.ndarray
    thetas: np.ndarray
    lengths: np.ndarray

    def __post_init__(self):
        n = len(self.ts)
        if np.any(np.diff(self.ts) <= 0):
            raise ValueError("times must be strictly increasing")
        for name in ("xs", "zs", "velocities", "h_values", "thetas", "lengths"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} length does not match time grid")

    def __len__(self) -> int:
        return len(self.ts)

    def point(self, i: int) -> GroupPoint:
        return GroupPoint(self.group, tuple(self.xs[i]), tuple(self.zs[i]))

    def endpoint(self) -> GroupPoint:
        return self.point(len(self) - 1)

    @property
    def q_values(self) -> np.ndarray:
        """Q(v, v) per sample."""
        return q_form(self.velocities, self.velocities)

    def causal_classes(self, atol: float = 0.0) -> tuple[CausalClass, ...]:
        return tuple(classify_coefficients(v, atol=atol) for v in self.velocities)

    @property
    def length(self) -> float:
        return float(self.lengths[-1])

    def to_discrete_curve(self) -> DiscreteCurve:
        return DiscreteCurve(self.group, self.ts, self.xs, self.zs)

    def write_csv(self, stream: IO[str]) -> None:
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(path_csv_header(self.group))
        if self.group is Group.HEISENBERG_L:
            for i in range(len(self)):
                w.writerow([repr(v) for v in
                            (self.ts[i], *self.xs[i], self.zs[i][0],
                             *self.velocities[i], self.q_values[i])])
        else:
            speeds = self.q_values
            for i in range(len(self)):
                w.writerow([repr(v) for v in
                            (self.ts[i], *self.xs[i], *self.zs[i], speeds[i])])


def path_csv_header(group: Group) -> list[str]:
    if group is Group.HEISENBERG_L:
        return ["t", "x", "y", "z", "xdot", "ydot", "q_speed"]
    return ["t", "x1", "x2", "x3", "x4", "z1", "z2", "z3", "speed"]


def build_path(group: Group, ts: np.ndarray, xs: np.ndarray, zs: np.ndarray,
               velocities: np.ndarray, h_values: np.ndarray | None = None,
               thetas: np.ndarray | None = None) -> GeodesicPath:
    """Assemble a GeodesicPath, filling H = Q(v,v)/2 and lengths if absent."""
    ts = np.asarray(ts, dtype=float)
    xs = np.asarray(xs, dtype=float).reshape(len(ts), horizontal_dim(group))
    zs = np.asarray(zs, dtype=float).reshape(len(ts), center_dim(group))
    velocities = np.asarray(velocities, dtype=float).reshape(len(ts), horizontal_dim(group))
    q = q_form(velocities, velocities)
    if h_values is None:
        h_values = 0.5 * q
    if thetas is None:
        thetas = np.zeros((len(ts), center_dim(group)))
    speed = np.sqrt(np.abs(q))
    increments = 0.5 * (speed[1:] + speed[:-1]) * np.diff(ts)
    lengths = np.concatenate([[0.0], np.cumsum(increments)])
    return GeodesicPath(group, ts, xs, zs, velocities,
                        np.asarray(h_values, dtype=float),
                        np.asarray(thetas, dtype=float), lengths)
