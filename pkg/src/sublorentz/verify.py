"""Property-verification sweeps.

Each function runs one named suite over seeded random samples and returns a
plain dict report: suite name, seed, sample count, a list of named checks
with values and tolerances, and an overall pass flag.  The CLI serializes
these to JSON; the acceptance tests call them directly.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import heisenberg as heis
from . import quaternion as quat
from .groups import Group, quaternion_point
from .integrate import CovectorState, IntegrationConfig, integrate_batch
from .reachable import Region, random_control_curve, verify_inclusion

__all__ = [
    "DEFAULT_SEED",
    "ratio_solver_report",
    "appendix_report",
    "identity_report",
    "inclusion_report",
    "crosscheck_report",
]

DEFAULT_SEED = 1729

RATIO_ROUNDTRIP_TOL = 1e-12
RATIO_LIMIT_TOL = 1e-6
APPENDIX_REL_TOL = 1e-10
NORM_X_REL_TOL = 1e-9
SLICE_MATCH_TOL = 1e-9
CROSSCHECK_DEV_TOL = 1e-6
H_DRIFT_TOL = 1e-8
ORDER_RATIO_MIN = 8.0


def _check(name: str, value: float, tolerance: float | None, ok: bool | None = None) -> dict:
    passed = bool(value <= tolerance) if ok is None else bool(ok)
    return {"name": name, "value": float(value), "tolerance": tolerance, "passed": passed}


def _finish(suite: str, seed: int | None, n: int | None, checks: list, notes: list) -> dict:
    return {
        "suite": suite,
        "seed": seed,
        "n": n,
        "checks": checks,
        "notes": notes,
        "passed": all(c["passed"] for c in checks),
    }


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("SUBLORENTZ_THREADS", "1")))
    except ValueError:
        return 1


# --- suite: mu -------------------------------------------------------------------

def ratio_solver_report(n: int = 1000, seed: int = DEFAULT_SEED) -> dict:
    rng = np.random.default_rng(seed)
    rs = rng.uniform(-0.999, 0.999, size=n)
    worst = max(abs(heis.endpoint_ratio(heis.solve_endpoint_ratio(r)) - r) for r in rs)
    grid = np.linspace(-20.0, 20.0, 10_000)
    vals = np.array([heis.endpoint_ratio(t) for t in grid])
    diffs = np.diff(vals)
    checks = [
        _check("round-trip |ratio(solve(r)) - r|", worst, RATIO_ROUNDTRIP_TOL),
        _check("strictly decreasing on [-20, 20]", float(np.max(diffs)), None,
               ok=bool(np.all(diffs < 0.0))),
        _check("limit at +20 within 1e-6 of -1",
               abs(heis.endpoint_ratio(20.0) + 1.0), RATIO_LIMIT_TOL),
        _check("limit at -20 within 1e-6 of +1",
               abs(heis.endpoint_ratio(-20.0) - 1.0), RATIO_LIMIT_TOL),
        _check("range inside (-1, 1)", float(np.max(np.abs(vals))), None,
               ok=bool(np.all(np.abs(vals) < 1.0))),
    ]
    return _finish("mu", seed, n, checks, [])


# --- suite: appendix ---------------------------------------------------------------

def _random_generic_ivp(rng: np.random.Generator) -> quat.QuatIVP:
    while True:
        th = rng.uniform(-2.0, 2.0, size=3)
        a2 = float(th @ th)
        if a2 >= 0.25 and th[0] ** 2 + th[1] ** 2 >= 0.2 * a2:
            break
    v0 = rng.uniform(-2.0, 2.0, size=4)
    return quat.QuatIVP(tuple(v0), tuple(th))


def appendix_report(n: int = 1000, seed: int = DEFAULT_SEED) -> dict:
    rng = np.random.default_rng(seed)
    worst: dict[str, float] = {}
    for _ in range(n):
        for rep in quat.identity_suite(_random_generic_ivp(rng)):
            worst[rep.name] = max(worst.get(rep.name, 0.0), rep.rel_residual)
    checks = [_check(name, value, APPENDIX_REL_TOL) for name, value in worst.items()]
    notes = [f"{len(worst)} distinct identities over {n} samples"]
    return _finish("appendix", seed, n, checks, notes)


# --- suite: identities (norm identities and slice reduction) -----------------------

def identity_report(n: int = 300, seed: int = DEFAULT_SEED) -> dict:
    rng = np.random.default_rng(seed)
    worst_x = 0.0
    worst_sol = 0.0
    worst_aux = 0.0
    log = []
    for i in range(n):
        ivp = _random_generic_ivp(rng)
        cf = quat.closed_form(ivp)
        t = float(rng.uniform(0.05, 1.2))
        worst_x = max(worst_x, quat.norm_identity_x(cf, t).rel_residual)
        rep = quat.norm_identity_z(cf, t)
        worst_sol = max(worst_sol, rep["rel_residual_solution"])
        worst_aux = max(worst_aux, rep["rel_residual_auxiliary"])
        if i < 5:
            log.append(rep)

    # slice-reduced square-sum against the Heisenberg center coordinate
    worst_slice = 0.0
    for _ in range(n):
        th1 = float(rng.uniform(0.3, 2.5) * rng.choice([-1.0, 1.0]))
        v1, v2 = rng.uniform(-1.5, 1.5, size=2)
        t = float(rng.uniform(0.1, 1.2))
        cf = quat.closed_form(quat.QuatIVP((v1, v2, 0.0, 0.0), (th1, 0.0, 0.0)))
        zq = quat.shoot_z(cf, t)[0]
        zh = heis.shoot(heis.HeisIVP(v1, v2, th1), t)[0].z[0]
        err = abs(float(zq @ zq) - zh * zh) / max(zh * zh, 1.0)
        worst_slice = max(worst_slice, err, abs(zq[1]), abs(zq[2]))

    checks = [
        _check("x norm identity rel residual", worst_x, NORM_X_REL_TOL),
        _check("slice-reduced center square-sum vs Heisenberg", worst_slice, SLICE_MATCH_TOL),
    ]
    notes = [
        "center square-sum closed form is report-only: max rel residual "
        f"{worst_sol:.3e} against the constraint-consistent trajectory, "
        f"{worst_aux:.3e} against the auxiliary-table trajectory",
        "the tabulated square-sum reproduces the auxiliary coefficient family "
        "(single-frequency slots doubled), not the constraint-consistent solution",
    ]
    report = _finish("identities", seed, n, checks, notes)
    report["discrepancy_log"] = log
    report["square_sum_rel_residual_solution"] = worst_sol
    report["square_sum_rel_residual_auxiliary"] = worst_aux
    return report


# --- suite: inclusion ---------------------------------------------------------------

def inclusion_report(n: int = 1000, seed: int = DEFAULT_SEED) -> dict:
    workers = worker_count()
    seeds = np.random.SeedSequence(seed).spawn(2 * n)

    def make(mode: str, offset: int) -> list:
        rngs = [np.random.default_rng(s) for s in seeds[offset:offset + n]]
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(lambda r: random_control_curve(r, mode=mode), rngs))
        return [random_control_curve(r, mode=mode) for r in rngs]

    cone = Region.cone(0.0)
    timelike = make("timelike", 0)
    it = iter(timelike)
    rep_t = verify_inclusion(lambda: next(it), cone, n, monotone_tol=1e-6)

    nonspacelike = make("nonspacelike", n)
    closure_ok = 0
    worst_eta = -np.inf
    worst_x1 = np.inf
    for curve in nonspacelike:
        end = curve.endpoint()
        x = end.x_vec
        eta0 = -x[0] ** 2 + float(x[1:] @ x[1:])
        worst_eta = max(worst_eta, eta0)
        worst_x1 = min(worst_x1, x[0])
        if eta0 <= 1e-9 and x[0] >= -1e-12:
            closure_ok += 1

    # timelike geodesics of the quaternion group also end inside the cone
    rng = np.random.default_rng(seed + 1)
    geod_violations = 0
    for _ in range(max(1, n // 4)):
        ivp = _random_timelike_fd_ivp(rng)
        cf = quat.closed_form(ivp)
        x = quat.shoot_x(cf, 1.0)[0]
        z = quat.shoot_z(cf, 1.0)[0]
        if not cone.contains(quaternion_point(tuple(x), tuple(z))):
            geod_violations += 1

    checks = [
        _check("timelike control endpoints outside the cone",
               float(len(rep_t.violations)), 0.0),
        _check("cone function increases along timelike controls",
               float(len(rep_t.monotonicity_violations)), 0.0),
        _check("nonspacelike endpoints outside the cone closure",
               float(n - closure_ok), 0.0),
        _check("endpoint slack max(|y| - x1)", rep_t.max_endpoint_slack, 1e-9),
        _check("timelike geodesic endpoints outside the cone",
               float(geod_violations), 0.0),
    ]
    notes = [f"worst closure margins: eta0 {worst_eta:.3e}, x1 {worst_x1:.3e}",
             f"workers {workers}"]
    return _finish("inclusion", seed, n, checks, notes)


def _random_timelike_fd_ivp(rng: np.random.Generator) -> quat.QuatIVP:
    v1 = rng.uniform(0.5, 1.5)
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    spatial = rng.uniform(0.0, 0.9) * v1 * direction
    th = rng.uniform(-1.5, 1.5, size=3)
    return quat.QuatIVP((v1, *spatial), tuple(th))


# --- suite: crosscheck ---------------------------------------------------------------

def crosscheck_report(n: int = 100, seed: int = DEFAULT_SEED, step: float = 1e-3) -> dict:
    rng = np.random.default_rng(seed)
    checks = []
    notes = []
    for group in (Group.HEISENBERG_L, Group.QUATERNION_H):
        ivps = [_crosscheck_ivp(rng, group) for _ in range(n)]
        dev = _closed_vs_rk4(group, ivps, step)
        dev_half = _closed_vs_rk4(group, ivps, step / 2.0)
        ratio = dev / max(dev_half, 1e-300)
        h_drift, th_drift = _conservation(group, ivps, step)
        tag = group.value
        checks += [
            _check(f"{tag}: closed form vs rk4 max deviation", dev, CROSSCHECK_DEV_TOL),
            _check(f"{tag}: halving ratio >= {ORDER_RATIO_MIN}", ratio, None,
                   ok=bool(ratio >= ORDER_RATIO_MIN)),
            _check(f"{tag}: relative H drift", h_drift, H_DRIFT_TOL),
            _check(f"{tag}: theta drift", th_drift, 0.0),
        ]
        notes.append(f"{tag}: dev {dev:.3e} -> {dev_half:.3e} (ratio {ratio:.1f})")
    return _finish("crosscheck", seed, n, checks, notes)


def _crosscheck_ivp(rng, group):
    if group is Group.HEISENBERG_L:
        v = rng.uniform(-2.0, 2.0, size=2)
        th = float(rng.uniform(1.5, 3.5) * rng.choice([-1.0, 1.0]))
        return heis.HeisIVP(float(v[0]), float(v[1]), th)
    while True:
        th = rng.uniform(-3.0, 3.0, size=3)
        a2 = float(th @ th)
        if 2.0 <= a2 <= 9.0 and th[0] ** 2 + th[1] ** 2 >= 0.2 * a2:
            break
    v0 = rng.uniform(-1.5, 1.5, size=4)
    return quat.QuatIVP(tuple(v0), tuple(th))


def _initial_states(group, ivps) -> np.ndarray:
    if group is Group.HEISENBERG_L:
        return np.array([CovectorState.from_velocity(
            group, (ivp.vx, ivp.vy), (ivp.theta,)).flat() for ivp in ivps])
    return np.array([CovectorState.from_velocity(group, ivp.v0, ivp.theta).flat()
                     for ivp in ivps])


def _closed_positions(group, ivps, ts) -> np.ndarray:
    out = []
    for ivp in ivps:
        if group is Group.HEISENBERG_L:
            x, y, z, _, _ = heis.shoot_arrays(ivp, ts)
            out.append(np.column_stack([x, y, z]))
        else:
            cf = quat.closed_form(ivp)
            out.append(np.hstack([quat.shoot_x(cf, ts), quat.shoot_z(cf, ts)]))
    return np.stack(out, axis=1)  # (n_times, B, pos_dim)


def _closed_vs_rk4(group, ivps, step) -> float:
    cfg = IntegrationConfig(step=step)
    ts, states = integrate_batch(group, _initial_states(group, ivps), cfg)
    pos_dim = 3 if group is Group.HEISENBERG_L else 7
    return float(np.max(np.abs(states[..., :pos_dim] - _closed_positions(group, ivps, ts))))


def _conservation(group, ivps, step) -> tuple[float, float]:
    from .integrate import _system

    cfg = IntegrationConfig(step=step)
    ts, states = integrate_batch(group, _initial_states(group, ivps), cfg)
    _, _, ham, dim = _system(group)
    h = ham(states)  # (n_times, B)
    drift = np.max(np.abs(h - h[0]), axis=0) / np.maximum(np.abs(h[0]), 1.0)
    cd = 1 if group is Group.HEISENBERG_L else 3
    th_drift = float(np.max(np.abs(states[..., dim - cd:] - states[0, :, dim - cd:])))
    return float(np.max(drift)), th_drift
