"""IMEX time stepping for the two species.

Each step freezes ``w`` from the current densities, advances chemotaxis
(donor-cell upwind) and competition kinetics with the two-stage SSP Runge-Kutta
method, then applies backward-Euler diffusion and re-solves ``w``.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, List, Optional

import numpy as np
import scipy.sparse as sp
from scipy.linalg import solve_banded
from scipy.sparse.linalg import splu

from . import checkpoint
from .diagnostics import Probe, TimeSeries
from .elliptic import DEFAULT_TOL, solve_w
from .errors import InvalidInitialData, PositivityLoss
from .grid import laplacian_matrix, max_abs_gradient, upwind_taxis
from .model import Domain, FieldState, ModelParams, classify_regime

NEG_CLAMP = 1e-12


@dataclass(frozen=True)
class SchemeConfig:
    dt: float
    t_end: float
    safety: float = 0.5
    adaptive: bool = True
    sample_every: int = 1
    # field snapshot files every this many steps; 0 disables them
    snapshot_every: int = 0
    elliptic_tol: float = DEFAULT_TOL
    theta_diffusion: float = field(default=1.0, init=False)

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_end >= 0:
            raise ValueError("t_end must be nonnegative")
        if not 0 < self.safety <= 1:
            raise ValueError("safety must lie in (0, 1]")
        if self.sample_every < 1:
            raise ValueError("sample_every must be a positive integer")
        if self.snapshot_every < 0:
            raise ValueError("snapshot_every must be >= 0")


def cfl_dt(state: FieldState, params: ModelParams, grid: Domain, safety=0.5):
    """Largest explicit step keeping the upwind and kinetic updates monotone.

    The advective bound accounts for outflow through all ``2*dim`` faces."""
    p = params
    gmax = max_abs_gradient(state.w, grid)
    chi = max(p.chi1, p.chi2)
    h = min(grid.spacing)
    adv = math.inf if gmax == 0.0 else h / (2 * grid.dim * chi * gmax)
    umax = float(np.max(state.u))
    vmax = float(np.max(state.v))
    lip = max(p.mu1 * (1.0 + 2.0 * umax + p.a1 * vmax), p.mu2 * (1.0 + 2.0 * vmax + p.a2 * umax))
    return safety * min(adv, 1.0 / lip)


def _explicit_rates(u, v, w, params, grid):
    p = params
    du = upwind_taxis(u, w, p.chi1, grid) + p.mu1 * u * (1.0 - u - p.a1 * v)
    dv = upwind_taxis(v, w, p.chi2, grid) + p.mu2 * v * (1.0 - p.a2 * u - v)
    return du, dv


def _implicit_diffusion(rhs, coef, grid):
    """Solve ``(I - coef * Lap) x = rhs``."""
    if coef == 0.0:
        return rhs.copy()
    if grid.dim == 1:
        n = grid.cells[0]
        r = coef / grid.spacing[0] ** 2
        ab = np.zeros((3, n))
        ab[0, 1:] = -r
        ab[2, :-1] = -r
        ab[1, :] = 1.0 + 2.0 * r
        ab[1, 0] = ab[1, -1] = 1.0 + r
        return solve_banded((1, 1), ab, rhs)
    return _factorized(coef, grid).solve(rhs.ravel()).reshape(rhs.shape)


@lru_cache(maxsize=8)
def _factorized(coef, grid):
    return splu(sp.identity(grid.size, format="csc") - coef * laplacian_matrix(grid))


def _clamp(arr, name):
    neg = arr < 0.0
    if np.any(neg):
        worst = int(np.argmin(arr))
        if arr.flat[worst] < -NEG_CLAMP:
            raise PositivityLoss(name, tuple(int(i) for i in np.unravel_index(worst, arr.shape)),
                                 float(arr.flat[worst]))
        arr[neg] = 0.0
    return arr


def step(state: FieldState, params: ModelParams, cfg: SchemeConfig, grid: Domain,
         dt: Optional[float] = None) -> FieldState:
    """Advance one step of size ``dt`` (default ``cfg.dt``). ``state.w`` must
    be the elliptic solve for ``state.u, state.v``."""
    dt = cfg.dt if dt is None else dt
    u, v, w = state.u, state.v, state.w
    du, dv = _explicit_rates(u, v, w, params, grid)
    u1 = u + dt * du
    v1 = v + dt * dv
    du, dv = _explicit_rates(u1, v1, w, params, grid)
    us = 0.5 * u + 0.5 * (u1 + dt * du)
    vs = 0.5 * v + 0.5 * (v1 + dt * dv)
    un = _clamp(_implicit_diffusion(us, dt * params.d1, grid), "u")
    vn = _clamp(_implicit_diffusion(vs, dt * params.d2, grid), "v")
    if not (np.all(np.isfinite(un)) and np.all(np.isfinite(vn))):
        raise FloatingPointError("non-finite density after step")
    # exact for spatially uniform changes of the source
    guess = w + (params.alpha * (un - u) + params.beta * (vn - v)) / params.gamma
    wn = solve_w(un, vn, params, grid, tol=cfg.elliptic_tol, x0=guess)
    return FieldState(un, vn, wn, state.t + dt)


def consistent_state(u, v, params: ModelParams, grid: Domain, t=0.0, tol=DEFAULT_TOL) -> FieldState:
    u = np.asarray(u, dtype=np.float64).reshape(grid.shape)
    v = np.asarray(v, dtype=np.float64).reshape(grid.shape)
    return FieldState(u, v, solve_w(u, v, params, grid, tol=tol), t)


@dataclass
class RunResult:
    series: TimeSeries
    final: FieldState
    steps: int
    snapshots: List[str] = field(default_factory=list)
    dts: List[float] = field(default_factory=list)


def _check_initial(state):
    for name, f in (("u", state.u), ("v", state.v)):
        if not np.all(np.isfinite(f)) or np.any(f < 0.0):
            raise InvalidInitialData(f"{name}0 must be finite and nonnegative")
        if not np.any(f > 0.0):
            raise InvalidInitialData(f"{name}0 must not vanish identically")


def run(initial: FieldState, params: ModelParams, cfg: SchemeConfig, grid: Domain,
        probe: Optional[Callable[[FieldState], dict]] = None, *, start_step: int = 0,
        checkpoint_path: Optional[str] = None, checkpoint_every: int = 0,
        snapshot_dir: Optional[str] = None, record_dts: bool = False,
        step_hook: Optional[Callable[[FieldState, int], None]] = None,
        hook_every: int = 0) -> RunResult:
    """Advance ``initial`` to ``cfg.t_end``, sampling ``probe`` every
    ``cfg.sample_every`` steps and at the final time.

    ``initial.w`` is used as given (it must be consistent; see
    :func:`consistent_state`). A checkpoint is written every
    ``checkpoint_every`` steps and at the end when ``checkpoint_path`` is set.
    ``step_hook(state, k)`` is called every ``hook_every`` steps."""
    _check_initial(initial)
    if probe is None:
        probe = Probe(params, grid, classify_regime(params))
    state = initial
    k = start_step
    rows = [probe(state)]
    snaps = []
    dts = []
    if snapshot_dir and cfg.snapshot_every:
        os.makedirs(snapshot_dir, exist_ok=True)
    t_end = cfg.t_end
    eps_t = 1e-12 * max(1.0, abs(t_end))
    while state.t < t_end - eps_t:
        dt = cfg.dt
        if cfg.adaptive:
            dt = min(dt, cfl_dt(state, params, grid, cfg.safety))
        remaining = t_end - state.t
        # snap so that stopping at T and resuming matches an uninterrupted run
        if abs(remaining - dt) > 1e-9 * dt:
            dt = min(dt, remaining)
        state = step(state, params, cfg, grid, dt)
        k += 1
        if record_dts:
            dts.append(dt)
        last = not state.t < t_end - eps_t
        if k % cfg.sample_every == 0 or last:
            rows.append(probe(state))
        if snapshot_dir and cfg.snapshot_every and k % cfg.snapshot_every == 0:
            path = os.path.join(snapshot_dir, f"snapshot_{k:08d}.bin")
            checkpoint.write_state(path, state, k)
            snaps.append(path)
        if checkpoint_path and checkpoint_every and k % checkpoint_every == 0:
            checkpoint.write_state(checkpoint_path, state, k)
        if step_hook is not None and hook_every and k % hook_every == 0:
            step_hook(state, k)
    if checkpoint_path:
        checkpoint.write_state(checkpoint_path, state, k)
    return RunResult(TimeSeries.from_rows(rows), state, k, snaps, dts)


def resume(checkpoint_file: str, params: ModelParams, cfg: SchemeConfig, grid: Domain,
           probe=None, **kwargs) -> RunResult:
    state, k = checkpoint.read_state(checkpoint_file)
    if state.u.shape != tuple(grid.shape):
        raise ValueError("checkpoint grid does not match the domain")
    return run(state, params, cfg, grid, probe, start_step=k, **kwargs)
