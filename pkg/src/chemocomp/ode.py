"""Spatially homogeneous reduction: Lotka-Volterra competition kinetics with
``w = (alpha*u + beta*v)/gamma`` slaved algebraically. Used as an oracle for
the PDE solver."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .model import ModelParams


@dataclass(frozen=True)
class OdeState:
    u: float
    v: float
    t: float = 0.0

    def __post_init__(self):
        if self.u < 0 or self.v < 0:
            raise ValueError("u and v must be nonnegative")


@dataclass
class OdeTrajectory:
    t: np.ndarray
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    def final(self):
        return OdeState(float(self.u[-1]), float(self.v[-1]), float(self.t[-1]))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["t", "u", "v", "w"])
            for row in zip(self.t, self.u, self.v, self.w):
                wr.writerow([repr(float(x)) for x in row])


def rk4_integrate(initial: OdeState, params: ModelParams, dt: float, t_end: float) -> OdeTrajectory:
    """Classical fixed-step RK4; the last step is shortened to land on ``t_end``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    p = params

    def f(u, v):
        return p.mu1 * u * (1.0 - u - p.a1 * v), p.mu2 * v * (1.0 - p.a2 * u - v)

    nsteps = int(np.ceil((t_end - initial.t) / dt - 1e-9)) if t_end > initial.t else 0
    ts = np.empty(nsteps + 1)
    us = np.empty(nsteps + 1)
    vs = np.empty(nsteps + 1)
    u, v, t = float(initial.u), float(initial.v), float(initial.t)
    ts[0], us[0], vs[0] = t, u, v
    for k in range(1, nsteps + 1):
        h = min(dt, t_end - t) if k == nsteps else dt
        k1u, k1v = f(u, v)
        k2u, k2v = f(u + 0.5 * h * k1u, v + 0.5 * h * k1v)
        k3u, k3v = f(u + 0.5 * h * k2u, v + 0.5 * h * k2v)
        k4u, k4v = f(u + h * k3u, v + h * k3v)
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        # forward invariance of the quadrant; only round-off can cross it
        if -1e-14 < u < 0.0:
            u = 0.0
        if -1e-14 < v < 0.0:
            v = 0.0
        t = initial.t + k * dt if k < nsteps else t_end
        ts[k], us[k], vs[k] = t, u, v
    ws = (p.alpha * us + p.beta * vs) / p.gamma
    return OdeTrajectory(ts, us, vs, ws)
