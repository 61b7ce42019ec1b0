"""Screened Poisson solve ``gamma*w - d3*Lap(w) = alpha*u + beta*v`` with
homogeneous Neumann walls, by matrix-free preconditioned conjugate gradients."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence
from .grid import laplacian, neighbour_count_diagonal
from .model import Domain, ModelParams

DEFAULT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class EllipticProblem:
    d3: float
    gamma: float
    source: np.ndarray
    grid: Domain

    def apply(self, w):
        return self.gamma * w - self.d3 * laplacian(w, self.grid)

    def diagonal(self):
        return self.gamma + self.d3 * neighbour_count_diagonal(self.grid)

    def residual(self, w):
        return self.source - self.apply(w)

    def solve(self, tol=DEFAULT_TOL, x0=None, maxiter=None):
        if maxiter is None:
            maxiter = 10 * self.grid.size
        w, iters, res = pcg(self.apply, self.source, self.diagonal(), tol=tol, x0=x0, maxiter=maxiter)
        if res > tol:
            raise NoConvergence(iters, res)
        return w


def pcg(apply_a, b, diag, tol=DEFAULT_TOL, x0=None, maxiter=1000):
    """Jacobi-preconditioned CG. Returns ``(x, iterations, relative_residual)``.

    The residual is relative to ``||b||_2``, or absolute when ``b == 0``.
    When the recursive residual converges but the true one does not, CG is
    restarted from the current iterate. Stops without raising when
    ``maxiter`` is exhausted."""
    b = np.asarray(b, dtype=np.float64)
    bnorm = float(np.linalg.norm(b))
    scale = bnorm if bnorm > 0.0 else 1.0
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=np.float64)
    it = 0
    while True:
        r = b - apply_a(x)
        res = math.sqrt(float(np.vdot(r, r))) / scale
        if res <= tol or it >= maxiter:
            return x, it, res
        z = r / diag
        p = z.copy()
        rz = float(np.vdot(r, z))
        while it < maxiter:
            it += 1
            ap = apply_a(p)
            alpha = rz / float(np.vdot(p, ap))
            x += alpha * p
            r -= alpha * ap
            # aim a little below tol so the true residual usually agrees
            if math.sqrt(float(np.vdot(r, r))) / scale <= 0.5 * tol:
                break
            z = r / diag
            rz_new = float(np.vdot(r, z))
            p *= rz_new / rz
            p += z
            rz = rz_new


def solve_w(u, v, params: ModelParams, grid: Domain, tol=DEFAULT_TOL, x0=None, maxiter=None):
    source = params.alpha * np.asarray(u, dtype=np.float64) + params.beta * np.asarray(v, dtype=np.float64)
    if not np.all(np.isfinite(source)):
        raise ValueError("u and v must be finite")
    prob = EllipticProblem(params.d3, params.gamma, source, grid)
    if maxiter is None:
        maxiter = 10 * grid.size
    w, iters, res = pcg(prob.apply, source, prob.diagonal(), tol=tol, x0=x0, maxiter=maxiter)
    if res > tol:
        # a warm start can stall on round-off; retry cold once
        if x0 is not None:
            w, iters2, res = pcg(prob.apply, source, prob.diagonal(), tol=tol, maxiter=maxiter)
            iters += iters2
        if res > tol:
            raise NoConvergence(iters, res)
    return w


def discrete_compatibility(w, u, v, params: ModelParams):
    """``|gamma*mean(w) - alpha*mean(u) - beta*mean(v)|``."""
    return abs(params.gamma * float(np.mean(w)) - params.alpha * float(np.mean(u))
               - params.beta * float(np.mean(v)))
