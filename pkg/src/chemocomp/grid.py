"""Cell-centred finite-volume stencils on box domains with no-flux walls."""
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .model import Domain


def _face_diff(f, axis, h):
    """Interior face gradients along ``axis`` (one fewer entry than cells)."""
    lo, hi = _axis_slices(f.ndim, axis)
    return (f[hi] - f[lo]) / h


@lru_cache(maxsize=None)
def _axis_slices(ndim, axis):
    lo = [slice(None)] * ndim
    hi = [slice(None)] * ndim
    lo[axis] = slice(None, -1)
    hi[axis] = slice(1, None)
    return tuple(lo), tuple(hi)


def _add_divergence(out, flux, axis, h):
    """``out += div(flux)`` along ``axis``; wall faces carry zero flux."""
    lo, hi = _axis_slices(out.ndim, axis)
    flux = flux / h
    out[lo] += flux
    out[hi] -= flux


def laplacian(f, domain: Domain):
    out = np.zeros(np.shape(f), dtype=np.float64)
    for axis, h in enumerate(domain.spacing):
        _add_divergence(out, _face_diff(f, axis, h), axis, h)
    return out


def face_gradients(w, domain: Domain):
    return [_face_diff(w, axis, h) for axis, h in enumerate(domain.spacing)]


def max_abs_gradient(w, domain: Domain):
    return max((float(np.max(np.abs(g))) if g.size else 0.0) for g in face_gradients(w, domain))


def upwind_taxis(rho, w, chi, domain: Domain):
    """Donor-cell discretisation of ``-chi * div(rho * grad w)``."""
    out = np.zeros(np.shape(rho), dtype=np.float64)
    for axis, h in enumerate(domain.spacing):
        lo, hi = _axis_slices(rho.ndim, axis)
        vel = chi * _face_diff(w, axis, h)
        flux = np.where(vel > 0.0, vel * rho[lo], vel * rho[hi])
        # flux leaves the low cell and enters the high cell
        _add_divergence(out, -flux, axis, h)
    return out


def integrate(f, domain: Domain):
    return float(np.sum(f)) * domain.cell_volume


def mean(f, domain: Domain):
    return float(np.mean(f))


def l2_norm(f, domain: Domain):
    return float(np.sqrt(np.sum(np.square(f)) * domain.cell_volume))


def neighbour_count_diagonal(domain: Domain):
    """Diagonal of ``-Laplacian``: sum of ``1/h^2`` over interior faces of each cell."""
    diag = np.zeros(domain.shape)
    for axis, h in enumerate(domain.spacing):
        n = domain.cells[axis]
        count = np.full(n, 2.0)
        count[0] = count[-1] = 1.0
        shape = [1] * domain.dim
        shape[axis] = n
        diag = diag + count.reshape(shape) / h**2
    return diag


@lru_cache(maxsize=16)
def laplacian_matrix(domain: Domain):
    """Sparse form of :func:`laplacian` acting on row-major flattened fields."""
    mats = []
    for n, h in zip(domain.cells, domain.spacing):
        main = np.full(n, -2.0)
        main[0] = main[-1] = -1.0
        off = np.ones(n - 1)
        mats.append(sp.diags([off, main, off], [-1, 0, 1]) / h**2)
    if domain.dim == 1:
        return sp.csc_matrix(mats[0])
    ops = []
    for axis in range(domain.dim):
        factors = [sp.identity(n) for n in domain.cells]
        factors[axis] = mats[axis]
        op = factors[0]
        for fct in factors[1:]:
            op = sp.kron(op, fct)
        ops.append(op)
    return sp.csc_matrix(sum(ops))
