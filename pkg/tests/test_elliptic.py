import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from chemocomp import Domain
from chemocomp.elliptic import EllipticProblem, discrete_compatibility, pcg, solve_w
from chemocomp.errors import NoConvergence
from chemocomp.grid import integrate, laplacian, laplacian_matrix

from conftest import make_params


def _mms_error(n, d3=1.0, gamma=1.0):
    grid = Domain.interval(n)
    (x,) = grid.centers()
    p = make_params(d3=d3, gamma=gamma, alpha=1.0, beta=1.0)
    s = (d3 * np.pi**2 + gamma) * np.cos(np.pi * x)
    # split the source evenly between u and v
    w = solve_w(s / 2, s / 2, p, grid, tol=1e-11)
    return float(np.max(np.abs(w - np.cos(np.pi * x))))


def test_manufactured_solution_second_order():
    errs = [_mms_error(n) for n in (32, 64, 128, 256)]
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    assert all(3.4 <= r <= 4.6 for r in ratios), ratios


def test_zero_source_gives_zero():
    grid = Domain.interval(16)
    w = solve_w(np.zeros(16), np.zeros(16), make_params(), grid)
    assert np.all(w == 0.0)


@pytest.mark.parametrize("dim", [1, 2])
def test_constant_source_exact(dim):
    grid = Domain.interval(20) if dim == 1 else Domain.square(12)
    p = make_params(alpha=2.0, beta=3.0, gamma=4.0)
    w = solve_w(np.full(grid.shape, 0.5), np.full(grid.shape, 2.0), p, grid)
    assert np.allclose(w, (2.0 * 0.5 + 3.0 * 2.0) / 4.0, rtol=1e-12, atol=0)


def test_residual_meets_tolerance_2d():
    grid = Domain(2, (1.0, 2.0), (16, 24))
    rng = np.random.default_rng(3)
    u, v = rng.uniform(0, 2, grid.shape), rng.uniform(0, 2, grid.shape)
    p = make_params(d3=0.3, gamma=2.0, alpha=1.5)
    w = solve_w(u, v, p, grid, tol=1e-10)
    prob = EllipticProblem(p.d3, p.gamma, p.alpha * u + p.beta * v, grid)
    assert np.linalg.norm(prob.residual(w)) <= 1e-10 * np.linalg.norm(prob.source)


def test_matrix_free_matches_sparse():
    grid = Domain(2, (1.0, 1.0), (5, 7))
    f = np.random.default_rng(0).normal(size=grid.shape)
    dense = (laplacian_matrix(grid) @ f.ravel()).reshape(grid.shape)
    assert np.allclose(laplacian(f, grid), dense, atol=1e-12)
    assert abs(integrate(laplacian(f, grid), grid)) < 1e-10


def test_no_convergence_raises():
    grid = Domain.interval(64)
    src = np.random.default_rng(1).uniform(size=64)
    with pytest.raises(NoConvergence) as exc:
        solve_w(src, src, make_params(d3=10.0, gamma=0.01), grid, maxiter=2)
    assert exc.value.iterations >= 2 and exc.value.residual > 1e-10


def test_pcg_reports_true_residual():
    a = sp.diags([1.0, 2.0, 3.0]).tocsr()
    x, its, res = pcg(lambda z: a @ z, np.ones(3), np.array([1.0, 2.0, 3.0]))
    assert np.allclose(x, [1, 0.5, 1 / 3]) and res < 1e-14 and its <= 1


def test_compatibility_defect_negative_control():
    grid = Domain.interval(128)
    rng = np.random.default_rng(5)
    u, v = rng.uniform(0, 1, 128), rng.uniform(0, 1, 128)
    p = make_params(d3=1.0, gamma=0.1)
    prob = EllipticProblem(p.d3, p.gamma, u + v, grid)
    w1, _, _ = pcg(prob.apply, prob.source, prob.diagonal(), maxiter=1)
    assert discrete_compatibility(w1, u, v, p) > 1e-3
    w = solve_w(u, v, p, grid)
    assert discrete_compatibility(w, u, v, p) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 5), st.floats(0.1, 5))
def test_compatibility_on_random_sources(seed, d3, gamma):
    grid = Domain.interval(64)
    rng = np.random.default_rng(seed)
    u, v = rng.uniform(0, 3, 64), rng.uniform(0, 3, 64)
    p = make_params(d3=d3, gamma=gamma, alpha=rng.uniform(0.1, 3), beta=rng.uniform(0.1, 3))
    w = solve_w(u, v, p, grid)
    scale = max(1.0, float(np.mean(p.alpha * u + p.beta * v)))
    assert discrete_compatibility(w, u, v, p) <= 1e-9 * scale


def test_maximum_principle():
    grid = Domain.square(16)
    rng = np.random.default_rng(2)
    u, v = rng.uniform(0, 1, grid.shape), rng.uniform(0, 1, grid.shape)
    p = make_params(gamma=2.0)
    w = solve_w(u, v, p, grid)
    src = (u + v) / p.gamma
    assert src.min() - 1e-9 <= w.min() and w.max() <= src.max() + 1e-9
