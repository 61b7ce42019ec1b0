import math

import numpy as np
import pytest

from chemocomp import classify_regime
from chemocomp.ode import OdeState, rk4_integrate

from conftest import make_params

# a1 = a2 = 0 is outside ModelParams; a tiny coupling stands in for it
LOGISTIC = make_params(a1=1e-300, a2=1e-300)


def test_logistic_closed_form():
    tr = rk4_integrate(OdeState(0.5, 0.5), LOGISTIC, 1e-3, 5.0)
    exact = 1.0 / (1.0 + math.exp(-5.0))
    assert tr.t[-1] == 5.0
    assert abs(tr.u[-1] - exact) <= 1e-8 and abs(tr.v[-1] - exact) <= 1e-8


def test_fourth_order():
    exact = 1.0 / (1.0 + math.exp(-2.0))
    errs = [abs(rk4_integrate(OdeState(0.5, 0.5), LOGISTIC, dt, 2.0).u[-1] - exact) for dt in (0.2, 0.1)]
    assert errs[0] / errs[1] == pytest.approx(16.0, rel=0.2)


def test_equilibrium_is_fixed():
    p = make_params(a1=0.3, a2=0.6)
    us, vs, ws = classify_regime(p).triple()
    tr = rk4_integrate(OdeState(us, vs), p, 0.01, 3.0)
    assert np.allclose(tr.u, us, atol=1e-14) and np.allclose(tr.v, vs, atol=1e-14)
    assert np.allclose(tr.w, ws, atol=1e-14)


def test_exclusion_limit():
    p = make_params(a1=2.0, a2=0.5)
    fin = rk4_integrate(OdeState(0.7, 0.2), p, 0.01, 60.0).final()
    assert fin.u < 1e-6 and abs(fin.v - 1.0) < 1e-6


def test_last_step_clipped_and_csv(tmp_path):
    tr = rk4_integrate(OdeState(0.1, 0.2), make_params(), 0.3, 1.0)
    assert tr.t[-1] == 1.0 and len(tr.t) == 5
    tr.to_csv(tmp_path / "ode.csv")
    lines = (tmp_path / "ode.csv").read_text().splitlines()
    assert lines[0] == "t,u,v,w" and len(lines) == 6


def test_zero_horizon_and_bad_input():
    tr = rk4_integrate(OdeState(0.1, 0.2), make_params(), 0.1, 0.0)
    assert len(tr.t) == 1
    with pytest.raises(ValueError):
        rk4_integrate(OdeState(0.1, 0.2), make_params(), 0.0, 1.0)
    with pytest.raises(ValueError):
        OdeState(-0.1, 0.2)
