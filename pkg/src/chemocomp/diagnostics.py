"""Distances to the target state, Lyapunov energies, dissipation checks and
decay-rate fits."""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateWindow, NonpositiveDensity
from .grid import integrate, l2_norm
from .model import Domain, FieldState, ModelParams, Regime, SteadyState

COLUMNS = ("t", "l2_u", "l2_v", "l2_w", "linf_u", "linf_v", "linf_w",
           "energy", "dissipation", "min_u", "min_v")

TINY = 1e-300
DEFAULT_FLOOR = 1e-9  # 10x the default elliptic tolerance


def _relative_entropy(x, x_star):
    """``x - x* - x* log(x/x*)`` evaluated as ``x* (r - log1p(r))`` with
    ``r = x/x* - 1`` to keep precision near ``x = x*``."""
    r = (x - x_star) / x_star
    return x_star * (r - np.log1p(r))


def _check_positive(arr, name):
    bad = np.flatnonzero(~(arr > 0.0))
    if bad.size:
        raise NonpositiveDensity(name, tuple(int(i) for i in np.unravel_index(bad[0], arr.shape)))
    return np.maximum(arr, TINY)


def energy_E1(state: FieldState, params: ModelParams, steady: SteadyState, delta1: float,
              domain: Domain) -> float:
    if steady.regime is not Regime.COEXISTENCE:
        raise ValueError("E1 is defined for the coexistence regime")
    u = _check_positive(state.u, "u")
    v = _check_positive(state.v, "v")
    weight = params.a1 * params.mu1 * delta1 / (params.a2 * params.mu2)
    return (integrate(_relative_entropy(u, steady.u_star), domain)
            + weight * integrate(_relative_entropy(v, steady.v_star), domain))


def energy_E2(state: FieldState, params: ModelParams, delta1: float, a1p: float,
              domain: Domain) -> float:
    u = np.asarray(state.u)
    if np.any(u < 0.0):
        raise NonpositiveDensity("u", tuple(int(i) for i in np.argwhere(u < 0.0)[0]))
    v = _check_positive(state.v, "v")
    weight = a1p * params.mu1 * delta1 / (params.a2 * params.mu2)
    return integrate(u, domain) + weight * integrate(_relative_entropy(v, 1.0), domain)


def quadratic_distance(state: FieldState, steady: SteadyState, domain: Domain) -> float:
    """``int (u-u*)^2 + (v-v*)^2 + (w-w*)^2``."""
    return sum(integrate(np.square(f - s), domain) for f, s in zip((state.u, state.v, state.w), steady.triple()))


# --------------------------------------------------------------------------
# time series

@dataclass
class TimeSeries:
    data: dict

    def __post_init__(self):
        self.data = {k: np.asarray(self.data[k], dtype=np.float64) for k in COLUMNS}
        t = self.data["t"]
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("t must be strictly increasing")

    def __getitem__(self, key):
        return self.data[key]

    def __len__(self):
        return len(self.data["t"])

    @property
    def t(self):
        return self.data["t"]

    @classmethod
    def from_rows(cls, rows):
        rows = list(rows)
        data = {k: [r[k] for r in rows] for k in COLUMNS}
        data["dissipation"] = energy_rates(np.asarray(data["t"], float), np.asarray(data["energy"], float))
        return cls(data)

    def distance(self, norm="linf"):
        """Summed distance of ``(u, v, w)`` to the target in ``l2`` or ``linf``."""
        if norm == "linf":
            return self["linf_u"] + self["linf_v"] + self["linf_w"]
        if norm == "l2":
            return self["l2_u"] + self["l2_v"] + self["l2_w"]
        if norm == "l2_uv":
            return self["l2_u"] + self["l2_v"]
        if norm == "linf_uv":
            return self["linf_u"] + self["linf_v"]
        if norm in self.data:
            return self[norm]
        raise KeyError(norm)

    def quadratic(self):
        return self["l2_u"] ** 2 + self["l2_v"] ** 2 + self["l2_w"] ** 2

    def slice(self, start, stop=None):
        return TimeSeries({k: v[start:stop] for k, v in self.data.items()})

    def concat(self, other):
        return TimeSeries({k: np.concatenate([self[k], other[k]]) for k in COLUMNS})

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(COLUMNS)
            for i in range(len(self)):
                wr.writerow([repr(float(self.data[k][i])) for k in COLUMNS])

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            rd = csv.reader(fh)
            header = next(rd, None)
            if header is None or tuple(h.strip() for h in header) != COLUMNS:
                raise ValueError(f"{path}: expected header {','.join(COLUMNS)}")
            rows = [[float(x) for x in r] for r in rd if r]
        arr = np.array(rows, dtype=np.float64).reshape(-1, len(COLUMNS))
        return cls({k: arr[:, i] for i, k in enumerate(COLUMNS)})


def energy_rates(t, energy):
    """Backward-difference energy rate per sample; the first entry is NaN."""
    out = np.full(len(t), np.nan)
    if len(t) > 1:
        out[1:] = np.diff(energy) / np.diff(t)
    return out


class Probe:
    """Callable turning a state into one time-series row."""

    def __init__(self, params: ModelParams, domain: Domain, steady: SteadyState,
                 delta1: Optional[float] = None, a1p: Optional[float] = None):
        self.params = params
        self.domain = domain
        self.steady = steady
        self.delta1 = 1.0 if delta1 is None else delta1
        self.a1p = 1.0 if a1p is None else a1p

    def energy(self, state):
        s = self.steady
        try:
            if s.regime is Regime.COEXISTENCE:
                return energy_E1(state, self.params, s, self.delta1, self.domain)
            if s.regime in (Regime.EXCLUSION, Regime.ALGEBRAIC_BOUNDARY) and not s.mirrored:
                return energy_E2(state, self.params, self.delta1, self.a1p, self.domain)
        except NonpositiveDensity:
            return math.nan
        return math.nan

    def __call__(self, state: FieldState) -> dict:
        row = {"t": state.t, "min_u": float(np.min(state.u)), "min_v": float(np.min(state.v)),
               "energy": self.energy(state), "dissipation": math.nan}
        for name, f, target in zip("uvw", (state.u, state.v, state.w), self.steady.triple()):
            if target is None:
                row[f"l2_{name}"] = row[f"linf_{name}"] = math.nan
            else:
                dev = f - target
                row[f"l2_{name}"] = l2_norm(dev, self.domain)
                row[f"linf_{name}"] = float(np.max(np.abs(dev)))
        return row


# --------------------------------------------------------------------------
# dissipation

@dataclass
class DissipationReport:
    t: np.ndarray           # right end of each interval
    passed: np.ndarray
    fraction: float         # over post-transient intervals
    count: int


def dissipation_check(series: TimeSeries, epsilon: float, transient: float = 0.0,
                      rel_slack=0.05, abs_slack=1e-10) -> DissipationReport:
    """Check ``(E2 - E1)/(t2 - t1) <= -epsilon * Q(t2) + slack`` per interval."""
    t = series.t
    e = series["energy"]
    q = series.quadratic()
    rate = np.diff(e) / np.diff(t)
    bound = -epsilon * q[1:]
    slack = rel_slack * (np.abs(rate) + np.abs(bound)) + abs_slack
    passed = rate <= bound + slack
    mask = (t[:-1] >= transient) & np.isfinite(rate)
    n = int(np.count_nonzero(mask))
    frac = float(np.count_nonzero(passed & mask)) / n if n else 1.0
    return DissipationReport(t[1:], passed, frac, n)


def monotone_fraction(t, values, transient=0.0, atol=0.0):
    """Fraction of post-transient intervals on which ``values`` does not increase."""
    t = np.asarray(t)
    values = np.asarray(values)
    ok = np.diff(values) <= atol
    mask = t[:-1] >= transient
    n = int(np.count_nonzero(mask))
    return float(np.count_nonzero(ok & mask)) / n if n else 1.0


# --------------------------------------------------------------------------
# rate fits

class RateModel(str, enum.Enum):
    EXPONENTIAL = "exponential"
    ALGEBRAIC = "algebraic"


@dataclass(frozen=True)
class RateFit:
    model: RateModel
    ell: float
    amplitude: float
    goodness: float
    window: Tuple[float, float]
    samples: int


def default_window(t, d, floor=DEFAULT_FLOOR, fraction=0.5):
    """Last ``fraction`` of the samples whose distance stays above ``floor``."""
    t = np.asarray(t)
    d = np.asarray(d)
    above = np.isfinite(d) & (d > floor)
    idx = np.flatnonzero(above)
    if idx.size == 0:
        raise DegenerateWindow("no samples above the floor")
    # stop at the first time the distance reaches the floor
    below = np.flatnonzero(~above[idx[0]:])
    end = idx[0] + below[0] if below.size else len(t)
    start = idx[0] + int(math.floor((end - idx[0]) * (1.0 - fraction)))
    return float(t[start]), float(t[end - 1])


def _loglinear(x, y):
    n = len(x)
    if n < 8:
        raise DegenerateWindow(f"only {n} samples in window (need >= 8)")
    xm = x.mean()
    sxx = float(np.sum((x - xm) ** 2))
    if not sxx > 0.0:
        raise DegenerateWindow("regressor has zero variance")
    ym = y.mean()
    slope = float(np.sum((x - xm) * (y - ym))) / sxx
    icpt = ym - slope * xm
    sst = float(np.sum((y - ym) ** 2))
    sse = float(np.sum((y - icpt - slope * x) ** 2))
    r2 = 1.0 if sst == 0.0 else 1.0 - sse / sst
    return slope, icpt, min(max(r2, 0.0), 1.0)


def _fit(model, t, d, window, floor):
    t = np.asarray(t, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    if window is None:
        window = default_window(t, d, floor)
    mask = (t >= window[0]) & (t <= window[1])
    tw, dw = t[mask], d[mask]
    if np.any(~(dw > 0.0)):
        raise DegenerateWindow("distances must be strictly positive on the window")
    x = tw if model is RateModel.EXPONENTIAL else np.log(tw + 1.0)
    slope, icpt, r2 = _loglinear(x, np.log(dw))
    return RateFit(model, -slope, math.exp(icpt), r2, (float(window[0]), float(window[1])), int(mask.sum()))


def _series_args(series, norm):
    if isinstance(series, TimeSeries):
        return series.t, series.distance(norm)
    t, d = series
    return t, d


def fit_exponential(series, window=None, norm="linf", floor=DEFAULT_FLOOR) -> RateFit:
    """Least-squares fit ``d ~ C exp(-ell t)``. ``series`` is a TimeSeries or a
    ``(t, d)`` pair."""
    t, d = _series_args(series, norm)
    return _fit(RateModel.EXPONENTIAL, t, d, window, floor)


def fit_algebraic(series, window=None, norm="linf", floor=DEFAULT_FLOOR) -> RateFit:
    """Least-squares fit ``d ~ C (t+1)^(-ell)``."""
    t, d = _series_args(series, norm)
    return _fit(RateModel.ALGEBRAIC, t, d, window, floor)


@dataclass(frozen=True)
class ConsistencyReport:
    n: int
    ell_l2: float
    ell_linf: float
    floor: float
    passed: bool
    note: str


def l2_to_linf_consistency(series, n=2, tolerance=0.05, window=None, floor=DEFAULT_FLOOR,
                           l2_norm_name="l2_uv", linf_norm_name="linf") -> ConsistencyReport:
    """Compare the L-infinity decay rate with the guaranteed floor
    ``ell_2 / (n + 1)`` from the L2 rate."""
    t, d2 = _series_args(series, l2_norm_name) if isinstance(series, TimeSeries) else (series[0], series[1])
    dinf = series.distance(linf_norm_name) if isinstance(series, TimeSeries) else series[2]
    if window is None:
        w2 = default_window(t, d2, floor)
        wi = default_window(t, dinf, floor)
        window = (max(w2[0], wi[0]), min(w2[1], wi[1]))
    f2 = fit_exponential((t, d2), window)
    fi = fit_exponential((t, dinf), window)
    lo = f2.ell / (n + 1)
    note = f"exponent floor ell_2/(n+1) with n={n}"
    return ConsistencyReport(n, f2.ell, fi.ell, lo, fi.ell >= lo - tolerance, note)
