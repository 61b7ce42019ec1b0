"""Parameter conditions for boundedness and stabilization, with witness search.

All inequalities are evaluated literally in float64. Thresholds that come out
negative are legal and mean the corresponding condition holds for any positive
growth rate. A ratio whose denominator has a vanishing positive part is +inf.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import InfeasibleDelta1, NonpositiveAtZero
from .model import ModelParams, Regime, SteadyState, classify_regime

INF = math.inf


def _pos(x):
    return x if x > 0.0 else 0.0


def _ratio(num, den):
    """``num / den`` with the convention ``x / 0 = +inf``."""
    return num / den if den > 0.0 else INF


def dimension_factor(n):
    """``n / (n - 2)``, taken as +inf for ``n <= 2``."""
    return INF if n <= 2 else n / (n - 2.0)


# --------------------------------------------------------------------------
# boundedness and L^p intervals

@dataclass(frozen=True)
class BoundednessResult:
    ok: bool
    ok_species: Tuple[bool, bool]
    thresholds: Tuple[float, float]
    ratios: Tuple[float, float]
    margins: Tuple[float, float]


def check_boundedness(params: ModelParams, n: int) -> BoundednessResult:
    if n < 1:
        raise ValueError("n must be >= 1")
    p = params
    k = dimension_factor(n) * p.d3
    thr1 = k * min(1.0 / p.alpha, p.a1 / p.beta)
    thr2 = k * min(1.0 / p.beta, p.a2 / p.alpha)
    r1, r2 = p.chi1 / p.mu1, p.chi2 / p.mu2
    ok1, ok2 = r1 < thr1, r2 < thr2
    return BoundednessResult(ok1 and ok2, (ok1, ok2), (thr1, thr2), (r1, r2), (thr1 - r1, thr2 - r2))


@dataclass(frozen=True)
class LpInterval:
    lower: float
    upper: float

    @property
    def nonempty(self):
        return self.lower < self.upper


def lp_interval(params: ModelParams, n: int, species: int) -> LpInterval:
    """Exponents p for which the L^p bound of one species closes."""
    p = params
    if species == 1:
        c1, c2 = p.alpha * p.chi1, p.beta * p.chi1
        s1, s2 = p.d3 * p.mu1, p.a1 * p.d3 * p.mu1
    elif species == 2:
        c1, c2 = p.beta * p.chi2, p.alpha * p.chi2
        s1, s2 = p.d3 * p.mu2, p.a2 * p.d3 * p.mu2
    else:
        raise ValueError("species must be 1 or 2")
    upper = min(_ratio(c1, _pos(c1 - s1)), _ratio(c2, _pos(c2 - s2)))
    return LpInterval(n / 2.0, upper)


# --------------------------------------------------------------------------
# Lemma-style sufficient criterion for a ternary quadratic form

@dataclass(frozen=True)
class QuadraticFormCoeffs:
    """Coefficients of ``a x^2 + b xy + c xz + d y^2 + e yz + f z^2``."""

    a: float
    b: float
    c: float
    d: float
    e: float
    f: float

    def __post_init__(self):
        if not all(math.isfinite(x) for x in self.as_tuple()):
            raise ValueError("quadratic form coefficients must be finite")

    def as_tuple(self):
        return (self.a, self.b, self.c, self.d, self.e, self.f)

    def matrix(self):
        a, b, c, d, e, f = self.as_tuple()
        return np.array([[a, b / 2, c / 2], [b / 2, d, e / 2], [c / 2, e / 2, f]])

    def shifted(self, eps):
        """Form minus ``eps * (x^2 + y^2 + z^2)``."""
        return QuadraticFormCoeffs(self.a - eps, self.b, self.c, self.d - eps, self.e, self.f - eps)


def criterion_values(coeffs: QuadraticFormCoeffs):
    """The three expressions whose joint positivity certifies the form is
    nonnegative. The third is -inf when the second is not positive."""
    a, b, c, d, e, f = coeffs.as_tuple()
    if not a > 0.0:
        return a, -INF, -INF
    g2 = d - b * b / (4.0 * a)
    den = 4.0 * a * d - b * b
    if not den > 0.0:
        return a, g2, -INF
    g3 = f - c * c / (4.0 * a) - (2.0 * a * e - b * c) ** 2 / (4.0 * a * den)
    return a, g2, g3


def quadratic_form_nonneg(coeffs: QuadraticFormCoeffs) -> bool:
    g1, g2, g3 = criterion_values(coeffs)
    return g1 > 0.0 and g2 > 0.0 and g3 > 0.0


# --------------------------------------------------------------------------
# Case 1: a1, a2 in (0, 1)

def _feasible_roots(k):
    """Open root interval of ``k d^2 - (4 - 2k) d + k < 0`` (i.e. of
    ``4 d - k (1 + d)^2 > 0``), or None when empty."""
    if not k < 1.0:
        return None
    s = 2.0 * math.sqrt(1.0 - k)
    hi = (2.0 - k + s) / k
    # product of roots is 1; avoids cancellation in (2 - k - s)
    lo = 1.0 / hi
    return lo, hi


def feasibility_margin(k, delta1):
    return 4.0 * delta1 - k * (1.0 + delta1) ** 2


def case1_feasible_delta1(a1: float, a2: float) -> Optional[Tuple[float, float]]:
    return _feasible_roots(a1 * a2)


def _mixing_term(alpha, beta, a1, a2, delta1):
    return alpha**2 * a1 * delta1 + beta**2 * a2 - alpha * beta * a1 * a2 * (1.0 + delta1)


def case1_thresholds(params: ModelParams, delta1):
    """Right-hand sides of the two case-1 growth-rate conditions. Works
    elementwise on arrays of ``delta1``."""
    p = params
    k = p.a1 * p.a2
    num = (1.0 + delta1) * _mixing_term(p.alpha, p.beta, p.a1, p.a2, delta1)
    den = 4.0 * p.d3 * p.gamma * (1.0 - k) * feasibility_margin(k, delta1)
    thr1 = p.chi1**2 * (1.0 - p.a1) * num / (p.a1 * p.d1 * den)
    thr2 = p.chi2**2 * (1.0 - p.a2) * num / (p.a2 * p.d2 * den)
    return thr1, thr2


@dataclass(frozen=True)
class Case1Result:
    ok: bool
    delta1: float
    threshold_mu1: float
    threshold_mu2: float


def case1_check(params: ModelParams, delta1: float) -> Case1Result:
    if not (0.0 < params.a1 < 1.0 and 0.0 < params.a2 < 1.0):
        raise ValueError("case 1 needs a1, a2 in (0, 1)")
    if not (delta1 > 0.0 and feasibility_margin(params.a1 * params.a2, delta1) > 0.0):
        raise InfeasibleDelta1(f"delta1={delta1!r} violates 4*d - a1*a2*(1+d)^2 > 0")
    t1, t2 = case1_thresholds(params, delta1)
    return Case1Result(params.mu1 > t1 and params.mu2 > t2, float(delta1), float(t1), float(t2))


def _golden_min(fun, lo, hi, iters=60):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    return (a + b) / 2.0


def _log_grid(lo, hi, num):
    # strictly interior points of (lo, hi)
    return np.geomspace(lo, hi, num + 2)[1:-1]


def case1_search(params: ModelParams, num=512) -> Optional[float]:
    """Deterministic search for a delta1 satisfying all case-1 conditions."""
    if not (0.0 < params.a1 < 1.0 and 0.0 < params.a2 < 1.0):
        return None
    roots = case1_feasible_delta1(params.a1, params.a2)
    if roots is None:
        return None
    grid = _log_grid(*roots, max(num, 512))

    def score(d):
        t1, t2 = case1_thresholds(params, d)
        return np.maximum(t1 / params.mu1, t2 / params.mu2)

    s = score(grid)
    i = int(np.argmin(s))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    x = math.exp(_golden_min(lambda z: float(score(math.exp(z))), math.log(lo), math.log(hi)))
    for cand in (x, float(grid[i])):
        if feasibility_margin(params.a1 * params.a2, cand) > 0.0 and case1_check(params, cand).ok:
            return cand
    return None


# --------------------------------------------------------------------------
# Case 2: a1 >= 1 > a2

def case2_threshold(params: ModelParams, delta1, a1p):
    p = params
    k = a1p * p.a2
    num = p.chi2**2 * delta1 * _mixing_term(p.alpha, p.beta, a1p, p.a2, delta1)
    return num / (4.0 * p.a2 * p.d2 * p.d3 * p.gamma * feasibility_margin(k, delta1))


@dataclass(frozen=True)
class Case2Result:
    ok: bool
    delta1: float
    a1p: float
    threshold_mu2: float
    # a1p > 1 is what the exponential-rate statement asks for
    a1p_above_1: bool


def case2_check(params: ModelParams, delta1: float, a1p: float) -> Case2Result:
    if not (params.a1 >= 1.0 > params.a2):
        raise ValueError("case 2 needs a1 >= 1 > a2")
    if not (1.0 <= a1p <= params.a1):
        raise ValueError(f"a1p={a1p!r} must lie in [1, a1]")
    if not (delta1 > 0.0 and feasibility_margin(a1p * params.a2, delta1) > 0.0):
        raise InfeasibleDelta1(f"delta1={delta1!r} violates 4*d - a1p*a2*(1+d)^2 > 0")
    thr = float(case2_threshold(params, delta1, a1p))
    return Case2Result(params.mu2 > thr, float(delta1), float(a1p), thr, a1p > 1.0)


def case2_search(params: ModelParams, require_a1p_above_1: bool = False,
                 num_a1p=64, num_delta=256) -> Optional[Tuple[float, float]]:
    """Scan ``a1p`` in ascending order; for each, take the delta1 with the
    most slack and return the first passing pair."""
    if not (params.a1 >= 1.0 > params.a2):
        return None
    if require_a1p_above_1:
        if not params.a1 > 1.0:
            return None
        a1ps = np.linspace(1.0, params.a1, num_a1p + 1)[1:]
    else:
        a1ps = np.linspace(1.0, params.a1, num_a1p) if params.a1 > 1.0 else np.array([1.0])
    for a1p in a1ps:
        a1p = float(a1p)
        roots = _feasible_roots(a1p * params.a2)
        if roots is None:
            continue
        grid = _log_grid(*roots, num_delta)
        thr = case2_threshold(params, grid, a1p)
        for j in np.argsort(thr, kind="stable")[:4]:
            d = float(grid[j])
            if feasibility_margin(a1p * params.a2, d) > 0.0 and case2_check(params, d, a1p).ok:
                return d, a1p
    return None


# --------------------------------------------------------------------------
# delta2 interval, dissipation form and epsilon1

def delta2_interval(params: ModelParams, steady: SteadyState, delta1: float, case: int,
                    a1p: Optional[float] = None) -> Optional[Tuple[float, float]]:
    """Open interval of admissible Young-inequality weights delta2, or None.

    The upper end is +inf when its denominator is not positive."""
    p = params
    if case == 1:
        k = p.a1 * p.a2
        lower = max(steady.u_star * p.chi1**2 / (4.0 * p.d1),
                    p.a1 * p.mu1 * steady.v_star * p.chi2**2 / (4.0 * p.d2 * p.a2 * p.mu2))
        num = p.d3 * p.a1 * p.mu1 * p.gamma * feasibility_margin(k, delta1)
        den = (1.0 + delta1) * _mixing_term(p.alpha, p.beta, p.a1, p.a2, delta1)
    elif case == 2:
        if a1p is None:
            raise ValueError("case 2 needs a1p")
        k = a1p * p.a2
        lower = a1p * p.mu1 * p.chi2**2 * delta1 / (4.0 * p.d2 * p.a2 * p.mu2)
        num = p.d3 * a1p * p.mu1 * p.gamma * feasibility_margin(k, delta1)
        den = _mixing_term(p.alpha, p.beta, a1p, p.a2, delta1)
    else:
        raise ValueError("case must be 1 or 2")
    upper = num / den if den > 0.0 else INF
    if not lower < upper:
        return None
    return lower, upper


def dissipation_form(params: ModelParams, delta1: float, delta2: float, case: int,
                     a1p: Optional[float] = None) -> QuadraticFormCoeffs:
    """Coefficients of minus the energy-rate bound, in the deviations
    ``(x, y, z)`` of ``(u, v, w)`` from the target state."""
    p = params
    if case == 1:
        a1, wgt = p.a1, (1.0 + delta1) * delta2
    elif case == 2:
        a1, wgt = a1p, delta2
    else:
        raise ValueError("case must be 1 or 2")
    return QuadraticFormCoeffs(
        a=p.mu1,
        b=(1.0 + delta1) * a1 * p.mu1,
        c=-p.alpha * wgt / p.d3,
        d=a1 * p.mu1 * delta1 / p.a2,
        e=-p.beta * wgt / p.d3,
        f=p.gamma * wgt / p.d3,
    )


def g_values(params, delta1, delta2, eps, case=1, a1p=None):
    """``(g1, g2, g3)`` evaluated at ``eps``."""
    form = dissipation_form(params, delta1, delta2, case, a1p)
    return criterion_values(form.shifted(eps))


def _all_positive(form: QuadraticFormCoeffs, c, e, f, eps):
    """Vectorised ``g1, g2, g3 > 0`` for the form with ``c, e, f`` replaced
    by broadcastable arrays, shifted by ``eps``."""
    a = form.a - eps
    d = form.d - eps
    f = f - eps
    b = form.b
    with np.errstate(divide="ignore", invalid="ignore"):
        g2 = d - b * b / (4.0 * a)
        den = 4.0 * a * d - b * b
        g3 = f - c * c / (4.0 * a) - (2.0 * a * e - b * c) ** 2 / (4.0 * a * den)
    return (a > 0.0) & (g2 > 0.0) & (den > 0.0) & (g3 > 0.0)


def _eps_grid(mu1, resolution):
    step = mu1 / resolution
    return np.arange(resolution // 2, 0, -1) * step


def epsilon1_search(params: ModelParams, steady: SteadyState, delta1: float, delta2: float,
                    case: int = 1, a1p: Optional[float] = None, resolution=1024) -> Optional[float]:
    """Largest ``eps`` on the grid ``k * mu1 / resolution`` (``eps <= mu1/2``)
    with ``g1, g2, g3 > 0``; halves below the grid if none qualifies."""
    for i, g in enumerate(g_values(params, delta1, delta2, 0.0, case, a1p), start=1):
        if not g > 0.0:
            raise NonpositiveAtZero(i, g)

    def ok(eps):
        return all(g > 0.0 for g in g_values(params, delta1, delta2, eps, case, a1p))

    form = dissipation_form(params, delta1, delta2, case, a1p)
    grid = _eps_grid(params.mu1, resolution)
    good = np.flatnonzero(_all_positive(form, form.c, form.e, form.f, grid))
    # the vectorised scan proposes, the scalar evaluation decides
    for j in good[:4]:
        if ok(float(grid[j])):
            return float(grid[j])
    for k in range(resolution // 2, 0, -1):
        if ok(k * params.mu1 / resolution):
            return k * params.mu1 / resolution
    eps = params.mu1 / resolution
    for _ in range(80):
        eps /= 2.0
        if ok(eps):
            return eps
    return None


def choose_delta2(params, steady, delta1, case, a1p=None, num=64, resolution=1024):
    """Pick delta2 inside its interval maximising the resulting epsilon1."""
    interval = delta2_interval(params, steady, delta1, case, a1p)
    if interval is None:
        return None, None
    lo, hi = interval
    if math.isinf(hi):
        cands = lo + (1.0 + lo) * np.geomspace(1e-3, 1e3, num)
    else:
        cands = lo + (hi - lo) * (np.arange(1, num + 1) / (num + 1))
    # c, e, f are linear in delta2
    unit = dissipation_form(params, delta1, 1.0, case, a1p)
    base = dissipation_form(params, delta1, 0.0, case, a1p)
    col = cands[:, None]
    c, e, f = unit.c * col, unit.e * col, unit.f * col
    at_zero = _all_positive(base, c, e, f, 0.0)[:, 0]
    grid = _eps_grid(params.mu1, resolution)
    ok = _all_positive(base, c, e, f, grid[None, :]) & at_zero[:, None]
    # grid is descending, so the first hit per row is the largest eps
    best_eps = np.where(ok.any(axis=1), grid[np.argmax(ok, axis=1)], -1.0)
    order = np.argsort(-best_eps, kind="stable")
    if best_eps[order[0]] < 0.0:
        order = np.flatnonzero(at_zero)
    for i in order[:8]:
        d2 = float(cands[i])
        try:
            eps = epsilon1_search(params, steady, delta1, d2, case, a1p, resolution)
        except NonpositiveAtZero:
            continue
        if eps is not None and lo < d2 < hi:
            return d2, eps
    return None, None


# --------------------------------------------------------------------------
# earlier conditions from the literature

@dataclass(frozen=True)
class LegacyResult:
    # None means "not applicable" (normalisation not met)
    pre1: Optional[bool]
    pre23: bool
    stw: Optional[bool]


def legacy_conditions(params: ModelParams) -> LegacyResult:
    p = params
    r1, r2 = p.chi1 / p.mu1, p.chi2 / p.mu2
    pre1 = None
    if p.d3 == 1.0 and p.alpha == 1.0 and p.beta == 1.0:
        s = 2.0 * (p.chi1 + p.chi2)
        pre1 = (s + p.a2 * p.mu1 < p.mu2) and (s + p.a1 * p.mu2 < p.mu1)
    pre2 = (r1 < p.d3 / (2.0 * p.alpha) and r1 < p.a1 * p.d3 / p.beta
            and r2 < p.d3 / (2.0 * p.beta) and r2 < p.a2 * p.d3 / p.alpha)
    pre3 = p.a1 * p.a2 * p.d3**2 < (p.d3 - 2.0 * p.alpha * r1) * (p.d3 - 2.0 * p.beta * r2)
    stw = None
    if p.d3 == 1.0 and p.beta == 1.0:
        stw = r1 <= p.a1 and r2 < 0.5
        if stw:
            m = max(r2, p.a2 * (p.mu2 - p.chi2) / (p.mu2 - 2.0 * p.chi2),
                    (p.alpha - p.a2) * p.chi2 / (p.mu2 - 2.0 * p.chi2))
            stw = p.alpha * r1 + m < 1.0
    return LegacyResult(pre1, pre2 and pre3, stw)


# --------------------------------------------------------------------------
# aggregate report

@dataclass
class ConditionReport:
    n: int
    regime: str
    steady: Tuple[Optional[float], Optional[float], Optional[float]]
    boundedness: BoundednessResult
    lp_intervals: Tuple[Optional[LpInterval], Optional[LpInterval]]
    case1: Optional[Case1Result] = None
    case1_status: str = "not-applicable"
    case2: Optional[Case2Result] = None
    case2_status: str = "not-applicable"
    delta2_interval: Optional[Tuple[float, float]] = None
    delta2: Optional[float] = None
    delta2_upper_infinite: bool = False
    epsilon1: Optional[float] = None
    legacy: Optional[LegacyResult] = None
    notes: list = field(default_factory=list)

    @property
    def stabilization_ok(self):
        if self.case1_status != "not-applicable":
            return self.case1_status == "ok" and self.epsilon1 is not None
        if self.case2_status != "not-applicable":
            return self.case2_status == "ok" and self.epsilon1 is not None
        return None

    def holds(self, which="auto"):
        """Whether the requested condition set holds."""
        if which == "boundedness":
            return self.boundedness.ok
        if which == "case1":
            return self.boundedness.ok and self.case1_status == "ok" and self.epsilon1 is not None
        if which in ("case2", "case2-strict"):
            ok = self.case2_status == "ok" and self.epsilon1 is not None
            if which == "case2-strict":
                ok = ok and self.case2 is not None and self.case2.a1p_above_1
            return self.boundedness.ok and ok
        if which == "auto":
            s = self.stabilization_ok
            return self.boundedness.ok and (s is None or s)
        raise ValueError(f"unknown condition set {which!r}")

    def to_dict(self):
        d = asdict(self)
        d["stabilization_ok"] = self.stabilization_ok
        return d

    def flat_row(self):
        b = self.boundedness
        row = {
            "n": self.n,
            "regime": self.regime,
            "u_star": self.steady[0],
            "v_star": self.steady[1],
            "w_star": self.steady[2],
            "boundedness_ok": b.ok,
            "bounded_margin_1": b.margins[0],
            "bounded_margin_2": b.margins[1],
            "lp1_lower": None if self.lp_intervals[0] is None else self.lp_intervals[0].lower,
            "lp1_upper": None if self.lp_intervals[0] is None else self.lp_intervals[0].upper,
            "lp2_lower": None if self.lp_intervals[1] is None else self.lp_intervals[1].lower,
            "lp2_upper": None if self.lp_intervals[1] is None else self.lp_intervals[1].upper,
            "case1_status": self.case1_status,
            "case1_delta1": None if self.case1 is None else self.case1.delta1,
            "case1_threshold_mu1": None if self.case1 is None else self.case1.threshold_mu1,
            "case1_threshold_mu2": None if self.case1 is None else self.case1.threshold_mu2,
            "case2_status": self.case2_status,
            "case2_delta1": None if self.case2 is None else self.case2.delta1,
            "case2_a1p": None if self.case2 is None else self.case2.a1p,
            "case2_threshold_mu2": None if self.case2 is None else self.case2.threshold_mu2,
            "case2_a1p_above_1": None if self.case2 is None else self.case2.a1p_above_1,
            "delta2_lower": None if self.delta2_interval is None else self.delta2_interval[0],
            "delta2_upper": None if self.delta2_interval is None else self.delta2_interval[1],
            "delta2": self.delta2,
            "delta2_upper_infinite": self.delta2_upper_infinite,
            "epsilon1": self.epsilon1,
            "stabilization_ok": self.stabilization_ok,
            "legacy_pre1": None if self.legacy is None else self.legacy.pre1,
            "legacy_pre23": None if self.legacy is None else self.legacy.pre23,
            "legacy_stw": None if self.legacy is None else self.legacy.stw,
        }
        return row


def evaluate(params: ModelParams, n: int, require_a1p_above_1: bool = False) -> ConditionReport:
    """Run every condition check relevant to ``params`` in dimension ``n``."""
    steady = classify_regime(params)
    rep = ConditionReport(
        n=n,
        regime=steady.regime.value + (" (mirrored)" if steady.mirrored else ""),
        steady=steady.triple(),
        boundedness=check_boundedness(params, n),
        lp_intervals=(lp_interval(params, n, 1), lp_interval(params, n, 2)) if n >= 2 else (None, None),
        legacy=legacy_conditions(params),
    )
    if n <= 2:
        rep.notes.append("n <= 2: boundedness thresholds are +inf")
    if rep.legacy.pre1 is None:
        rep.notes.append("pre1 not applicable: needs d3 = alpha = beta = 1")
    if rep.legacy.stw is None:
        rep.notes.append("Stinner-Tello-Winkler set not applicable: needs d3 = beta = 1")

    case = None
    if steady.regime is Regime.COEXISTENCE:
        case = 1
        if case1_feasible_delta1(params.a1, params.a2) is None:
            rep.case1_status = "infeasible delta1"
        else:
            d1 = case1_search(params)
            if d1 is None:
                rep.case1_status = "no witness"
                # delta1 = 1 is always feasible here; report its thresholds
                rep.case1 = case1_check(params, 1.0)
            else:
                rep.case1 = case1_check(params, d1)
                rep.case1_status = "ok"
    elif steady.regime in (Regime.EXCLUSION, Regime.ALGEBRAIC_BOUNDARY) and not steady.mirrored:
        case = 2
        found = case2_search(params, require_a1p_above_1)
        if found is None:
            rep.case2_status = "no witness"
        else:
            rep.case2 = case2_check(params, *found)
            rep.case2_status = "ok"
    elif steady.mirrored:
        rep.notes.append("a2 >= 1 > a1: only the a1 >= 1 > a2 orientation has convergence conditions")
    else:
        rep.notes.append("a1, a2 >= 1: stabilization is open; no convergence conditions")

    if case == 1 and rep.case1_status == "ok":
        d1, a1p = rep.case1.delta1, None
    elif case == 2 and rep.case2_status == "ok":
        d1, a1p = rep.case2.delta1, rep.case2.a1p
    else:
        return rep
    rep.delta2_interval = delta2_interval(params, steady, d1, case, a1p)
    if rep.delta2_interval is not None:
        rep.delta2_upper_infinite = math.isinf(rep.delta2_interval[1])
        if rep.delta2_upper_infinite:
            rep.notes.append("delta2 upper bound denominator <= 0: upper taken as +inf")
        rep.delta2, rep.epsilon1 = choose_delta2(params, steady, d1, case, a1p)
    return rep


def stabilization_witness(params: ModelParams, require_a1p_above_1: bool = False):
    """``(case, delta1, a1p, delta2, epsilon1)`` or None when no witness."""
    steady = classify_regime(params)
    if steady.regime is Regime.COEXISTENCE:
        d1 = case1_search(params)
        if d1 is None:
            return None
        d2, eps = choose_delta2(params, steady, d1, 1)
        return None if d2 is None else (1, d1, None, d2, eps)
    if steady.regime in (Regime.EXCLUSION, Regime.ALGEBRAIC_BOUNDARY) and not steady.mirrored:
        found = case2_search(params, require_a1p_above_1)
        if found is None:
            return None
        d1, a1p = found
        d2, eps = choose_delta2(params, steady, d1, 2, a1p)
        return None if d2 is None else (2, d1, a1p, d2, eps)
    return None
