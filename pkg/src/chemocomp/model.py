"""Parameter and state types, regime classification and steady states."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields
from functools import cached_property
from typing import Optional, Tuple

import numpy as np

from .errors import NonfiniteParameter, NonpositiveParameter

PARAM_NAMES = ("d1", "d2", "d3", "chi1", "chi2", "mu1", "mu2", "a1", "a2", "alpha", "beta", "gamma")


@dataclass(frozen=True)
class ModelParams:
    d1: float
    d2: float
    d3: float
    chi1: float
    chi2: float
    mu1: float
    mu2: float
    a1: float
    a2: float
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        nonfinite = [k for k, x in values.items() if not math.isfinite(float(x))]
        if nonfinite:
            raise NonfiniteParameter(nonfinite)
        nonpositive = [k for k, x in values.items() if not float(x) > 0.0]
        if nonpositive:
            raise NonpositiveParameter(nonpositive)
        for k, x in values.items():
            object.__setattr__(self, k, float(x))

    def as_dict(self):
        return {k: getattr(self, k) for k in PARAM_NAMES}

    def replace(self, **changes):
        d = self.as_dict()
        d.update(changes)
        return ModelParams(**d)


def validate_params(*args, **kwargs) -> ModelParams:
    """Build a :class:`ModelParams` from twelve reals (positional in
    ``PARAM_NAMES`` order, keywords, or a single mapping)."""
    if len(args) == 1 and not kwargs and isinstance(args[0], dict):
        kwargs = dict(args[0])
        args = ()
    if args:
        if len(args) != len(PARAM_NAMES):
            raise TypeError(f"expected {len(PARAM_NAMES)} values, got {len(args)}")
        kwargs = dict(zip(PARAM_NAMES, args), **kwargs)
    missing = [k for k in PARAM_NAMES if k not in kwargs]
    extra = [k for k in kwargs if k not in PARAM_NAMES]
    if missing or extra:
        raise TypeError(f"missing {missing}, unexpected {extra}")
    return ModelParams(**kwargs)


@dataclass(frozen=True)
class Domain:
    """Box domain ``[0, L_1] x ... x [0, L_dim]`` split into uniform cells."""

    dim: int
    lengths: Tuple[float, ...]
    cells: Tuple[int, ...]

    def __post_init__(self):
        lengths = tuple(float(x) for x in np.atleast_1d(self.lengths))
        cells = tuple(int(x) for x in np.atleast_1d(self.cells))
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if len(lengths) != self.dim or len(cells) != self.dim:
            raise ValueError("lengths and cells need one entry per axis")
        if any(not (math.isfinite(x) and x > 0) for x in lengths):
            raise ValueError("lengths must be positive")
        if any(c < 3 for c in cells):
            raise ValueError("each axis needs at least 3 cells")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "cells", cells)

    @classmethod
    def interval(cls, cells, length=1.0):
        return cls(1, (length,), (cells,))

    @classmethod
    def square(cls, cells, length=1.0):
        return cls(2, (length, length), (cells, cells))

    @property
    def shape(self):
        return self.cells

    @cached_property
    def spacing(self):
        return tuple(L / n for L, n in zip(self.lengths, self.cells))

    @cached_property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    @cached_property
    def volume(self):
        return float(np.prod(self.lengths))

    @cached_property
    def size(self):
        return int(np.prod(self.cells))

    def centers(self):
        """Cell-centre coordinates, one array per axis (``ij`` indexing)."""
        axes = [(np.arange(n) + 0.5) * h for n, h in zip(self.cells, self.spacing)]
        return np.meshgrid(*axes, indexing="ij")


@dataclass(frozen=True, eq=False)
class FieldState:
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        for name in ("u", "v", "w"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.u.shape == self.v.shape == self.w.shape):
            raise ValueError("u, v, w must share one grid shape")
        object.__setattr__(self, "t", float(self.t))


class Regime(str, enum.Enum):
    COEXISTENCE = "Coexistence"
    EXCLUSION = "Exclusion"
    ALGEBRAIC_BOUNDARY = "AlgebraicBoundary"
    OPEN_CASE = "OpenCase"


@dataclass(frozen=True)
class SteadyState:
    regime: Regime
    u_star: Optional[float]
    v_star: Optional[float]
    w_star: Optional[float]
    # True when v (not u) is the excluded species, i.e. a2 >= 1 > a1.
    mirrored: bool = False

    @property
    def has_target(self):
        return self.u_star is not None

    def triple(self):
        return (self.u_star, self.v_star, self.w_star)


def classify_regime(params: ModelParams) -> SteadyState:
    a1, a2 = params.a1, params.a2
    al, be, ga = params.alpha, params.beta, params.gamma
    if a1 < 1.0 and a2 < 1.0:
        det = 1.0 - a1 * a2
        us = (1.0 - a1) / det
        vs = (1.0 - a2) / det
        return SteadyState(Regime.COEXISTENCE, us, vs, (al * us + be * vs) / ga)
    if a1 >= 1.0 and a2 >= 1.0:
        return SteadyState(Regime.OPEN_CASE, None, None, None)
    if a2 < 1.0:
        regime = Regime.EXCLUSION if a1 > 1.0 else Regime.ALGEBRAIC_BOUNDARY
        return SteadyState(regime, 0.0, 1.0, be / ga)
    # a2 >= 1 > a1: the species-swapped image of the case above. Only the
    # a1 >= 1 > a2 orientation is covered by the convergence theory.
    regime = Regime.EXCLUSION if a2 > 1.0 else Regime.ALGEBRAIC_BOUNDARY
    return SteadyState(regime, 1.0, 0.0, al / ga, mirrored=True)
