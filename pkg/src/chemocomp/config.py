"""INI run configuration: parsing, ``section.key=value`` overrides and the
initial-data profiles.

Example::

    [params]
    d1 = 1
    ...
    [domain]
    dim = 1
    lengths = 1.0
    cells = 128
    [scheme]
    dt = 0.1
    t_end = 40
    [initial]
    kind = perturbed
    u0 = 0.6667
    v0 = 0.6667
    amplitude = 0.1
    seed = 0
"""
from __future__ import annotations

import configparser
import itertools
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import ChemocompError, InvalidInitialData, ParameterError
from .integrator import SchemeConfig
from .model import PARAM_NAMES, Domain, ModelParams

CONDITION_SETS = ("auto", "boundedness", "case1", "case2", "case2-strict")
INITIAL_KINDS = ("constant", "perturbed", "bump")


class ConfigError(ChemocompError, ValueError):
    def __init__(self, message, section=None, key=None, line=None):
        self.section = section
        self.key = key
        self.line = line
        where = ""
        if section:
            where = f"[{section}]" + (f" {key}" if key else "")
            if line:
                where += f" (line {line})"
            where += ": "
        super().__init__(where + message)


@dataclass(frozen=True)
class InitialSpec:
    kind: str = "perturbed"
    u0: float = 0.5
    v0: float = 0.5
    amplitude: float = 0.1
    seed: int = 0
    center: Tuple[float, ...] = ()
    width: float = 0.1
    u_height: float = 1.0
    v_height: float = 1.0

    def build(self, domain: Domain):
        """Initial ``(u0, v0)`` arrays on ``domain``. Perturbations are
        relative, seeded, and clipped at zero."""
        shape = domain.shape
        if self.kind == "constant":
            u = np.full(shape, self.u0)
            v = np.full(shape, self.v0)
        elif self.kind == "perturbed":
            rng = np.random.default_rng(self.seed)
            u = self.u0 * (1.0 + self.amplitude * rng.uniform(-1.0, 1.0, shape))
            v = self.v0 * (1.0 + self.amplitude * rng.uniform(-1.0, 1.0, shape))
        elif self.kind == "bump":
            xs = domain.centers()
            center = self.center or tuple(L / 2 for L in domain.lengths)
            if len(center) != domain.dim:
                raise InvalidInitialData("bump center needs one coordinate per axis")
            r2 = sum((x - c) ** 2 for x, c in zip(xs, center))
            prof = np.exp(-r2 / self.width**2)
            u = self.u0 + self.u_height * prof
            v = self.v0 + self.v_height * prof
        else:
            raise InvalidInitialData(f"unknown initial kind {self.kind!r}")
        u = np.maximum(u, 0.0)
        v = np.maximum(v, 0.0)
        for name, f in (("u", u), ("v", v)):
            if not np.any(f > 0.0):
                raise InvalidInitialData(f"{name}0 vanishes identically")
        return u, v


@dataclass
class RunConfig:
    params: ModelParams
    domain: Domain
    scheme: SchemeConfig
    initial: InitialSpec
    n: int = 2
    conditions: str = "auto"
    require_a1p_above_1: bool = False
    checkpoint_every: int = 0
    sweep_axes: List[Tuple[str, List[str]]] = field(default_factory=list)
    sweep_simulate: bool = False
    sweep_t_end: Optional[float] = None
    raw: Dict[str, Dict[str, str]] = field(default_factory=dict)


def _line_of(text, section, key):
    if text is None:
        return None
    cur = None
    for i, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        m = re.match(r"\[([^\]]+)\]", s)
        if m:
            cur = m.group(1).strip()
            continue
        if cur == section and re.match(rf"{re.escape(key)}\s*[=:]", s):
            return i
    return None


class _Reader:
    def __init__(self, raw, text=None):
        self.raw = raw
        self.text = text

    def err(self, section, key, msg):
        return ConfigError(msg, section, key, _line_of(self.text, section, key))

    def get(self, section, key, conv, default=...):
        try:
            s = self.raw[section][key]
        except KeyError:
            if default is ...:
                raise ConfigError("missing required field", section, key) from None
            return default
        try:
            return conv(s)
        except (ValueError, TypeError) as exc:
            raise self.err(section, key, f"cannot parse {s!r}: {exc}") from None


def _bool(s):
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def _floats(s):
    return tuple(float(x) for x in s.replace(",", " ").split())


def _ints(s):
    return tuple(int(x) for x in s.replace(",", " ").split())


def parse_sweep_values(spec: str) -> List[str]:
    """``a, b, c`` or ``linspace:start:stop:num`` or ``geomspace:start:stop:num``."""
    spec = spec.strip()
    m = re.fullmatch(r"(linspace|geomspace):([^:]+):([^:]+):(\d+)", spec)
    if m:
        fn = np.linspace if m.group(1) == "linspace" else np.geomspace
        return [repr(float(x)) for x in fn(float(m.group(2)), float(m.group(3)), int(m.group(4)))]
    vals = [x.strip() for x in spec.split(",") if x.strip()]
    if not vals:
        raise ValueError("empty sweep axis")
    return vals


def load_raw(path) -> Tuple[Dict[str, Dict[str, str]], str]:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_raw(text), text


def parse_raw(text) -> Dict[str, Dict[str, str]]:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    return {s: dict(cp[s]) for s in cp.sections()}


def apply_overrides(raw, overrides):
    """Apply ``section.key=value`` strings to a raw mapping (copied)."""
    out = {s: dict(kv) for s, kv in raw.items()}
    for item in overrides or ():
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override {item!r} must look like section.key=value")
        lhs, value = item.split("=", 1)
        section, key = lhs.strip().split(".", 1)
        out.setdefault(section, {})[key.strip()] = value.strip()
    return out


def dump_raw(raw) -> str:
    lines = []
    for section, kv in raw.items():
        lines.append(f"[{section}]")
        lines.extend(f"{k} = {v}" for k, v in kv.items())
        lines.append("")
    return "\n".join(lines)


def build(raw, text=None) -> RunConfig:
    r = _Reader(raw, text)
    if "params" not in raw:
        raise ConfigError("missing [params] section")
    unknown = [k for k in raw["params"] if k not in PARAM_NAMES]
    if unknown:
        raise r.err("params", unknown[0], "unknown parameter")
    values = {k: r.get("params", k, float) for k in PARAM_NAMES}
    try:
        params = ModelParams(**values)
    except ParameterError as exc:
        raise r.err("params", exc.name, str(exc)) from None

    dim = r.get("domain", "dim", int, 1)
    lengths = r.get("domain", "lengths", _floats, (1.0,) * dim)
    cells = r.get("domain", "cells", _ints, (64,) * dim)
    if len(lengths) == 1 and dim > 1:
        lengths = lengths * dim
    if len(cells) == 1 and dim > 1:
        cells = cells * dim
    if dim not in (1, 2):
        raise r.err("domain", "dim", "the solver supports dim 1 or 2")
    try:
        domain = Domain(dim, lengths, cells)
    except ValueError as exc:
        raise r.err("domain", "cells", str(exc)) from None

    try:
        scheme = SchemeConfig(
            dt=r.get("scheme", "dt", float, 0.1),
            t_end=r.get("scheme", "t_end", float, 10.0),
            safety=r.get("scheme", "safety", float, 0.5),
            adaptive=r.get("scheme", "adaptive", _bool, True),
            sample_every=r.get("scheme", "sample_every", int, 1),
            snapshot_every=r.get("scheme", "snapshot_every", int, 0),
            elliptic_tol=r.get("scheme", "elliptic_tol", float, 1e-10),
        )
    except ValueError as exc:
        raise ConfigError(str(exc), "scheme") from None

    kind = r.get("initial", "kind", str, "perturbed").strip()
    if kind not in INITIAL_KINDS:
        raise r.err("initial", "kind", f"expected one of {INITIAL_KINDS}")
    initial = InitialSpec(
        kind=kind,
        u0=r.get("initial", "u0", float, 0.5),
        v0=r.get("initial", "v0", float, 0.5),
        amplitude=r.get("initial", "amplitude", float, 0.1),
        seed=r.get("initial", "seed", int, 0),
        center=r.get("initial", "center", _floats, ()),
        width=r.get("initial", "width", float, 0.1),
        u_height=r.get("initial", "u_height", float, 1.0),
        v_height=r.get("initial", "v_height", float, 1.0),
    )
    if initial.u0 < 0 or initial.v0 < 0:
        raise r.err("initial", "u0" if initial.u0 < 0 else "v0", "initial levels must be nonnegative")

    n = r.get("check", "n", int, 2)
    if n < 1:
        raise r.err("check", "n", "dimension must be >= 1")
    conds = r.get("check", "conditions", str, "auto").strip()
    if conds not in CONDITION_SETS:
        raise r.err("check", "conditions", f"expected one of {CONDITION_SETS}")

    axes = []
    sim = False
    sim_t_end = None
    for key, spec in raw.get("sweep", {}).items():
        if key == "simulate":
            sim = r.get("sweep", key, _bool)
        elif key == "t_end":
            sim_t_end = r.get("sweep", key, float)
        else:
            if "." not in key:
                raise r.err("sweep", key, "axis names must look like section.key")
            axes.append((key, r.get("sweep", key, parse_sweep_values)))

    return RunConfig(
        params=params, domain=domain, scheme=scheme, initial=initial, n=n, conditions=conds,
        require_a1p_above_1=r.get("check", "require_a1p_above_1", _bool, False),
        checkpoint_every=r.get("output", "checkpoint_every", int, 0),
        sweep_axes=axes, sweep_simulate=sim, sweep_t_end=sim_t_end, raw=raw,
    )


def load(path, overrides=()) -> RunConfig:
    raw, text = load_raw(path)
    return build(apply_overrides(raw, overrides), text)


def sweep_points(cfg: RunConfig):
    """Override lists for every grid point, first axis varying slowest."""
    names = [a for a, _ in cfg.sweep_axes]
    for combo in itertools.product(*[vals for _, vals in cfg.sweep_axes]):
        yield [f"{n}={v}" for n, v in zip(names, combo)]
