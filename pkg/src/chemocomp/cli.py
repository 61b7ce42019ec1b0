"""Command line: ``check``, ``simulate``, ``sweep`` and ``rate``.

Exit status: 0 success, 1 usage/config/runtime error, 2 negative result
(condition set fails or the rate fit window is degenerate).
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import checkpoint, conditions, config, diagnostics, integrator
from .errors import ChemocompError, DegenerateWindow
from .model import classify_regime

log = logging.getLogger("chemocomp")

EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "value") and not isinstance(obj, (int, float, str)):
        return obj.value
    return obj


def write_csv(path, rows, header=None):
    header = header or list(rows[0].keys())
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for row in rows:
            wr.writerow([_fmt(row.get(k)) for k in header])


# --------------------------------------------------------------------------

def cmd_check(cfg: config.RunConfig, out=None):
    """Evaluate the conditions; returns ``(report, exit_status)``."""
    rep = conditions.evaluate(cfg.params, cfg.n, cfg.require_a1p_above_1)
    p = cfg.params
    if cfg.conditions == "case1" and rep.case1_status == "not-applicable":
        if p.a1 * p.a2 >= 1.0:
            rep.case1_status = "infeasible delta1"
            rep.notes.append("a1*a2 >= 1: no delta1 satisfies the case-1 feasibility inequality")
        else:
            rep.notes.append("case-1 conditions need a1, a2 < 1")
    status = EXIT_OK if rep.holds(cfg.conditions) else EXIT_NEGATIVE
    if out:
        os.makedirs(out, exist_ok=True)
        doc = _jsonable(rep.to_dict())
        doc["requested"] = cfg.conditions
        doc["holds"] = status == EXIT_OK
        with open(os.path.join(out, "report.json"), "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        write_csv(os.path.join(out, "report.csv"), [rep.flat_row()])
    return rep, status


def initial_state(cfg):
    u0, v0 = cfg.initial.build(cfg.domain)
    return integrator.consistent_state(u0, v0, cfg.params, cfg.domain, tol=cfg.scheme.elliptic_tol)


def make_probe(cfg):
    steady = classify_regime(cfg.params)
    wit = conditions.stabilization_witness(cfg.params, cfg.require_a1p_above_1)
    d1 = a1p = None
    if wit is not None:
        _, d1, a1p, _, _ = wit
    return diagnostics.Probe(cfg.params, cfg.domain, steady, d1, a1p), wit


def cmd_simulate(cfg: config.RunConfig, out, resume_from=None):
    os.makedirs(out, exist_ok=True)
    probe, wit = make_probe(cfg)
    kwargs = dict(checkpoint_path=os.path.join(out, "checkpoint.bin"),
                  snapshot_dir=os.path.join(out, "snapshots") if cfg.scheme.snapshot_every else None)
    if cfg.checkpoint_every:
        kwargs["checkpoint_every"] = cfg.checkpoint_every
        kwargs["checkpoint_dir"] = os.path.join(out, "checkpoints")
    if resume_from:
        res = _run_with_checkpoints(None, cfg, probe, resume_from=resume_from, **kwargs)
    else:
        res = _run_with_checkpoints(initial_state(cfg), cfg, probe, **kwargs)
    res.series.to_csv(os.path.join(out, "timeseries.csv"))
    summary = {
        "regime": classify_regime(cfg.params).regime.value,
        "steps": res.steps,
        "t_final": res.final.t,
        "witness": None if wit is None else dict(zip(("case", "delta1", "a1p", "delta2", "epsilon1"), wit)),
        "final_linf_distance": float(res.series.distance("linf")[-1]),
        "min_u": float(np.min(res.series["min_u"])),
        "min_v": float(np.min(res.series["min_v"])),
        "snapshots": [os.path.relpath(p, out) for p in res.snapshots],
    }
    with open(os.path.join(out, "run.json"), "w") as fh:
        json.dump(_jsonable(summary), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return res


def _run_with_checkpoints(initial, cfg, probe, *, checkpoint_path, snapshot_dir,
                          checkpoint_every=0, checkpoint_dir=None, resume_from=None):
    """Drive the integrator, writing numbered mid-run checkpoints when asked."""
    if checkpoint_every:
        os.makedirs(checkpoint_dir, exist_ok=True)

        def hook(state, k):
            checkpoint.write_state(os.path.join(checkpoint_dir, f"checkpoint_{k:08d}.bin"), state, k)
    else:
        hook = None
    common = dict(checkpoint_path=checkpoint_path, snapshot_dir=snapshot_dir,
                  step_hook=hook, hook_every=checkpoint_every)
    if resume_from:
        return integrator.resume(resume_from, cfg.params, cfg.scheme, cfg.domain, probe, **common)
    return integrator.run(initial, cfg.params, cfg.scheme, cfg.domain, probe, **common)


def _sweep_point(args):
    raw, text, overrides = args
    row = {k.split("=", 1)[0]: k.split("=", 1)[1] for k in overrides}
    try:
        cfg = config.build(config.apply_overrides(raw, overrides), text)
        rep, status = cmd_check(cfg)
        row.update(rep.flat_row())
        row["holds"] = status == EXIT_OK
        if cfg.sweep_simulate:
            scheme = cfg.scheme
            if cfg.sweep_t_end is not None:
                scheme = integrator.SchemeConfig(
                    dt=scheme.dt, t_end=cfg.sweep_t_end, safety=scheme.safety, adaptive=scheme.adaptive,
                    sample_every=scheme.sample_every, elliptic_tol=scheme.elliptic_tol)
            probe, _ = make_probe(cfg)
            res = integrator.run(initial_state(cfg), cfg.params, scheme, cfg.domain, probe)
            s = res.series
            row["sim_t_final"] = res.final.t
            row["sim_linf_distance"] = float(s.distance("linf")[-1])
            row["sim_max_u"] = float(np.max(res.final.u))
            row["sim_max_v"] = float(np.max(res.final.v))
            row["sim_min_u"] = float(np.min(s["min_u"]))
            row["sim_min_v"] = float(np.min(s["min_v"]))
        row["error"] = ""
    except Exception as exc:  # recorded in-row; a sweep never aborts
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def cmd_sweep(cfg: config.RunConfig, out, jobs=1, text=None):
    points = list(config.sweep_points(cfg))
    if not points:
        points = [[]]
    tasks = [(cfg.raw, text, ov) for ov in points]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    header = []
    for row in rows:
        header.extend(k for k in row if k not in header)
    header.remove("error")
    header.append("error")
    os.makedirs(out, exist_ok=True)
    write_csv(os.path.join(out, "sweep.csv"), rows, header)
    return rows


def _window(spec):
    if spec is None:
        return None
    try:
        lo, hi = (float(x) for x in spec.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("window must look like t0:t1") from None
    return lo, hi


def cmd_rate(csv_path, model="exponential", window=None, norm="linf"):
    series = diagnostics.TimeSeries.from_csv(csv_path)
    fit = diagnostics.fit_exponential if model == "exponential" else diagnostics.fit_algebraic
    return fit(series, window, norm=norm)


# --------------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="chemocomp", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_config(sp):
        sp.add_argument("--config", required=True, metavar="PATH")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override, e.g. params.chi1=0.2")
        sp.add_argument("--out", default="out", metavar="DIR")

    with_config(sub.add_parser("check", help="evaluate parameter conditions"))
    sp = sub.add_parser("simulate", help="run the PDE solver")
    with_config(sp)
    sp.add_argument("--resume", metavar="CHECKPOINT")
    sp = sub.add_parser("sweep", help="evaluate a grid of configurations")
    with_config(sp)
    sp.add_argument("--jobs", type=int, default=1, metavar="N")
    sp = sub.add_parser("rate", help="fit a decay rate to a time-series CSV")
    sp.add_argument("csv", metavar="TIMESERIES_CSV")
    sp.add_argument("--model", choices=("exponential", "algebraic"), default="exponential")
    sp.add_argument("--window", type=_window, default=None, metavar="T0:T1")
    sp.add_argument("--norm", default="linf", help="linf, l2, l2_uv, linf_uv or a column name")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "rate":
            try:
                fit = cmd_rate(args.csv, args.model, args.window, args.norm)
            except DegenerateWindow as exc:
                print(f"degenerate window: {exc}", file=sys.stderr)
                return EXIT_NEGATIVE
            print(f"model={fit.model.value} ell={fit.ell!r} C={fit.amplitude!r} "
                  f"goodness={fit.goodness!r} window={fit.window[0]!r}:{fit.window[1]!r} samples={fit.samples}")
            return EXIT_OK

        raw, text = config.load_raw(args.config)
        raw = config.apply_overrides(raw, args.set)
        cfg = config.build(raw, text)
        if args.command == "check":
            rep, status = cmd_check(cfg, args.out)
            b = rep.boundedness
            print(f"regime={rep.regime} boundedness_ok={b.ok} case1={rep.case1_status} "
                  f"case2={rep.case2_status} epsilon1={rep.epsilon1} holds={status == EXIT_OK}")
            return status
        if args.command == "simulate":
            res = cmd_simulate(cfg, args.out, args.resume)
            print(f"steps={res.steps} t={res.final.t!r} "
                  f"linf_distance={float(res.series.distance('linf')[-1])!r}")
            return EXIT_OK
        if args.command == "sweep":
            rows = cmd_sweep(cfg, args.out, max(1, args.jobs), text)
            failed = sum(1 for r in rows if r["error"])
            print(f"points={len(rows)} failed={failed}")
            return EXIT_OK
    except (ChemocompError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
