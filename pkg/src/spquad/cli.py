"""Command-line front end.

Subcommands wire the library end to end: ``analyze`` (domain, structure,
decomposition), ``quadratize`` (canonical / inclusive / inverse),
``series`` (coefficient table plus radius bound), ``solve`` (analytic
continuation to a target time) and ``check`` (series vs RK4 reference).

Inputs are ``.spode`` equation files or ``.frame`` matrix files; monomial
systems run through the inclusive quadratization pipeline automatically.
Outputs are text, JSON (validating against ``schemas/cli_output.schema.json``)
or CSV.  Exit codes: 0 ok, 2 parse/usage, 3 domain, 4 numeric.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, errors
from .oracle import compare, rk4
from .parse import monomial_text, parse_frame, parse_ode, serialize_frame
from .quadratize import (driver_frame, inverse_driver, inverse_joint_frame,
                         phi_eval, quadratize_canonical, quadratize_inclusive)
from .series import (RadiusWarning, continue_to, evaluate, taylor)
from .sigmapi import analyze_domain, decompose_global, structure

_PARSE_ERRORS = (errors.OdeSyntaxError,)
_DOMAIN_ERRORS = (errors.ContradictoryDomain, errors.InvalidProjection,
                  errors.DomainViolation, errors.DomainExit,
                  errors.ZeroComponent, errors.EmptySystem)
_NUMERIC_ERRORS = (errors.Blowup, errors.Divergence, errors.StepLimit,
                   errors.OrderBudget, errors.NotStationary,
                   errors.EmptyWindow, errors.MixedCenters, ValueError)


def _floats(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip()]


def _load_input(path: str):
    """Returns ('ode', SigmaPiOde) or ('frame', QuadraticFrame)."""
    p = Path(path)
    text = p.read_text()
    if p.suffix == ".frame":
        return "frame", parse_frame(text)
    return "ode", parse_ode(text)


def _pipeline(kind, obj, x0):
    """Uniform view: a frame, the driver initial point, and the component
    map back to the caller's coordinates."""
    if kind == "frame":
        frame = obj
        if x0 is None or len(x0) != frame.dim:
            raise errors.DomainViolation(
                f"--x0 must supply {frame.dim} components")
        comps = {i: i for i in range(1, frame.dim + 1)}
        return frame, np.asarray(x0, dtype=float), comps, None
    ode = obj
    if x0 is None or len(x0) != ode.n:
        raise errors.DomainViolation(f"--x0 must supply {ode.n} components")
    q = quadratize_inclusive(ode)
    frame = driver_frame(q)
    z0 = phi_eval(q, x0)
    comps = {i: q.identity[i] for i in range(1, ode.n + 1)}
    return frame, z0, comps, q


def _meta(args, effective: dict) -> dict:
    return {
        "command": args.command,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "input": str(args.input),
        "config": effective,
    }


def _emit(args, payload: dict, csv_rows=None, text: str | None = None) -> None:
    if args.format == "json":
        out = json.dumps(payload, indent=2, sort_keys=True)
    elif args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in csv_rows or []:
            writer.writerow(row)
        out = buf.getvalue().rstrip("\n")
    else:
        out = text if text is not None else json.dumps(payload, indent=2)
    if args.output:
        Path(args.output).write_text(out + "\n")
    else:
        print(out)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_analyze(args) -> int:
    kind, obj = _load_input(args.input)
    if kind != "ode":
        raise errors.OdeSyntaxError("analyze expects a .spode file")
    ode = obj
    descriptor = analyze_domain(ode)
    report = structure(ode)
    chain = decompose_global(ode)
    from .parse import serialize_ode
    result = {
        "n": ode.n,
        "domain": {
            "classes": {str(j): descriptor.domain_class(j).value
                        for j in range(1, ode.n + 1)},
            "macro_orthant": list(descriptor.macro_orthant),
            "removed_hyperplanes": list(descriptor.removed_hyperplanes),
        },
        "criticality": sorted(report.criticality),
        "singularity": sorted(report.singularity),
        "nonsingular_criticality": sorted(report.nonsingular_criticality),
        "decomposition": [
            {"drop": sorted(stage.drop),
             "regular": stage.report.is_regular,
             "zero_system": stage.ode.is_zero_system,
             "ode": serialize_ode(stage.ode) if stage.ode.n else ""}
            for stage in chain],
    }
    payload = {"meta": _meta(args, {}), "result": result, "warnings": []}
    rows = [["index", "class", "critical", "singular"]]
    for j in range(1, ode.n + 1):
        rows.append([j, descriptor.domain_class(j).value,
                     j in report.criticality, j in report.singularity])
    lines = [f"n = {ode.n}"]
    for j in range(1, ode.n + 1):
        lines.append(f"  x{j}: {descriptor.domain_class(j).value}"
                     + (" critical" if j in report.criticality else "")
                     + (" singular" if j in report.singularity else ""))
    lines.append(f"criticality: {sorted(report.criticality)}")
    lines.append(f"singularity: {sorted(report.singularity)}")
    lines.append(f"decomposition stages: {len(chain)}"
                 f" drops: {[sorted(s.drop) for s in chain]}")
    _emit(args, payload, rows, "\n".join(lines))
    return 0


def cmd_quadratize(args) -> int:
    kind, obj = _load_input(args.input)
    if kind != "ode":
        raise errors.OdeSyntaxError("quadratize expects a .spode file")
    ode = obj
    if args.mode == "canonical":
        q = quadratize_canonical(ode)
        frame = driver_frame(q)
    elif args.mode == "inclusive":
        q = quadratize_inclusive(ode)
        frame = driver_frame(q)
    else:
        q = inverse_driver(ode)
        frame = inverse_joint_frame(q)
    frame_text = serialize_frame(frame)
    if args.frame_out:
        Path(args.frame_out).write_text(frame_text)
    table = [
        {"s": s, "i": i, "l": l,
         "monomial": monomial_text(q.phi[s - 1]),
         "state": "W" if q.inverse else "Z"}
        for s, (i, l) in enumerate(q.pairs, start=1)]
    result = {
        "mode": args.mode,
        "driver_dim": q.driver_dim,
        "frame_dim": frame.dim,
        "coordinates": table,
        "identity": {str(i): s for i, s in sorted(q.identity.items())},
        "frame": frame_text,
        "frame_ref": frame.ref(),
    }
    payload = {"meta": _meta(args, {"mode": args.mode}), "result": result,
               "warnings": []}
    rows = [["s", "i", "l", "state", "monomial"]]
    rows += [[t["s"], t["i"], t["l"], t["state"], t["monomial"]] for t in table]
    lines = [f"mode: {args.mode}  driver dim: {q.driver_dim}"]
    for t in table:
        lines.append(f"  {t['state']}[{t['i']},{t['l']}] (s={t['s']}) = {t['monomial']}")
    if q.identity:
        lines.append(f"identity coordinates: {q.identity}")
    lines.append("frame:")
    lines.append(frame_text.rstrip("\n"))
    _emit(args, payload, rows, "\n".join(lines))
    return 0


def _series_common(args):
    kind, obj = _load_input(args.input)
    x0 = _floats(args.x0) if args.x0 else None
    frame, z0, comps, q = _pipeline(kind, obj, x0)
    return kind, obj, frame, z0, comps, q


def cmd_series(args) -> int:
    kind, obj, frame, z0, comps, _ = _series_common(args)
    wanted = sorted(comps)
    sol = taylor(frame, z0, args.t0, args.order,
                 components=[comps[i] for i in wanted])
    norm = sol.normalized()
    result = {
        "t0": args.t0, "order": args.order,
        "radius_bound": _json_float(sol.radius_bound),
        "frame_ref": sol.frame_ref,
        "components": {},
    }
    rows = [["component", "k", "c_k", "c_k_over_k_factorial"]]
    lines = [f"r_bar = {sol.radius_bound}"]
    for i in wanted:
        r = sol.components.index(comps[i])
        result["components"][str(i)] = {
            "c": [float(v) for v in sol.coeffs[r]],
            "c_normalized": [float(v) for v in norm[r]],
        }
        for k in range(args.order + 1):
            rows.append([i, k, repr(float(sol.coeffs[r, k])),
                         repr(float(norm[r, k]))])
        lines.append(f"x{i}: c = {[float(v) for v in sol.coeffs[r]]}")
    payload = {"meta": _meta(args, {"order": args.order, "t0": args.t0,
                                    "x0": list(map(float, z0))}),
               "result": result, "warnings": []}
    _emit(args, payload, rows, "\n".join(lines))
    return 0


def cmd_solve(args) -> int:
    kind, obj, frame, z0, comps, _ = _series_common(args)
    value, path = continue_to(frame, z0, args.t0, args.to,
                              K=args.order, theta=args.theta,
                              max_steps=args.max_steps)
    wanted = sorted(comps)
    out_vals = {str(i): float(value[comps[i] - 1]) for i in wanted}
    result = {
        "t": args.to,
        "value": out_vals,
        "recenters": len(path),
        "path": [{"t": float(t), "x": [float(v) for v in x]}
                 for t, x in path],
    }
    payload = {"meta": _meta(args, {"to": args.to, "t0": args.t0,
                                    "order": args.order, "theta": args.theta}),
               "result": result, "warnings": []}
    # plottable CSV: one row per recenter point, caller's components
    rows = [["t"] + [f"x{i}" for i in wanted]]
    rows.append([args.t0] + [float(z0[comps[i] - 1]) for i in wanted])
    for t, xvec in path:
        rows.append([float(t)] + [float(xvec[comps[i] - 1]) for i in wanted])
    lines = [f"x({args.to}) = {out_vals} after {len(path)} recenters"]
    _emit(args, payload, rows, "\n".join(lines))
    return 0


def cmd_check(args) -> int:
    kind, obj, frame, z0, comps, _ = _series_common(args)
    a, b = _floats(args.window)
    sol = taylor(frame, z0, args.t0, args.order)
    wanted = sorted(comps)
    sel = [comps[i] - 1 for i in wanted]

    def series_eval(t):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RadiusWarning)
            vals, _ = evaluate(sol, t)
        return vals[sel]

    if kind == "ode":
        reference = obj          # integrate the original monomial system
        ref_x0 = _floats(args.x0)
    else:
        reference = frame
        ref_x0 = z0
    pieces = []
    if a < args.t0:
        back = rk4(reference, ref_x0, args.t0, a, args.step)
        pieces.append((back.times[::-1], back.states[::-1]))
    if b > args.t0:
        fwd = rk4(reference, ref_x0, args.t0, b, args.step)
        pieces.append((fwd.times, fwd.states))
    if not pieces:
        raise errors.EmptyWindow("window does not extend beyond t0")
    times = np.concatenate([p[0] for p in pieces])
    states = np.concatenate([p[1] for p in pieces])
    order = np.argsort(times)
    from .oracle import Trajectory
    traj = Trajectory(times[order], states[order][:, [i - 1 for i in wanted]]
                      if kind == "ode" else states[order][:, sel],
                      {"h": args.step, "rhs": "reference"})
    stride = max(1, len(traj.times) // max(1, args.samples))
    sampled = Trajectory(traj.times[::stride], traj.states[::stride], traj.meta)
    report = compare(series_eval, sampled, (a, b),
                     t0=args.t0, radius=sol.radius_bound)
    result = {
        "window": [a, b],
        "max_rel": report.max_rel,
        "rms_rel": report.rms_rel,
        "n_samples": report.n_samples,
        "out_of_radius": report.out_of_radius,
        "radius_bound": _json_float(sol.radius_bound),
        "flagged": report.flagged,
    }
    payload = {"meta": _meta(args, {"window": [a, b], "step": args.step,
                                    "order": args.order, "t0": args.t0}),
               "result": result,
               "warnings": (["samples beyond the radius bound"]
                            if report.flagged else [])}
    # plottable CSV: one row per compared sample
    rows = [["t"] + [f"series_x{i}" for i in wanted]
            + [f"reference_x{i}" for i in wanted] + ["in_radius"]]
    for t, ref in zip(sampled.times, sampled.states):
        got = series_eval(t)
        rows.append([float(t)] + [float(v) for v in got]
                    + [float(v) for v in ref]
                    + [int(abs(t - args.t0) < sol.radius_bound)])
    lines = [f"max rel {report.max_rel:.3e}  rms {report.rms_rel:.3e} "
             f"over {report.n_samples} samples"
             + ("  [beyond radius bound]" if report.flagged else "")]
    _emit(args, payload, rows, "\n".join(lines))
    return 0


def _json_float(v: float):
    return v if np.isfinite(v) else "inf"


# --------------------------------------------------------------------------
# argument plumbing
# --------------------------------------------------------------------------

def _apply_config(args) -> None:
    """Fill unset options from the --config JSON file; flags win."""
    defaults = {"order": 30 if args.command == "solve" else 16,
                "t0": 0.0, "theta": 0.5, "step": 1e-4,
                "max_steps": 200, "samples": 200}
    cfg = {}
    if getattr(args, "config", None):
        cfg = json.loads(Path(args.config).read_text())
    for key, fallback in defaults.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, type(fallback)(cfg.get(key, fallback)))
    for key in ("x0", "window", "to"):
        if hasattr(args, key) and getattr(args, key) is None and key in cfg:
            value = cfg[key]
            if isinstance(value, list):
                value = ",".join(repr(float(v)) for v in value)
            setattr(args, key, value if key != "to" else float(value))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="spquad",
        description="Quadratize generalized-polynomial ODEs and solve them "
                    "as power series.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("input", help=".spode or .frame file")
        p.add_argument("--format", choices=["json", "csv", "text"],
                       default="text")
        p.add_argument("--output", help="write to this path instead of stdout")
        p.add_argument("--config", help="JSON file with default options")

    p = sub.add_parser("analyze", help="domain, structure and decomposition")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("quadratize", help="construct a quadratization")
    common(p)
    p.add_argument("--mode", choices=["canonical", "inclusive", "inverse"],
                   default="inclusive")
    p.add_argument("--frame-out", help="also write the frame file here")
    p.set_defaults(func=cmd_quadratize)

    p = sub.add_parser("series", help="Taylor coefficient table")
    common(p)
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--t0", type=float, default=None)
    p.add_argument("--x0", help="comma-separated initial values")
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("solve", help="value at a target time via recentering")
    common(p)
    p.add_argument("--to", type=float, default=None, required=False)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--max-steps", dest="max_steps", type=int, default=None)
    p.add_argument("--t0", type=float, default=None)
    p.add_argument("--x0", help="comma-separated initial values")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="compare series against RK4 reference")
    common(p)
    p.add_argument("--window", help="a,b comparison window", default=None)
    p.add_argument("--step", type=float, default=None, help="RK4 step size")
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--t0", type=float, default=None)
    p.add_argument("--x0", help="comma-separated initial values")
    p.add_argument("--samples", type=int, default=None,
                   help="max comparison samples across the window")
    p.set_defaults(func=cmd_check)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        _apply_config(args)
        if getattr(args, "order", 0) is not None and getattr(args, "order", 0) < 0:
            ap.error("--order must be >= 0")
        if getattr(args, "step", 1.0) is not None and getattr(args, "step", 1.0) <= 0:
            ap.error("--step must be > 0")
        theta = getattr(args, "theta", None)
        if theta is not None and not 0.0 < theta <= 1.0:
            ap.error("--theta must lie in (0, 1]")
        if args.command == "solve" and args.to is None:
            ap.error("solve needs --to (or 'to' in --config)")
        if args.command == "check" and args.window is None:
            ap.error("check needs --window (or 'window' in --config)")
        return args.func(args)
    except _PARSE_ERRORS as exc:
        span = getattr(exc, "span", None)
        loc = (f" (line {span.line}, column {span.column}, "
               f"bytes {span.start}..{span.end})") if span else ""
        print(f"parse error: {exc}{loc}", file=sys.stderr)
        return 2
    except _DOMAIN_ERRORS as exc:
        print(f"domain error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except _NUMERIC_ERRORS as exc:
        print(f"numeric error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
