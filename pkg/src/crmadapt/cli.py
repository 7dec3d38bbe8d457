"""Command-line interface: scenario runs, design helpers, bounds, sweeps.

Commands: simulate, design-gain, check-spr, bound, sweep, compare.
Exit codes are a stable contract: 0 success, 2 configuration error,
3 SPR precondition failure, 4 divergence.

Every run directory receives the fully resolved scenario next to its
outputs; feeding that file back reproduces the trace bit for bit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from .bounds import CertificateUnavailable, all_bound_reports
from .lintf import RationalTransfer, is_spr, tf_from_dict
from .polyalg import Polynomial
from .realize import design_gain, tracking_error_tf
from .simengine import (Scenario, ScenarioError, SignalSpec, SimulationDiverged,
                        SprPreconditionError, compile_scenario, simulate)
from .svgplot import write_line_plot

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PRECONDITION = 3
EXIT_DIVERGENCE = 4

_FMT = "%.17g"


class ConfigError(Exception):
    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


# ---------------------------------------------------------------------------
# scenario file parsing
# ---------------------------------------------------------------------------

def _require(doc: dict, key: str, path: str):
    if key not in doc:
        raise ConfigError("missing required field", f"{path}{key}")
    return doc[key]


def _parse_tf(doc, path: str) -> RationalTransfer:
    if not isinstance(doc, dict):
        raise ConfigError("expected an object with k/num/den", path)
    try:
        if "state_space" in doc:
            ss = doc["state_space"]
            A = np.asarray(ss["A"], dtype=float)
            b = np.asarray(ss["b"], dtype=float).ravel()
            c = np.asarray(ss["c"], dtype=float).ravel()
            den = np.poly(A)
            num = np.poly(A - np.outer(b, c)) - den
            return RationalTransfer.from_coeffs(num, den,
                                                gain=float(doc.get("k", 1.0)))
        return tf_from_dict(doc)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc), path) from exc


def _parse_signal(doc, path: str) -> SignalSpec:
    if doc is None:
        return SignalSpec()
    if not isinstance(doc, dict):
        raise ConfigError("expected an object", path)
    kind = doc.get("type", "step")
    kw = dict(kind=kind,
              amplitude=float(doc.get("amplitude", 1.0)),
              offset=float(doc.get("offset", 0.0)))
    if kind == "sine":
        kw.update(frequency=float(doc.get("frequency", 1.0)),
                  phase=float(doc.get("phase", 0.0)))
    elif kind == "square":
        kw.update(period=float(doc.get("period", 20.0)))
    elif kind == "multisine":
        comps = doc.get("components", [])
        if not comps:
            raise ConfigError("multisine needs components", f"{path}.components")
        kw.update(components=tuple((float(a), float(w), float(p))
                                   for a, w, p in comps))
    elif kind != "step":
        raise ConfigError(f"unknown signal type '{kind}'", f"{path}.type")
    return SignalSpec(**kw)


def load_scenario(path_or_doc) -> Scenario:
    """Parse a scenario JSON file (or already-loaded document)."""
    if isinstance(path_or_doc, dict):
        doc = path_or_doc
    else:
        try:
            with open(path_or_doc) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ConfigError(str(exc))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON: {exc}")
    if not isinstance(doc, dict):
        raise ConfigError("scenario file must hold a JSON object")

    plant = _parse_tf(_require(doc, "plant", ""), "plant")
    reference = _parse_tf(_require(doc, "reference", ""), "reference")
    family = _require(doc, "family", "")
    filt = doc.get("filter", {}) or {}
    theta0 = doc.get("theta0")
    if isinstance(theta0, list):
        theta0 = tuple(float(v) for v in theta0)
    lam = doc.get("lam")
    try:
        sc = Scenario(
            plant=plant,
            reference=reference,
            family=str(family),
            ell=tuple(float(v) for v in doc.get("ell", [])),
            gamma=float(doc.get("gamma", 1.0)),
            a_filter=(float(filt["a"]) if "a" in filt else None),
            f_poles=tuple(float(v) for v in filt.get("f", [])),
            signal=_parse_signal(doc.get("signal"), "signal"),
            T=float(doc.get("T", 50.0)),
            h=float(doc.get("h", 1e-3)),
            theta0=theta0,
            seed=int(doc.get("seed", 0)),
            k_chi0=float(doc.get("k_chi0", 0.0)),
            lam=(Polynomial(lam) if lam is not None else None),
            x_p0=tuple(float(v) for v in doc.get("x_p0", [])),
            x_m0=tuple(float(v) for v in doc.get("x_m0", [])),
            theta_star=(tuple(float(v) for v in doc["theta_star"])
                        if doc.get("theta_star") is not None else None),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc))
    return sc


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _write_run(outdir: str, trace) -> None:
    os.makedirs(outdir, exist_ok=True)
    trace.write_csv(os.path.join(outdir, "trace.csv"))
    with open(os.path.join(outdir, "scenario.resolved.json"), "w") as fh:
        json.dump(trace.resolved, fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_line_plot(os.path.join(outdir, "plot.svg"), trace.t,
                    [("y", trace["y"]), ("ym", trace["ym"]), ("ey", trace["ey"])],
                    title=f"{trace.family} run", xlabel="t [s]")


def _bound_table(reports) -> str:
    lines = ["bound,analytic,empirical,satisfied"]
    for rep in reports:
        lines.append(f"{rep.bound_name},{_FMT % rep.analytic_value},"
                     f"{_FMT % rep.empirical_value},{str(rep.satisfied).lower()}")
    return "\n".join(lines) + "\n"


def _human_bounds(reports) -> str:
    if not reports:
        return "no bounds apply to this family\n"
    w = max(len(r.bound_name) for r in reports)
    lines = [f"{'bound':<{w}}  {'analytic':>13}  {'empirical':>13}  ok"]
    for r in reports:
        lines.append(f"{r.bound_name:<{w}}  {r.analytic_value:>13.6g}  "
                     f"{r.empirical_value:>13.6g}  {'yes' if r.satisfied else 'NO'}")
    return "\n".join(lines) + "\n"


def _max_workers() -> int:
    try:
        return max(1, int(os.environ.get("CRMADAPT_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    sc = load_scenario(args.config)
    trace = simulate(sc)
    outdir = args.out or "run-out"
    _write_run(outdir, trace)
    print(f"wrote {outdir}/trace.csv, scenario.resolved.json, plot.svg")
    return EXIT_OK


def cmd_design_gain(args) -> int:
    sc = load_scenario(args.config)
    spec = args.targets or args.poles
    if not spec:
        raise ConfigError("design-gain needs --targets (or --poles)")
    try:
        targets = [complex(tok.replace("i", "j")) for tok in spec.split(",") if tok]
    except ValueError as exc:
        raise ConfigError(f"cannot parse target poles: {exc}", "--targets")
    ell = design_gain(sc.reference, targets)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        err_tf = tracking_error_tf(sc.reference, ell)
    print("ell =", json.dumps([float(v) for v in ell]))
    print("error transfer function: num =", err_tf.num.to_list(),
          " den =", err_tf.den.to_list())
    if sc.f_poles:
        fden = Polynomial([1.0])
        for f in sc.f_poles:
            fden = fden * Polynomial([1.0, float(f)])
        cand = RationalTransfer(1.0, err_tf.num * fden, err_tf.den)
        name = "W_f_prime"
    elif sc.a_filter:
        cand = RationalTransfer(1.0, err_tf.num * Polynomial([1.0, sc.a_filter]),
                                err_tf.den)
        name = "W_e_prime_times_A"
    else:
        cand = err_tf
        name = "W_e_prime"
    cert = is_spr(cand)
    print(f"SPR[{name}]: verdict={cert.verdict} "
          f"margin={cert.min_real_part_margin:.6g} "
          f"limit={cert.limit_check:.6g}")
    return EXIT_OK


def cmd_check_spr(args) -> int:
    sc = load_scenario(args.config)
    cs = compile_scenario(sc)
    code = EXIT_OK
    for name, cert in cs.certificates.items():
        print(f"SPR[{name}]: verdict={cert.verdict} "
              f"margin={cert.min_real_part_margin:.6g} "
              f"hurwitz_margin={cert.hurwitz_margin:.6g} "
              f"limit={cert.limit_check:.6g} grid={cert.grid_size}")
        if not cert.verdict:
            code = EXIT_PRECONDITION
    return code


def cmd_bound(args) -> int:
    sc = load_scenario(args.config)
    cs = compile_scenario(sc)
    trace = simulate(cs)
    try:
        reports = all_bound_reports(cs, trace)
    except CertificateUnavailable as exc:
        print(f"bounds unavailable: {exc}")
        return EXIT_OK
    sys.stdout.write(_human_bounds(reports))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write_run(args.out, trace)
        with open(os.path.join(args.out, "bounds.json"), "w") as fh:
            json.dump([r.to_dict() for r in reports], fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def _sweep_value(sc: Scenario, param: str, value: float) -> Scenario:
    if param == "l":
        m = sc.reference.den.degree
        return replace(sc, ell=tuple([-value] * m))
    if param == "gamma":
        return replace(sc, gamma=value)
    if param == "f1":
        rest = sc.f_poles[1:]
        return replace(sc, f_poles=(value,) + rest)
    raise ConfigError(f"unknown sweep parameter '{param}' "
                      "(expected l, gamma or f1)", "--param")


def _run_one(sc: Scenario):
    cs = compile_scenario(sc)
    trace = simulate(cs)
    bound = None
    try:
        reports = all_bound_reports(cs, trace)
        if reports:
            bound = reports[0]
    except CertificateUnavailable:
        bound = None
    return trace, bound


def cmd_sweep(args) -> int:
    sc = load_scenario(args.config)
    if not args.param:
        raise ConfigError("sweep needs --param")
    if not args.values:
        raise ConfigError("sweep needs a nonempty --values list", "--values")
    try:
        values = [float(tok) for tok in args.values.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse values: {exc}", "--values")
    if not values:
        raise ConfigError("sweep needs a nonempty --values list", "--values")
    scenarios = [_sweep_value(sc, args.param, v) for v in values]
    with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        results = list(pool.map(_run_one, scenarios))
    lines = [f"{args.param},ey_l2_squared,bound,satisfied"]
    for v, (trace, bound) in zip(values, results):
        ey = trace.l2_squared("ey")
        if bound is None:
            lines.append(f"{_FMT % v},{_FMT % ey},,")
        else:
            lines.append(f"{_FMT % v},{_FMT % ey},{_FMT % bound.analytic_value},"
                         f"{str(bound.satisfied).lower()}")
    table = "\n".join(lines) + "\n"
    sys.stdout.write(table)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "sweep.csv"), "w") as fh:
            fh.write(table)
        for i, (trace, _) in enumerate(results):
            _write_run(os.path.join(args.out, f"run_{i:03d}"), trace)
    return EXIT_OK


def cmd_compare(args) -> int:
    sc = load_scenario(args.config)
    if sc.family == "orm_n1":
        raise ConfigError("compare needs a closed-loop family", "family")
    m = sc.reference.den.degree
    open_sc = replace(sc, ell=tuple([0.0] * m))
    closed, closed_bound = _run_one(sc)
    opened, open_bound = _run_one(open_sc)
    ey_c = closed.l2_squared("ey")
    ey_o = opened.l2_squared("ey")
    ratio = ey_c / ey_o if ey_o else float("inf")
    print("configuration,ey_l2_squared,bound")
    print(f"closed_loop,{_FMT % ey_c},"
          f"{_FMT % closed_bound.analytic_value if closed_bound else ''}")
    print(f"open_loop,{_FMT % ey_o},"
          f"{_FMT % open_bound.analytic_value if open_bound else ''}")
    print(f"ratio_closed_over_open,{_FMT % ratio},")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write_run(os.path.join(args.out, "closed_loop"), closed)
        _write_run(os.path.join(args.out, "open_loop"), opened)
        doc = {
            "closed_loop": {"ey_l2_squared": ey_c,
                            "bound": closed_bound.to_dict() if closed_bound else None},
            "open_loop": {"ey_l2_squared": ey_o,
                          "bound": open_bound.to_dict() if open_bound else None},
            "ratio_closed_over_open": ratio,
        }
        with open(os.path.join(args.out, "compare.json"), "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="crmadapt",
        description="Closed-loop reference model adaptive control runner")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, **flags):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="scenario JSON file")
        p.add_argument("--out", default=None, help="output directory")
        if flags.get("targets"):
            p.add_argument("--targets", default=None,
                           help="comma-separated target poles, e.g. -10 or -2+1j,-2-1j")
            p.add_argument("--poles", default=None, help="alias for --targets")
        if flags.get("sweep"):
            p.add_argument("--param", default=None, choices=("l", "gamma", "f1"))
            p.add_argument("--values", default=None,
                           help="comma-separated sweep values")
        p.set_defaults(fn=fn)
        return p

    add("simulate", cmd_simulate)
    add("design-gain", cmd_design_gain, targets=True)
    add("check-spr", cmd_check_spr)
    add("bound", cmd_bound)
    add("sweep", cmd_sweep, sweep=True)
    add("compare", cmd_compare)
    return ap


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (ConfigError, ScenarioError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SprPreconditionError as exc:
        print(f"precondition failure: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except SimulationDiverged as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE


if __name__ == "__main__":
    sys.exit(main())
