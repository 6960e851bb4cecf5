"""Batch verification runner.

Flags configure (GCM, level, truncations, weight cap) and select suites;
reports are written as canonical JSON or aligned text.  Exit codes:
0 = all selected suites pass, 1 = some check failed, 2 = invalid
configuration or GCM, 3 = a window overflowed (the message suggests the
required size).
"""

import argparse
import json
import sys

from .config import Context, WindowOverflowError
from .rat import Q, rat, rat_str
from . import cartan, reports, suites


def build_parser():
    p = argparse.ArgumentParser(
        prog="hadic",
        description="Exact verification suites for truncated hbar-adic series structures",
    )
    p.add_argument("--config", help="JSON config file; flags override its entries")
    p.add_argument("--gcm", help="preset name (A1, A2, A1xA1, B2, A1affine) or inline JSON")
    p.add_argument("--level", help="level as a rational, e.g. 1 or 3/2")
    p.add_argument("--hbar-order", type=int, dest="hbar_order", help="truncation order in hbar (>= 2)")
    p.add_argument("--z-order", type=int, dest="z_order", help="z-exponent window bound (>= 4)")
    p.add_argument("--weight-cap", type=int, dest="weight_cap", help="Fock-space weight cap")
    p.add_argument(
        "--suite",
        action="append",
        dest="suite",
        help="suite to run (repeatable); default: all suites",
    )
    p.add_argument("--format", choices=("json", "text"), dest="format", help="report format")
    p.add_argument("--out", help="report output path (default: stdout)")
    return p


def load_config(args):
    cfg = {
        "gcm": "A1",
        "level": "1",
        "n_hbar": 6,
        "m_z": 12,
        "weight_cap": 6,
        "suites": list(suites.SUITE_NAMES),
        "format": "json",
        "out": None,
    }
    if args.config:
        with open(args.config) as fh:
            file_cfg = json.load(fh)
        for key in cfg:
            if key in file_cfg:
                cfg[key] = file_cfg[key]
    if args.gcm is not None:
        cfg["gcm"] = args.gcm
    if args.level is not None:
        cfg["level"] = args.level
    if args.hbar_order is not None:
        cfg["n_hbar"] = args.hbar_order
    if args.z_order is not None:
        cfg["m_z"] = args.z_order
    if args.weight_cap is not None:
        cfg["weight_cap"] = args.weight_cap
    if args.suite:
        cfg["suites"] = list(args.suite)
    if args.format is not None:
        cfg["format"] = args.format
    if args.out is not None:
        cfg["out"] = args.out
    return cfg


def parse_gcm(spec):
    if isinstance(spec, dict):
        return cartan.gcm_from_dict(spec)
    spec = str(spec)
    if spec.strip().startswith("{") or spec.strip().startswith("["):
        data = json.loads(spec)
        if isinstance(data, list):
            data = {"matrix": data}
        return cartan.gcm_from_dict(data)
    return cartan.preset(spec)


def run(cfg):
    """Run the configured suites; returns (exit_code, report_dict)."""
    try:
        gcm = parse_gcm(cfg["gcm"])
        level = rat(str(cfg["level"]))
        ctx = Context(int(cfg["n_hbar"]), int(cfg["m_z"]), int(cfg["weight_cap"]))
        for name in cfg["suites"]:
            if name not in suites.SUITE_NAMES:
                raise ValueError(
                    "unknown suite %r (have %s)" % (name, ", ".join(suites.SUITE_NAMES))
                )
        if "classical-affine" in cfg["suites"]:
            # validated eagerly: the matrix realization only covers type A
            import hadic.classical as classical

            classical.TypeALieAlgebra(gcm)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        return 2, {"error": str(exc)}

    selected = list(cfg["suites"])
    results = []
    timings = {}
    try:
        for name in selected:
            report, elapsed = suites.run_suite(name, gcm, level, ctx)
            results.append(report)
            timings[name] = round(elapsed, 3)
    except WindowOverflowError as exc:
        body = {"error": str(exc)}
        if exc.required_m_z:
            body["suggested_m_z"] = max(int(cfg["m_z"]) * 2, exc.required_m_z + 4)
        return 3, body

    config_dict = {
        "gcm": gcm.name or json.dumps(gcm.to_dict(), sort_keys=True),
        "level": rat_str(level),
        "n_hbar": ctx.n_hbar,
        "m_z": ctx.m_z,
        "weight_cap": ctx.weight_cap,
        "suites": selected,
    }
    report = reports.assemble(config_dict, results, timings)
    return (0 if report["pass"] else 1), report


def main(argv=None):
    args = build_parser().parse_args(argv)
    cfg = load_config(args)
    code, report = run(cfg)
    if "error" in report:
        sys.stderr.write("error: %s\n" % report["error"])
        if "suggested_m_z" in report:
            sys.stderr.write("suggested m_z: %d\n" % report["suggested_m_z"])
        return code
    text = (
        reports.to_json(report)
        if cfg["format"] == "json"
        else reports.to_text(report)
    )
    if cfg["out"]:
        with open(cfg["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
