"""Command-line entry point.

    fwlab run CONFIG [--output-dir DIR] [--format csv|json] [--tolerance-scale K]
    fwlab verify [SUITE ...] [--output-dir DIR] [--tolerance-scale K]

Exit codes: 0 success, 2 config/argument error, 3 numerical-policy violation
(including a failed verification), 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Sequence

import numpy as np

from . import config as cfgmod
from .numeric import NumericalPolicyError

SCHEMA = "fw-lab/1"
EXIT_OK, EXIT_PARSE, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

TRAJECTORY_COLUMNS = (
    "t", "eev_fw_direct", "eev_primed_naive", "eev_primed_corrected", "gap",
    "Sigma_x", "Sigma_y", "Sigma_z", "norm_defect", "odd_part_norm",
)
SCALING_COLUMNS = ("hbar", "residual_eq19", "residual_eq21")


def fmt(x: float) -> str:
    """17 significant digits, ``.`` decimal point."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def _json_number(x):
    x = float(x)
    return x if math.isfinite(x) else None


def trajectory_rows(result) -> list[list[float]]:
    rows = []
    for rep, spin, nd in zip(result.reports, result.fw_spin, result.norm_defects):
        rows.append([rep.t, rep.eev_fw_direct, rep.eev_primed_naive, rep.eev_primed_corrected,
                     rep.gap, spin[0], spin[1], spin[2], nd, rep.odd_part_norm])
    return rows


def scaling_rows(study) -> list[list[float]]:
    return [[h, r19, r21] for h, r19, r21 in
            zip(study.hbars, study.residuals["eq19"], study.residuals["eq21"])]


def _units_header(sc) -> list[str]:
    p = sc.particle
    lines = [
        f"fw-lab scenario {sc.name}; schema {SCHEMA}",
        f"natural units: c = 1, hbar = {fmt(p.hbar)}, m = {fmt(p.m)}, e = {fmt(p.e)}",
        "energies in units of the mass scale; time in units of hbar/energy",
    ]
    if sc.name == "hbar_scaling":
        lines.append("residuals: Frobenius norms of (first-order energy operator - exact Eriksen-based one)")
    else:
        lines.append("Sigma: FW-representation spin expectation; gap = naive - corrected")
    return lines


def render_csv(sc, columns, rows) -> str:
    buf = io.StringIO()
    for line in _units_header(sc):
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(x) for x in r])
    return buf.getvalue()


def render_json(cfg, columns, rows, summary: dict) -> str:
    doc = {
        "schema": SCHEMA,
        "scenario": cfg.name,
        "config": cfgmod.to_dict(cfg),
        "columns": list(columns),
        "rows": [[_json_number(x) for x in r] for r in rows],
        "summary": summary,
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _summary(result) -> dict:
    if result.study is not None:
        st = result.study
        return {
            "slopes": {k: _json_number(v) for k, v in st.slopes.items()},
            "residual_eq16": [_json_number(x) for x in st.residuals["eq16"]],
            "floors": [_json_number(x) for x in st.floors],
            "at_floor": list(st.at_floor),
        }
    reps = result.reports
    direct = np.array([r.eev_fw_direct for r in reps])
    corrected = np.array([r.eev_primed_corrected for r in reps])
    return {
        "max_abs_direct_minus_corrected": float(np.max(np.abs(direct - corrected))),
        "max_norm_defect": float(np.max(result.norm_defects)),
        "final_spin": [float(x) for x in result.fw_spin[-1]],
    }


def run_config(cfg, output_dir: str | None = None, formats: Sequence[str] | None = None,
               tolerance_scale: float = 1.0) -> list[str]:
    """Run one config and write its outputs; returns the written paths."""
    from .scenarios import run

    policy = cfg.policy.scaled(tolerance_scale) if tolerance_scale != 1.0 else cfg.policy
    result = run(cfg.scenario, policy)
    if result.study is not None:
        columns, rows = SCALING_COLUMNS, scaling_rows(result.study)
    else:
        columns, rows = TRAJECTORY_COLUMNS, trajectory_rows(result)
    out_dir = output_dir if output_dir is not None else cfg.output.directory
    os.makedirs(out_dir, exist_ok=True)
    written = []
    fmts = tuple(formats) if formats else cfg.output.formats
    base = os.path.join(out_dir, cfg.name)
    if "csv" in fmts:
        with open(base + ".csv", "w", encoding="utf-8", newline="") as fh:
            fh.write(render_csv(cfg.scenario, columns, rows))
        written.append(base + ".csv")
    if "json" in fmts:
        with open(base + ".json", "w", encoding="utf-8") as fh:
            fh.write(render_json(cfg, columns, rows, _summary(result)))
        written.append(base + ".json")
    return written


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fwlab", description="Time-dependent FW transformation laboratory")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output-dir", default=None, help="directory for output files")
    common.add_argument("--tolerance-scale", type=float, default=1.0,
                        help="multiply every numerical tolerance by this factor")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="run a scenario config")
    r.add_argument("config", help="path to a YAML scenario config")
    r.add_argument("--format", choices=cfgmod.FORMATS, default=None,
                   help="write only this format (default: the config's output.formats)")
    v = sub.add_parser("verify", parents=[common], help="run the invariant battery")
    v.add_argument("suite", nargs="*", help="suite names (default: all)")
    v.add_argument("--list", action="store_true", help="list suites and exit")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    if not (args.tolerance_scale > 0 and math.isfinite(args.tolerance_scale)):
        print("error: --tolerance-scale must be a positive finite number", file=sys.stderr)
        return EXIT_PARSE
    try:
        if args.command == "run":
            cfg = cfgmod.load(args.config)
            for path in run_config(cfg, args.output_dir, [args.format] if args.format else None,
                                   args.tolerance_scale):
                print(path)
            return EXIT_OK
        from . import verify

        if args.list:
            print("\n".join(verify.SUITES))
            return EXIT_OK
        report = verify.run_suites(args.suite or None, args.tolerance_scale)
        text = json.dumps(report, indent=2) + "\n"
        if args.output_dir:
            os.makedirs(args.output_dir, exist_ok=True)
            with open(os.path.join(args.output_dir, "verify.json"), "w", encoding="utf-8") as fh:
                fh.write(text)
        sys.stdout.write(text)
        for chk in report["checks"]:
            if not chk["passed"]:
                print(f"FAILED {chk['suite']}/{chk['name']}: measured {chk['measured']!r} "
                      f"threshold {chk['threshold']!r}", file=sys.stderr)
        return EXIT_OK if report["passed"] else EXIT_NUMERIC
    except cfgmod.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (NumericalPolicyError, ArithmeticError) as exc:
        print(f"numerical policy violation: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
