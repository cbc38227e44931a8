"""Command-line front end: simulate, compare, validate.

Exit codes: 0 success, 2 config/schema error, 3 regime violation,
4 numerical failure.  Errors are emitted as a JSON record on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .cooling import NoCoolingError, NonNormalizableError, RegimeError
from .lindblad import IntegrationAccuracyError, StiffnessError
from .scenarios import ConfigError, compare_runs, load_config, run_scenario
from .spectral import LiouvillianSizeError, NoSteadyStateError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_REGIME = 3
EXIT_NUMERICAL = 4


def _fail(code: int, kind: str, exc: Exception) -> int:
    record = {"error": kind, "message": str(exc)}
    path = getattr(exc, "path", None)
    if path:
        record["field"] = path
    print(json.dumps(record), file=sys.stderr)
    return code


def _classify(exc: Exception) -> int | None:
    if isinstance(exc, (ConfigError, FileNotFoundError)):
        return EXIT_CONFIG
    if isinstance(exc, (RegimeError, NoCoolingError, NonNormalizableError)):
        return EXIT_REGIME
    if isinstance(
        exc,
        (
            StiffnessError,
            IntegrationAccuracyError,
            NoSteadyStateError,
            LiouvillianSizeError,
            np.linalg.LinAlgError,
        ),
    ):
        return EXIT_NUMERICAL
    return None


_KINDS = {EXIT_CONFIG: "config", EXIT_REGIME: "regime", EXIT_NUMERICAL: "numerical"}


def _guarded(fn) -> int:
    try:
        return fn()
    except Exception as exc:  # noqa: BLE001 - boundary: map everything to exit codes
        code = _classify(exc)
        if code is None:
            raise
        return _fail(code, _KINDS[code], exc)


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    out_dir = args.out or cfg.get("output_dir") or Path(args.config).stem + "_out"
    manifest = run_scenario(cfg, out_dir)
    print(json.dumps({"status": "ok", "output_dir": str(out_dir), "files": sorted(manifest["files"])}))
    return EXIT_OK


def _cmd_compare(args) -> int:
    report = compare_runs(args.dir_a, args.dir_b, args.series, args.tol)
    print(json.dumps(report))
    return EXIT_OK if report["pass"] else 1


def _cmd_validate(args) -> int:
    cfg = load_config(args.config)
    # regime check without running: building the parameter objects raises on
    # invalid regimes (weak coupling, normalizability) where applicable
    from .scenarios import _bh_params, _cooling_params

    if cfg["scenario"] in ("cooling", "sweep"):
        p = _cooling_params(cfg["params"])
        if "atom_only" in cfg["tiers"] and p.coupling_ratio > 0.5:
            raise RegimeError(f"|eta|/kappa = {p.coupling_ratio:.3g} > 0.5")
    else:
        _bh_params(cfg["params"])
    print(json.dumps({"status": "valid", "scenario": cfg["scenario"], "tiers": cfg["tiers"]}))
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cqedsim",
        description="Cavity-QED master-equation benchmark runner",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a scenario config")
    p_sim.add_argument("config")
    p_sim.add_argument("--out", default=None, help="output directory")
    p_sim.set_defaults(fn=_cmd_simulate)

    p_cmp = sub.add_parser("compare", help="compare one series between two runs")
    p_cmp.add_argument("dir_a")
    p_cmp.add_argument("dir_b")
    p_cmp.add_argument("--series", required=True)
    p_cmp.add_argument("--tol", type=float, required=True)
    p_cmp.set_defaults(fn=_cmd_compare)

    p_val = sub.add_parser("validate", help="schema and regime check only")
    p_val.add_argument("config")
    p_val.set_defaults(fn=_cmd_validate)

    args = parser.parse_args(argv)
    return _guarded(lambda: args.fn(args))


if __name__ == "__main__":
    sys.exit(main())
