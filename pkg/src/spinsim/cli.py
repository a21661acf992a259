"""Command line front end.

Subcommands: fig2-heisenberg, fig2-tfim, fig3, table1, bounds.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
The default output directory comes from SPINSIM_OUT_DIR, else the cwd.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .config import EXPERIMENTS, ConfigError, apply_override, resolve_config
from .dynamics import LindbladDiagnostics
from .experiments import run_experiment

ENV_OUT_DIR = "SPINSIM_OUT_DIR"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinsim",
        description="Digital quantum simulation of small spin models on a "
                    "transmon-resonator device model.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None,
                        help="JSON config file (defaults apply for missing keys)")
    common.add_argument("--out", type=str, default=None,
                        help=f"output directory (default: ${ENV_OUT_DIR} or cwd)")
    common.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE",
                        help="override a config entry by dotted path, "
                             "e.g. --set noise.kappa=0 --set device.fock_cutoff=7")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads for independent samples")
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help="delimited output format (default csv)")
    sub = parser.add_subparsers(dest="experiment", required=True)
    descriptions = {
        "fig2-heisenberg": "Heisenberg chain digital error vs total phase",
        "fig2-tfim": "transverse-field Ising digital error vs total phase",
        "fig3": "two-spin exchange protocol on the device model",
        "table1": "error bounds and execution times per model/size",
        "bounds": "first-order Trotter error bounds over the phase grid",
    }
    for name in EXPERIMENTS:
        sub.add_parser(name, parents=[common], help=descriptions[name])
    return parser


def _load_raw_config(args) -> dict:
    if args.config is None:
        data: dict = {}
    else:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError([f"config file not found: {path}"])
        text = path.read_text()
        if text.strip() == "":
            data = {}
        else:
            try:
                data = json.loads(text)
            except json.JSONDecodeError as e:
                raise ConfigError([f"config parse error: {e}"]) from e
        if not isinstance(data, dict):
            raise ConfigError(["config root must be a JSON object"])
    declared = data.get("experiment")
    if declared is not None and declared != args.experiment:
        raise ConfigError(
            [f"experiment: config file declares {declared!r} but the "
             f"{args.experiment!r} subcommand was invoked"])
    data["experiment"] = args.experiment
    for item in args.overrides:
        if "=" not in item:
            raise ConfigError([f"--set {item!r}: expected KEY=VALUE"])
        key, _, value = item.partition("=")
        apply_override(data, key.strip(), value)
    return data


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        data = _load_raw_config(args)
        cfg = resolve_config(data)
        if args.threads < 1:
            raise ConfigError(["--threads: must be >= 1"])
    except ConfigError as e:
        for err in e.errors:
            print(f"config error: {err}", file=sys.stderr)
        return 2

    out_dir = args.out or os.environ.get(ENV_OUT_DIR) or None
    try:
        result = run_experiment(cfg, out_dir=out_dir, fmt=args.format,
                                threads=args.threads)
    except (LindbladDiagnostics, np.linalg.LinAlgError, FloatingPointError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3

    for path in result["files"]:
        print(f"wrote {path}")
    summary = result.get("summary", {})
    for line in _summary_lines(cfg.experiment, summary):
        print(line)
    return 0


def _summary_lines(experiment: str, summary: dict) -> list[str]:
    lines = []
    if experiment.startswith("fig2"):
        for panel in summary.get("panels", []):
            for l, th in sorted(panel["crossover_theta"].items(), key=lambda kv: int(kv[0])):
                label = f"panel {panel['panel']} (l={l}, eps={panel['epsilon']:g}): digital error"
                if th is None:
                    lines.append(f"{label} stays below l*eps on the grid")
                else:
                    lines.append(f"{label} exceeds l*eps from theta = {th:.6g}")
    elif experiment == "fig3":
        lines.append(f"mean fidelity {summary['mean_fidelity']:.6f}, "
                     f"min {summary['min_fidelity']:.6f}, "
                     f"max leakage {summary['max_leakage']:.3e}")
        if summary.get("leakage_warning"):
            lines.append("warning: leakage above 0.1 at some sample")
    elif experiment == "table1":
        for key in ("heisenberg_open_n3_time_s", "ising_periodic_n3_time_s"):
            if key in summary:
                lines.append(f"{key} = {summary[key]:.4e}")
    elif experiment == "bounds":
        for l, b in sorted(summary.get("max_bound", {}).items(), key=lambda kv: int(kv[0])):
            lines.append(f"max bound at l={l}: {b:.6g}")
    return lines


if __name__ == "__main__":
    sys.exit(main())
