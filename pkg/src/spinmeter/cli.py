"""spinmeter command line: run experiments from config files or presets.

Exit codes: 0 success, 1 numerical failure (for example a grid too small for
the requested horizon), 2 configuration error.  Data files are written with
repr-exact floats so identical configs yield byte-identical outputs; the run
manifest is the only file carrying a timestamp.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from datetime import datetime, timezone

from . import __version__
from .config import ConfigError, load_config, parse_config_text
from .experiments import run_experiment, worker_cap
from .presets import preset_names, preset_text


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spinmeter",
        description="spin-orbit pointer-measurement numerical experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment from a config file")
    run_p.add_argument("--config", required=True, help="config file path")
    run_p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override a config key")

    preset_p = sub.add_parser(
        "preset", help="run a named preset, or dump its config text")
    preset_p.add_argument("name", help="preset name: " + ", ".join(preset_names()))
    preset_p.add_argument("--out", help="output directory")
    preset_p.add_argument("--dump-preset", action="store_true",
                          help="print the preset's config text and exit")
    preset_p.add_argument("--set", dest="overrides", action="append", default=[],
                          metavar="KEY=VALUE", help="override a config key")

    sweep_p = sub.add_parser("sweep", help="run a regime sweep from a config file")
    sweep_p.add_argument("--config", required=True, help="config file path")
    sweep_p.add_argument("--set", dest="overrides", action="append", default=[],
                         metavar="KEY=VALUE", help="override a config key")
    return parser


def _format_cell(value):
    if isinstance(value, str):
        return value
    return repr(float(value))


def _write_csv(path, columns, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_format_cell(v) for v in row) + "\n")


def _jsonable(value):
    """Recursively coerce to JSON-safe types; non-finite floats become null."""
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, bool) or value is None or isinstance(value, (str, int)):
        return value
    value = float(value)
    return value if math.isfinite(value) else None


def _write_json(path, doc):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def _emit(result, config, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    if result.payload is not None:
        data_name = result.filename + ".json"
        _write_json(os.path.join(out_dir, data_name), _jsonable(result.payload))
    elif config.output_format == "json":
        data_name = result.filename + ".json"
        doc = {
            "experiment": result.experiment,
            "columns": list(result.columns),
            "rows": [[_jsonable(v) if not isinstance(v, str) else v for v in row]
                     for row in result.rows],
        }
        _write_json(os.path.join(out_dir, data_name), doc)
    else:
        data_name = result.filename + ".csv"
        _write_csv(os.path.join(out_dir, data_name), result.columns, result.rows)

    manifest = {
        "experiment": result.experiment,
        "version": __version__,
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "threads": worker_cap(),
        "outputs": [data_name],
        "config": _jsonable(dataclasses.asdict(config)),
        "details": _jsonable(result.manifest),
    }
    manifest_path = os.path.join(out_dir, "run_manifest.json")
    _write_json(manifest_path, manifest)
    return [os.path.join(out_dir, data_name), manifest_path]


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "preset":
            if args.name not in preset_names():
                raise ConfigError(
                    f"unknown preset {args.name!r} "
                    f"(choose from {', '.join(preset_names())})")
            if args.dump_preset:
                sys.stdout.write(preset_text(args.name))
                return 0
            if not args.out:
                raise ConfigError("preset needs --out DIR (or --dump-preset)")
            config = parse_config_text(preset_text(args.name), args.overrides)
            out_dir = args.out
        else:
            overrides = list(args.overrides)
            if args.command == "sweep":
                overrides.append("experiment=regime-sweep")
            config = load_config(args.config, overrides)
            out_dir = config.output_dir
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        result = run_experiment(config)
        written = _emit(result, config, out_dir)
    except OSError as exc:
        print(f"config error: cannot write output: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
