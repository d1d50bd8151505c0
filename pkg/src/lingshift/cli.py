"""Command-line entry point: ``lingshift <command> [--config run.yaml] [--output DIR]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .aggregation import CountTable, ingest_files
from .config import RunConfig, load_config
from .errors import ConfigError, LingshiftError, PathNotFound
from .pipeline import (
    Bundle,
    analyze,
    run_attribution,
    run_bias,
    run_did,
    run_shift,
    run_stability,
    write_bias,
    write_failures,
    write_stability,
)
from .reports import render_bundle
from .shift import write_attribution_csv
from .synth import generate, load_scenario

log = logging.getLogger("lingshift")


def _common(defaults: bool) -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", type=Path, default=d(None), help="run configuration (YAML)")
    p.add_argument("--output", type=Path, default=d(None), help="output directory (overrides config)")
    p.add_argument("--seed", type=int, default=d(None), help="64-bit seed for synth")
    p.add_argument("--threads", type=int, default=d(1), help="parallel ingestion processes")
    p.add_argument("-v", "--verbose", action="store_true", default=d(False))
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lingshift", parents=[_common(True)],
                                     description="Geo-temporal linguistic diversity analysis.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common(False)

    p = sub.add_parser("ingest", parents=[common], help="records -> counts.csv + ingest_stats.json")
    p.add_argument("inputs", nargs="*", type=Path, help="record files (default: paths.corpus)")

    for name, text in [
        ("analyze", "full report bundle"),
        ("shift", "treatment vs baseline HHI tests"),
        ("attribute", "per-language attribution"),
        ("did", "difference-in-differences classification"),
        ("bias", "volume vs demographics correlations"),
        ("stability", "volume-share and diversity stability screens"),
    ]:
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--counts", type=Path, default=None, help="count table (default: paths.counts)")
        if name == "attribute":
            p.add_argument("--countries", nargs="*", default=None,
                           help="countries to attribute (default: those with a significant shift)")

    p = sub.add_parser("synth", parents=[common], help="scenario -> corpus.jsonl + manifest.csv")
    p.add_argument("scenario", type=Path)

    sub.add_parser("report", parents=[common], help="re-render report.txt from bundle files")
    return parser


def _output_dir(args, cfg: RunConfig) -> Path:
    out = args.output or cfg.paths.output
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_table(args, cfg: RunConfig) -> CountTable:
    path = getattr(args, "counts", None) or (
        cfg.paths.counts or (args.output or cfg.paths.output) / "counts.csv")
    return CountTable.from_csv(path)


def cmd_ingest(args, cfg: RunConfig) -> int:
    inputs = args.inputs or cfg.paths.corpus
    if not inputs:
        raise ConfigError("no input files: pass them on the command line or set paths.corpus")
    for p in inputs:
        if not Path(p).exists():
            raise PathNotFound(f"input not found: {p}")
    out = _output_dir(args, cfg)
    table, stats = ingest_files(inputs, cfg.ingest, max(1, args.threads))
    table.to_csv(out / "counts.csv")
    summary = stats.to_dict() | {"cells": len(table), "files": len(inputs)}
    (out / "ingest_stats.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(json.dumps(summary, sort_keys=True))
    return 0


def cmd_analyze(args, cfg: RunConfig) -> int:
    table = _load_table(args, cfg)
    out = _output_dir(args, cfg)
    bundle = analyze(table, cfg, out)
    n_sig = len(bundle.shift.significant()) if bundle.shift else 0
    print(f"{len(table.countries())} countries, {n_sig} significant shifts, bundle in {out}")
    return 0


def cmd_shift(args, cfg: RunConfig) -> int:
    out = _output_dir(args, cfg)
    report = run_shift(_load_table(args, cfg), cfg)
    report.write_table(out / "shift.csv")
    report.write_choropleth(out / "shift_choropleth.csv")
    print(f"{len(report.significant())} of {len(report.entries)} countries significant")
    return 0


def cmd_attribute(args, cfg: RunConfig) -> int:
    table = _load_table(args, cfg)
    out = _output_dir(args, cfg)
    countries = args.countries if args.countries is not None else run_shift(table, cfg).significant()
    bundle = Bundle()
    entries = run_attribution(table, cfg, countries, bundle)
    write_attribution_csv(entries, out / "attribution.csv")
    for step, country, msg in bundle.failures:
        log.warning("%s %s: %s", step, country, msg)
    print(f"{len(entries)} attribution entries for {len(countries)} countries")
    return 0


def cmd_did(args, cfg: RunConfig) -> int:
    out = _output_dir(args, cfg)
    report = run_did(_load_table(args, cfg), cfg)
    report.write(out / "did.csv", out / "did_summary.txt")
    print((out / "did_summary.txt").read_text().strip())
    return 0


def cmd_bias(args, cfg: RunConfig) -> int:
    if cfg.paths.demographics is None:
        raise ConfigError("bias needs paths.demographics in the config")
    out = _output_dir(args, cfg)
    report = run_bias(_load_table(args, cfg), cfg)
    write_bias(report, out)
    print(report.to_text(), end="")
    return 0


def cmd_stability(args, cfg: RunConfig) -> int:
    out = _output_dir(args, cfg)
    bundle = Bundle()
    run_stability(_load_table(args, cfg), cfg, bundle)
    write_stability(bundle, out)
    write_failures(bundle, out)
    return 0


def cmd_synth(args, cfg: RunConfig) -> int:
    scenario = load_scenario(args.scenario, args.seed)
    out = _output_dir(args, cfg)
    table, manifest = generate(scenario, out / "corpus.jsonl", out / "manifest.csv")
    print(f"{table.total} records in {len(manifest)} cells -> {out / 'corpus.jsonl'}")
    return 0


def cmd_report(args, cfg: RunConfig) -> int:
    out = _output_dir(args, cfg)
    text = render_bundle(out)
    (out / "report.txt").write_text(text, encoding="utf-8")
    print(text, end="")
    return 0


COMMANDS = {
    "ingest": cmd_ingest, "analyze": cmd_analyze, "shift": cmd_shift,
    "attribute": cmd_attribute, "did": cmd_did, "bias": cmd_bias,
    "stability": cmd_stability, "synth": cmd_synth, "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](args, cfg)
    except (LingshiftError, FileNotFoundError) as exc:
        code = getattr(exc, "code", "PathNotFound")
        print(json.dumps({"error": code, "message": str(exc), "command": args.command}),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
