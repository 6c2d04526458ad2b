"""Command-line entry point.

Five subcommands share one flag set:

  eyeball-jedi coverage --config run.conf --all
  eyeball-jedi plan     --config run.conf --country DE
  eyeball-jedi analyze  --config run.conf --country DE --out results/
  eyeball-jedi render   --config run.conf --country DE
  eyeball-jedi fetch    --config run.conf --country DE

Exit codes: 0 success, 2 bad configuration or unreadable/invalid inputs,
3 analyze matched zero traceroutes against the probe selection.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import pipeline
from .config import RunConfig, apply_overrides, load_config
from .coverage import compute_probe_coverage
from .errors import ConfigError, EmptyInput, HttpError, IngestError, PaginationLoop
from .fetch import HttpClient, fetch_measurement_results, fetch_probe_inventory
from .ingest import format_probes, format_traceroutes
from .matrix import load_matrix
from .render import render_svg
from .selection import select_probes

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NO_DATA = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eyeball-jedi",
        description="Country-level eyeball connectivity: coverage, plans, matrices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("coverage", "report probe coverage of each country's eyeball networks"),
        ("plan", "emit traceroute measurement plans for covered networks"),
        ("analyze", "classify traceroutes into per-country matrices and metrics"),
        ("render", "draw matrix_<CC>.json files as SVG heatmaps"),
        ("fetch", "download probe inventory and measurement results"),
    ]:
        cmd = sub.add_parser(name, help=help_text)
        scope = cmd.add_mutually_exclusive_group()
        scope.add_argument("--country", metavar="CC", help="two-letter country code")
        scope.add_argument(
            "--all", action="store_true", help="every country present in the inputs"
        )
        cmd.add_argument("--config", metavar="PATH", required=True)
        cmd.add_argument("--out", metavar="DIR", help="output directory")
        cmd.add_argument("--cap", type=float, metavar="F", help="cumulative user-share cap")
        cmd.add_argument("--floor", type=float, metavar="F", help="per-AS user-share floor")
    return parser


def cmd_coverage(config: RunConfig) -> int:
    ws = pipeline.load_workspace(config, with_probes=True)
    reports = []
    for country in pipeline.countries_for_run(config, ws):
        eyeball_set = pipeline.eyeball_set_for(config, ws, country)
        probes = pipeline.in_country_probes(ws, country)
        reports.append(compute_probe_coverage(eyeball_set, probes))
    pipeline.write_coverage_outputs(config.out_dir, reports)
    print(f"coverage: {len(reports)} countries -> {config.out_dir}")
    return EXIT_OK


def cmd_plan(config: RunConfig) -> int:
    ws = pipeline.load_workspace(config, with_probes=True)
    for country in pipeline.countries_for_run(config, ws):
        eyeball_set = pipeline.eyeball_set_for(config, ws, country)
        probes = pipeline.in_country_probes(ws, country)
        selection = select_probes(eyeball_set, probes)
        tasks = pipeline.build_plan(eyeball_set, selection)
        pipeline.write_plan_outputs(config.out_dir, country, eyeball_set, selection, tasks)
        print(f"plan: {country} {len(tasks)} tasks -> {config.out_dir}")
    return EXIT_OK


def cmd_analyze(config: RunConfig) -> int:
    ws = pipeline.load_workspace(
        config, with_probes=True, with_tables=True, with_traceroutes=True
    )
    total_matched = 0
    for country in pipeline.countries_for_run(config, ws):
        result = pipeline.analyze_country(config, ws, country)
        for warning in result.warnings:
            log.warning("%s: %s", country, warning)
        pipeline.write_analysis_outputs(config.out_dir, result)
        total_matched += result.matched_traceroutes
        print(f"analyze: {country} {result.matched_traceroutes} traceroutes matched")
    if total_matched == 0:
        print("error: no traceroutes matched any probe selection", file=sys.stderr)
        return EXIT_NO_DATA
    return EXIT_OK


def cmd_render(config: RunConfig) -> int:
    if config.country is not None:
        matrix_paths = [config.out_dir / f"matrix_{config.country}.json"]
        missing = [p for p in matrix_paths if not p.is_file()]
        if missing:
            print(f"error: matrix file not found: {missing[0]}", file=sys.stderr)
            return EXIT_INPUT
    else:
        matrix_paths = sorted(config.out_dir.glob("matrix_*.json"))
        if not matrix_paths:
            print(f"error: no matrix_*.json under {config.out_dir}", file=sys.stderr)
            return EXIT_INPUT
    for path in matrix_paths:
        matrix = load_matrix(path.read_bytes())
        svg_path = path.with_suffix(".svg")
        svg_path.write_text(render_svg(matrix), encoding="utf-8", newline="")
        print(f"render: {svg_path}")
    return EXIT_OK


def cmd_fetch(config: RunConfig) -> int:
    if not config.http_base_url:
        raise ConfigError("fetch requires http_base_url in the config")
    if config.probes is None:
        raise ConfigError("fetch requires a probes path in the config to write to")
    client = HttpClient(rate_limit=config.rate_limit, api_key=config.api_key())
    probes = fetch_probe_inventory(config.http_base_url, config.country, client=client)
    config.probes.parent.mkdir(parents=True, exist_ok=True)
    config.probes.write_text(format_probes(probes), encoding="utf-8", newline="")
    print(f"fetch: {len(probes)} probes -> {config.probes}")
    if config.measurement_ids:
        if config.traceroutes is None:
            raise ConfigError("fetch requires a traceroutes path to store results")
        results, failures = fetch_measurement_results(
            config.http_base_url, list(config.measurement_ids), client=client
        )
        config.traceroutes.parent.mkdir(parents=True, exist_ok=True)
        config.traceroutes.write_text(
            format_traceroutes(results), encoding="utf-8", newline=""
        )
        print(f"fetch: {len(results)} traceroutes -> {config.traceroutes}")
        for failure in failures:
            log.warning("measurement fetch failed: %s", failure)
    return EXIT_OK


_COMMANDS = {
    "coverage": cmd_coverage,
    "plan": cmd_plan,
    "analyze": cmd_analyze,
    "render": cmd_render,
    "fetch": cmd_fetch,
}


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(Path(args.config))
        config = apply_overrides(
            config,
            country=args.country,
            all_countries=args.all,
            out_dir=args.out,
            cumulative_cap=args.cap,
            per_as_floor=args.floor,
        )
        config.validate_thresholds()
        return _COMMANDS[args.command](config)
    except (ConfigError, IngestError, EmptyInput, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (HttpError, PaginationLoop) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
