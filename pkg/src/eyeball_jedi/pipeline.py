"""Per-country orchestration from parsed inputs to output artifacts.

This module owns the glue: which probes count as in-country, which
ordered AS pairs become measurement tasks, which traceroutes are
admissible evidence for which cell, and the exact bytes of every
artifact written under the output directory. Commands in cli.py are
thin wrappers over these functions.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

from .config import RunConfig
from .coverage import (
    CoverageReport,
    compute_probe_coverage,
    coverage_world_report,
    format_coverage_report,
    format_world_csv,
    select_dominant_networks,
)
from .errors import ConfigError, IngestError
from .ingest import (
    PopulationEstimateRow,
    parse_capitals,
    parse_country_users,
    parse_geo_table,
    parse_population_estimates,
    parse_prefix_table,
    parse_probe_inventory,
    parse_traceroute_results,
)
from .lpm import GeoTable, PrefixTable
from .matrix import (
    build_matrix,
    compute_metrics,
    format_matrix,
    format_metrics_csv,
    summarize,
)
from .model import (
    CellVerdict,
    EyeballMatrix,
    EyeballSet,
    GeoPoint,
    MetricsSummary,
    PathClassification,
    Probe,
    Traceroute,
)
from .paths import classify_pair, classify_traceroute
from .selection import ProbeSelection, format_selection, select_probes

log = logging.getLogger(__name__)


@dataclass
class Workspace:
    """Parsed inputs shared by every country in a run."""

    population: list[PopulationEstimateRow]
    users: dict[str, int]
    capitals: dict[str, GeoPoint]
    probes: list[Probe] = field(default_factory=list)
    prefix_table: PrefixTable | None = None
    geo_table: GeoTable | None = None
    traceroutes: list[Traceroute] = field(default_factory=list)


def load_workspace(
    config: RunConfig,
    with_probes: bool = False,
    with_tables: bool = False,
    with_traceroutes: bool = False,
) -> Workspace:
    config.require_inputs("population", "country_users", "capitals")
    ws = Workspace(
        population=parse_population_estimates(config.population.read_bytes()),
        users=parse_country_users(config.country_users.read_bytes()),
        capitals=parse_capitals(config.capitals.read_bytes()),
    )
    if with_probes:
        config.require_inputs("probes")
        ws.probes = parse_probe_inventory(config.probes.read_bytes())
    if with_tables:
        config.require_inputs("prefix2as", "geo")
        ws.prefix_table = parse_prefix_table(config.prefix2as.read_bytes())
        ws.geo_table = parse_geo_table(config.geo.read_bytes())
    elif config.geo is not None and config.geo.is_file():
        # Optional for coverage/plan: used to keep only in-country probes.
        ws.geo_table = parse_geo_table(config.geo.read_bytes())
    if with_traceroutes:
        config.require_inputs("traceroutes")
        ws.traceroutes = parse_traceroute_results(config.traceroutes.read_bytes())
    return ws


def available_countries(ws: Workspace) -> list[str]:
    present = {row.country for row in ws.population}
    return sorted(present & ws.users.keys() & ws.capitals.keys())


def countries_for_run(config: RunConfig, ws: Workspace) -> list[str]:
    known = available_countries(ws)
    if config.country is None:
        return known
    if config.country not in known:
        raise ConfigError(
            f"unknown country {config.country!r}: not present in population, "
            "user-count and capital inputs"
        )
    return [config.country]


def eyeball_set_for(config: RunConfig, ws: Workspace, country: str) -> EyeballSet:
    rows = [row for row in ws.population if row.country == country]
    return select_dominant_networks(
        rows,
        ws.users[country],
        ws.capitals[country],
        cumulative_cap=config.cumulative_cap,
        per_as_floor=config.per_as_floor,
    )


def in_country_probes(ws: Workspace, country: str) -> list[Probe]:
    """Selectable probes located in the country.

    Location is decided by geolocating the probe's public address when a
    geo table is loaded. Without one, AS membership is the only signal we
    have, so every selectable probe passes and the caller's per-AS filter
    does the rest.
    """
    kept = []
    for probe in ws.probes:
        if not probe.selectable:
            continue
        if ws.geo_table is not None:
            if ws.geo_table.lookup(probe.public_address_v4) != country:
                continue
        kept.append(probe)
    return kept


@dataclass(frozen=True)
class PlanTask:
    src_asn: int
    dst_asn: int
    src_probe: int
    dst_probe: int
    dst_address: str

    def to_dict(self) -> dict:
        return {
            "srcAsn": self.src_asn,
            "dstAsn": self.dst_asn,
            "srcProbe": self.src_probe,
            "dstProbe": self.dst_probe,
            "dstAddress": self.dst_address,
        }


def build_plan(eyeball_set: EyeballSet, selection: ProbeSelection) -> list[PlanTask]:
    """Enumerate measurement tasks for every ordered covered pair.

    Each pair contributes up to four tasks (closest/farthest on both
    sides). Duplicate probe pairs collapse and a probe never targets
    itself, so single-probe networks yield no diagonal task.
    """
    covered = [n.asn for n in eyeball_set.networks if n.asn in selection.per_asn]
    tasks: list[PlanTask] = []
    for src_asn in covered:
        src_close, src_far = selection.per_asn[src_asn]
        src_probes = [src_close] if src_close.id == src_far.id else [src_close, src_far]
        for dst_asn in covered:
            dst_close, dst_far = selection.per_asn[dst_asn]
            dst_probes = [dst_close] if dst_close.id == dst_far.id else [dst_close, dst_far]
            seen: set[tuple[int, int]] = set()
            for src in src_probes:
                for dst in dst_probes:
                    if src.id == dst.id or (src.id, dst.id) in seen:
                        continue
                    seen.add((src.id, dst.id))
                    tasks.append(
                        PlanTask(src_asn, dst_asn, src.id, dst.id, dst.public_address_v4)
                    )
    return tasks


def format_plan(country: str, tasks: list[PlanTask]) -> str:
    payload = {"country": country, "tasks": [t.to_dict() for t in tasks]}
    return json.dumps(payload, indent=2) + "\n"


def gather_evidence(
    country: str,
    traceroutes: list[Traceroute],
    eyeball_set: EyeballSet,
    selection: ProbeSelection,
    prefix_table: PrefixTable,
    geo_table: GeoTable,
) -> tuple[dict[tuple[int, int], list[tuple[str, PathClassification]]], list[str], int]:
    """Match traceroutes to the selection and classify each admissible one.

    Returns per-pair evidence sorted by measurement id, human-readable
    warnings for everything skipped, and the count of matched runs.
    """
    member_asns = eyeball_set.asns
    evidence: dict[tuple[int, int], list[tuple[str, PathClassification]]] = {}
    warnings: list[str] = []
    matched = 0
    for tr in traceroutes:
        if tr.address_family != 4:
            warnings.append(f"{tr.measurement_id}: skipped, not an IPv4 run")
            continue
        pair = (tr.src_asn, tr.dst_asn)
        if tr.src_asn not in member_asns or tr.dst_asn not in member_asns:
            warnings.append(f"{tr.measurement_id}: AS pair {pair} outside the eyeball set")
            continue
        if tr.src_asn not in selection.per_asn or tr.dst_asn not in selection.per_asn:
            warnings.append(f"{tr.measurement_id}: AS pair {pair} has no probe coverage")
            continue
        if (
            tr.src_probe_id not in selection.probe_ids(tr.src_asn)
            or tr.dst_probe_id not in selection.probe_ids(tr.dst_asn)
        ):
            warnings.append(
                f"{tr.measurement_id}: probes {tr.src_probe_id}->{tr.dst_probe_id} "
                "are not the selected pair"
            )
            continue
        cls = classify_traceroute(tr, prefix_table, geo_table, country)
        evidence.setdefault(pair, []).append((tr.measurement_id, cls))
        matched += 1
    for runs in evidence.values():
        runs.sort(key=lambda item: item[0])
    return evidence, warnings, matched


@dataclass
class CountryAnalysis:
    country: str
    eyeball_set: EyeballSet
    coverage: CoverageReport
    selection: ProbeSelection
    matrix: EyeballMatrix
    metrics: MetricsSummary
    report_text: str
    warnings: list[str]
    matched_traceroutes: int


def analyze_country(config: RunConfig, ws: Workspace, country: str) -> CountryAnalysis:
    eyeball_set = eyeball_set_for(config, ws, country)
    probes = in_country_probes(ws, country)
    coverage = compute_probe_coverage(eyeball_set, probes)
    selection = select_probes(eyeball_set, probes)
    evidence, warnings, matched = gather_evidence(
        country, ws.traceroutes, eyeball_set, selection, ws.prefix_table, ws.geo_table
    )
    # Pairs without evidence fall back inside build_matrix (Undetermined
    # when both sides have probes, NoCoverage otherwise).
    verdicts: dict[tuple[int, int], CellVerdict] = {
        (src, dst): classify_pair(
            src,
            dst,
            eyeball_set.fraction_of(src) * eyeball_set.fraction_of(dst),
            runs,
            covered=True,
        )
        for (src, dst), runs in evidence.items()
    }
    matrix = build_matrix(eyeball_set, selection, verdicts, generated_at=time.time())
    metrics = compute_metrics(matrix)
    report_text = "\n".join(summarize(matrix, metrics)) + "\n"
    return CountryAnalysis(
        country,
        eyeball_set,
        coverage,
        selection,
        matrix,
        metrics,
        report_text,
        warnings,
        matched,
    )


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="")
    log.info("wrote %s", path)


def write_coverage_outputs(out_dir: Path, reports: list[CoverageReport]) -> None:
    for report in reports:
        _write(out_dir / f"coverage_{report.country}.json", format_coverage_report(report))
    _write(out_dir / "coverage_world.csv", format_world_csv(coverage_world_report(reports)))


def write_plan_outputs(
    out_dir: Path,
    country: str,
    eyeball_set: EyeballSet,
    selection: ProbeSelection,
    tasks: list[PlanTask],
) -> None:
    _write(out_dir / f"probes_{country}.json", format_selection(selection, eyeball_set))
    _write(out_dir / f"plan_{country}.json", format_plan(country, tasks))


def write_analysis_outputs(out_dir: Path, result: CountryAnalysis) -> None:
    cc = result.country
    _write(out_dir / f"probes_{cc}.json", format_selection(result.selection, result.eyeball_set))
    _write(out_dir / f"matrix_{cc}.json", format_matrix(result.matrix))
    _write(out_dir / f"metrics_{cc}.csv", format_metrics_csv(result.metrics))
    _write(out_dir / f"report_{cc}.txt", result.report_text)
    sidecar = {
        "country": cc,
        "generatedAt": result.matrix.generated_at,
        "matchedTraceroutes": result.matched_traceroutes,
        "warnings": result.warnings,
    }
    _write(out_dir / f"run_{cc}.json", json.dumps(sidecar, indent=2) + "\n")
