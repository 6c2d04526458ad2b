"""Parsers and writers for every external dataset the pipeline consumes.

All formats are project-defined flat files (see README): CSV tables for
population shares, country user counts, prefix-to-AS and prefix-to-country
mappings and capitals, a JSON array for the probe inventory, and
newline-delimited JSON for traceroute results.

Each parser raises on the first bad record by default. Passing a list as
``errors`` switches it to collect mode: record-level problems are appended
to that list and parsing continues (structural problems such as a bad
header still raise). Matching ``format_*`` writers exist for every format;
``parse(format(x)) == x`` for well-formed values.
"""

from __future__ import annotations

import io
import ipaddress
import json
import logging
import math
from csv import reader as csv_reader
from dataclasses import dataclass

from .errors import (
    DuplicateCountry,
    HopOrderError,
    IngestError,
    InvalidAsn,
    InvalidCidr,
    InvalidCountry,
    JsonSyntaxError,
    MalformedHeader,
    MissingField,
    RowParseError,
)
from .lpm import GeoTable, PrefixTable
from .model import (
    GeoPoint,
    HopResponse,
    Probe,
    Traceroute,
    TracerouteHop,
    check_asn,
    check_country_code,
)

log = logging.getLogger(__name__)

GEO_UNKNOWN = "??"


@dataclass(frozen=True)
class PopulationEstimateRow:
    country: str
    asn: int
    fraction_percent: float


@dataclass(frozen=True)
class CountryUsersRow:
    country: str
    internet_users: int


def _text(data: str | bytes) -> str:
    return data.decode("utf-8") if isinstance(data, bytes) else data


def _report(err: IngestError, errors: list[IngestError] | None) -> None:
    if errors is None:
        raise err
    errors.append(err)


def _csv_rows(text: str, header: str, n_fields: int, errors):
    """Yield (line_number, fields) for each record after a validated header."""
    lines = list(csv_reader(io.StringIO(text)))
    raw_lines = text.splitlines()
    if not raw_lines or raw_lines[0].strip() != header:
        got = raw_lines[0].strip() if raw_lines else "<empty file>"
        raise MalformedHeader(f"expected header {header!r}, got {got!r}", line=1)
    for lineno, fields in enumerate(lines[1:], start=2):
        if not fields:
            continue
        if len(fields) != n_fields:
            _report(RowParseError(f"expected {n_fields} fields, got {len(fields)}", line=lineno), errors)
            continue
        yield lineno, [f.strip() for f in fields]


def _parse_fraction_percent(raw: str) -> float:
    value = float(raw)
    if math.isnan(value) or not 0.0 <= value <= 100.0:
        raise ValueError(f"fraction_percent out of [0,100]: {raw}")
    return value


def parse_population_estimates(
    data: str | bytes, errors: list[IngestError] | None = None
) -> list[PopulationEstimateRow]:
    """Read per-(country, AS) user-population shares, in percent.

    Repeated (country, asn) keys are collapsed keeping the last occurrence,
    with a warning: daily snapshots may revise earlier rows.
    """
    collected: dict[tuple[str, int], PopulationEstimateRow] = {}
    for lineno, (country, asn_raw, frac_raw) in _csv_rows(
        _text(data), "country,asn,fraction_percent", 3, errors
    ):
        try:
            row = PopulationEstimateRow(
                country=check_country_code(country),
                asn=check_asn(int(asn_raw)),
                fraction_percent=_parse_fraction_percent(frac_raw),
            )
        except ValueError as exc:
            _report(RowParseError(str(exc), line=lineno), errors)
            continue
        key = (row.country, row.asn)
        if key in collected:
            log.warning("population row for %s AS%d repeated; keeping the later row", *key)
        collected[key] = row
    return list(collected.values())


def parse_country_users(
    data: str | bytes, errors: list[IngestError] | None = None
) -> dict[str, int]:
    """Read Internet-user counts per country into a {country: users} mapping."""
    users: dict[str, int] = {}
    for lineno, (country, count_raw) in _csv_rows(
        _text(data), "country,internet_users", 2, errors
    ):
        try:
            row = CountryUsersRow(country=check_country_code(country), internet_users=int(count_raw))
            if row.internet_users < 0:
                raise ValueError(f"internet_users must be non-negative: {count_raw}")
        except ValueError as exc:
            _report(RowParseError(str(exc), line=lineno), errors)
            continue
        if row.country in users:
            _report(DuplicateCountry(f"country {row.country} listed twice", line=lineno), errors)
            continue
        users[row.country] = row.internet_users
    return users


def probe_from_dict(obj: dict) -> Probe:
    """Build a Probe from one inventory object; missing optionals stay absent."""
    if "id" not in obj:
        raise MissingField("probe object missing 'id'")
    probe_id = int(obj["id"])
    for required in ("is_public", "status"):
        if required not in obj:
            raise MissingField(f"probe {probe_id} missing '{required}'")
    lat = obj.get("latitude")
    lon = obj.get("longitude")
    location = GeoPoint(float(lat), float(lon)) if lat is not None and lon is not None else None
    address = obj.get("address_v4")
    if address is not None:
        address = str(ipaddress.IPv4Address(address))
    return Probe(
        id=probe_id,
        asn_v4=check_asn(int(obj["asn_v4"])) if obj.get("asn_v4") is not None else None,
        asn_v6=check_asn(int(obj["asn_v6"])) if obj.get("asn_v6") is not None else None,
        location=location,
        public_address_v4=address,
        is_public=bool(obj["is_public"]),
        is_connected=obj["status"] == "Connected",
    )


def probe_to_dict(probe: Probe) -> dict:
    return {
        "id": probe.id,
        "asn_v4": probe.asn_v4,
        "asn_v6": probe.asn_v6,
        "latitude": probe.location.latitude if probe.location else None,
        "longitude": probe.location.longitude if probe.location else None,
        "address_v4": probe.public_address_v4,
        "is_public": probe.is_public,
        "status": "Connected" if probe.is_connected else "Disconnected",
    }


def parse_probe_inventory(
    data: str | bytes, errors: list[IngestError] | None = None
) -> list[Probe]:
    """Read the probe inventory (JSON array of probe objects)."""
    try:
        raw = json.loads(_text(data))
    except json.JSONDecodeError as exc:
        raise JsonSyntaxError(exc.msg, line=exc.lineno) from exc
    if not isinstance(raw, list):
        raise JsonSyntaxError("probe inventory must be a JSON array")
    probes = []
    for obj in raw:
        try:
            if not isinstance(obj, dict):
                raise RowParseError(f"probe entry is not an object: {obj!r}")
            probes.append(probe_from_dict(obj))
        except IngestError as exc:
            _report(exc, errors)
        except (ValueError, ipaddress.AddressValueError) as exc:
            _report(RowParseError(str(exc)), errors)
    return probes


def traceroute_from_dict(obj: dict, line: int | None = None) -> Traceroute:
    """Build a Traceroute from one result object (one NDJSON line)."""
    for required in ("src_probe", "dst_probe", "src_asn", "dst_asn", "dst_addr", "af", "timestamp", "hops"):
        if required not in obj:
            raise MissingField(f"traceroute missing '{required}'", line=line)
    hops = []
    last_index = 0
    for hop_obj in obj["hops"]:
        if "hop" not in hop_obj or "results" not in hop_obj:
            raise RowParseError("hop object needs 'hop' and 'results'", line=line)
        index = int(hop_obj["hop"])
        if index <= last_index:
            raise HopOrderError(f"hop index {index} after {last_index}", line=line)
        last_index = index
        responses = []
        for res in hop_obj["results"]:
            if "x" in res:
                responses.append(HopResponse())
            elif "from" in res:
                rtt = res.get("rtt")
                responses.append(HopResponse(address=str(res["from"]), rtt_ms=float(rtt) if rtt is not None else None))
            else:
                raise RowParseError(f"unrecognized hop result: {res!r}", line=line)
        hops.append(TracerouteHop(index=index, responses=tuple(responses)))
    try:
        return Traceroute(
            src_probe_id=int(obj["src_probe"]),
            dst_probe_id=int(obj["dst_probe"]),
            src_asn=check_asn(int(obj["src_asn"])),
            dst_asn=check_asn(int(obj["dst_asn"])),
            dst_address=str(obj["dst_addr"]),
            address_family=int(obj["af"]),
            timestamp=int(obj["timestamp"]),
            hops=tuple(hops),
        )
    except ValueError as exc:
        raise RowParseError(str(exc), line=line) from exc


def traceroute_to_dict(tr: Traceroute) -> dict:
    hops = []
    for hop in tr.hops:
        results = []
        for resp in hop.responses:
            if resp.is_timeout:
                results.append({"x": "*"})
            elif resp.rtt_ms is None:
                results.append({"from": resp.address})
            else:
                results.append({"from": resp.address, "rtt": resp.rtt_ms})
        hops.append({"hop": hop.index, "results": results})
    return {
        "src_probe": tr.src_probe_id,
        "dst_probe": tr.dst_probe_id,
        "src_asn": tr.src_asn,
        "dst_asn": tr.dst_asn,
        "dst_addr": tr.dst_address,
        "af": tr.address_family,
        "timestamp": tr.timestamp,
        "hops": hops,
    }


def parse_traceroute_results(
    data: str | bytes, errors: list[IngestError] | None = None
) -> list[Traceroute]:
    """Read newline-delimited JSON traceroute results."""
    traceroutes = []
    for lineno, line in enumerate(_text(data).splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            _report(JsonSyntaxError(exc.msg, line=lineno), errors)
            continue
        try:
            traceroutes.append(traceroute_from_dict(obj, line=lineno))
        except IngestError as exc:
            _report(exc, errors)
        except (TypeError, ValueError) as exc:
            _report(RowParseError(str(exc), line=lineno), errors)
    return traceroutes


def parse_prefix_table(
    data: str | bytes, errors: list[IngestError] | None = None
) -> PrefixTable:
    """Read prefix,origin_asn rows into a longest-prefix-match table."""
    table = PrefixTable()
    for lineno, (prefix, asn_raw) in _csv_rows(_text(data), "prefix,origin_asn", 2, errors):
        try:
            network = ipaddress.ip_network(prefix, strict=False)
        except ValueError as exc:
            _report(InvalidCidr(str(exc), line=lineno), errors)
            continue
        try:
            asn = check_asn(int(asn_raw))
        except ValueError as exc:
            _report(InvalidAsn(str(exc), line=lineno), errors)
            continue
        table.add(network, asn)
    return table


def parse_geo_table(
    data: str | bytes, errors: list[IngestError] | None = None
) -> GeoTable:
    """Read prefix,country rows; '??' marks explicitly unknown geolocation."""
    table = GeoTable()
    for lineno, (prefix, country) in _csv_rows(_text(data), "prefix,country", 2, errors):
        try:
            network = ipaddress.ip_network(prefix, strict=False)
        except ValueError as exc:
            _report(InvalidCidr(str(exc), line=lineno), errors)
            continue
        if country == GEO_UNKNOWN:
            table.add(network, None)
            continue
        try:
            table.add(network, check_country_code(country))
        except ValueError as exc:
            _report(InvalidCountry(str(exc), line=lineno), errors)
    return table


def parse_capitals(
    data: str | bytes, errors: list[IngestError] | None = None
) -> dict[str, GeoPoint]:
    """Read capital coordinates per country."""
    capitals: dict[str, GeoPoint] = {}
    for lineno, (country, lat_raw, lon_raw) in _csv_rows(
        _text(data), "country,latitude,longitude", 3, errors
    ):
        try:
            code = check_country_code(country)
            point = GeoPoint(float(lat_raw), float(lon_raw))
        except ValueError as exc:
            _report(RowParseError(str(exc), line=lineno), errors)
            continue
        if code in capitals:
            _report(DuplicateCountry(f"country {code} listed twice", line=lineno), errors)
            continue
        capitals[code] = point
    return capitals


# --- writers ---------------------------------------------------------------

def format_population(rows: list[PopulationEstimateRow]) -> str:
    out = ["country,asn,fraction_percent"]
    out += [f"{r.country},{r.asn},{r.fraction_percent!r}" for r in rows]
    return "\n".join(out) + "\n"


def format_country_users(users: dict[str, int]) -> str:
    out = ["country,internet_users"]
    out += [f"{country},{users[country]}" for country in sorted(users)]
    return "\n".join(out) + "\n"


def format_probes(probes: list[Probe]) -> str:
    return json.dumps([probe_to_dict(p) for p in probes], indent=2) + "\n"


def format_traceroutes(traceroutes: list[Traceroute]) -> str:
    return "".join(json.dumps(traceroute_to_dict(t), separators=(",", ":")) + "\n" for t in traceroutes)


def format_prefix_table(table: PrefixTable) -> str:
    out = ["prefix,origin_asn"]
    out += [f"{net},{asn}" for net, asn in sorted(table.entries(), key=lambda e: (e[0].version, int(e[0].network_address), e[0].prefixlen))]
    return "\n".join(out) + "\n"


def format_geo_table(table: GeoTable) -> str:
    out = ["prefix,country"]
    out += [
        f"{net},{GEO_UNKNOWN if country is None else country}"
        for net, country in sorted(table.entries(), key=lambda e: (e[0].version, int(e[0].network_address), e[0].prefixlen))
    ]
    return "\n".join(out) + "\n"


def format_capitals(capitals: dict[str, GeoPoint]) -> str:
    out = ["country,latitude,longitude"]
    out += [f"{cc},{capitals[cc].latitude!r},{capitals[cc].longitude!r}" for cc in sorted(capitals)]
    return "\n".join(out) + "\n"
