"""Per-traceroute analysis: AS-path extraction and path classification.

Hop handling follows one rule everywhere: a hop is represented by the
address of its first non-timeout response. Private/reserved addresses (any
address that is not globally routable) carry no inter-domain or geographic
meaning and are dropped outright.
"""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import EmptyTraceroute
from .lpm import GeoTable, PrefixTable
from .model import (
    CellVerdict,
    Directness,
    DirectnessVerdict,
    Locality,
    LocalityVerdict,
    PathClassification,
    Traceroute,
)


class UnknownHopMarker:
    """Placeholder for a responding hop whose AS could not be mapped."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "?"


UNKNOWN_HOP = UnknownHopMarker()


def is_public_address(address: str) -> bool:
    try:
        return ipaddress.ip_address(address).is_global
    except ValueError:
        return False


@dataclass(frozen=True)
class AsPath:
    """AS-level path: AS numbers and unknown-hop markers, duplicates collapsed.

    Invariants: no two adjacent equal AS numbers, no two adjacent markers,
    and no marker sandwiched between two equal AS numbers (such a gap is
    attributed to the surrounding AS and removed).
    """

    sequence: tuple

    def __post_init__(self):
        object.__setattr__(self, "sequence", tuple(self.sequence))

    def has_unknown(self) -> bool:
        return any(isinstance(e, UnknownHopMarker) for e in self.sequence)

    def asn_elements(self) -> list[int]:
        return [e for e in self.sequence if isinstance(e, int)]


def _normalize(elements: list) -> list:
    """Collapse duplicates and swallow unknowns between equal ASes, to fixpoint."""
    changed = True
    while changed:
        changed = False
        out = []
        for elem in elements:
            if out and (
                out[-1] == elem
                or (isinstance(out[-1], UnknownHopMarker) and isinstance(elem, UnknownHopMarker))
            ):
                changed = True
                continue
            out.append(elem)
        for i in range(1, len(out) - 1):
            if (
                isinstance(out[i], UnknownHopMarker)
                and isinstance(out[i - 1], int)
                and out[i - 1] == out[i + 1]
            ):
                del out[i]
                changed = True
                break
        elements = out
    return elements


def extract_as_path(tr: Traceroute, prefix_table: PrefixTable) -> AsPath:
    """Derive the AS-level path of a traceroute.

    Per hop, the first non-timeout response address is mapped through the
    prefix table; non-global addresses are skipped entirely; a responding
    but unmapped address, or a hop with no response at all, becomes an
    unknown-hop marker. The source AS is prepended and the destination AS
    appended when not already terminal.
    """
    if not tr.hops:
        raise EmptyTraceroute(f"traceroute {tr.measurement_id} has no hops")
    elements: list = [tr.src_asn]
    for hop in tr.hops:
        address = hop.first_address()
        if address is None:
            elements.append(UNKNOWN_HOP)
            continue
        if not is_public_address(address):
            continue
        asn = prefix_table.lookup(address)
        elements.append(asn if asn is not None else UNKNOWN_HOP)
    if elements[-1] != tr.dst_asn:
        elements.append(tr.dst_asn)
    return AsPath(tuple(_normalize(elements)))


def classify_locality(tr: Traceroute, geo_table: GeoTable, country: str) -> Locality:
    """In/out-of-country from hop geolocations.

    A single hop geolocated abroad witnesses the path leaving the country;
    absent that, any hop geolocated inside means the path stayed in; with
    no geolocatable hops at all the traceroute says nothing.
    """
    saw_inside = False
    for hop in tr.hops:
        address = hop.first_address()
        if address is None or not is_public_address(address):
            continue
        hop_country = geo_table.lookup(address)
        if hop_country is None:
            continue
        if hop_country != country:
            return Locality.OUT_OF_COUNTRY
        saw_inside = True
    return Locality.IN_COUNTRY if saw_inside else Locality.UNDETERMINED


def classify_directness(path: AsPath, src_asn: int, dst_asn: int) -> Directness:
    """Direct, indirect (any third AS on the path), or undetermined.

    An unknown-hop marker between different ASes may hide an intermediary,
    so it blocks a Direct verdict without proving Indirect.
    """
    endpoints = {src_asn, dst_asn}
    if any(asn not in endpoints for asn in path.asn_elements()):
        return Directness.INDIRECT
    if path.has_unknown():
        return Directness.UNDETERMINED
    return Directness.DIRECT


def classify_traceroute(
    tr: Traceroute, prefix_table: PrefixTable, geo_table: GeoTable, country: str
) -> PathClassification:
    path = extract_as_path(tr, prefix_table)
    return PathClassification(
        locality=classify_locality(tr, geo_table, country),
        directness=classify_directness(path, tr.src_asn, tr.dst_asn),
    )


def classify_pair(
    src_asn: int,
    dst_asn: int,
    area_weight: float,
    evidence: Iterable[tuple[str, PathClassification]],
    covered: bool,
) -> CellVerdict:
    """Aggregate per-traceroute labels into one cell verdict.

    Undetermined labels abstain: the verdict is the consensus of the
    determined labels on each dimension, Inconsistent/Mixed when they
    disagree, and Undetermined/NotApplicable when nothing weighed in.
    """
    evidence = tuple(evidence)
    if not covered:
        if evidence:
            raise ValueError("uncovered pairs cannot carry evidence")
        return CellVerdict(
            src_asn,
            dst_asn,
            LocalityVerdict.NO_COVERAGE,
            DirectnessVerdict.NOT_APPLICABLE,
            area_weight,
        )
    localities = {cls.locality for _, cls in evidence} - {Locality.UNDETERMINED}
    if not localities:
        locality = LocalityVerdict.UNDETERMINED
    elif localities == {Locality.IN_COUNTRY}:
        locality = LocalityVerdict.IN_COUNTRY
    elif localities == {Locality.OUT_OF_COUNTRY}:
        locality = LocalityVerdict.OUT_OF_COUNTRY
    else:
        locality = LocalityVerdict.INCONSISTENT
    directs = {cls.directness for _, cls in evidence} - {Directness.UNDETERMINED}
    if not directs:
        directness = DirectnessVerdict.NOT_APPLICABLE
    elif directs == {Directness.DIRECT}:
        directness = DirectnessVerdict.DIRECT
    elif directs == {Directness.INDIRECT}:
        directness = DirectnessVerdict.INDIRECT
    else:
        directness = DirectnessVerdict.MIXED
    return CellVerdict(src_asn, dst_asn, locality, directness, area_weight, evidence)


def normalize_path(elements: Sequence) -> AsPath:
    """Build an AsPath from raw elements, applying the normalization rules."""
    return AsPath(tuple(_normalize(list(elements))))
