"""Longest-prefix-match tables for IP-to-AS and IP-to-country lookups.

Entries are bucketed by (ip version, prefix length); a lookup masks the
address down to each stored length, most specific first, and returns the
first bucket hit. Re-adding an identical prefix overwrites its value.
"""

from __future__ import annotations

import ipaddress
from typing import Any, Iterator

_Network = ipaddress.IPv4Network | ipaddress.IPv6Network


class LpmTable:
    def __init__(self):
        # (version, prefixlen) -> {network int -> value}
        self._buckets: dict[tuple[int, int], dict[int, Any]] = {}
        # version -> prefix lengths present, longest first
        self._lengths: dict[int, list[int]] = {4: [], 6: []}
        self._size = 0

    def add(self, prefix: str | _Network, value: Any) -> None:
        net = ipaddress.ip_network(prefix, strict=False)
        key = (net.version, net.prefixlen)
        bucket = self._buckets.get(key)
        if bucket is None:
            bucket = self._buckets[key] = {}
            lengths = self._lengths[net.version]
            lengths.append(net.prefixlen)
            lengths.sort(reverse=True)
        if int(net.network_address) not in bucket:
            self._size += 1
        bucket[int(net.network_address)] = value

    def lookup(self, address: str) -> Any | None:
        """Value of the most specific prefix containing address, else None."""
        addr = ipaddress.ip_address(address)
        addr_int = int(addr)
        version = addr.version
        max_len = addr.max_prefixlen
        for plen in self._lengths[version]:
            masked = (addr_int >> (max_len - plen)) << (max_len - plen)
            bucket = self._buckets[(version, plen)]
            if masked in bucket:
                return bucket[masked]
        return None

    def entries(self) -> Iterator[tuple[_Network, Any]]:
        for (version, plen), bucket in self._buckets.items():
            for net_int, value in bucket.items():
                if version == 4:
                    net = ipaddress.IPv4Network((net_int, plen))
                else:
                    net = ipaddress.IPv6Network((net_int, plen))
                yield net, value

    def __len__(self) -> int:
        return self._size


class PrefixTable(LpmTable):
    """IP prefix -> origin AS number."""


class GeoTable(LpmTable):
    """IP prefix -> country code; a stored None records "geolocation unknown".

    An unknown entry still wins longest-prefix match, masking any broader
    prefix with a real country, so lookup() returning None covers both
    "no entry" and "explicitly unknown".
    """
