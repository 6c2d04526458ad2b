"""HTTP client for the probe-inventory and measurement-result services.

The remote payloads use the same schemas as the offline files, so fetched
data normalizes through the exact same constructors as parsed files. All
requests go through one rate limiter (default ceiling 4 requests/second).

Wire format:
  GET {base}/probes?country=CC      -> {"results": [probe objects], "next": url or null}
  GET {base}/measurements/{id}/results -> [traceroute objects]
"""

from __future__ import annotations

import threading
import time
from typing import Any, Callable
from urllib.parse import urlencode

from .errors import HttpError, IngestError, PaginationLoop
from .ingest import probe_from_dict, traceroute_from_dict
from .model import Probe, Traceroute

DEFAULT_RATE_LIMIT = 4.0


class RateLimiter:
    """Global minimum-interval pacing, safe under concurrent callers."""

    def __init__(
        self,
        per_second: float = DEFAULT_RATE_LIMIT,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if per_second <= 0:
            raise ValueError("rate limit must be positive")
        self._interval = 1.0 / per_second
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._next_allowed = float("-inf")

    def acquire(self) -> None:
        with self._lock:
            now = self._clock()
            wait = self._next_allowed - now
            if wait > 0:
                self._sleep(wait)
                now = self._next_allowed
            self._next_allowed = now + self._interval


def _default_session():
    import requests

    return requests.Session()


class HttpClient:
    """Thin GET-JSON wrapper around a requests-compatible session."""

    def __init__(
        self,
        session=None,
        rate_limit: float = DEFAULT_RATE_LIMIT,
        api_key: str | None = None,
        limiter: RateLimiter | None = None,
    ):
        self._session = session if session is not None else _default_session()
        self._limiter = limiter if limiter is not None else RateLimiter(rate_limit)
        self._headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}

    def get_json(self, url: str) -> Any:
        self._limiter.acquire()
        response = self._session.get(url, headers=self._headers)
        if response.status_code != 200:
            raise HttpError(response.status_code, url)
        return response.json()


def fetch_probe_inventory(
    base_url: str,
    country: str | None = None,
    client: HttpClient | None = None,
    **client_kwargs,
) -> list[Probe]:
    """Fetch the (optionally country-filtered) probe inventory, all pages.

    Pages are followed via each response's "next" URL until it is null.
    Any non-200 page aborts the whole fetch; a page URL seen twice raises
    PaginationLoop.
    """
    client = client if client is not None else HttpClient(**client_kwargs)
    query = f"?{urlencode({'country': country})}" if country else ""
    url = f"{base_url.rstrip('/')}/probes{query}"
    seen = set()
    probes: list[Probe] = []
    while url:
        if url in seen:
            raise PaginationLoop(f"page {url} repeats")
        seen.add(url)
        payload = client.get_json(url)
        for obj in payload.get("results", []):
            probes.append(probe_from_dict(obj))
        url = payload.get("next")
    return probes


def fetch_measurement_results(
    base_url: str,
    measurement_ids: list[int],
    client: HttpClient | None = None,
    **client_kwargs,
) -> tuple[list[Traceroute], list[Exception]]:
    """Fetch traceroute results for each measurement id.

    One id failing (HTTP error or malformed payload) does not abort the
    rest; failures come back alongside the successfully fetched results.
    """
    if not measurement_ids:
        raise ValueError("measurement_ids must be non-empty")
    client = client if client is not None else HttpClient(**client_kwargs)
    results: list[Traceroute] = []
    failures: list[Exception] = []
    for mid in measurement_ids:
        url = f"{base_url.rstrip('/')}/measurements/{mid}/results"
        try:
            payload = client.get_json(url)
            results.extend(traceroute_from_dict(obj) for obj in payload)
        except (HttpError, IngestError, TypeError, ValueError) as exc:
            failures.append(exc)
    return results, failures
