"""Transport interface and the real-network implementation.

Contract (shared by the HTTP transport and the harness's in-memory one):

    fetch(url, max_bytes, timeout) -> (status_code, content_type, body)
    head(url, timeout)             -> (status_code, content_type, size)

``fetch`` returns at most ``max_bytes + 1`` body bytes so callers can
detect truncation by comparing against the cap; network-level failures
raise FetchFailed. ``head`` never transfers a body.
"""
import urllib.error
import urllib.request
from dataclasses import dataclass

from .errors import FetchFailed

DEFAULT_MAX_BYTES = 512 * 1024  # bounded processing per feed/page
DEFAULT_TIMEOUT = 10.0


@dataclass(frozen=True)
class FetchLimits:
    max_bytes: int = DEFAULT_MAX_BYTES
    timeout: float = DEFAULT_TIMEOUT

    def __post_init__(self):
        if self.max_bytes <= 0:
            raise ValueError("max_bytes must be > 0")
        if self.timeout <= 0:
            raise ValueError("timeout must be > 0")


class _CappedRedirects(urllib.request.HTTPRedirectHandler):
    max_repeats = 3
    max_redirections = 3  # beyond three hops is out of scope


class HttpTransport:
    """Minimal urllib-based transport for online mode. Safe for concurrent
    use (no shared mutable state). Follows at most three redirect hops."""

    user_agent = "blogwatch/0.1"

    def __init__(self):
        self._opener = urllib.request.build_opener(_CappedRedirects)

    def _request(self, url, method, timeout):
        req = urllib.request.Request(url, method=method,
                                     headers={"User-Agent": self.user_agent})
        try:
            return self._opener.open(req, timeout=timeout)
        except urllib.error.HTTPError as exc:
            return exc  # carries status/headers like a response
        except (urllib.error.URLError, OSError, ValueError) as exc:
            raise FetchFailed(url, str(exc)) from exc

    def fetch(self, url, max_bytes, timeout):
        resp = self._request(url, "GET", timeout)
        with resp:
            body = resp.read(max_bytes + 1)
            ctype = (resp.headers.get("Content-Type") or "").split(";")[0].strip()
            return resp.status, ctype, body

    def head(self, url, timeout):
        resp = self._request(url, "HEAD", timeout)
        with resp:
            ctype = (resp.headers.get("Content-Type") or "").split(";")[0].strip()
            length = resp.headers.get("Content-Length")
            size = int(length) if length and length.isdigit() else 0
            return resp.status, ctype, size


class ThrottledTransport:
    """Wraps a transport, charging downloaded bytes against a token bucket
    and recording totals. Header probes are free."""

    def __init__(self, inner, bucket, metrics=None):
        self.inner = inner
        self.bucket = bucket
        self.metrics = metrics if metrics is not None else {}

    def fetch(self, url, max_bytes, timeout):
        status, ctype, body = self.inner.fetch(url, max_bytes, timeout)
        self.bucket.acquire(len(body))
        self.metrics["bytes_fetched"] = self.metrics.get("bytes_fetched", 0) + len(body)
        return status, ctype, body

    def head(self, url, timeout):
        return self.inner.head(url, timeout)
