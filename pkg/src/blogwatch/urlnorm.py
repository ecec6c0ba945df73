"""URL normalization used by every layer that stores or compares URLs."""
from urllib.parse import urljoin, urlsplit, urlunsplit

_DEFAULT_PORTS = {"http": "80", "https": "443"}


def normalize_url(url: str) -> str:
    """Canonical form: lowercase scheme/host, no fragment, no default port,
    empty path becomes "/". Raises ValueError for non-absolute or
    non-http(s) URLs.
    """
    parts = urlsplit(url.strip())
    scheme = parts.scheme.lower()
    if scheme not in ("http", "https"):
        raise ValueError(f"not an absolute http/https URL: {url!r}")
    host = parts.hostname
    if not host:
        raise ValueError(f"URL has no host: {url!r}")
    host = host.lower()
    port = parts.port
    netloc = host
    if port is not None and str(port) != _DEFAULT_PORTS[scheme]:
        netloc = f"{host}:{port}"
    path = parts.path or "/"
    return urlunsplit((scheme, netloc, path, parts.query, ""))


def resolve_url(base: str, href: str) -> str:
    """Resolve href against base and normalize; ValueError if the result is
    not fetchable http(s)."""
    return normalize_url(urljoin(base, href))


def host_of(url: str) -> str:
    host = urlsplit(url).hostname
    if not host:
        raise ValueError(f"URL has no host: {url!r}")
    return host.lower()
