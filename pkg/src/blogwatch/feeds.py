"""Layer 2: fetch and parse RSS summaries, one seed at a time.

Only the RSS 2.0 subset is handled; Atom is out of scope. Feeds declared
in UTF-8 or Latin-1 are accepted and transcoded; anything else is rejected
as NotAFeed. Each worker fully processes one summary before taking the
next seed, and URLs extracted here are never fed back as layer-2 seeds.
"""
import email.utils
import logging
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .errors import FetchFailed, NotAFeed, OversizeBody
from .htmltext import DEFAULT_WINDOW, LinkContext, extract_fragment, find_feed_url
from .transport import FetchLimits
from .urlnorm import normalize_url, resolve_url

__all__ = ["LinkContext", "Post", "SummaryDoc", "resolve_feed_url",
           "parse_rss", "fetch_summary", "decode_feed_bytes",
           "DEFAULT_MAX_POSTS"]

logger = logging.getLogger(__name__)

DEFAULT_MAX_POSTS = 50

_XML_DECL_ENCODING = re.compile(rb'<\?xml[^>]*encoding=["\']([A-Za-z0-9._-]+)["\']')
_ACCEPTED_ENCODINGS = {"utf-8", "utf8", "latin-1", "latin1", "iso-8859-1", "us-ascii", "ascii"}
_HTML_TYPES = {"text/html", "application/xhtml+xml"}


@dataclass(frozen=True)
class Post:
    title: str
    link: str
    description: str  # markup stripped
    published: float = None  # epoch seconds, None when the feed omits it
    out_links: tuple = ()


@dataclass
class SummaryDoc:
    blog_url: str
    title: str
    posts: list = field(default_factory=list)
    fetched_at: float = 0.0

    def all_links(self):
        for post in self.posts:
            yield from post.out_links


def resolve_feed_url(blog_url: str, page_head: str = None) -> str:
    """Feed location for a blog: the declared RSS alternate link when the
    page head is available and has one, else the conventional ``/rss``
    path on the blog URL."""
    if page_head:
        declared = find_feed_url(page_head, blog_url)
        if declared:
            return declared
    return normalize_url(blog_url.rstrip("/") + "/rss")


def decode_feed_bytes(body: bytes) -> str:
    """Decode feed bytes per the XML declaration; UTF-8 assumed when the
    declaration is absent."""
    m = _XML_DECL_ENCODING.search(body[:200])
    encoding = m.group(1).decode("ascii").lower() if m else "utf-8"
    if encoding not in _ACCEPTED_ENCODINGS:
        raise NotAFeed(f"unsupported feed encoding {encoding!r}")
    try:
        if encoding in ("latin-1", "latin1", "iso-8859-1"):
            return body.decode("latin-1")
        return body.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise NotAFeed(f"undecodable feed body: {exc}") from exc


def _parse_pubdate(raw):
    if not raw:
        return None
    try:
        dt = email.utils.parsedate_to_datetime(raw.strip())
    except (TypeError, ValueError):
        return None
    if dt is None:
        return None
    try:
        return dt.timestamp()
    except (OverflowError, OSError, ValueError):
        return None


def parse_rss(feed_text: str, base_url: str, max_posts: int = DEFAULT_MAX_POSTS,
              window: int = DEFAULT_WINDOW) -> SummaryDoc:
    """Parse an RSS 2.0 document into a SummaryDoc.

    Item descriptions are stripped of markup; anchors inside them become
    LinkContexts with a window of ``window`` words each side, resolved to
    absolute URLs against the item link. Items without a usable link are
    dropped (and counted in the log). Posts are ordered newest first and
    capped at ``max_posts``.
    """
    try:
        root = ET.fromstring(feed_text)
    except ET.ParseError as exc:
        raise NotAFeed(f"unparseable feed: {exc}") from exc
    if root.tag.lower() != "rss":
        raise NotAFeed(f"root element {root.tag!r} is not <rss>")
    channel = root.find("channel")
    if channel is None:
        raise NotAFeed("feed has no <channel>")

    posts = []
    dropped = 0
    for item in channel.findall("item"):
        raw_link = (item.findtext("link") or "").strip()
        if not raw_link:
            dropped += 1
            continue
        try:
            link = resolve_url(base_url, raw_link)
        except ValueError:
            dropped += 1
            continue
        description = item.findtext("description") or ""
        extract = extract_fragment(description, link, window)
        posts.append(Post(
            title=(item.findtext("title") or "").strip(),
            link=link,
            description=extract.text,
            published=_parse_pubdate(item.findtext("pubDate")),
            out_links=tuple(extract.links),
        ))
    if dropped:
        logger.info("dropped %d feed item(s) without a link (%s)", dropped, base_url)

    # newest first; undated items sort oldest, ties keep document order
    posts.sort(key=lambda p: p.published if p.published is not None else float("-inf"),
               reverse=True)
    del posts[max_posts:]

    return SummaryDoc(
        blog_url=normalize_url(base_url),
        title=(channel.findtext("title") or "").strip(),
        posts=posts,
    )


def _looks_like_feed(content_type: str) -> bool:
    ctype = (content_type or "").lower()
    return ctype.endswith("xml") and ctype not in _HTML_TYPES


def fetch_summary(seed, transport, limits: FetchLimits = FetchLimits(),
                  max_posts: int = DEFAULT_MAX_POSTS, now: float = 0.0) -> SummaryDoc:
    """Fetch the RSS summary for a seed blog.

    The seed URL is fetched first: if it already serves XML it is parsed
    as the feed, otherwise feed auto-discovery runs over the returned HTML
    and the discovered (or conventional ``/rss``) URL is fetched. Bodies
    beyond the byte cap get a truncated parse attempt before OversizeBody
    is raised.
    """
    status, ctype, body = transport.fetch(seed.url, limits.max_bytes, limits.timeout)
    if status >= 400:
        raise FetchFailed(seed.url, f"HTTP {status}")
    feed_url = seed.url
    if not _looks_like_feed(ctype):
        head_text = body[:limits.max_bytes].decode("utf-8", errors="replace")
        feed_url = resolve_feed_url(seed.url, head_text)
        status, ctype, body = transport.fetch(feed_url, limits.max_bytes, limits.timeout)
        if status >= 400:
            raise FetchFailed(feed_url, f"HTTP {status}")

    oversize = len(body) > limits.max_bytes
    if oversize:
        body = body[:limits.max_bytes]
    text = decode_feed_bytes(body)
    try:
        doc = parse_rss(text, feed_url, max_posts=max_posts)
    except NotAFeed:
        if oversize:
            raise OversizeBody(f"{feed_url}: body exceeded {limits.max_bytes} bytes "
                               "and truncated parse failed")
        raise
    doc.fetched_at = now
    return doc
