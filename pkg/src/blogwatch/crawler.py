"""Layer 3: focused full-text crawling gated by topic relevance.

Frontier nodes are fetched complete, except media (photos/audio/video),
which a header probe rejects before any body transfer. Links of a page
continue the crawl only when the page is classified on-topic; the text
analyzer then emits graph corrections (spam exclusion, blog confirmation,
glossary rescale).
"""
import hashlib
import logging
import threading
from dataclasses import dataclass
from pathlib import Path

from .errors import FetchFailed, MediaSkipped, OversizeBody
from .graph import Correction, CorrectionKind, NodeStatus, PROVENANCE_FULLTEXT
from .htmltext import DEFAULT_WINDOW, extract_page
from .phrases import extract_scored_phrases
from .relevance import RELEVANT, nb_classify, vsm_score
from .transport import FetchLimits
from .urlnorm import host_of

logger = logging.getLogger(__name__)

_MEDIA_PREFIXES = ("image/", "audio/", "video/")
DEFAULT_HOST_DELAY = 1.0


class HostThrottle:
    """Politeness: at least ``delay`` seconds between fetches to one host."""

    def __init__(self, delay: float, clock=None):
        self.delay = delay
        self.clock = clock
        self._last = {}
        self._lock = threading.Lock()

    def wait(self, url: str) -> None:
        if not self.delay or self.clock is None:
            return
        host = host_of(url)
        with self._lock:
            now = self.clock.now()
            last = self._last.get(host)
            pause = self.delay - (now - last) if last is not None else 0.0
        if pause > 0:
            self.clock.sleep(pause)
        with self._lock:
            self._last[host] = self.clock.now()


@dataclass(frozen=True)
class Page:
    url: str
    content_type: str
    text: str
    out_links: tuple
    fetched_at: float
    bytes: int
    # analyzer inputs derived during extraction
    has_feed_link: bool = False
    dated_headings: int = 0
    title: str = ""


@dataclass(frozen=True)
class CrawlResult:
    page: object            # Page, or None when the fetch did not complete
    relevant: bool
    corrections: tuple
    new_edges: int


@dataclass(frozen=True)
class AnalyzerConfig:
    """Spam/blog/glossary heuristics. The thresholds are configuration, not
    constants: every deployment tunes them."""
    max_out_degree: int = 200       # S_max
    dup_anchor_min: int = 10        # D_dup distinct targets, same anchor
    min_words_per_link: float = 5.0  # R_min
    glossary_rescale: float = 0.5


def fetch_page(node, transport, limits: FetchLimits = FetchLimits(),
               window: int = DEFAULT_WINDOW, now: float = 0.0) -> Page:
    """Fetch one frontier node's full text.

    A header probe runs first: media content types raise MediaSkipped and
    oversize bodies raise OversizeBody, both without transferring a body.
    """
    status, ctype, size = transport.head(node.url, limits.timeout)
    if status >= 400:
        raise FetchFailed(node.url, f"HTTP {status} (head)")
    if ctype.lower().startswith(_MEDIA_PREFIXES):
        raise MediaSkipped(node.url, ctype)
    if size > limits.max_bytes:
        raise OversizeBody(f"{node.url}: declared size {size} > cap {limits.max_bytes}")

    status, ctype, body = transport.fetch(node.url, limits.max_bytes, limits.timeout)
    if status >= 400:
        raise FetchFailed(node.url, f"HTTP {status}")
    if len(body) > limits.max_bytes:
        raise OversizeBody(f"{node.url}: body exceeded cap {limits.max_bytes}")

    extract = extract_page(body.decode("utf-8", errors="replace"), node.url, window)
    return Page(
        url=node.url,
        content_type=ctype,
        text=extract.text,
        out_links=tuple(extract.links),
        fetched_at=now,
        bytes=len(body),
        has_feed_link=extract.has_feed_link,
        dated_headings=extract.dated_heading_count,
        title=extract.title,
    )


def analyze_page(page: Page, glossary=frozenset(),
                 config: AnalyzerConfig = AnalyzerConfig()):
    """Text-analyzer heuristics, applied in order.

    (a) spam: out-degree above S_max, or >= D_dup distinct targets sharing
        identical anchor text, or fewer than R_min words of text per link
        -> exclude_spam (short-circuits the rest; the node is dead anyway);
    (b) blog: a declared RSS alternate link or >= 3 date-stamped headings
        -> confirm_blog;
    (c) glossary: any banned term in the page text -> rescale 0.5.
    """
    n_links = len(page.out_links)
    if n_links > config.max_out_degree:
        return (Correction(page.url, CorrectionKind.EXCLUDE_SPAM,
                           reason=f"out-degree {n_links} > {config.max_out_degree}"),)

    by_anchor = {}
    for link in page.out_links:
        if link.anchor_text:
            by_anchor.setdefault(link.anchor_text, set()).add(link.target)
    for anchor, targets in by_anchor.items():
        if len(targets) >= config.dup_anchor_min:
            return (Correction(page.url, CorrectionKind.EXCLUDE_SPAM,
                               reason=f"{len(targets)} links share anchor {anchor!r}"),)

    if n_links > 0:
        words = len(page.text.split())
        if words / n_links < config.min_words_per_link:
            return (Correction(page.url, CorrectionKind.EXCLUDE_SPAM,
                               reason=f"{words} words for {n_links} links"),)

    corrections = []
    if page.has_feed_link or page.dated_headings >= 3:
        corrections.append(Correction(page.url, CorrectionKind.CONFIRM_BLOG,
                                      reason="feed link" if page.has_feed_link
                                      else f"{page.dated_headings} dated headings"))
    if glossary:
        page_terms = set(page.text.lower().split())
        hits = page_terms & set(glossary)
        if hits:
            corrections.append(Correction(page.url, CorrectionKind.RESCALE,
                                          factor=config.glossary_rescale,
                                          reason=f"glossary terms {sorted(hits)[:3]}"))
    return tuple(corrections)


class PageStore:
    """The reservoir of fetched relevant pages: an index line per page plus
    the plain text in a content-addressed file."""

    def __init__(self, root):
        self.root = Path(root)
        (self.root / "content").mkdir(parents=True, exist_ok=True)
        self.index_path = self.root / "index.tsv"

    def add(self, page: Page, score: float) -> str:
        digest = hashlib.sha256(page.text.encode("utf-8")).hexdigest()
        content_path = self.root / "content" / f"{digest}.txt"
        if not content_path.exists():
            content_path.write_text(page.text, encoding="utf-8")
        with open(self.index_path, "a", encoding="utf-8") as fh:
            fh.write(f"{page.url}\t{page.fetched_at!r}\t{score!r}\n")
        return digest


class FocusedCrawler:
    """Drives crawl steps against a shared frontier graph.

    Each step takes the best frontier node, fetches it, scores relevance,
    expands links only when on-topic, and applies analyzer corrections.
    Fetch errors mark the node failed (after one retry) and never abort
    the run.
    """

    def __init__(self, graph, profile, transport, *, stops, limits=FetchLimits(),
                 classifier="vsm", nb_model=None, glossary=frozenset(),
                 analyzer: AnalyzerConfig = AnalyzerConfig(), store: PageStore = None,
                 clock=None, window: int = DEFAULT_WINDOW, phrase_sink=None,
                 host_delay: float = DEFAULT_HOST_DELAY):
        self.graph = graph
        self.profile = profile
        self.transport = transport
        self.stops = stops
        self.limits = limits
        self.classifier = classifier
        self.nb_model = nb_model
        self.glossary = glossary
        self.analyzer = analyzer
        self.store = store
        self.clock = clock
        self.window = window
        self.phrase_sink = phrase_sink
        self.host_throttle = HostThrottle(host_delay, clock)

    def _now(self) -> float:
        return self.clock.now() if self.clock is not None else 0.0

    def _score(self, text: str):
        if self.classifier == "nb":
            label, gap = nb_classify(text, self.nb_model)
            return label == RELEVANT, gap
        score = vsm_score(text, self.profile)
        return score >= self.profile.threshold, score

    def _fetch_with_retry(self, node) -> Page:
        self.host_throttle.wait(node.url)
        try:
            return fetch_page(node, self.transport, self.limits, self.window, self._now())
        except FetchFailed:
            return fetch_page(node, self.transport, self.limits, self.window, self._now())

    def crawl_step(self):
        """Run one fetch-classify-expand-correct cycle; None when the
        frontier is empty."""
        picked = self.graph.next_frontier(1)
        if not picked:
            return None
        node = picked[0]

        try:
            page = self._fetch_with_retry(node)
        except MediaSkipped as exc:
            logger.info("media skipped: %s (%s)", node.url, exc.content_type)
            self.graph.resolve(node.url, NodeStatus.EXCLUDED)
            return CrawlResult(page=None, relevant=False, corrections=(), new_edges=0)
        except (FetchFailed, OversizeBody) as exc:
            logger.warning("fetch failed: %s", exc)
            self.graph.resolve(node.url, NodeStatus.FAILED)
            return CrawlResult(page=None, relevant=False, corrections=(), new_edges=0)

        relevant, score = self._score(page.text)
        new_edges = 0
        if relevant:
            phrases = extract_scored_phrases(
                page.text, self.stops,
                in_degree=self.graph.in_degree(page.url),
                out_degree=len({l.target for l in page.out_links}),
            )
            report = self.graph.insert_links(page.url, page.out_links, phrases,
                                             PROVENANCE_FULLTEXT)
            new_edges = len(report.edges_added)
            if self.phrase_sink is not None:
                self.phrase_sink(phrases)
            if self.store is not None:
                self.store.add(page, score)
        else:
            self.graph.resolve(node.url, NodeStatus.FETCHED)

        corrections = analyze_page(page, self.glossary, self.analyzer)
        if corrections:
            self.graph.apply_corrections(corrections)
        return CrawlResult(page=page, relevant=relevant, corrections=corrections,
                           new_edges=new_edges)
