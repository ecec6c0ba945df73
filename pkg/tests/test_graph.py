import random

import pytest

from blogwatch.feeds import Post, SummaryDoc
from blogwatch.graph import (Correction, CorrectionKind, FrontierGraph,
                             NodeStatus, PROVENANCE_FULLTEXT,
                             PROVENANCE_SUMMARY, estimate_edge_weight)
from blogwatch.htmltext import LinkContext
from blogwatch.phrases import KeyPhrase


def kp(tokens, score, count=1):
    return KeyPhrase(tuple(tokens), count, score)


def link(target, anchor, context=""):
    return LinkContext(target=target, anchor_text=anchor, context_window=context)


def doc_with_links(blog_url, links):
    post = Post(title="t", link=blog_url + "post", description="d", out_links=tuple(links))
    return SummaryDoc(blog_url=blog_url, title="blog", posts=[post])


# ----------------------------------------------------------------------
# edge weight estimation

def test_weight_zero_when_no_phrase_appears():
    phrases = [kp(("flood", "warning"), 4.0)]
    assert estimate_edge_weight(link("http://x.example/", "unrelated words"), phrases) == 0.0


def test_weight_equals_score_for_single_anchor_occurrence():
    phrases = [kp(("flood", "warning"), 4.0)]
    assert estimate_edge_weight(link("http://x.example/", "flood warning"), phrases) == 4.0


def test_weight_counts_anchor_and_context_separately():
    """Brute-force occurrence evaluator of the documented formula."""
    phrases = [kp(("flood", "warning"), 4.0), kp(("river", "level", "rise"), 2.5)]
    links = [
        link("http://a.example/", "flood warning", "river level rise and flood warning"),
        link("http://b.example/", "nothing here", "flood warning"),
    ]

    def occurrences(tokens, needle):
        return sum(1 for i in range(len(tokens) - len(needle) + 1)
                   if tuple(tokens[i:i + len(needle)]) == needle)

    for lc in links:
        anchor = lc.anchor_text.lower().split()
        context = lc.context_window.lower().split()
        expected = sum(p.score * (occurrences(anchor, p.tokens)
                                  + occurrences(context, p.tokens))
                       for p in phrases)
        assert estimate_edge_weight(lc, phrases) == pytest.approx(expected)


def test_weight_never_matches_across_anchor_context_boundary():
    phrases = [kp(("alpha", "beta"), 1.0)]
    # anchor ends with alpha, context begins with beta: no phantom match
    assert estimate_edge_weight(link("http://x.example/", "alpha", "beta"), phrases) == 0.0


# ----------------------------------------------------------------------
# insert_summary

def test_insert_doc_without_links():
    g = FrontierGraph()
    report = g.insert_summary(doc_with_links("http://b.example/", []), [])
    assert report.nodes_added == ["http://b.example/"]
    assert g.node("http://b.example/").status is NodeStatus.FETCHED
    assert g.edges() == []


def test_insert_summary_idempotent():
    g = FrontierGraph()
    phrases = [kp(("flood", "warning"), 4.0)]
    doc = doc_with_links("http://b.example/",
                         [link("http://t.example/", "flood warning")])
    g.insert_summary(doc, phrases)
    first = (sorted(n.url for n in g.nodes()), sorted(map(str, g.edges())))
    g.insert_summary(doc, phrases)
    assert (sorted(n.url for n in g.nodes()), sorted(map(str, g.edges()))) == first


def test_edge_upsert_keeps_max_weight():
    g = FrontierGraph()
    strong = [kp(("flood", "warning"), 4.0)]
    weak = [kp(("flood", "warning"), 1.5)]
    doc = doc_with_links("http://b.example/", [link("http://t.example/", "flood warning")])
    g.insert_summary(doc, strong)
    g.insert_summary(doc, weak)  # repeated weak sighting must not erode it
    (edge,) = g.edges()
    assert edge.weight == 4.0
    assert g.node("http://t.example/").priority == 4.0


def test_twenty_doc_stream_matches_offline_oracle():
    """Brute-force offline graph construction over the same fixtures."""
    rng = random.Random(17)
    phrases_pool = [kp(("flood", "warning"), 4.0), kp(("river", "rise"), 2.0),
                    kp(("quiet", "news"), 1.0)]
    docs = []
    for i in range(20):
        src = f"http://blog{i:02d}.example/"
        links = []
        for j in range(rng.randint(0, 4)):
            target = f"http://blog{rng.randint(0, 19):02d}.example/post/{rng.randint(0, 3)}"
            anchor = rng.choice(["flood warning", "river rise", "plain words"])
            links.append(link(target, anchor))
        docs.append((doc_with_links(src, links), rng.sample(phrases_pool, 2)))

    g = FrontierGraph()
    for doc, phrases in docs:
        g.insert_summary(doc, phrases)

    # offline oracle: dict of max weights keyed by (src, dst)
    expected_edges = {}
    expected_nodes = set()
    for doc, phrases in docs:
        expected_nodes.add(doc.blog_url)
        for lc in doc.all_links():
            expected_nodes.add(lc.target)
            key = (doc.blog_url, lc.target)
            w = estimate_edge_weight(lc, phrases)
            expected_edges[key] = max(expected_edges.get(key, 0.0), w)

    assert {n.url for n in g.nodes()} == expected_nodes
    assert {(e.src, e.dst): e.weight for e in g.edges()} == expected_edges
    # priority consistency, brute force
    for node in g.nodes():
        incoming = [w for (s, d), w in expected_edges.items() if d == node.url]
        assert node.priority == (max(incoming) if incoming else 0.0)


# ----------------------------------------------------------------------
# frontier ordering

def test_empty_graph_frontier():
    assert FrontierGraph().next_frontier(1) == []


def test_frontier_orders_by_priority():
    g = FrontierGraph()
    phrases = [kp(("a", "b"), 5.0), kp(("c", "d"), 2.0), kp(("e", "f"), 9.0)]
    links = [link("http://p5.example/", "a b"), link("http://p2.example/", "c d"),
             link("http://p9.example/", "e f")]
    g.insert_summary(doc_with_links("http://src.example/", links), phrases)
    picked = g.next_frontier(2)
    assert [n.url for n in picked] == ["http://p9.example/", "http://p5.example/"]
    # returned nodes are in flight and never handed out twice
    assert [n.url for n in g.next_frontier(2)] == ["http://p2.example/"]


def test_frontier_matches_repeated_argmax_oracle():
    rng = random.Random(99)
    g = FrontierGraph()
    urls = [f"http://n{i:03d}.example/" for i in range(500)]
    for url in urls:
        g.add_seed_node(url)
    # random edges with random weights (many ties via coarse weights)
    src = "http://root.example/"
    g.insert_summary(doc_with_links(src, []), [])
    entries = []
    for url in urls:
        w = float(rng.randint(0, 9))
        g._upsert_edge(src, url, w, PROVENANCE_SUMMARY, type("R", (), {
            "edges_added": [], "edges_updated": []})())
        entries.append((url, w))

    # oracle: repeated argmax by (priority desc, insertion order asc)
    order_index = {url: i for i, url in enumerate(urls)}
    remaining = dict(entries)
    expected = []
    while remaining:
        best = min(remaining, key=lambda u: (-remaining[u], order_index[u]))
        expected.append(best)
        del remaining[best]

    got = []
    while True:
        picked = g.next_frontier(1)
        if not picked:
            break
        got.append(picked[0].url)
        g.resolve(picked[0].url, NodeStatus.FETCHED)
    assert got == expected


def test_frontier_never_yields_resolved_or_excluded(mixed_world):
    g = FrontierGraph()
    phrases = [kp(("x", "y"), 3.0)]
    links = [link(f"http://t{i}.example/", "x y") for i in range(5)]
    g.insert_summary(doc_with_links("http://src.example/", links), phrases)
    g.apply_corrections([Correction("http://t0.example/", CorrectionKind.EXCLUDE_SPAM)])
    seen = set()
    while True:
        picked = g.next_frontier(1)
        if not picked:
            break
        node = picked[0]
        assert node.status is NodeStatus.IN_FLIGHT
        assert node.url not in seen
        assert node.url != "http://t0.example/"
        seen.add(node.url)
        g.resolve(node.url, NodeStatus.FETCHED)


# ----------------------------------------------------------------------
# corrections

def two_node_graph():
    g = FrontierGraph()
    phrases = [kp(("top", "story"), 10.0), kp(("side", "note"), 6.0)]
    links = [link("http://top.example/", "top story"),
             link("http://side.example/", "side note")]
    g.insert_summary(doc_with_links("http://src.example/", links), phrases)
    return g


def test_exclude_is_permanent():
    g = two_node_graph()
    g.apply_corrections([Correction("http://top.example/", CorrectionKind.EXCLUDE_SPAM)])
    assert g.node("http://top.example/").status is NodeStatus.EXCLUDED
    assert all(n.url != "http://top.example/" for n in g.next_frontier(10))
    # monotone: resolving cannot flip it back
    g.resolve("http://top.example/", NodeStatus.FETCHED)
    assert g.node("http://top.example/").status is NodeStatus.EXCLUDED


def test_identity_rescale_changes_nothing():
    g = two_node_graph()
    before = [(n.url, n.priority) for n in g.nodes()]
    g.apply_corrections([Correction("http://top.example/", CorrectionKind.RESCALE,
                                    factor=1.0)])
    assert [(n.url, n.priority) for n in g.nodes()] == before


def test_rescale_half_flips_argmax():
    # top=10, side=6 (60%); halving top -> 5 < 6 flips the ordering
    g = two_node_graph()
    g.apply_corrections([Correction("http://top.example/", CorrectionKind.RESCALE,
                                    factor=0.5)])
    assert g.node("http://top.example/").priority == 5.0
    assert g.next_frontier(1)[0].url == "http://side.example/"


def test_unknown_correction_target_recorded_not_fatal():
    g = two_node_graph()
    report = g.apply_corrections([Correction("http://ghost.example/",
                                             CorrectionKind.CONFIRM_BLOG)])
    assert report.errors == ["unknown node: http://ghost.example/"]


def test_confirm_blog_boost_applies_once():
    g = two_node_graph()
    confirm = Correction("http://top.example/", CorrectionKind.CONFIRM_BLOG)
    g.apply_corrections([confirm])
    assert g.node("http://top.example/").priority == pytest.approx(12.0)
    g.apply_corrections([confirm])  # bounded once per node
    assert g.node("http://top.example/").priority == pytest.approx(12.0)


def test_exclusion_prunes_orphaned_descendants():
    g = FrontierGraph()
    phrases = [kp(("bait", "words"), 3.0)]
    g.insert_summary(doc_with_links("http://src.example/",
                                    [link("http://farm.example/", "bait words")]),
                     phrases)
    # the farm page expands to satellites only it links to
    g.insert_links("http://farm.example/",
                   [link(f"http://farm.example/s/{i}", "bait words") for i in range(3)],
                   phrases, PROVENANCE_FULLTEXT)
    report = g.apply_corrections([Correction("http://farm.example/",
                                             CorrectionKind.EXCLUDE_SPAM)])
    assert sorted(report.nodes_pruned) == [f"http://farm.example/s/{i}" for i in range(3)]
    assert all("farm.example/s/" not in n.url for n in g.nodes())


def test_correction_factor_validation():
    with pytest.raises(ValueError):
        Correction("http://x.example/", CorrectionKind.RESCALE)  # factor missing
    with pytest.raises(ValueError):
        Correction("http://x.example/", CorrectionKind.EXCLUDE_SPAM, factor=2.0)


# ----------------------------------------------------------------------
# priority invariant under random mutation sequences

def test_priority_consistency_brute_force():
    rng = random.Random(23)
    g = FrontierGraph()
    urls = [f"http://m{i}.example/" for i in range(30)]
    for _ in range(300):
        action = rng.random()
        if action < 0.6:
            src, dst = rng.choice(urls), rng.choice(urls)
            phrases = [kp(("k", "p"), rng.uniform(0.1, 9.0))]
            g.insert_links(src, [link(dst, "k p")], phrases, PROVENANCE_SUMMARY)
        elif action < 0.8:
            g.apply_corrections([Correction(rng.choice(urls), CorrectionKind.RESCALE,
                                            factor=rng.choice([0.5, 1.0, 2.0]))])
        else:
            g.apply_corrections([Correction(rng.choice(urls),
                                            CorrectionKind.EXCLUDE_SPAM)])
    incoming = {}
    for e in g.edges():
        incoming.setdefault(e.dst, []).append(e.weight)
    for node in g.nodes():
        expected = max(incoming.get(node.url, [0.0]), default=0.0)
        assert node.priority == pytest.approx(expected)


# ----------------------------------------------------------------------
# bounded size

def test_eviction_drops_lowest_priority_unfetched():
    g = FrontierGraph(max_nodes=4)
    phrases = [kp(("a", "b"), 1.0)]
    g.insert_summary(doc_with_links("http://src.example/", [
        link("http://keep.example/", "a b a b"),   # weight 2
        link("http://weak.example/", "a b"),       # weight 1
        link("http://mid.example/", "a b a b"),    # weight 2
    ]), phrases)
    assert len(g) == 4
    g.insert_summary(doc_with_links("http://src2.example/",
                                    [link("http://new.example/", "a b a b a b")]),
                     phrases)
    urls = {n.url for n in g.nodes()}
    assert "http://weak.example/" not in urls
    assert "http://new.example/" in urls


# ----------------------------------------------------------------------
# persistence

def test_checkpoint_round_trip_is_lossless(tmp_path):
    g = two_node_graph()
    g.apply_corrections([Correction("http://top.example/", CorrectionKind.RESCALE,
                                    factor=0.3)])
    g.next_frontier(1)  # leaves one node in flight -> stored as unfetched
    p1 = tmp_path / "a.ckpt"
    p2 = tmp_path / "b.ckpt"
    g.save(p1)
    FrontierGraph.load(p1).save(p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_checkpoint_preserves_status_and_weights(tmp_path):
    g = two_node_graph()
    g.apply_corrections([Correction("http://side.example/", CorrectionKind.EXCLUDE_SPAM)])
    path = tmp_path / "g.ckpt"
    g.save(path)
    loaded = FrontierGraph.load(path)
    assert loaded.node("http://side.example/").status is NodeStatus.EXCLUDED
    assert loaded.node("http://top.example/").priority == 10.0
    assert {(e.src, e.dst, e.weight, e.provenance) for e in loaded.edges()} == \
        {(e.src, e.dst, e.weight, e.provenance) for e in g.edges()}


def test_fulltext_provenance_recorded():
    g = FrontierGraph()
    phrases = [kp(("a", "b"), 1.0)]
    g.insert_links("http://page.example/", [link("http://t.example/", "a b")],
                   phrases, PROVENANCE_FULLTEXT)
    (edge,) = g.edges()
    assert edge.provenance == PROVENANCE_FULLTEXT
