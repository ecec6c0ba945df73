"""Pure-Python reference implementations of the text kernels.

Semantics are the contract; the compiled module in ``_ckernels.pyx`` must
produce identical output (including dict insertion order) for any input.
"""
import re

# \w minus underscore == maximal runs of Unicode alphanumerics, which is
# exactly the character test the compiled kernel applies per code point.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def scan_tokens(text):
    """Return [(surface, lowercase), ...] for each alphanumeric run."""
    out = []
    for m in _TOKEN_RE.finditer(text):
        s = m.group()
        out.append((s, s.lower()))
    return out


def count_ngrams(seq, nmin=2, nmax=3):
    """Count contiguous n-grams over a gap-marked token sequence.

    ``seq`` is a list of strings with None marking gaps; n-grams never span
    a gap. Keys appear in first-occurrence scan order (position-major,
    shortest n first), which downstream ranking uses as its tie-break.
    """
    counts = {}
    n = len(seq)
    start = 0
    while start < n:
        if seq[start] is None:
            start += 1
            continue
        end = start
        while end < n and seq[end] is not None:
            end += 1
        for i in range(start, end):
            for size in range(nmin, nmax + 1):
                if i + size > end:
                    break
                key = tuple(seq[i:i + size])
                counts[key] = counts.get(key, 0) + 1
        start = end
    return counts


def count_occurrences(haystack, needle):
    """Occurrences of the token sequence ``needle`` in ``haystack``
    (overlapping matches counted)."""
    k = len(needle)
    if k == 0 or k > len(haystack):
        return 0
    hits = 0
    for i in range(len(haystack) - k + 1):
        for j in range(k):
            if haystack[i + j] != needle[j]:
                break
        else:
            hits += 1
    return hits
