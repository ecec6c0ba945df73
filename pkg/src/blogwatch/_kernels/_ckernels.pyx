# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled text kernels: tokenization, n-gram counting, sequence search.

Must stay behaviour-identical to ``_pykernels`` — the parity tests compare
both implementations on randomized inputs, including dict insertion order.
"""

cdef extern from "Python.h":
    int Py_UNICODE_ISALNUM(Py_UCS4 ch)


def scan_tokens(str text):
    """Return [(surface, lowercase), ...] for each alphanumeric run."""
    cdef Py_ssize_t i = 0, start, n = len(text)
    cdef Py_UCS4 ch
    cdef str surface
    cdef list out = []
    while i < n:
        ch = text[i]
        if Py_UNICODE_ISALNUM(ch):
            start = i
            i += 1
            while i < n and Py_UNICODE_ISALNUM(<Py_UCS4>text[i]):
                i += 1
            surface = text[start:i]
            out.append((surface, surface.lower()))
        else:
            i += 1
    return out


def count_ngrams(list seq, Py_ssize_t nmin=2, Py_ssize_t nmax=3):
    """Count contiguous n-grams over a gap-marked (None-separated) list."""
    cdef dict counts = {}
    cdef Py_ssize_t n = len(seq), start = 0, end, i, size
    cdef tuple key
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
                if key in counts:
                    counts[key] = <object>counts[key] + 1
                else:
                    counts[key] = 1
        start = end
    return counts


def count_occurrences(list haystack, tuple needle):
    """Occurrences of ``needle`` in ``haystack`` (overlaps counted)."""
    cdef Py_ssize_t k = len(needle), n = len(haystack)
    cdef Py_ssize_t i, j, hits = 0
    cdef bint match
    if k == 0 or k > n:
        return 0
    for i in range(n - k + 1):
        match = True
        for j in range(k):
            if haystack[i + j] != needle[j]:
                match = False
                break
        if match:
            hits += 1
    return hits
