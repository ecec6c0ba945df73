"""Text kernel selection: compiled extension when available, else pure Python.

Set ``BLOGWATCH_PURE_PYTHON=1`` to force the fallback (used by the parity
tests and the benchmark).
"""
import os

from . import _pykernels

if os.environ.get("BLOGWATCH_PURE_PYTHON"):
    _impl = _pykernels
    KERNEL_IMPL = "python"
else:
    try:
        from . import _ckernels as _impl
        KERNEL_IMPL = "c"
    except ImportError:
        _impl = _pykernels
        KERNEL_IMPL = "python"

scan_tokens = _impl.scan_tokens
count_ngrams = _impl.count_ngrams
count_occurrences = _impl.count_occurrences

__all__ = ["scan_tokens", "count_ngrams", "count_occurrences", "KERNEL_IMPL"]
