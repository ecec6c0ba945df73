#!/usr/bin/env python3
"""Benchmark the compiled text kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]

Workloads mirror the pipeline's hot path: tokenizing summary/page text,
counting 2-3 gram candidates over gap-marked token streams, and counting
phrase occurrences in anchor contexts.
"""
import argparse
import random
import time

from blogwatch._kernels import _pykernels

try:
    from blogwatch._kernels import _ckernels
except ImportError:
    _ckernels = None


def build_workloads(rng):
    vocab = ["flood", "river", "warning", "market", "city", "code", "storm",
             "quake", "rain", "press", "x9", "report"]
    words = []
    for _ in range(200_000):
        words.append(rng.choice(vocab))
        if rng.random() < 0.08:
            words.append(".")
    text = " ".join(words)

    seq = [None if rng.random() < 0.12 else rng.choice(vocab)
           for _ in range(120_000)]

    haystacks = [[rng.choice(vocab) for _ in range(rng.randint(4, 24))]
                 for _ in range(4_000)]
    needles = [tuple(rng.choice(vocab) for _ in range(rng.randint(2, 3)))
               for _ in range(10)]

    return {
        "scan_tokens (1.1 MB text)": lambda mod: mod.scan_tokens(text),
        "count_ngrams (120k tokens)": lambda mod: mod.count_ngrams(seq),
        "count_occurrences (4k contexts x 10 phrases)": lambda mod: [
            mod.count_occurrences(h, n) for h in haystacks for n in needles],
    }


def best_of(repeats, fn, mod):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(mod)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if _ckernels is None:
        print("compiled kernels not built; nothing to compare")
        return 1

    workloads = build_workloads(random.Random(0))
    name_w = max(len(n) for n in workloads)
    print(f"{'workload':<{name_w}}  {'python':>10}  {'compiled':>10}  {'speedup':>8}")
    for name, fn in workloads.items():
        py_t, py_r = best_of(args.repeats, fn, _pykernels)
        c_t, c_r = best_of(args.repeats, fn, _ckernels)
        assert py_r == c_r, f"implementations disagree on {name}"
        print(f"{name:<{name_w}}  {py_t * 1e3:>8.1f}ms  {c_t * 1e3:>8.1f}ms  "
              f"{py_t / c_t:>7.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
