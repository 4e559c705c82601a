"""Sumset kernels over sorted, duplicate-free int64 arrays.

Every kernel takes two nonempty sorted unique arrays and returns their
Minkowski sum as a sorted unique int64 array. Callers are responsible for
range checks; the kernels assume every pairwise sum fits in int64.
"""
from __future__ import annotations

import logging
import math
from typing import Iterable, Literal

import numpy as np

logger = logging.getLogger(__name__)

Method = Literal["auto", "naive", "bitset", "fft", "merge"]
METHODS: tuple[str, ...] = ("auto", "naive", "bitset", "fft", "merge")

# shift-OR stays ahead of FFT while (smaller operand) x (span) is below this
SHIFT_OR_WORK = 1 << 30
MERGE_CHUNK = 1 << 22


def _span(arr: np.ndarray) -> int:
    return int(arr[-1]) - int(arr[0])


def _indicator(arr: np.ndarray) -> np.ndarray:
    bits = np.zeros(_span(arr) + 1, dtype=bool)
    bits[arr - arr[0]] = True
    return bits


def _to_bigint(arr: np.ndarray) -> int:
    packed = np.packbits(_indicator(arr), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _from_bigint(mask: int, offset: int) -> np.ndarray:
    nbytes = max(1, (mask.bit_length() + 7) // 8)
    raw = np.frombuffer(mask.to_bytes(nbytes, "little"), dtype=np.uint8)
    bits = np.unpackbits(raw, bitorder="little")
    return np.flatnonzero(bits).astype(np.int64) + np.int64(offset)


def naive_sumset(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise oracle: every a + b, deduplicated. Quadratic, used for cross-checks."""
    out = {x + y for x in a.tolist() for y in b.tolist()}
    return np.array(sorted(out), dtype=np.int64)


def bitset_sumset(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Shift-OR of the larger operand's packed bit-array, once per element of the smaller."""
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    mask = _to_bigint(large)
    acc = 0
    base = int(small[0])
    for s in small.tolist():
        acc |= mask << (s - base)
    return _from_bigint(acc, base + int(large[0]))


def _fast_len(n: int) -> int:
    """Smallest 2^a 3^b 5^c >= n; pocketfft is fastest on such lengths."""
    best = 1 << max(0, (n - 1).bit_length())
    p5 = 1
    while p5 < best:
        p35 = p5
        while p35 < best:
            size = p35 << max(0, (-(-n // p35) - 1).bit_length())
            best = min(best, size)
            p35 *= 3
        p5 *= 5
    return best


def fft_sumset(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Convolve 0/1 indicator arrays; a sum is present iff its count is at least one.

    Both operands are first reduced by their common stride g. The operand with
    the coarser remaining stride s is then divided by s and the other is split
    into its residue classes mod s, so each class is convolved against the
    same transform in a window about s times shorter.
    """
    if len(a) == 1 or len(b) == 1:
        single, other = (a, b) if len(a) == 1 else (b, a)
        return other + single[0]
    xa, xb = a - a[0], b - b[0]
    g = math.gcd(int(np.gcd.reduce(xa)), int(np.gcd.reduce(xb)))
    xa, xb = xa // g, xb // g
    sa, sb = int(np.gcd.reduce(xa)), int(np.gcd.reduce(xb))
    x, y, s = (xa, xb // sb, sb) if sb >= sa else (xb, xa // sa, sa)

    residues = x % s
    classes = [x[residues == r] for r in np.unique(residues).tolist()]
    n = _fast_len(max(_span(c) for c in classes) // s + int(y[-1]) + 1)
    fy = np.fft.rfft(_indicator(y), n)
    hit = np.zeros(int(x[-1]) + s * int(y[-1]) + 1, dtype=bool)
    for c in classes:
        r = int(c[0]) % s
        q = (c - r) // s
        conv = np.fft.irfft(np.fft.rfft(_indicator(q), n) * fy, n)
        hit[r + s * (np.flatnonzero(conv > 0.5) + q[0])] = True
    return np.flatnonzero(hit).astype(np.int64) * np.int64(g) + (a[0] + b[0])


def merge_sumset(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Sort-merge of shifted copies of the larger operand; no window needed."""
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    per_chunk = max(1, MERGE_CHUNK // len(large))
    acc = np.empty(0, dtype=np.int64)
    for start in range(0, len(small), per_chunk):
        shifts = small[start:start + per_chunk]
        block = np.unique((shifts[:, None] + large[None, :]).ravel())
        acc = np.union1d(acc, block)
    return acc


def choose_method(a: np.ndarray, b: np.ndarray, window: int) -> str:
    span = _span(a) + _span(b) + 1
    if span > window:
        return "merge"
    if min(len(a), len(b)) * span <= SHIFT_OR_WORK:
        return "bitset"
    return "fft"


_KERNELS = {
    "naive": naive_sumset,
    "bitset": bitset_sumset,
    "fft": fft_sumset,
    "merge": merge_sumset,
}


def sumset(a: np.ndarray, b: np.ndarray, method: Method = "auto", window: int = 2**28) -> np.ndarray:
    if method == "auto":
        method = choose_method(a, b, window)
    elif method in ("bitset", "fft") and _span(a) + _span(b) + 1 > window:
        # dense paths allocate the whole span
        logger.info("span above window %d, %s replaced by merge", window, method)
        method = "merge"
    logger.debug("sumset |A|=%d |B|=%d via %s", len(a), len(b), method)
    return _KERNELS[method](a, b)


def shift_or_count(left: Iterable[int], right: Iterable[int]) -> int:
    """|left + right| for small nonnegative integers, via one big-int mask."""
    mask = 0
    for r in right:
        mask |= 1 << r
    acc = 0
    for x in left:
        acc |= mask << x
    return acc.bit_count()
