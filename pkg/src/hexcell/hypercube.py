"""Vertex arithmetic of the binary hypercube H^n.

A vertex is stored as a Python ``int`` whose binary expansion, read as an
n-character string, is the word's text form: coordinate 1 is the most
significant bit. Python ints are unbounded, so one representation covers both
the single-machine-word range (n <= 64, where code arrays use ``uint64``) and
the wide range up to n = 512.

Whole-cube sweeps (2^n vertices) use numpy arrays indexed by vertex; the
helpers at the bottom of this module implement the neighbour gather those
sweeps are built from.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterator, TypeVar

import numpy as np

from .errors import UsageError

MAX_WORD_BITS = 512
MAX_CUBE_DIM = 30

T = TypeVar("T")


class ParityClass(enum.Enum):
    EVEN = "Even"
    ODD = "Odd"


@dataclass(frozen=True, order=True)
class Word:
    """A binary word of length ``n``; ``bits`` holds coordinate 1 as MSB."""

    bits: int
    n: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_WORD_BITS:
            raise UsageError(f"word length {self.n} outside 1..{MAX_WORD_BITS}")
        if not 0 <= self.bits < (1 << self.n):
            raise UsageError(f"value {self.bits} does not fit in {self.n} bits")

    @classmethod
    def parse(cls, text: str) -> Word:
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise UsageError(f"not a binary word: {text!r}")
        return cls(int(text, 2), len(text))

    @classmethod
    def zeros(cls, n: int) -> Word:
        return cls(0, n)

    @classmethod
    def ones(cls, n: int) -> Word:
        return cls((1 << n) - 1, n)

    def render(self) -> str:
        return format(self.bits, f"0{self.n}b")

    __str__ = render

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    def coordinate(self, j: int) -> int:
        """Bit at 1-based coordinate ``j``."""
        if not 1 <= j <= self.n:
            raise UsageError(f"coordinate {j} outside 1..{self.n}")
        return (self.bits >> (self.n - j)) & 1


def render(bits: int, n: int) -> str:
    return format(bits, f"0{n}b")


def _check_same_dim(x: Word, y: Word) -> None:
    if x.n != y.n:
        raise UsageError(f"dimension mismatch: {x.n} vs {y.n}")


def distance(x: Word, y: Word) -> int:
    _check_same_dim(x, y)
    return (x.bits ^ y.bits).bit_count()


def complement(x: Word) -> Word:
    return Word(x.bits ^ ((1 << x.n) - 1), x.n)


def parity(x: Word) -> ParityClass:
    return ParityClass.EVEN if x.weight % 2 == 0 else ParityClass.ODD


def sphere(x: Word, r: int) -> Iterator[Word]:
    """Words at distance exactly ``r`` from ``x``.

    Order is lexicographic in the set of flipped coordinates, so
    ``sphere(000, 1)`` yields 100, 010, 001.
    """
    if not 0 <= r <= x.n:
        raise UsageError(f"radius {r} outside 0..{x.n}")
    for flipped in combinations(range(1, x.n + 1), r):
        mask = 0
        for j in flipped:
            mask |= 1 << (x.n - j)
        yield Word(x.bits ^ mask, x.n)


def ball(x: Word, r: int) -> Iterator[Word]:
    for radius in range(r + 1):
        yield from sphere(x, radius)


def common_neighbor_profile(n: int) -> tuple[int, int]:
    """(gamma, delta) for H^n: adjacent vertices share no neighbours,
    vertices at distance 2 share exactly two, all others none."""
    if n < 2:
        raise UsageError("the common-neighbour profile needs n >= 2")
    return 0, 2


# --------------------------------------------------------------------------
# Whole-cube helpers. Arrays are indexed by vertex (the word's int value).


def check_cube_dim(n: int) -> None:
    if not 1 <= n <= MAX_CUBE_DIM:
        raise UsageError(f"exhaustive sweep over H^{n} not supported (1..{MAX_CUBE_DIM})")


def parity_table(n: int) -> np.ndarray:
    """uint8 array: weight parity of every vertex of H^n."""
    table = np.zeros(1, dtype=np.uint8)
    for _ in range(n):
        table = np.concatenate((table, table ^ 1))
    return table


def weight_table(n: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)


def popcount(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a)


def neighbor_block(values: np.ndarray, bit: int, start: int, size: int) -> np.ndarray:
    """``values[v ^ (1 << bit)]`` for v in the aligned block [start, start+size).

    ``size`` must be a power of two and ``start`` a multiple of it.
    """
    step = 1 << bit
    if step < size:
        block = values[start:start + size]
        return block.reshape(-1, 2, step)[:, ::-1, :].reshape(-1)
    other = start ^ step
    return values[other:other + size]


def flip_neighbors(values: np.ndarray, bit: int) -> np.ndarray:
    return neighbor_block(values, bit, 0, values.shape[0])


def walsh_hadamard(a: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform along the last axis (int64).

    Applying it twice multiplies by 2^n.
    """
    a = np.array(a, dtype=np.int64, copy=True)
    size = a.shape[-1]
    lead = a.shape[:-1]
    h = 1
    while h < size:
        view = a.reshape(*lead, -1, 2, h)
        lo = view[..., 0, :].copy()
        hi = view[..., 1, :]
        view[..., 0, :] += hi
        view[..., 1, :] = lo - hi
        h *= 2
    return a


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("HEXCELL_THREADS", "1")))
    except ValueError:
        return 1


def sweep_blocks(n: int, fn: Callable[[int, int], T], threads: int | None = None,
                 block_bits: int = 20) -> list[T]:
    """Run ``fn(start, size)`` over aligned vertex blocks of H^n, in order.

    Results come back in block order regardless of ``threads``, which keeps
    least-witness reporting deterministic.
    """
    threads = threads or default_threads()
    size = 1 << min(n, block_bits)
    starts = range(0, 1 << n, size)
    if threads == 1 or len(starts) == 1:
        return [fn(s, size) for s in starts]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda s: fn(s, size), starts))
