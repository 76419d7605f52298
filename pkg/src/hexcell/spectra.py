"""Exact weight and distance distributions of cell systems.

All averaged quantities are ``fractions.Fraction``; integer counts stay ints.

Sphere sums. If a 0/1 (or signed) cell indicator chi satisfies
``A chi = chi S`` on H^n, let W_r be the sum of chi over the sphere of radius
r around a vertex x. Summing the identity over that sphere counts each
vertex at distance r-1 once for each of its n-r+1 neighbours at distance r,
and each vertex at distance r+1 once for each of its r+1 neighbours at
distance r, so

    W_r S = (n - r + 1) W_{r-1} + (r + 1) W_{r+1},

with W_0 = chi(x) and W_1 = W_0 S. The hypercube's intersection numbers
(c_r = r, b_r = n - r) are the only graph data the recurrence needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .cells import PARTITION, CellSystem
from .codes import Code
from .errors import ExpansionError, UsageError
from .hypercube import Word, walsh_hadamard, weight_table

MAX_TRANSFORM_DIM = 20


@dataclass(frozen=True)
class WeightDistributionVec:
    center: Word
    counts: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.counts)


@dataclass
class DistanceDistribution:
    """Averaged distance counts: ``table[i][j][l]`` is the mean, over x in
    cell i, of the number of cell-j vertices at distance l from x.

    Rows of empty cells are ``None`` (undefined, not zero). ``levels`` is
    the number of distances tabulated (n + 1 for a full table).
    """

    n: int | None
    kind: str
    labels: tuple[str, ...]
    sizes: list[int]
    table: list[list[list[Fraction] | None]]

    @property
    def r(self) -> int:
        return len(self.sizes)

    @property
    def levels(self) -> int:
        for row in self.table:
            for entry in row:
                if entry is not None:
                    return len(entry)
        return 0

    def get(self, i: int, j: int, l: int) -> Fraction | None:
        row = self.table[i][j]
        return None if row is None else row[l]

    def inner(self, i: int) -> list[Fraction] | None:
        return self.table[i][i]

    def symmetry_holds(self) -> bool:
        for i in range(self.r):
            for j in range(self.r):
                a, b = self.table[i][j], self.table[j][i]
                if a is None or b is None:
                    continue
                if any(self.sizes[i] * x != self.sizes[j] * y for x, y in zip(a, b)):
                    return False
        return True

    def to_dict(self) -> dict:
        def fmt(q: Fraction) -> str:
            return f"{q.numerator}/{q.denominator}"

        return {
            "n": self.n,
            "kind": self.kind,
            "labels": list(self.labels),
            "sizes": list(self.sizes),
            "table": [[None if e is None else [fmt(q) for q in e] for e in row]
                      for row in self.table],
        }

    @classmethod
    def from_dict(cls, data: dict) -> DistanceDistribution:
        table = [[None if e is None else [Fraction(q) for q in e] for e in row]
                 for row in data["table"]]
        return cls(data["n"], data["kind"], tuple(data["labels"]), list(data["sizes"]), table)


@dataclass(frozen=True)
class SphereSumSequence:
    W: tuple[tuple[Fraction, ...], ...]

    def is_integral(self) -> bool:
        return all(q.denominator == 1 for row in self.W for q in row)

    def column(self, j: int) -> list[Fraction]:
        return [row[j] for row in self.W]


def _as_indices(cell, n: int) -> np.ndarray:
    if isinstance(cell, Code):
        if cell.n != n:
            raise UsageError(f"cell of length {cell.n} vs centre of length {n}")
        return cell.words
    arr = np.asarray(list(cell) if not isinstance(cell, np.ndarray) else cell)
    return arr.astype(np.uint64) if n <= 64 else arr.astype(object)


def weight_distribution(cell, x: Word) -> WeightDistributionVec:
    """Counts of cell members at each distance 0..n from ``x`` (direct scan)."""
    n = x.n
    words = _as_indices(cell, n)
    if n <= 64:
        d = np.bitwise_count(words ^ np.uint64(x.bits)).astype(np.int64)
    else:
        d = np.array([(int(w) ^ x.bits).bit_count() for w in words], dtype=np.int64)
    counts = np.bincount(d, minlength=n + 1)
    return WeightDistributionVec(x, tuple(int(c) for c in counts))


def pair_distance_counts(system: CellSystem) -> np.ndarray:
    """r x r x (n+1) int array: ordered pairs (x in cell i, y in cell j) at distance l.

    Uses XOR-correlation through the Walsh-Hadamard transform; exact in int64
    for n <= 20.
    """
    n = system.n
    if system.graph is not None:
        raise UsageError("full distance distributions are computed on H^n only")
    if n > MAX_TRANSFORM_DIM:
        raise UsageError(f"distance distribution supported up to n={MAX_TRANSFORM_DIM}")
    ind = system.indicator().T
    spectra = walsh_hadamard(ind)
    weights = weight_table(n)
    r = system.r
    out = np.zeros((r, r, n + 1), dtype=np.int64)
    for i in range(r):
        corr = walsh_hadamard(spectra[i][None, :] * spectra) >> n
        for j in range(r):
            out[i, j] = _bincount_int(weights, corr[j], n + 1)
    return out


def _bincount_int(keys: np.ndarray, values: np.ndarray, length: int) -> np.ndarray:
    # every partial sum is an integer below 2^(2n) <= 2^40, so float64 is exact
    return np.rint(np.bincount(keys, weights=values, minlength=length)).astype(np.int64)


def _averages(pairs: np.ndarray, sizes: Sequence[int]) -> list[list[list[Fraction] | None]]:
    r = len(sizes)
    table: list[list[list[Fraction] | None]] = []
    for i in range(r):
        if sizes[i] == 0:
            table.append([None] * r)
            continue
        table.append([[Fraction(int(c), sizes[i]) for c in pairs[i, j]] for j in range(r)])
    return table


def distance_distribution(system: CellSystem) -> DistanceDistribution:
    sizes = system.sizes()
    table = _averages(pair_distance_counts(system), sizes)
    return DistanceDistribution(system.n, system.kind, system.labels, sizes, table)


# --------------------------------------------------------------------------
# Expansion of the inner distribution of a (2^m-3, 2^(n-m-1), 4) code to the
# full table of its six-cell partition.


def c_system_sizes(n: int) -> list[int]:
    m = (n + 3).bit_length() - 1
    if (1 << m) != n + 3:
        raise UsageError(f"n={n} is not of the form 2^m - 3")
    c0 = 1 << (n - m - 1)
    c1 = c0 * (n - 1)
    c2 = (1 << (n - 1)) - c0 - c1
    return [c0, c1, c2, c0, c1, c2]


def expand_distance_distribution(a00: Iterable, n: int,
                                 sizes: Sequence[int] | None = None) -> DistanceDistribution:
    """Full 6 x 6 x (n+1) table of the C-partition from the inner distribution of C0.

    Applies, row by row: the complement identity A[i][j~]_l = A[i][j]_(n-l);
    the C1 count A[i][1]_l = (n-l+1) A[i][0~]_(l-1) + (l+1) A[i][0~]_(l+1) - A[i][0]_l;
    the C2 count A[i][2]_l = C(n,l) - A[i][0]_l - A[i][1]_l on parity-feasible l
    (zero elsewhere); and |C_i| A[i][j] = |C_j| A[j][i] to obtain column 0 of
    every row from row 0.
    """
    a00 = [Fraction(x) for x in a00]
    if len(a00) != n + 1:
        raise UsageError(f"inner distribution must have n+1={n + 1} entries")
    sizes = list(sizes) if sizes is not None else c_system_sizes(n)
    if len(sizes) != 6 or min(sizes) <= 0:
        raise UsageError("need six positive cell sizes")
    if a00[0] != 1:
        raise ExpansionError("A00_0 must be 1", "inner distribution")
    if a00[n - 1] != 1:
        raise ExpansionError(f"A00_(n-1) = {a00[n - 1]}, expected 1", "inner distribution")
    odd = [l for l in range(1, n + 1, 2) if a00[l] != 0]
    if odd:
        raise ExpansionError(f"A00_{odd[0]} = {a00[odd[0]]} at odd distance", "parity")
    if any(x < 0 for x in a00):
        raise ExpansionError("negative entry in inner distribution", "inner distribution")

    table: list[list[list[Fraction] | None]] = [[None] * 6 for _ in range(6)]

    def at(row: list[Fraction], l: int) -> Fraction:
        return row[l] if 0 <= l <= n else Fraction(0)

    def fill_row(i: int, col0: list[Fraction]) -> None:
        row = table[i]
        row[0] = col0
        row[3] = col0[::-1]
        row[1] = [(n - l + 1) * at(row[3], l - 1) + (l + 1) * at(row[3], l + 1) - col0[l]
                  for l in range(n + 1)]
        bad = [l for l, v in enumerate(row[1]) if v < 0]
        if bad:
            raise ExpansionError(f"row {i}: negative C1 count at l={bad[0]}", "C1 count")
        want = 0 if i < 3 else 1
        row[2] = [comb(n, l) - col0[l] - row[1][l] if l % 2 == want else Fraction(0)
                  for l in range(n + 1)]
        bad = [l for l, v in enumerate(row[2]) if v < 0]
        if bad:
            raise ExpansionError(f"row {i}: negative C2 count at l={bad[0]}", "C2 count")
        row[4] = row[1][::-1]
        row[5] = row[2][::-1]

    fill_row(0, a00)
    for j in range(1, 6):
        col0 = [Fraction(sizes[0], sizes[j]) * v for v in table[0][j]]
        want = 0 if j < 3 else 1
        bad = [l for l, v in enumerate(col0) if v != 0 and l % 2 != want]
        if bad:
            raise ExpansionError(f"row {j}: nonzero A[{j}][0] at l={bad[0]}", "parity")
        fill_row(j, col0)

    dd = DistanceDistribution(n, PARTITION, ("C0", "C1", "C2", "C0~", "C1~", "C2~"), sizes, table)
    if not dd.symmetry_holds():
        raise ExpansionError("expanded table violates |C_i| A[i][j] = |C_j| A[j][i]", "size symmetry")
    return dd


# --------------------------------------------------------------------------


def predict_sphere_sums(S, start: Sequence[int], n: int) -> SphereSumSequence:
    """Cell-wise sphere sums W_0..W_n around a vertex whose indicator row is ``start``."""
    rows = [list(map(int, row)) for row in getattr(S, "entries", S)]
    r = len(rows)
    if any(len(row) != r for row in rows):
        raise UsageError("quotient matrix must be square")
    if len(start) != r:
        raise UsageError(f"start row has length {len(start)}, matrix side is {r}")
    if not any(start):
        raise UsageError("start row must contain a nonzero entry")

    def times_s(w: Sequence[Fraction]) -> list[Fraction]:
        return [sum((w[i] * rows[i][j] for i in range(r)), Fraction(0)) for j in range(r)]

    W = [[Fraction(v) for v in start]]
    if n >= 1:
        W.append(times_s(W[0]))
    for radius in range(1, n):
        ws = times_s(W[radius])
        W.append([(ws[j] - (n - radius + 1) * W[radius - 1][j]) / (radius + 1) for j in range(r)])
    return SphereSumSequence(tuple(tuple(w) for w in W))
