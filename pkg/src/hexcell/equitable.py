"""Equitability checks for cell systems on H^n and on small explicit graphs.

A system with quotient matrix S is equitable when every vertex x has exactly
``sum(S[i][j] for i in cells_of(x))`` neighbours in cell j. The hypercube
sweep packs the r per-cell neighbour counts of a vertex into one uint64
(``width`` bits per cell), so each coordinate flip costs one table lookup
and one add per vertex.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Sequence

import numpy as np
from scipy import sparse

from .cells import FAMILY, FORBIDDEN_D_PATTERNS, PARTITION, CellSystem
from .errors import ConditionViolation, StructuralError, UsageError, Verdict
from .hypercube import common_neighbor_profile, neighbor_block, sweep_blocks
from .spectra import DistanceDistribution

MAX_GRAPH_ORDER = 1 << 16


@dataclass(frozen=True)
class QuotientMatrix:
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in row) for row in self.entries)
        if any(len(row) != len(rows) for row in rows):
            raise UsageError("quotient matrix must be square")
        object.__setattr__(self, "entries", rows)

    @property
    def r(self) -> int:
        return len(self.entries)

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def pattern_row(self, cells: Sequence[int]) -> tuple[int, ...]:
        """Expected neighbour counts of a vertex lying in ``cells``."""
        return tuple(sum(self.entries[i][j] for i in cells) for j in range(self.r))

    def to_dict(self) -> dict:
        return {"r": self.r, "entries": [list(row) for row in self.entries]}

    @classmethod
    def from_dict(cls, data: dict) -> QuotientMatrix:
        q = cls(tuple(tuple(row) for row in data["entries"]))
        if "r" in data and int(data["r"]) != q.r:
            raise UsageError(f"quotient file says r={data['r']} but has {q.r} rows")
        return q


# --------------------------------------------------------------------------
# Golden matrices, stored with entries affine in n.

_AFFINE = re.compile(r"^\s*(?:(-?\d+)|n\s*(?:([+-])\s*(\d+))?)\s*$")


def _eval_affine(expr: str, n: int) -> int:
    match = _AFFINE.match(str(expr))
    if not match:
        raise UsageError(f"bad matrix entry {expr!r}")
    if match.group(1) is not None:
        return int(match.group(1))
    if match.group(2) is None:
        return n
    k = int(match.group(3))
    return n + k if match.group(2) == "+" else n - k


@lru_cache(maxsize=1)
def _golden_data() -> dict:
    text = resources.files("hexcell").joinpath("data/quotients.json").read_text()
    return json.loads(text)


GOLDEN_KINDS = ("perfect", "once-shortened", "twice-shortened", "c-system", "d-family")


def golden_matrix(kind: str, n: int) -> QuotientMatrix:
    """Shipped quotient matrix ``kind`` evaluated at dimension ``n``."""
    data = _golden_data()["matrices"]
    if kind not in data:
        raise UsageError(f"unknown golden matrix {kind!r}; choose from {', '.join(GOLDEN_KINDS)}")
    return QuotientMatrix(tuple(tuple(_eval_affine(e, n) for e in row) for row in data[kind]["entries"]))


def golden_labels(kind: str) -> tuple[str, ...]:
    return tuple(_golden_data()["matrices"][kind]["labels"])


def d_family_pattern_table(n: int) -> dict[tuple[int, int], tuple[int, ...]]:
    """Neighbour counts per cell for each (i, j~) intersection of the D-family."""
    data = _golden_data()["d-family-patterns"]
    labels = data["labels"]
    table = {}
    for key, row in data["rows"].items():
        a, b = key.split("|")
        table[(labels.index(a), labels.index(b))] = tuple(_eval_affine(e, n) for e in row)
    return table


# --------------------------------------------------------------------------
# Explicit graphs


class ExplicitGraph:
    """Simple undirected graph on vertices 0..order-1."""

    def __init__(self, order: int, edges):
        if not 1 <= order <= MAX_GRAPH_ORDER:
            raise UsageError(f"explicit graphs limited to {MAX_GRAPH_ORDER} vertices")
        self.order = order
        pairs = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise UsageError(f"loop at vertex {u}")
            if not (0 <= u < order and 0 <= v < order):
                raise UsageError(f"edge ({u}, {v}) outside the vertex range")
            pairs.add((min(u, v), max(u, v)))
        self.edges = sorted(pairs)
        rows = [u for u, v in self.edges] + [v for u, v in self.edges]
        cols = [v for u, v in self.edges] + [u for u, v in self.edges]
        self.adjacency = sparse.csr_matrix(
            (np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(order, order))
        self._profile: tuple[int, int] | None = None

    def degree(self) -> np.ndarray:
        return np.asarray(self.adjacency.sum(axis=1)).ravel()

    def profile(self) -> tuple[int, int]:
        """Verified (gamma, delta): adjacent pairs share gamma neighbours,
        non-adjacent pairs share 0 or delta. delta is 0 when vacuous."""
        if self._profile is None:
            self._profile = _verify_profile(self)
        return self._profile


def _verify_profile(graph: ExplicitGraph) -> tuple[int, int]:
    adj = graph.adjacency
    common = (adj @ adj).tolil()
    gamma = None
    for u, v in graph.edges:
        c = int(common[u, v])
        if gamma is None:
            gamma = c
        elif c != gamma:
            raise ConditionViolation(
                f"adjacent pair ({u}, {v}) has {c} common neighbours, expected {gamma}", (u, v))
    delta = 0
    coo = common.tocoo()
    adj_set = set(graph.edges)
    for u, v, c in sorted(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist())):
        if u >= v or (u, v) in adj_set or c == 0:
            continue
        if delta == 0:
            delta = int(c)
        elif c != delta:
            raise ConditionViolation(
                f"non-adjacent pair ({u}, {v}) has {c} common neighbours, expected 0 or {delta}", (u, v))
    return (gamma if gamma is not None else 0), delta


def hypercube_graph(n: int) -> ExplicitGraph:
    edges = [(v, v ^ (1 << b)) for v in range(1 << n) for b in range(n) if v < v ^ (1 << b)]
    return ExplicitGraph(1 << n, edges)


def graph_profile(system: CellSystem) -> tuple[int, int]:
    if system.graph is not None:
        return system.graph.profile()
    return common_neighbor_profile(system.n)


# --------------------------------------------------------------------------
# Neighbour-count sweeps


def _field_width(n: int) -> int:
    return max(n.bit_length(), 1)


def _contribution_table(r: int, width: int) -> np.ndarray:
    lut = np.zeros(1 << r, dtype=np.uint64)
    for mask in range(1 << r):
        lut[mask] = sum(1 << (width * k) for k in range(r) if (mask >> k) & 1)
    return lut


def _pack(vec: Sequence[int], width: int) -> int:
    return sum(int(c) << (width * k) for k, c in enumerate(vec))


def _unpack(value: int, r: int, width: int) -> list[int]:
    return [(int(value) >> (width * k)) & ((1 << width) - 1) for k in range(r)]


def _packed_counts(system: CellSystem, start: int, size: int) -> np.ndarray:
    n, r = system.n, system.r
    lut = _contribution_table(r, _field_width(n))
    acc = np.zeros(size, dtype=np.uint64)
    for b in range(n):
        acc += lut[neighbor_block(system.masks, b, start, size)]
    return acc


def neighbor_counts(system: CellSystem) -> np.ndarray:
    """order x r array: neighbours of each vertex in each cell."""
    if system.graph is not None:
        return np.asarray(system.graph.adjacency @ system.indicator())
    n, r = system.n, system.r
    onehot = ((np.arange(1 << r)[:, None] >> np.arange(r)) & 1).astype(np.int16)
    counts = np.zeros((system.order, r), dtype=np.int16)
    for b in range(n):
        counts += onehot[neighbor_block(system.masks, b, 0, system.order)]
    return counts.astype(np.int64)


def _vertex_counts(system: CellSystem, v: int) -> list[int]:
    if system.graph is not None:
        nbrs = system.graph.adjacency.indices[
            system.graph.adjacency.indptr[v]:system.graph.adjacency.indptr[v + 1]]
    else:
        nbrs = [v ^ (1 << b) for b in range(system.n)]
    counts = [0] * system.r
    for u in nbrs:
        m = int(system.masks[u])
        for k in range(system.r):
            counts[k] += (m >> k) & 1
    return counts


def _first_mismatch(system: CellSystem, expected: dict[int, tuple[int, ...] | None],
                    threads: int | None) -> int | None:
    """Least vertex whose neighbour counts differ from ``expected[mask]``.

    Masks mapped to None (or absent) fail unconditionally.
    """
    r = system.r
    if system.graph is not None:
        counts = neighbor_counts(system)
        exp = np.full((1 << r, r), -1, dtype=np.int64)
        ok_mask = np.zeros(1 << r, dtype=bool)
        for mask, vec in expected.items():
            if vec is not None:
                exp[mask] = vec
                ok_mask[mask] = True
        m = system.masks.astype(np.int64)
        bad = ~ok_mask[m] | np.any(counts != exp[m], axis=1)
        hits = np.flatnonzero(bad)
        return int(hits[0]) if hits.size else None

    n = system.n
    width = _field_width(n)
    if r * width > 64:
        counts = neighbor_counts(system)
        exp = np.full((1 << r, r), -1, dtype=np.int64)
        for mask, vec in expected.items():
            if vec is not None:
                exp[mask] = vec
        hits = np.flatnonzero(np.any(counts != exp[system.masks.astype(np.int64)], axis=1))
        return int(hits[0]) if hits.size else None

    never = np.uint64(np.iinfo(np.uint64).max)
    exp_packed = np.full(1 << r, never, dtype=np.uint64)
    for mask, vec in expected.items():
        if vec is not None and all(0 <= c <= n for c in vec):
            exp_packed[mask] = _pack(vec, width)

    def block(start: int, size: int) -> int | None:
        acc = _packed_counts(system, start, size)
        bad = np.flatnonzero(acc != exp_packed[system.masks[start:start + size]])
        return start + int(bad[0]) if bad.size else None

    for hit in sweep_blocks(n, block, threads):
        if hit is not None:
            return hit
    return None


def _realized_masks(system: CellSystem) -> list[int]:
    # chunked: bincount widens its input to intp, which is 8x the mask array
    seen = np.zeros(1 << system.r, dtype=bool)
    chunk = 1 << 22
    for start in range(0, system.masks.shape[0], chunk):
        seen |= np.bincount(system.masks[start:start + chunk], minlength=1 << system.r) > 0
    return [int(m) for m in np.flatnonzero(seen)]


def _mismatch_witness(system: CellSystem, v: int, expected: tuple[int, ...] | None) -> dict:
    actual = _vertex_counts(system, v)
    cells = system.membership(v)
    if expected is None:
        j = 0
    else:
        j = next(k for k in range(system.r) if actual[k] != expected[k])
    return {
        "vertex": system.vertex_name(v),
        "cell": system.labels[j],
        "expected": None if expected is None else int(expected[j]),
        "actual": int(actual[j]),
        "member_of": [system.labels[k] for k in cells],
    }


def check_equitable(system: CellSystem, S: QuotientMatrix, threads: int | None = None) -> Verdict:
    """Exhaustive check that ``system`` is equitable with quotient matrix ``S``.

    Negative entries are allowed; only the per-vertex sums over the cells
    containing a vertex must be realisable counts.
    """
    if S.r != system.r:
        raise UsageError(f"quotient matrix has side {S.r}, system has {system.r} cells")
    expected: dict[int, tuple[int, ...] | None] = {}
    for mask in _realized_masks(system):
        cells = [k for k in range(system.r) if (mask >> k) & 1]
        vec = S.pattern_row(cells)
        expected[mask] = vec if min(vec) >= 0 else None
    v = _first_mismatch(system, expected, threads)
    if v is None:
        return Verdict(True, detail=f"equitable over {system.order} vertices")
    exp = expected.get(int(system.masks[v]))
    if exp is None:
        cells = system.membership(v)
        exp = S.pattern_row(cells)
    return Verdict(False, _mismatch_witness(system, v, exp), detail="neighbour count mismatch")


def check_pattern_table(system: CellSystem, threads: int | None = None) -> Verdict:
    """Check every vertex of a six-cell D-family against the per-pattern table."""
    if system.kind != FAMILY or system.r != 6 or system.graph is not None:
        raise UsageError("pattern table applies to six-cell families on H^n")
    table = d_family_pattern_table(system.n)
    expected: dict[int, tuple[int, ...] | None] = {}
    for mask in _realized_masks(system):
        cells = tuple(k for k in range(6) if (mask >> k) & 1)
        if cells in FORBIDDEN_D_PATTERNS:
            v = int(np.flatnonzero(system.masks == mask)[0])
            raise StructuralError(f"vertex {system.vertex_name(v)} in forbidden pattern",
                                  {"vertex": system.vertex_name(v),
                                   "cells": [system.labels[k] for k in cells]})
        expected[mask] = table.get(cells) if len(cells) == 2 else None
    v = _first_mismatch(system, expected, threads)
    if v is None:
        return Verdict(True, detail=f"all {system.order} vertices match their pattern row")
    cells = system.membership(v)
    exp = table.get(cells) if len(cells) == 2 else None
    return Verdict(False, _mismatch_witness(system, v, exp), detail="pattern row mismatch")


@dataclass
class QuotientInference:
    rows: list[list[int] | None]
    witness: dict | None = None

    @property
    def ok(self) -> bool:
        return self.witness is None

    def __bool__(self) -> bool:
        return self.ok

    @property
    def matrix(self) -> QuotientMatrix:
        if not self.ok:
            raise UsageError("partition is not equitable")
        if any(row is None for row in self.rows):
            raise UsageError("quotient rows of empty cells are undefined")
        return QuotientMatrix(tuple(tuple(row) for row in self.rows))

    def to_dict(self) -> dict:
        out: dict = {"ok": self.ok, "r": len(self.rows), "entries": self.rows}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def infer_quotient(system: CellSystem) -> QuotientInference:
    """Read the quotient matrix off a partition, or find two vertices of one
    cell with different neighbour-count vectors."""
    if system.kind != PARTITION:
        raise UsageError("quotient inference needs a partition")
    counts = neighbor_counts(system)
    labels = system.labels_array()
    rows: list[list[int] | None] = []
    for k in range(system.r):
        members = np.flatnonzero(labels == k)
        if members.size == 0:
            rows.append(None)
            continue
        ref = counts[members[0]]
        diff = np.flatnonzero(np.any(counts[members] != ref, axis=1))
        if diff.size:
            u, v = int(members[0]), int(members[diff[0]])
            witness = {"cell": system.labels[k],
                       "vertices": [system.vertex_name(u), system.vertex_name(v)],
                       "counts": [counts[u].tolist(), counts[v].tolist()]}
            return QuotientInference(rows + [None] * (system.r - len(rows)), witness)
        rows.append([int(c) for c in ref])
    return QuotientInference(rows)


# --------------------------------------------------------------------------
# Counting-triples criterion: for a partition of a graph where adjacent pairs
# share gamma neighbours and non-adjacent pairs share 0 or delta,
#     |C_i| (gamma A[i][i]_1 + delta A[i][i]_2) >= sum_j |C_j| A[j][i]_1 (A[j][i]_1 - 1)
# with equality for every i exactly when the partition is equitable.


def local_distribution(system: CellSystem, threads: int | None = None) -> DistanceDistribution:
    """Distance distribution truncated to distances 0, 1, 2, computed directly
    from neighbour and distance-2 counts (independent of the transform route)."""
    if system.kind != PARTITION:
        raise UsageError("local distribution is computed for partitions")
    r = system.r
    ind = system.indicator()
    labels = system.labels_array().astype(np.int64)
    at1 = neighbor_counts(system)
    if system.graph is not None:
        adj = system.graph.adjacency
        two = (adj @ adj).tocsr()
        two.setdiag(0)
        two.eliminate_zeros()
        two.data[:] = 1
        dist2 = two - two.multiply(adj)
        dist2.eliminate_zeros()
        at2 = np.asarray(dist2 @ ind)
    else:
        n = system.n
        onehot = ((np.arange(1 << r)[:, None] >> np.arange(r)) & 1).astype(np.int32)
        at2 = np.zeros((system.order, r), dtype=np.int32)
        for b in range(n):
            flipped = neighbor_block(system.masks, b, 0, system.order)
            for c in range(b + 1, n):
                at2 += onehot[neighbor_block(flipped, c, 0, system.order)]
    sizes = system.sizes()
    sums1 = np.zeros((r, r), dtype=np.int64)
    sums2 = np.zeros((r, r), dtype=np.int64)
    np.add.at(sums1, labels, at1)
    np.add.at(sums2, labels, at2)
    table: list[list[list[Fraction] | None]] = []
    for i in range(r):
        if sizes[i] == 0:
            table.append([None] * r)
            continue
        table.append([[Fraction(int(i == j)), Fraction(int(sums1[i, j]), sizes[i]),
                       Fraction(int(sums2[i, j]), sizes[i])] for j in range(r)])
    return DistanceDistribution(system.n, PARTITION, system.labels, sizes, table)


def triple_count_criterion(dd: DistanceDistribution, gamma: int, delta: int) -> Verdict:
    """Evaluate both sides of the counting-triples identity for every cell."""
    if dd.kind != PARTITION:
        raise UsageError("the counting criterion is established for partitions only")
    if dd.levels < 3:
        raise UsageError("need distance entries up to 2")
    sides = []
    for i in range(dd.r):
        if dd.sizes[i] == 0:
            sides.append((Fraction(0), Fraction(0)))
            continue
        lhs = dd.sizes[i] * (gamma * dd.get(i, i, 1) + delta * dd.get(i, i, 2))
        rhs = Fraction(0)
        for j in range(dd.r):
            if dd.sizes[j] == 0:
                continue
            a = dd.get(j, i, 1)
            rhs += dd.sizes[j] * a * (a - 1)
        sides.append((lhs, rhs))
    extra = {"sides": [[str(l), str(r)] for l, r in sides]}
    for i, (lhs, rhs) in enumerate(sides):
        if lhs != rhs:
            return Verdict(False, {"cell": dd.labels[i], "index": i, "lhs": str(lhs), "rhs": str(rhs)},
                           detail="criterion fails", extra=extra)
    return Verdict(True, detail="equality for every cell", extra=extra)


def check_triple_count(system: CellSystem, threads: int | None = None) -> Verdict:
    gamma, delta = graph_profile(system)
    return triple_count_criterion(local_distribution(system, threads), gamma, delta)
