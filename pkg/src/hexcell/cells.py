"""Six-cell systems generated by shortened Hamming-type codes.

A ``CellSystem`` stores one membership mask per vertex (bit k set when the
vertex lies in cell k). That is the bitmap form the sweeps in
``hexcell.equitable`` consume; sorted vertex lists are produced on demand.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .codes import Code, ParamClass, validate
from .errors import StructuralError, UsageError, ValidationError, Verdict
from .hypercube import check_cube_dim, parity_table, render

PARTITION = "partition"
FAMILY = "family"

C_LABELS = ("C0", "C1", "C2", "C0~", "C1~", "C2~")
D_LABELS = ("D0", "D1", "D2", "D0~", "D1~", "D2~")

# (cell of the even one of x0/x1, cell of the odd one) -> (i, j~) with x in D_i and D_j~
D_PATTERN_FROM_C = {
    (0, 3): (0, 3),
    (0, 4): (0, 4),
    (1, 3): (1, 3),
    (1, 4): (1, 4),
    (1, 5): (2, 4),
    (2, 4): (1, 5),
    (2, 5): (2, 5),
}
FORBIDDEN_C_PAIRS = {(0, 5), (2, 3)}
FORBIDDEN_D_PATTERNS = {(0, 5), (2, 3)}

_BLOCK_BITS = 20


def _mask_dtype(r: int):
    if r <= 8:
        return np.uint8
    if r <= 16:
        return np.uint16
    raise UsageError(f"at most 16 cells supported, got {r}")


@dataclass
class CellSystem:
    """Ordered cells over H^n (or over an explicit graph when ``graph`` is set)."""

    n: int | None
    kind: str
    labels: tuple[str, ...]
    masks: np.ndarray
    translation: int = 0
    graph: Any = None
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in (PARTITION, FAMILY):
            raise UsageError(f"unknown cell-system kind {self.kind!r}")
        self.labels = tuple(self.labels)
        if self.graph is None:
            check_cube_dim(self.n)
        if self.masks.shape != (self.order,):
            raise UsageError(f"membership array has shape {self.masks.shape}, expected ({self.order},)")
        if self.kind == PARTITION:
            counts = np.bitwise_count(self.masks)
            bad = np.flatnonzero(counts != 1)
            if bad.size:
                raise ValidationError(f"vertex {self.vertex_name(int(bad[0]))} lies in "
                                      f"{int(counts[bad[0]])} cells of a partition")

    @property
    def r(self) -> int:
        return len(self.labels)

    @property
    def order(self) -> int:
        return self.graph.order if self.graph is not None else 1 << self.n

    def vertex_name(self, v: int) -> str | int:
        return v if self.graph is not None else render(v, self.n)

    def cell(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.masks & (1 << k))

    def cells(self) -> list[np.ndarray]:
        return [self.cell(k) for k in range(self.r)]

    def sizes(self) -> list[int]:
        return [int(np.count_nonzero(self.masks & (1 << k))) for k in range(self.r)]

    def membership(self, v: int) -> tuple[int, ...]:
        m = int(self.masks[v])
        return tuple(k for k in range(self.r) if (m >> k) & 1)

    def indicator(self) -> np.ndarray:
        """order x r 0/1 matrix."""
        bits = (self.masks[:, None] >> np.arange(self.r, dtype=self.masks.dtype)) & 1
        return bits.astype(np.int64)

    def labels_array(self) -> np.ndarray:
        """Cell index per vertex (partitions only)."""
        if self.kind != PARTITION:
            raise UsageError("cell index per vertex is only defined for partitions")
        return (np.bitwise_count(self.masks - 1)).astype(np.uint8)

    @classmethod
    def from_cells(cls, n: int, cells: Sequence, kind: str = PARTITION,
                   labels: Sequence[str] | None = None, graph=None) -> CellSystem:
        r = len(cells)
        order = graph.order if graph is not None else 1 << n
        masks = np.zeros(order, dtype=_mask_dtype(r))
        for k, members in enumerate(cells):
            idx = np.asarray([_vertex_index(v, n) for v in members], dtype=np.int64)
            if idx.size and (idx.min() < 0 or idx.max() >= order):
                raise UsageError(f"cell {k} has a vertex outside the graph")
            masks[idx] |= 1 << k
        labels = tuple(labels) if labels is not None else tuple(f"P{k}" for k in range(r))
        return cls(n, kind, labels, masks, graph=graph)

    @classmethod
    def from_labels(cls, n: int | None, labels_array: np.ndarray,
                    labels: Sequence[str] | None = None, graph=None) -> CellSystem:
        lab = np.asarray(labels_array, dtype=np.int64)
        r = int(lab.max()) + 1 if labels is None else len(labels)
        masks = (np.ones(1, dtype=np.int64) << lab).astype(_mask_dtype(r))
        labels = tuple(labels) if labels is not None else tuple(f"P{k}" for k in range(r))
        return cls(n, PARTITION, labels, masks, graph=graph)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"n": self.n, "kind": self.kind, "labels": list(self.labels)}
        if self.translation:
            out["translation"] = render(self.translation, self.n)
        if self.notes:
            out["notes"] = list(self.notes)
        out["cells"] = [[render(int(v), self.n) for v in self.cell(k)] for k in range(self.r)]
        return out

    @classmethod
    def from_dict(cls, data: dict, base_dir: str | os.PathLike | None = None) -> CellSystem:
        n = int(data["n"])
        labels = tuple(data["labels"])
        if "bitmap" in data:
            spec = data["bitmap"]
            path = Path(spec["file"])
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            masks = read_bitmap(path, n, len(labels))
        else:
            r = len(labels)
            masks = np.zeros(1 << n, dtype=_mask_dtype(r))
            for k, words in enumerate(data["cells"]):
                idx = np.array([_vertex_index(w, n) for w in words], dtype=np.int64)
                masks[idx] |= 1 << k
        translation = int(data["translation"], 2) if "translation" in data else 0
        return cls(n, data["kind"], labels, masks, translation, notes=list(data.get("notes", [])))


def _vertex_index(v, n) -> int:
    if isinstance(v, str):
        if n is not None and len(v) != n:
            raise UsageError(f"word {v!r} has length {len(v)}, expected {n}")
        return int(v, 2)
    return int(v)


# --------------------------------------------------------------------------
# Builders


def _scatter_neighbors(target: np.ndarray, idx: np.ndarray, n: int, value) -> None:
    for b in range(n):
        target[idx ^ (1 << b)] = value


def _complement_pair_masks(lo: np.ndarray, n: int, partition: bool) -> np.ndarray:
    """Combine cell index ``lo`` (0..2) with its complement image into masks.

    For a partition (n odd) even vertices keep ``lo`` and odd vertices take
    3 + lo(complement). For a family every vertex gets both bits.
    """
    size = 1 << n
    out = np.empty(size, dtype=np.uint8)
    block = 1 << min(n, _BLOCK_BITS)
    block_par = parity_table(min(n, _BLOCK_BITS))
    one = np.uint8(1)
    for start in range(0, size, block):
        here = lo[start:start + block]
        end = size - start
        mirrored = lo[end - block:end][::-1]
        if partition:
            par = block_par ^ np.uint8(bin(start).count("1") & 1)
            out[start:start + block] = np.where(par == 0, one << here, one << (mirrored + 3))
        else:
            out[start:start + block] = (one << here) | (one << (mirrored + 3))
    return out


def _translate_masks(masks: np.ndarray, vector: int) -> np.ndarray:
    idx = np.arange(masks.shape[0], dtype=np.int64) ^ vector
    return masks[idx]


def build_c_system(c0: Code, check_params: bool = True) -> CellSystem:
    """Six-cell partition (C0, C1, C2, C0~, C1~, C2~) from a (2^m-3, 2^(n-m-1), 4) code.

    C0~ = C0 + 1; C1 = words at distance 1 from C0~ outside C0; C2 = rest of
    the even half. A code inside the odd half is first translated by the
    unit vector on coordinate 1, and the cells translated back.
    """
    n = c0.n
    check_cube_dim(n)
    if check_params:
        p = ParamClass.for_length("4'''", n)
        verdict = validate(c0, p)
        if not verdict:
            raise ValidationError(f"not a {p} code: {verdict.detail}")
    if n % 2 == 0:
        raise ValidationError("the six-cell partition needs odd length")
    par = c0.weights() & 1
    if par.size and par.min() != par.max():
        raise ValidationError("codewords of both parities: mutual distances are not all even")
    shift = (1 << (n - 1)) if par.size and par[0] == 1 else 0
    idx = c0.indices() ^ shift
    full = (1 << n) - 1
    lo = np.full(1 << n, 2, dtype=np.uint8)
    _scatter_neighbors(lo, idx ^ full, n, 1)
    lo[idx] = 0
    masks = _complement_pair_masks(lo, n, partition=True)
    del lo
    if shift:
        masks = _translate_masks(masks, shift)
    system = CellSystem(n, PARTITION, C_LABELS, masks, translation=shift)
    if shift:
        system.notes.append(f"code lies in the odd half; built after translation by {render(shift, n)}")
    return system


def build_d_family(d0: Code, check_params: bool = True) -> CellSystem:
    """Six-cell family (D0, D1, D2, D0~, D1~, D2~) from a (2^m-4, 2^(n-m), 3) code.

    D1 = words at distance exactly 1 from D0, D2 = words at distance > 1
    from D0, and Dk~ = Dk + 1. Every vertex lies in one untilded and one
    tilded cell.
    """
    n = d0.n
    check_cube_dim(n)
    if check_params:
        p = ParamClass.for_length("3'''", n)
        verdict = validate(d0, p)
        if not verdict:
            raise ValidationError(f"not a {p} code: {verdict.detail}")
    idx = d0.indices()
    lo = np.full(1 << n, 2, dtype=np.uint8)
    _scatter_neighbors(lo, idx, n, 1)
    lo[idx] = 0
    masks = _complement_pair_masks(lo, n, partition=False)
    system = CellSystem(n, FAMILY, D_LABELS, masks)
    system.notes.append("D1 = distance exactly 1 from D0; D2 = distance > 1 from D0")
    bad = np.flatnonzero((masks == 0b100001) | (masks == 0b001100))
    if bad.size:
        v = int(bad[0])
        raise StructuralError(f"vertex {render(v, n)} lies in {system.membership(v)}",
                              {"vertex": render(v, n), "cells": [D_LABELS[k] for k in system.membership(v)]})
    return system


def d_patterns(system: CellSystem) -> np.ndarray:
    """(i, j~) per vertex of a six-cell family, as an order x 2 int array."""
    lo = np.bitwise_count((system.masks & 0b111) - 1)
    hi = np.bitwise_count((system.masks >> 3) - 1) + 3
    return np.stack((lo, hi), axis=1).astype(np.int64)


def correspondence_check(d0: Code, c_system: CellSystem,
                         d_family: CellSystem | None = None) -> Verdict:
    """Every x of H^n: the C-cells of x0 and x1 determine x's D-pattern.

    ``c_system`` must be the partition generated by the parity extension of
    ``d0``. Forbidden pairs (C0 with C2~, C2 with C0~) must never occur.
    """
    n = d0.n
    if c_system.n != n + 1 or c_system.kind != PARTITION:
        raise UsageError("C-system must be a partition of H^(n+1)")
    if d_family is None:
        d_family = build_d_family(d0, check_params=False)
    clab = c_system.labels_array().astype(np.int64)
    x0 = clab[0::2]
    x1 = clab[1::2]
    even = np.where(x0 < 3, x0, x1)
    odd = np.where(x0 < 3, x1, x0)
    if np.any((even >= 3) | (odd < 3)):
        v = int(np.flatnonzero((even >= 3) | (odd < 3))[0])
        return Verdict(False, {"vertex": render(v, n)}, detail="x0 and x1 not in opposite halves")
    pat = d_patterns(d_family)
    key = even * 6 + odd
    forbidden = np.isin(key, [a * 6 + b for a, b in FORBIDDEN_C_PAIRS])
    lut = np.full(36, -1, dtype=np.int64)
    for (a, b), (i, j) in D_PATTERN_FROM_C.items():
        lut[a * 6 + b] = i * 6 + j
    expected = lut[key]
    actual = pat[:, 0] * 6 + pat[:, 1]
    bad = np.flatnonzero(forbidden | (expected != actual))
    if bad.size:
        v = int(bad[0])
        witness = {
            "vertex": render(v, n),
            "cells_of_extensions": [C_LABELS[int(even[v])], C_LABELS[int(odd[v])]],
            "expected": None if expected[v] < 0 else [D_LABELS[int(expected[v]) // 6], D_LABELS[int(expected[v]) % 6]],
            "actual": [D_LABELS[int(pat[v, 0])], D_LABELS[int(pat[v, 1])]],
        }
        return Verdict(False, witness, detail="forbidden pair" if forbidden[v] else "pattern mismatch")
    counts = {f"{C_LABELS[a]}|{C_LABELS[b]}": int(np.count_nonzero(key == a * 6 + b))
              for (a, b) in D_PATTERN_FROM_C}
    return Verdict(True, detail=f"all {1 << n} vertices match", extra={"pair_counts": counts})


def build_shortened_partition(perfect: Code, times: int) -> CellSystem:
    """Partition of H^(n-times) induced by a 1-perfect code of length n.

    times=1: (x0 in C, neither, x1 in C).
    times=2: (x00 in C, x11 in C, none of x00/x01/x10/x11, x01 or x10 in C).
    """
    if times not in (1, 2):
        raise UsageError("only one or two shortenings are supported")
    n = perfect.n - times
    check_cube_dim(n)
    words = perfect.indices()
    head = words >> times
    suffix = words & ((1 << times) - 1)
    if times == 1:
        lab = np.ones(1 << n, dtype=np.uint8)
        lab[head[suffix == 0]] = 0
        lab[head[suffix == 1]] = 2
        names = ("S0", "S1", "S2")
    else:
        lab = np.full(1 << n, 2, dtype=np.uint8)
        lab[head[suffix == 0]] = 0
        lab[head[suffix == 3]] = 1
        lab[head[(suffix == 1) | (suffix == 2)]] = 3
        names = ("S0", "S1", "S2", "S3")
    return CellSystem.from_labels(n, lab, names)


def code_partition(code: Code) -> CellSystem:
    """Two-cell partition (code, complement of code) of H^n."""
    lab = np.ones(1 << code.n, dtype=np.uint8)
    lab[code.indices()] = 0
    return CellSystem.from_labels(code.n, lab, ("C", "V-C"))


# --------------------------------------------------------------------------
# Files: JSON {n, kind, labels, cells} with an optional packed-bitmap sidecar.
# Sidecar layout: cells in label order, each 2^n bits packed little-endian
# (vertex v is bit v % 8 of byte v // 8), each cell padded to whole bytes.


def write_bitmap(system: CellSystem, path: str | os.PathLike) -> None:
    with open(path, "wb") as fh:
        for k in range(system.r):
            bits = ((system.masks >> k) & 1).astype(bool)
            fh.write(np.packbits(bits, bitorder="little").tobytes())


def read_bitmap(path: str | os.PathLike, n: int, r: int) -> np.ndarray:
    size = 1 << n
    per_cell = (size + 7) // 8
    raw = np.fromfile(path, dtype=np.uint8)
    if raw.size != per_cell * r:
        raise UsageError(f"bitmap {path} has {raw.size} bytes, expected {per_cell * r}")
    masks = np.zeros(size, dtype=_mask_dtype(r))
    for k in range(r):
        bits = np.unpackbits(raw[k * per_cell:(k + 1) * per_cell], bitorder="little")[:size]
        masks |= bits.astype(masks.dtype) << k
    return masks


def write_cells(system: CellSystem, path: str | os.PathLike,
                bitmap: str | os.PathLike | None = None) -> None:
    data = system.to_dict()
    if bitmap is not None:
        write_bitmap(system, bitmap)
        del data["cells"]
        data["bitmap"] = {"file": os.path.basename(bitmap), "bit_order": "little",
                          "bytes_per_cell": ((1 << system.n) + 7) // 8}
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_cells(path: str | os.PathLike) -> CellSystem:
    with open(path) as fh:
        data = json.load(fh)
    return CellSystem.from_dict(data, base_dir=Path(path).parent)
