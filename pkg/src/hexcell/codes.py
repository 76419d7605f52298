"""Binary codes: Hamming, extended Hamming, Vasil'ev, shortening, parameter checks.

Codewords are kept as a sorted numpy array: ``uint64`` when n <= 64 and an
object array of Python ints above that. Sorted numeric order equals
lexicographic order of the text forms.
"""

from __future__ import annotations

import io
import os
import re
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping

import numpy as np

from .errors import UsageError, ValidationError, Verdict
from .hypercube import MAX_WORD_BITS, Word, render

FAST_BITS = 64
PAIRWISE_LIMIT = 1 << 16


def _to_int(value, n: int) -> int:
    if isinstance(value, Word):
        if value.n != n:
            raise UsageError(f"word of length {value.n} in a length-{n} code")
        return value.bits
    if isinstance(value, str):
        w = Word.parse(value)
        if w.n != n:
            raise UsageError(f"word {value!r} has length {w.n}, expected {n}")
        return w.bits
    v = int(value)
    if not 0 <= v < (1 << n):
        raise UsageError(f"value {v} does not fit in {n} bits")
    return v


def _word_array(values, n: int) -> np.ndarray:
    if isinstance(values, np.ndarray) and values.dtype != object:
        arr = np.asarray(values, dtype=np.uint64)
        if n < 64 and arr.size and int(arr.max()) >> n:
            raise UsageError(f"values do not fit in {n} bits")
    else:
        ints = [_to_int(v, n) for v in values]
        if n <= FAST_BITS:
            arr = np.array(ints, dtype=np.uint64)
        else:
            arr = np.empty(len(ints), dtype=object)
            arr[:] = ints
    if n > FAST_BITS and arr.dtype != object:
        arr = arr.astype(object)
    arr = np.sort(arr, kind="stable")
    if arr.size > 1 and np.any(arr[1:] == arr[:-1]):
        raise UsageError("duplicate codewords")
    return arr


@dataclass(frozen=True)
class ParamClass:
    """Parameter class of a shortened (extended) 1-perfect code.

    ``distance`` 3 gives (2^m-1-t, 2^(n-m), 3); ``distance`` 4 gives
    (2^m-t, 2^(n-m-1), 4); ``t`` is the number of shortenings (primes).
    """

    distance: int
    t: int
    m: int

    def __post_init__(self):
        if self.distance not in (3, 4) or not 0 <= self.t <= 3:
            raise UsageError(f"no parameter class d={self.distance}, t={self.t}")
        if self.m < 2 or self.n < 1:
            raise UsageError(f"m={self.m} too small for class {self.tag}")

    @classmethod
    def parse(cls, tag: str, m: int) -> ParamClass:
        match = re.fullmatch(r"P?([34])('{0,3})", tag.strip())
        if not match:
            raise UsageError(f"unknown parameter class {tag!r}")
        return cls(int(match.group(1)), len(match.group(2)), m)

    @classmethod
    def for_length(cls, tag: str, n: int) -> ParamClass:
        """The class with the given tag whose length is ``n``."""
        probe = cls.parse(tag, 3)
        base = n + 1 + probe.t if probe.distance == 3 else n + probe.t
        m = base.bit_length() - 1
        if base != 1 << m:
            raise UsageError(f"no class {tag} has length {n}")
        return cls(probe.distance, probe.t, m)

    @property
    def tag(self) -> str:
        return f"{self.distance}" + "'" * self.t

    @property
    def n(self) -> int:
        if self.distance == 3:
            return (1 << self.m) - 1 - self.t
        return (1 << self.m) - self.t

    @property
    def size(self) -> int:
        if self.distance == 3:
            return 1 << (self.n - self.m)
        return 1 << (self.n - self.m - 1)

    @property
    def oa_strength(self) -> int:
        """Orthogonal-array strength every code of this class attains."""
        return (self.n - self.distance + 2 - self.t) // 2

    def __str__(self) -> str:
        return f"({self.n},{self.distance}){self.tag[1:]} [m={self.m}]"


class Code:
    """A set of distinct binary words of common length ``n``."""

    def __init__(self, n: int, words: Iterable = (), claimed: ParamClass | None = None,
                 meta: Mapping[str, str] | None = None):
        if not 1 <= n <= MAX_WORD_BITS:
            raise UsageError(f"code length {n} outside 1..{MAX_WORD_BITS}")
        self.n = n
        self._words = _word_array(words, n)
        self.claimed = claimed
        self.meta = dict(meta or {})

    @property
    def words(self) -> np.ndarray:
        return self._words

    @property
    def fast(self) -> bool:
        return self.n <= FAST_BITS

    def ints(self) -> list[int]:
        return [int(w) for w in self._words]

    def indices(self) -> np.ndarray:
        """Codewords as int64 vertex indices (requires n < 63)."""
        if self.n >= 63:
            raise UsageError("vertex indices need n < 63")
        return self._words.astype(np.int64)

    def __len__(self) -> int:
        return int(self._words.shape[0])

    def __iter__(self) -> Iterator[Word]:
        for w in self._words:
            yield Word(int(w), self.n)

    def __contains__(self, item) -> bool:
        v = _to_int(item, self.n)
        key = np.uint64(v) if self.fast else v
        i = np.searchsorted(self._words, key)
        return bool(i < len(self) and self._words[i] == key)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Code):
            return NotImplemented
        return self.n == other.n and np.array_equal(self._words, other._words)

    def __hash__(self):
        return hash((self.n, tuple(self.ints())))

    def __repr__(self) -> str:
        return f"Code(n={self.n}, size={len(self)})"

    def complement(self) -> Code:
        ones = (1 << self.n) - 1
        if self.fast:
            return Code(self.n, self._words ^ np.uint64(ones))
        return Code(self.n, [int(w) ^ ones for w in self._words])

    def translate(self, vector: int) -> Code:
        if self.fast:
            return Code(self.n, self._words ^ np.uint64(vector), self.claimed)
        return Code(self.n, [int(w) ^ vector for w in self._words], self.claimed)

    def is_self_complementary(self) -> bool:
        return self == self.complement()

    def weights(self) -> np.ndarray:
        if self.fast:
            return np.bitwise_count(self._words).astype(np.int64)
        return np.array([int(w).bit_count() for w in self._words], dtype=np.int64)

    def bit_matrix(self) -> np.ndarray:
        """|C| x n uint8 matrix; column j-1 holds coordinate j."""
        shifts = np.arange(self.n - 1, -1, -1)
        if self.fast:
            return ((self._words[:, None] >> shifts.astype(np.uint64)) & np.uint64(1)).astype(np.uint8)
        return np.array([[(int(w) >> int(s)) & 1 for s in shifts] for w in self._words],
                        dtype=np.uint8).reshape(len(self), self.n)


# --------------------------------------------------------------------------
# Constructions


def _span(basis: list[int], n: int) -> np.ndarray | list[int]:
    if n <= FAST_BITS:
        words = np.zeros(1, dtype=np.uint64)
        for g in basis:
            words = np.concatenate((words, words ^ np.uint64(g)))
        return words
    words_py = [0]
    for g in basis:
        words_py += [w ^ g for w in words_py]
    return words_py


def hamming(m: int) -> Code:
    """Linear Hamming code of length 2^m - 1.

    Kernel of the check matrix whose column i is the binary expansion of i,
    least significant bit in row 1. Positions 2^k carry the check bits.
    """
    if m < 2:
        raise UsageError("Hamming codes need m >= 2")
    n = (1 << m) - 1
    basis = []
    for j in range(1, n + 1):
        if j & (j - 1) == 0:
            continue
        g = 1 << (n - j)
        for k in range(m):
            if (j >> k) & 1:
                g |= 1 << (n - (1 << k))
        basis.append(g)
    return Code(n, _span(basis, n), claimed=ParamClass(3, 0, m))


def extended_hamming(m: int) -> Code:
    code = extend_parity(hamming(m))
    code.claimed = ParamClass(4, 0, m)
    return code


def extend_parity(c: Code) -> Code:
    """Append an overall parity bit so that every word has even weight."""
    n = c.n + 1
    if n > MAX_WORD_BITS:
        raise UsageError("extended length exceeds supported word size")
    if n <= FAST_BITS:
        w = c.words
        words = (w << np.uint64(1)) | (np.bitwise_count(w).astype(np.uint64) & np.uint64(1))
    else:
        words = [(int(w) << 1) | (int(w).bit_count() & 1) for w in c.words]
    claimed = None
    if c.claimed is not None and c.claimed.distance == 3:
        claimed = ParamClass(4, c.claimed.t, c.claimed.m)
    return Code(n, words, claimed, c.meta)


def shorten(c: Code, coord: int | None = None, value: int = 0) -> Code:
    """Keep codewords with ``value`` at 1-based ``coord`` and delete that coordinate.

    ``coord`` defaults to the last coordinate.
    """
    if coord is None:
        coord = c.n
    if not 1 <= coord <= c.n:
        raise UsageError(f"coordinate {coord} outside 1..{c.n}")
    if value not in (0, 1):
        raise UsageError(f"shortening value must be 0 or 1, got {value}")
    if c.n == 1:
        raise UsageError("cannot shorten a length-1 code")
    pos = c.n - coord
    low_mask = (1 << pos) - 1
    if c.fast:
        w = c.words
        keep = w[((w >> np.uint64(pos)) & np.uint64(1)) == np.uint64(value)]
        words = ((keep >> np.uint64(pos + 1)) << np.uint64(pos)) | (keep & np.uint64(low_mask))
    else:
        words = [((int(w) >> (pos + 1)) << pos) | (int(w) & low_mask)
                 for w in c.words if (int(w) >> pos) & 1 == value]
    if len(words) == 0:
        warnings.warn(f"shortening at coordinate {coord} with value {value} leaves no codewords")
    claimed = None
    if c.claimed is not None and c.claimed.t < 3:
        claimed = ParamClass(c.claimed.distance, c.claimed.t + 1, c.claimed.m)
    return Code(c.n - 1, words, claimed, c.meta)


def random_lambda(base: Code, seed: int) -> dict[int, int]:
    """Seeded pseudo-random {codeword: bit} table for the Vasil'ev construction."""
    bits = np.random.default_rng(seed).integers(0, 2, size=len(base))
    return {w: int(b) for w, b in zip(base.ints(), bits)}


def vasilev(base: Code, lam: Mapping[int, int] | Callable[[Word], int],
            check: bool = True) -> Code:
    """Vasil'ev code {(u, u+v, |u| mod 2 + lam(v)) : u in F^n, v in base}.

    The result has length 2n+1 and is 1-perfect whenever ``base`` is.
    """
    if check and not is_perfect(base):
        raise ValidationError("Vasil'ev construction needs a 1-perfect base code")
    n = base.n
    length = 2 * n + 1
    if callable(lam):
        table = {v: int(lam(Word(v, n))) & 1 for v in base.ints()}
    else:
        table = {v: int(lam[v]) & 1 for v in base.ints()}
    if length <= FAST_BITS:
        u = np.arange(1 << n, dtype=np.uint64)
        pu = np.bitwise_count(u).astype(np.uint64) & np.uint64(1)
        head = u << np.uint64(n + 1)
        blocks = []
        for v, bit in table.items():
            tail = ((u ^ np.uint64(v)) << np.uint64(1)) | (pu ^ np.uint64(bit))
            blocks.append(head | tail)
        words = np.concatenate(blocks) if blocks else np.zeros(0, dtype=np.uint64)
    else:
        words = [(u << (n + 1)) | ((u ^ v) << 1) | ((u.bit_count() & 1) ^ bit)
                 for v, bit in table.items() for u in range(1 << n)]
    m = (length + 1).bit_length() - 1
    claimed = ParamClass(3, 0, m) if check or base.claimed is not None else None
    return Code(length, words, claimed)


# --------------------------------------------------------------------------
# Parameters


def _pair_scan(c: Code, stop_below: int | None = None) -> tuple[int, int, int]:
    """(i, j, d) for the least pair attaining the minimum distance.

    With ``stop_below`` set, returns the first pair (lexicographic in i, j)
    with distance below it, if any.
    """
    w = c.words
    best = (-1, -1, c.n + 1)
    for i in range(len(c) - 1):
        if c.fast:
            d = np.bitwise_count(w[i + 1:] ^ w[i])
        else:
            wi = int(w[i])
            d = np.array([(wi ^ int(x)).bit_count() for x in w[i + 1:]])
        if stop_below is not None:
            bad = np.flatnonzero(d < stop_below)
            if bad.size:
                j = i + 1 + int(bad[0])
                return i, j, int(d[bad[0]])
        k = int(np.argmin(d))
        if int(d[k]) < best[2]:
            best = (i, i + 1 + k, int(d[k]))
    return best


def gf2_rank(c: Code) -> int:
    rows = c.words.copy()
    rank = 0
    for bit in range(c.n - 1, -1, -1):
        if c.fast:
            mask = np.uint64(1 << bit)
            hit = np.flatnonzero(rows & mask)
            if hit.size == 0:
                continue
            pivot = rows[hit[0]]
            rows[hit] ^= pivot
        else:
            hit = [k for k, r in enumerate(rows) if (int(r) >> bit) & 1]
            if not hit:
                continue
            pivot = int(rows[hit[0]])
            for k in hit:
                rows[k] = int(rows[k]) ^ pivot
        rank += 1
    return rank


def is_linear(c: Code) -> bool:
    if len(c) == 0 or 0 not in c:
        return False
    return (1 << gf2_rank(c)) == len(c)


def min_distance(c: Code) -> int:
    """Exact minimum pairwise distance.

    Codes above 2^16 words are only accepted when linear (min nonzero weight).
    """
    if len(c) < 2:
        raise UsageError("minimum distance undefined for fewer than two codewords")
    if len(c) > PAIRWISE_LIMIT:
        if not is_linear(c):
            raise UsageError("pairwise scan limited to 2^16 codewords for nonlinear codes")
        wt = c.weights()
        return int(wt[wt > 0].min())
    return _pair_scan(c)[2]


def is_perfect(c: Code) -> bool:
    """1-perfect: radius-1 balls are disjoint (d >= 3) and cover H^n by count."""
    if len(c) * (c.n + 1) != 1 << c.n:
        return False
    return len(c) == 1 or min_distance(c) >= 3


def validate(c: Code, p: ParamClass) -> Verdict:
    """Check length, cardinality and exact minimum distance against ``p``."""
    if c.n != p.n:
        return Verdict(False, detail=f"length {c.n} != {p.n}")
    if len(c) != p.size:
        return Verdict(False, detail=f"size {len(c)} != {p.size}")
    if len(c) < 2:
        return Verdict(True, detail=f"{p}: single codeword")
    if len(c) > PAIRWISE_LIMIT:
        d = min_distance(c)
        if d != p.distance:
            return Verdict(False, detail=f"d={d} != {p.distance}")
        return Verdict(True, detail=str(p))
    i, j, d = _pair_scan(c, stop_below=p.distance)
    if d < p.distance:
        pair = [render(int(c.words[i]), c.n), render(int(c.words[j]), c.n)]
        return Verdict(False, {"pair": pair, "distance": d},
                       detail=f"d={d} != {p.distance}")
    i, j, d = _pair_scan(c)
    if d != p.distance:
        pair = [render(int(c.words[i]), c.n), render(int(c.words[j]), c.n)]
        return Verdict(False, {"pair": pair, "distance": d},
                       detail=f"d={d} != {p.distance}")
    return Verdict(True, detail=str(p))


# --------------------------------------------------------------------------
# Code file format: '#' comments, then "n=<int>", then one word per line.


def dumps_code(c: Code, comments: Iterable[str] = ()) -> str:
    out = io.StringIO()
    for line in comments:
        out.write(f"# {line}\n")
    for key in sorted(c.meta):
        out.write(f"# {key}={c.meta[key]}\n")
    out.write(f"n={c.n}\n")
    for w in c.words:
        out.write(render(int(w), c.n) + "\n")
    return out.getvalue()


def loads_code(text: str) -> Code:
    n = None
    words: list[str] = []
    meta: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body and " " not in body.split("=", 1)[0]:
                key, val = body.split("=", 1)
                meta[key] = val
            continue
        if n is None:
            if not line.startswith("n="):
                raise UsageError(f"line {lineno}: expected 'n=<int>' header")
            n = int(line[2:])
            continue
        if len(line) != n:
            raise UsageError(f"line {lineno}: word length {len(line)} != {n}")
        words.append(line)
    if n is None:
        raise UsageError("code file has no 'n=' header")
    return Code(n, words, meta=meta)


def read_code(path: str | os.PathLike) -> Code:
    with open(path) as fh:
        return loads_code(fh.read())


def write_code(c: Code, path: str | os.PathLike, comments: Iterable[str] = ()) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_code(c, comments))
