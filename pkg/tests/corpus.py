"""Codes used across the test suite, plus brute-force oracles.

Every oracle here works from first principles (pairwise loops over Python
ints) and shares no code with the library routines it is compared against.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np

from hexcell.codes import (Code, extend_parity, extended_hamming, hamming, random_lambda, shorten,
                           vasilev)

# Seeds for the nonlinear 1-perfect codes; recorded so every failure reproduces.
VASILEV_SEEDS = (1, 2)


def shorten_many(code: Code, coords, values=None) -> Code:
    """Shorten at each 1-based coordinate of ``coords`` in turn (indices refer
    to the current, already shortened code)."""
    values = values or [0] * len(coords)
    for coord, value in zip(coords, values):
        code = shorten(code, coord, value)
    return code


@lru_cache(maxsize=None)
def vasilev15(seed: int) -> Code:
    base = hamming(3)
    return vasilev(base, random_lambda(base, seed))


@lru_cache(maxsize=None)
def distance4_codes(n: int) -> dict[str, Code]:
    """(n, 2^(n-m-1), 4) codes obtained by shortening three times."""
    if n == 5:
        eh = extended_hamming(3)
        return {
            "pair-11110": Code(5, ["00000", "11110"]),
            "pair-01111": Code(5, ["00000", "01111"]),
            "ext-hamming3-last": shorten_many(eh, [8, 7, 6]),
        }
    if n == 13:
        eh = extended_hamming(4)
        out = {
            "ext-hamming4-last": shorten_many(eh, [16, 15, 14]),
            "ext-hamming4-first": shorten_many(eh, [1, 1, 1]),
            "ext-hamming4-spread": shorten_many(eh, [16, 8, 4]),
            # fixing ones leaves a code of odd-weight words
            "ext-hamming4-ones": shorten_many(eh, [16, 15, 14], [1, 0, 0]),
        }
        for seed in VASILEV_SEEDS:
            out[f"vasilev-{seed}-last"] = extend_parity(shorten_many(vasilev15(seed), [15, 14, 13]))
            out[f"vasilev-{seed}-first"] = extend_parity(shorten_many(vasilev15(seed), [1, 1, 1]))
        return out
    raise KeyError(n)


@lru_cache(maxsize=None)
def distance3_codes(n: int) -> dict[str, Code]:
    """(n, 2^(n-m), 3) codes obtained by shortening three times."""
    if n == 4:
        return {
            "pair-1110": Code(4, ["0000", "1110"]),
            "hamming3-last": shorten_many(hamming(3), [7, 6, 5]),
        }
    if n == 12:
        out = {
            "hamming4-last": shorten_many(hamming(4), [15, 14, 13]),
            "hamming4-spread": shorten_many(hamming(4), [1, 5, 9]),
        }
        for seed in VASILEV_SEEDS:
            out[f"vasilev-{seed}-last"] = shorten_many(vasilev15(seed), [15, 14, 13])
            out[f"vasilev-{seed}-first"] = shorten_many(vasilev15(seed), [1, 1, 1])
        return out
    raise KeyError(n)


def twice_shortened_codes() -> dict[str, Code]:
    return {
        "(13,3)''": shorten_many(hamming(4), [15, 14]),
        "(14,4)''": shorten_many(extended_hamming(4), [16, 15]),
        "(13,3)'' vasilev": shorten_many(vasilev15(1), [1, 1]),
    }


# --------------------------------------------------------------------------
# Oracles


def brute_min_distance(words: list[int]) -> int:
    return min((a ^ b).bit_count() for i, a in enumerate(words) for b in words[i + 1:])


def brute_is_perfect(words: list[int], n: int) -> bool:
    """Every vertex lies in exactly one radius-1 ball around a codeword."""
    hits = [0] * (1 << n)
    for w in words:
        hits[w] += 1
        for b in range(n):
            hits[w ^ (1 << b)] += 1
    return all(h == 1 for h in hits)


def brute_cells(masks: np.ndarray, r: int) -> list[list[int]]:
    return [[v for v in range(len(masks)) if (int(masks[v]) >> k) & 1] for k in range(r)]


def brute_distance_table(n: int, cells: list[list[int]]) -> list[list[list[Fraction] | None]]:
    """Mean number of cell-j vertices at distance l from a vertex of cell i."""
    table = []
    for ci in cells:
        if not ci:
            table.append([None] * len(cells))
            continue
        row = []
        for cj in cells:
            counts = [0] * (n + 1)
            for x in ci:
                for y in cj:
                    counts[(x ^ y).bit_count()] += 1
            row.append([Fraction(c, len(ci)) for c in counts])
        table.append(row)
    return table


def pairwise_distance_counts(n: int, labels: np.ndarray, r: int) -> np.ndarray:
    """r x r x (n+1) counts of ordered pairs by direct XOR of every vertex pair
    (vectorized in row chunks; partitions only)."""
    order = 1 << n
    everyone = np.arange(order, dtype=np.uint32)
    lab = labels.astype(np.int64)
    out = np.zeros(r * r * (n + 1), dtype=np.int64)
    for lo in range(0, order, 256):
        rows = everyone[lo:lo + 256]
        dist = np.bitwise_count(rows[:, None] ^ everyone[None, :]).astype(np.int64)
        key = ((lab[lo:lo + 256, None] * r + lab[None, :]) * (n + 1)) + dist
        out += np.bincount(key.ravel(), minlength=out.size)
    return out.reshape(r, r, n + 1)


def brute_neighbor_counts(n: int, masks: np.ndarray, r: int) -> list[list[int]]:
    out = []
    for v in range(1 << n):
        counts = [0] * r
        for b in range(n):
            m = int(masks[v ^ (1 << b)])
            for k in range(r):
                counts[k] += (m >> k) & 1
        out.append(counts)
    return out


def brute_weight_distribution(words: list[int], x: int, n: int) -> list[int]:
    counts = [0] * (n + 1)
    for w in words:
        counts[(w ^ x).bit_count()] += 1
    return counts


def perturbed_labels(labels: np.ndarray, rng: np.random.Generator, swaps: int) -> np.ndarray:
    """Swap the cells of ``swaps`` random vertex pairs lying in different cells."""
    out = labels.copy()
    done = 0
    while done < swaps:
        a, b = rng.integers(0, len(out), size=2)
        if out[a] != out[b]:
            out[a], out[b] = out[b], out[a]
            done += 1
    return out
