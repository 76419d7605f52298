"""Distance invariance, complete (semi)regularity, orthogonal-array strength,
and the 1-centered embedding of a D-family into H^(n+3)."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .cells import FAMILY, CellSystem
from .codes import PAIRWISE_LIMIT, Code
from .errors import UsageError, Verdict
from .hypercube import MAX_CUBE_DIM, check_cube_dim, neighbor_block, render, walsh_hadamard, weight_table
from .spectra import MAX_TRANSFORM_DIM, predict_sphere_sums


def weight_distribution_table(c: Code) -> np.ndarray:
    """2^n x (n+1) array: row x is the weight distribution of ``c`` w.r.t. x.

    Column l is the XOR-correlation of the code's indicator with the
    indicator of the weight-l sphere, computed by Walsh-Hadamard transform.
    """
    n = c.n
    if n > MAX_TRANSFORM_DIM:
        raise UsageError(f"whole-cube weight distributions supported up to n={MAX_TRANSFORM_DIM}")
    ind = np.zeros(1 << n, dtype=np.int64)
    ind[c.indices()] = 1
    weights = weight_table(n)
    spheres = (weights[None, :] == np.arange(n + 1)[:, None]).astype(np.int64)
    spectrum = walsh_hadamard(ind)
    table = walsh_hadamard(walsh_hadamard(spheres) * spectrum[None, :]) >> n
    return table.T.copy()


def distance_to_code(table: np.ndarray) -> np.ndarray:
    """d(x, C) for every x, from a weight-distribution table."""
    return np.argmax(table > 0, axis=1)


# --------------------------------------------------------------------------


def check_distance_invariant(c: Code) -> Verdict:
    """Weight distribution w.r.t. every codeword equals that w.r.t. the first."""
    if len(c) == 0:
        return Verdict(True, detail="empty code")
    if len(c) > PAIRWISE_LIMIT:
        raise UsageError("distance invariance scan limited to 2^16 codewords")
    words = c.words
    n = c.n

    def profile(i: int) -> np.ndarray:
        if c.fast:
            d = np.bitwise_count(words ^ words[i]).astype(np.int64)
        else:
            wi = int(words[i])
            d = np.array([(wi ^ int(w)).bit_count() for w in words], dtype=np.int64)
        return np.bincount(d, minlength=n + 1)

    ref = profile(0)
    for i in range(1, len(c)):
        p = profile(i)
        if not np.array_equal(p, ref):
            return Verdict(False, {
                "codewords": [render(int(words[0]), n), render(int(words[i]), n)],
                "distributions": [ref.tolist(), p.tolist()]}, detail="not distance invariant")
    return Verdict(True, detail="distance invariant", extra={"distribution": ref.tolist()})


@dataclass
class RegularityReport:
    code_id: str
    n: int
    size: int
    distance_invariant: bool | None = None
    completely_semiregular: bool | None = None
    completely_regular: bool | None = None
    self_complementary: bool | None = None
    profiles: dict[str, list[int]] = field(default_factory=dict)
    witnesses: dict[str, dict] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return bool(self.completely_semiregular)

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        flags = {
            "distance_invariant": self.distance_invariant,
            "completely_semiregular": self.completely_semiregular,
            "completely_regular": self.completely_regular,
            "self_complementary": self.self_complementary,
        }
        return {"code": self.code_id, "n": self.n, "size": self.size,
                "flags": {k: v for k, v in flags.items() if v is not None},
                "profiles": self.profiles, "witnesses": self.witnesses}


def _group_check(table: np.ndarray, keys: np.ndarray, n: int):
    """Representative row per key and the least vertex disagreeing with it."""
    uniq, first = np.unique(keys, return_index=True)
    rep = np.zeros(int(keys.max()) + 1, dtype=np.int64)
    rep[uniq] = first
    bad = np.flatnonzero(np.any(table != table[rep[keys]], axis=1))
    witness = None
    if bad.size:
        v = int(bad[0])
        u = int(rep[keys[v]])
        witness = {"vertices": [render(u, n), render(v, n)],
                   "distributions": [table[u].tolist(), table[v].tolist()]}
    return uniq, first, witness


def check_semiregular(c: Code, code_id: str = "", table: np.ndarray | None = None) -> RegularityReport:
    """Group H^n by (d(x, C), d(x + 1, C)); semiregular iff the weight
    distribution is constant on every group."""
    n = c.n
    check_cube_dim(n)
    if table is None:
        table = weight_distribution_table(c)
    near = distance_to_code(table)
    far = near[::-1]
    keys = near * (n + 1) + far
    uniq, first, witness = _group_check(table, keys, n)
    report = RegularityReport(code_id, n, len(c), self_complementary=c.is_self_complementary())
    report.completely_semiregular = witness is None
    if witness is not None:
        report.witnesses["completely_semiregular"] = witness
    for key, v in zip(uniq.tolist(), first.tolist()):
        report.profiles[f"{key // (n + 1)},{key % (n + 1)}"] = table[v].tolist()
    return report


def check_completely_regular(c: Code, table: np.ndarray | None = None) -> Verdict:
    """Weight distribution depends on d(x, C) alone."""
    n = c.n
    check_cube_dim(n)
    if table is None:
        table = weight_distribution_table(c)
    near = distance_to_code(table)
    uniq, first, witness = _group_check(table, near, n)
    extra = {"self_complementary": c.is_self_complementary(),
             "profiles": {str(k): table[v].tolist() for k, v in zip(uniq.tolist(), first.tolist())}}
    if witness is not None:
        return Verdict(False, witness, detail="not completely regular", extra=extra)
    return Verdict(True, detail="completely regular", extra=extra)


def regularity_report(c: Code, code_id: str = "") -> RegularityReport:
    table = weight_distribution_table(c)
    report = check_semiregular(c, code_id, table)
    reg = check_completely_regular(c, table)
    report.completely_regular = reg.ok
    if reg.witness is not None:
        report.witnesses["completely_regular"] = reg.witness
    inv = check_distance_invariant(c)
    report.distance_invariant = inv.ok
    if inv.witness is not None:
        report.witnesses["distance_invariant"] = inv.witness
    return report


def compare_with_prediction(c: Code, system: CellSystem, S, table: np.ndarray | None = None) -> Verdict:
    """Every vertex's weight distribution w.r.t. ``c`` equals the sphere-sum
    prediction from ``S`` started at the vertex's membership row.

    ``c`` must be cell 0 of ``system``.
    """
    n = c.n
    if system.n != n or system.graph is not None:
        raise UsageError("system must live on the code's hypercube")
    if not np.array_equal(system.cell(0), np.sort(c.indices())):
        raise UsageError("cell 0 of the system must be the code")
    if table is None:
        table = weight_distribution_table(c)
    r = system.r
    realized = np.flatnonzero(np.bincount(system.masks, minlength=1 << r))
    predicted = np.full((1 << r, n + 1), -1, dtype=np.int64)
    fractional = []
    for mask in realized.tolist():
        start = [(mask >> k) & 1 for k in range(r)]
        col = predict_sphere_sums(S, start, n).column(0)
        if any(q.denominator != 1 for q in col):
            fractional.append(mask)
            continue
        predicted[mask] = [int(q) for q in col]
    bad = np.flatnonzero(np.any(table != predicted[system.masks.astype(np.int64)], axis=1))
    if bad.size:
        v = int(bad[0])
        mask = int(system.masks[v])
        return Verdict(False, {"vertex": render(v, n),
                               "member_of": [system.labels[k] for k in system.membership(v)],
                               "predicted": predicted[mask].tolist(),
                               "observed": table[v].tolist()},
                       detail="fractional prediction" if mask in fractional else "prediction mismatch")
    return Verdict(True, detail=f"all {1 << n} vertices match the sphere-sum prediction",
                   extra={"patterns": len(realized)})


# --------------------------------------------------------------------------


@dataclass
class OAReport:
    t_max: int
    expected: int | None
    witness: dict | None = None

    @property
    def ok(self) -> bool:
        return self.expected is None or self.t_max >= self.expected

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        out = {"ok": self.ok, "strength": self.t_max, "correlation_immune_degree": self.t_max}
        if self.expected is not None:
            out["expected"] = self.expected
        if self.witness is not None:
            out["first_failure"] = self.witness
        return out


def oa_failure(c: Code, t: int, bits: np.ndarray | None = None) -> dict | None:
    """First (coordinates, pattern) whose count differs from |C|/2^t, or None."""
    if t == 0:
        return None
    size = len(c)
    if size % (1 << t):
        return {"t": t, "reason": f"|C|={size} not divisible by 2^{t}"}
    want = size >> t
    if bits is None:
        bits = c.bit_matrix()
    place = (1 << np.arange(t - 1, -1, -1)).astype(np.int64)
    subsets = np.array(list(combinations(range(c.n), t)), dtype=np.int64)
    for lo in range(0, len(subsets), 4096):
        chunk = subsets[lo:lo + 4096]
        keys = bits[:, chunk].astype(np.int64) @ place
        flat = (np.arange(len(chunk))[None, :] << t) + keys
        counts = np.bincount(flat.ravel(), minlength=len(chunk) << t).reshape(len(chunk), 1 << t)
        bad = np.argwhere(counts != want)
        if bad.size:
            s, pattern = (int(x) for x in bad[0])
            return {"t": t, "coordinates": [int(j) + 1 for j in chunk[s]],
                    "pattern": format(pattern, f"0{t}b"), "count": int(counts[s, pattern]),
                    "expected": want}
    return None


def oa_strength(c: Code, expected: int | None = None) -> OAReport:
    """Largest t such that every t coordinates carry every pattern |C|/2^t times."""
    if len(c) == 0:
        raise UsageError("orthogonal-array strength of an empty code")
    bits = c.bit_matrix()
    t = 0
    witness = None
    while t < c.n:
        witness = oa_failure(c, t + 1, bits)
        if witness is not None:
            break
        t += 1
    return OAReport(t, expected, witness)


def expected_oa_strength(c: Code) -> int | None:
    return c.claimed.oa_strength if c.claimed is not None else None


# --------------------------------------------------------------------------
# Functions on H^(n+3) with values in {0, 1/3, 1}, stored as numerators over 3.

WEIGHT_ONE_SUFFIXES = (0b001, 0b010, 0b100)
WEIGHT_TWO_SUFFIXES = (0b110, 0b101, 0b011)


@dataclass
class CenteredFunction:
    n: int
    numerators: np.ndarray
    denominator: int = 3

    def value(self, v: int):
        from fractions import Fraction
        return Fraction(int(self.numerators[v]), self.denominator)

    def to_dict(self) -> dict:
        values = {}
        for num in sorted(set(np.unique(self.numerators).tolist()) - {0}):
            values[str(num)] = [render(int(v), self.n) for v in np.flatnonzero(self.numerators == num)]
        return {"n": self.n, "denominator": self.denominator, "values": values}

    @classmethod
    def from_dict(cls, data: dict) -> CenteredFunction:
        n = int(data["n"])
        check_cube_dim(n)
        nums = np.zeros(1 << n, dtype=np.int64)
        for num, words in data["values"].items():
            nums[[int(w, 2) for w in words]] = int(num)
        return cls(n, nums, int(data.get("denominator", 3)))


def build_centered_embedding(d_family: CellSystem) -> CenteredFunction:
    """f(x000) = [x in D0], f(x111) = [x in D0~], f = [x in D2]/3 on the
    weight-1 suffixes and [x in D2~]/3 on the weight-2 suffixes."""
    if d_family.kind != FAMILY or d_family.r != 6 or d_family.graph is not None:
        raise UsageError("embedding needs a six-cell D-family on H^n")
    n = d_family.n
    if n + 3 > MAX_CUBE_DIM:
        raise UsageError("embedding dimension too large")
    m = d_family.masks.astype(np.int64)
    out = np.zeros((1 << n, 8), dtype=np.int64)
    out[:, 0b000] = 3 * (m & 1)
    out[:, 0b111] = 3 * ((m >> 3) & 1)
    for s in WEIGHT_ONE_SUFFIXES:
        out[:, s] = (m >> 2) & 1
    for s in WEIGHT_TWO_SUFFIXES:
        out[:, s] = (m >> 5) & 1
    return CenteredFunction(n + 3, out.reshape(-1))


def verify_1_centered(f: CenteredFunction) -> Verdict:
    """Sum over every closed radius-1 ball equals 1 (numerators sum to the denominator)."""
    total = f.numerators.astype(np.int64).copy()
    for b in range(f.n):
        total += neighbor_block(f.numerators, b, 0, total.shape[0])
    bad = np.flatnonzero(total != f.denominator)
    if bad.size:
        v = int(bad[0])
        return Verdict(False, {"center": render(v, f.n), "sum_numerator": int(total[v]),
                               "denominator": f.denominator}, detail="ball sum differs from 1")
    return Verdict(True, detail=f"all {total.shape[0]} balls sum to 1")


def characteristic_function(c: Code) -> CenteredFunction:
    nums = np.zeros(1 << c.n, dtype=np.int64)
    nums[c.indices()] = 3
    return CenteredFunction(c.n, nums)
