from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corpus import (brute_neighbor_counts, distance3_codes, distance4_codes, perturbed_labels)
from hexcell.cells import CellSystem, build_c_system, build_d_family, build_shortened_partition, code_partition
from hexcell.codes import Code, hamming
from hexcell.equitable import (ExplicitGraph, QuotientMatrix, check_equitable, check_pattern_table,
                               check_triple_count, d_family_pattern_table, golden_matrix,
                               graph_profile, hypercube_graph, infer_quotient, local_distribution,
                               neighbor_counts, triple_count_criterion)
from hexcell.errors import ConditionViolation, StructuralError, UsageError
from hexcell.spectra import distance_distribution

SEED = 20240611


def parity_partition(n):
    return CellSystem.from_labels(n, np.array([bin(v).count("1") % 2 for v in range(1 << n)]))


# --------------------------------------------------------------------------
# Quotient matrices


def test_golden_matrices_at_small_n():
    assert golden_matrix("perfect", 7).entries == ((0, 7), (1, 6))
    S = golden_matrix("d-family", 4)
    assert S.row(1) == (1, 0, 3, 0, 0, 0)
    assert S.row(2) == (0, 2, 2, 0, 2, -2)


def test_golden_rows_sum_to_degree_for_partitions():
    for kind in ("perfect", "once-shortened", "twice-shortened", "c-system"):
        S = golden_matrix(kind, 13)
        assert all(sum(row) == 13 for row in S.entries)


def test_pattern_table_rows_are_sums_of_quotient_rows():
    for n in (4, 12):
        S = golden_matrix("d-family", n)
        table = d_family_pattern_table(n)
        assert len(table) == 7
        for cells, row in table.items():
            assert row == S.pattern_row(cells)
            assert sum(row) == 2 * n and min(row) >= 0


def test_quotient_matrix_json_round_trip():
    S = golden_matrix("d-family", 12)
    assert QuotientMatrix.from_dict(S.to_dict()) == S
    assert S.to_dict()["r"] == 6


def test_quotient_matrix_must_be_square():
    with pytest.raises(UsageError):
        QuotientMatrix.from_dict({"r": 2, "entries": [[0, 1]]})


# --------------------------------------------------------------------------
# Neighbour counting against a direct loop


@pytest.mark.parametrize("system", [
    build_c_system(Code(5, ["00000", "11110"])),
    build_d_family(Code(4, ["0000", "1110"])),
    build_shortened_partition(hamming(3), 2),
])
def test_neighbor_counts_match_direct_loop(system):
    assert neighbor_counts(system).tolist() == brute_neighbor_counts(system.n, system.masks, system.r)


# --------------------------------------------------------------------------
# check_equitable


def test_small_c_system_is_equitable():
    assert check_equitable(build_c_system(Code(5, ["00000", "11110"])), golden_matrix("c-system", 5)).ok


def test_small_d_family_is_equitable_with_signed_entries():
    assert check_equitable(build_d_family(Code(4, ["0000", "1110"])), golden_matrix("d-family", 4)).ok


@pytest.mark.parametrize("n", [5, 13])
def test_corpus_c_systems_are_equitable(n):
    S = golden_matrix("c-system", n)
    for code in distance4_codes(n).values():
        assert check_equitable(build_c_system(code), S).ok


@pytest.mark.parametrize("n", [4, 12])
def test_corpus_d_families_are_equitable(n):
    S = golden_matrix("d-family", n)
    for code in distance3_codes(n).values():
        assert check_equitable(build_d_family(code), S).ok


def test_random_partition_yields_witness():
    rng = np.random.default_rng(SEED)
    s = CellSystem.from_labels(5, rng.integers(0, 6, size=32), labels=[f"P{k}" for k in range(6)])
    verdict = check_equitable(s, golden_matrix("c-system", 5))
    assert not verdict.ok
    assert set(verdict.witness) >= {"vertex", "cell", "expected", "actual"}


def test_witness_is_the_least_failing_vertex():
    s = build_c_system(distance4_codes(13)["ext-hamming4-last"])
    lab = s.labels_array().copy()
    a, b = int(s.cell(1)[900]), int(s.cell(2)[500])
    lab[[a, b]] = lab[[b, a]]
    bad = CellSystem.from_labels(13, lab, labels=s.labels)
    S = golden_matrix("c-system", 13)
    counts = brute_neighbor_counts(13, bad.masks, 6)
    want = next(v for v in range(1 << 13) if counts[v] != list(S.row(int(lab[v]))))
    for threads in (1, 4):
        verdict = check_equitable(bad, S, threads=threads)
        assert verdict.witness["vertex"] == format(want, "013b")


def test_witness_does_not_depend_on_thread_count_across_blocks(monkeypatch):
    import hexcell.hypercube as hc
    original = hc.sweep_blocks
    monkeypatch.setattr("hexcell.equitable.sweep_blocks",
                        lambda n, fn, threads=None: original(n, fn, threads, block_bits=6))
    s = build_c_system(distance4_codes(13)["vasilev-2-first"])
    lab = s.labels_array().copy()
    a, b = int(s.cell(2)[600]), int(s.cell(1)[2000])
    lab[[a, b]] = lab[[b, a]]
    bad = CellSystem.from_labels(13, lab, labels=s.labels)
    S = golden_matrix("c-system", 13)
    witnesses = {check_equitable(bad, S, threads=t).witness["vertex"] for t in (1, 2, 5)}
    assert len(witnesses) == 1


def test_side_mismatch_is_a_usage_error():
    with pytest.raises(UsageError):
        check_equitable(parity_partition(3), golden_matrix("c-system", 3))


# --------------------------------------------------------------------------
# Pattern table for families


def test_pattern_row_of_zero_vertex():
    s = build_d_family(Code(4, ["0000", "1110"]))
    assert s.membership(0) == (0, 4)
    assert neighbor_counts(s)[0].tolist() == [0, 4, 0, 1, 0, 3]


@pytest.mark.parametrize("n", [4, 12])
def test_pattern_table_holds_on_corpus(n):
    for code in distance3_codes(n).values():
        s = build_d_family(code)
        assert check_pattern_table(s).ok


def test_pattern_table_agrees_with_equitable_check():
    rng = np.random.default_rng(SEED)
    base = build_d_family(distance3_codes(12)["hamming4-last"])
    S = golden_matrix("d-family", 12)
    for _ in range(10):
        masks = base.masks.copy()
        a, b = rng.integers(0, 4096, size=2)
        masks[a], masks[b] = masks[b], masks[a]
        s = CellSystem(12, base.kind, base.labels, masks)
        try:
            t8 = check_pattern_table(s)
        except StructuralError:
            continue
        eq = check_equitable(s, S)
        assert t8.ok == eq.ok
        if not t8.ok:
            assert t8.witness["vertex"] == eq.witness["vertex"]


def test_pattern_table_rejects_forbidden_pattern():
    base = build_d_family(Code(4, ["0000", "1110"]))
    masks = base.masks.copy()
    masks[0] = (1 << 0) | (1 << 5)
    with pytest.raises(StructuralError):
        check_pattern_table(CellSystem(4, base.kind, base.labels, masks))


def test_pattern_table_needs_a_family():
    with pytest.raises(UsageError):
        check_pattern_table(build_c_system(Code(5, ["00000", "11110"])))


# --------------------------------------------------------------------------
# Quotient inference


def test_infer_perfect_partition():
    assert infer_quotient(code_partition(hamming(3))).matrix == QuotientMatrix(((0, 7), (1, 6)))


def test_infer_c_system_at_13():
    s = build_c_system(distance4_codes(13)["ext-hamming4-last"])
    assert infer_quotient(s).matrix == golden_matrix("c-system", 13)


def test_infer_bipartition():
    assert infer_quotient(parity_partition(6)).matrix.entries == ((0, 6), (6, 0))


@pytest.mark.parametrize("times, kind", [(1, "once-shortened"), (2, "twice-shortened")])
def test_infer_shortened_perfect_partitions(times, kind):
    for m in (3, 4):
        s = build_shortened_partition(hamming(m), times)
        assert infer_quotient(s).matrix == golden_matrix(kind, s.n)


def test_infer_then_check_round_trip():
    s = build_c_system(distance4_codes(5)["pair-01111"])
    assert check_equitable(s, infer_quotient(s).matrix).ok


def test_infer_reports_two_vertices_of_one_cell():
    rng = np.random.default_rng(SEED)
    s = CellSystem.from_labels(4, rng.integers(0, 3, size=16))
    result = infer_quotient(s)
    assert not result.ok
    u, v = result.witness["vertices"]
    assert result.witness["counts"][0] != result.witness["counts"][1]
    with pytest.raises(UsageError):
        result.matrix


def test_infer_marks_empty_cells_undefined():
    s = CellSystem.from_cells(2, [[0, 1, 2, 3], []])
    result = infer_quotient(s)
    assert result.ok and result.rows[1] is None


# --------------------------------------------------------------------------
# Explicit graphs


def cycle(k):
    return ExplicitGraph(k, [(i, (i + 1) % k) for i in range(k)])


def petersen():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return ExplicitGraph(10, outer + spokes + inner)


def complete(k):
    return ExplicitGraph(k, list(combinations(range(k), 2)))


def test_graph_profiles():
    assert complete(4).profile() == (2, 0)
    assert petersen().profile() == (0, 1)
    assert cycle(4).profile() == (0, 2)
    assert cycle(6).profile() == (0, 1)
    assert hypercube_graph(4).profile() == (0, 2)


def test_graph_violating_the_condition_names_a_pair():
    # a path on three vertices plus a pendant triangle: adjacent pairs disagree
    g = ExplicitGraph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (2, 4)])
    with pytest.raises(ConditionViolation) as info:
        g.profile()
    assert len(info.value.pair) == 2


def test_graph_rejects_loops_and_bad_vertices():
    with pytest.raises(UsageError):
        ExplicitGraph(3, [(1, 1)])
    with pytest.raises(UsageError):
        ExplicitGraph(3, [(0, 3)])


def test_hypercube_graph_gives_the_same_counts():
    s = build_c_system(Code(5, ["00000", "11110"]))
    g = CellSystem(None, s.kind, s.labels, s.masks.copy(), graph=hypercube_graph(5))
    assert np.array_equal(neighbor_counts(g), neighbor_counts(s))
    assert check_equitable(g, golden_matrix("c-system", 5)).ok
    assert graph_profile(g) == (0, 2)
    assert check_triple_count(g).ok


def test_petersen_equitable_partition():
    s = CellSystem.from_cells(None, [range(5), range(5, 10)], graph=petersen())
    assert infer_quotient(s).matrix.entries == ((2, 1), (1, 2))
    assert check_triple_count(s).ok


def test_petersen_perturbed_partition_fails_both_checks():
    s = CellSystem.from_cells(None, [[0, 1, 2, 3, 5], [4, 6, 7, 8, 9]], graph=petersen())
    assert not infer_quotient(s).ok
    assert not check_triple_count(s).ok


def test_complete_graph_partition():
    s = CellSystem.from_cells(None, [[0], [1, 2, 3]], graph=complete(4))
    assert infer_quotient(s).matrix.entries == ((0, 3), (1, 2))
    assert check_triple_count(s).ok


# --------------------------------------------------------------------------
# Counting-triples criterion


def test_criterion_on_perfect_partition_of_h7():
    verdict = check_triple_count(code_partition(hamming(3)))
    assert verdict.ok
    assert verdict.extra["sides"][0] == ["0", "0"]
    assert verdict.extra["sides"][1] == ["4032", "4032"]


def test_local_distribution_agrees_with_full_distribution():
    s = build_c_system(distance4_codes(13)["vasilev-1-last"])
    local = local_distribution(s)
    full = distance_distribution(s)
    for i in range(6):
        for j in range(6):
            assert local.table[i][j] == full.table[i][j][:3]


def test_criterion_rejects_families():
    s = build_d_family(Code(4, ["0000", "1110"]))
    with pytest.raises(UsageError):
        check_triple_count(s)
    with pytest.raises(UsageError):
        triple_count_criterion(distance_distribution(s), 0, 2)


def test_criterion_on_perturbed_small_c_system_cites_a_cell():
    s = build_c_system(Code(5, ["00000", "11110"]))
    lab = s.labels_array().copy()
    c1, c2 = int(s.cell(1)[0]), int(s.cell(2)[0])
    lab[c1], lab[c2] = lab[c2], lab[c1]
    bad = CellSystem.from_labels(5, lab, labels=s.labels)
    verdict = check_triple_count(bad)
    assert not verdict.ok
    assert verdict.witness["index"] in range(6)
    assert Fraction(verdict.witness["lhs"]) != Fraction(verdict.witness["rhs"])
    assert not check_equitable(bad, golden_matrix("c-system", 5)).ok


def golden_partitions():
    return {
        "perfect-7": code_partition(hamming(3)),
        "perfect-15": code_partition(hamming(4)),
        "once-shortened-6": build_shortened_partition(hamming(3), 1),
        "once-shortened-14": build_shortened_partition(hamming(4), 1),
        "twice-shortened-5": build_shortened_partition(hamming(3), 2),
        "twice-shortened-13": build_shortened_partition(hamming(4), 2),
        "c-system-5": build_c_system(distance4_codes(5)["pair-11110"]),
        "c-system-13": build_c_system(distance4_codes(13)["ext-hamming4-last"]),
    }


def agreement(system):
    """(criterion verdict, equitable verdict using the inferred matrix)."""
    crit = check_triple_count(system).ok
    inferred = infer_quotient(system)
    eq = inferred.ok and check_equitable(system, inferred.matrix).ok
    return crit, eq


@pytest.mark.parametrize("name", sorted(golden_partitions()))
def test_criterion_holds_on_golden_partitions(name):
    assert agreement(golden_partitions()[name]) == (True, True)


def test_criterion_agrees_with_equitability_on_perturbed_partitions():
    rng = np.random.default_rng(SEED)
    systems = golden_partitions()
    failing = 0
    for name in sorted(systems):
        if systems[name].n > 13:
            continue
        base = systems[name]
        for trial in range(20):
            lab = perturbed_labels(base.labels_array(), rng, swaps=1 + trial % 3)
            s = CellSystem.from_labels(base.n, lab, labels=base.labels)
            crit, eq = agreement(s)
            assert crit == eq, (name, trial)
            failing += not crit
    assert failing >= 100


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4).flatmap(lambda r: st.lists(st.integers(0, r - 1), min_size=16, max_size=16)))
def test_criterion_agrees_with_equitability_on_random_partitions(labels):
    lab = np.array(labels)
    used = np.unique(lab)
    lab = np.searchsorted(used, lab)
    s = CellSystem.from_labels(4, lab)
    crit, eq = agreement(s)
    assert crit == eq
