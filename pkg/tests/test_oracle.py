"""Tests for the exhaustive enumeration oracle and family comparisons."""

import itertools

import pytest

from padiclab import (
    BudgetExceeded,
    PrimeContext,
    compare_with_family,
    enumerate_automorphisms,
    family_tables,
    operation_by_name,
    verify_trivial_pairs,
)


def naive_enumeration(p, k, op_names):
    """Cross-oracle: filter all permutations of [0, p**k) directly."""
    ctx = PrimeContext(p, k)
    n = ctx.modulus
    ops = [operation_by_name(name) for name in op_names]
    out = []
    for perm in itertools.permutations(range(n)):
        compatible = True
        for level in range(1, k):
            block = p**level
            if any(perm[x] % block != perm[x % block] % block for x in range(n)):
                compatible = False
                break
        if not compatible:
            continue
        if all(
            perm[op.apply(ctx, x, y)] == op.apply(ctx, perm[x], perm[y])
            for op in ops
            for x in range(n)
            for y in range(n)
        ):
            out.append(perm)
    return sorted(out)


@pytest.mark.parametrize("ops", [["plus"], ["xor"], ["times"], ["plus", "xor"]])
def test_backtracking_matches_naive_filter(ops):
    ctx = PrimeContext(2, 3)
    result = enumerate_automorphisms(ctx, ops)
    assert list(result.automorphisms) == naive_enumeration(2, 3, ops)


def test_enumeration_counts_examples():
    assert enumerate_automorphisms(PrimeContext(3, 2), ["plus"]).count == 6
    assert enumerate_automorphisms(PrimeContext(2, 3), ["xor"]).count == 8
    assert enumerate_automorphisms(PrimeContext(2, 3), ["plus", "times"]).count == 1


def test_enumeration_is_sorted_and_distinct():
    result = enumerate_automorphisms(PrimeContext(3, 2), ["xor"])
    assert list(result.automorphisms) == sorted(set(result.automorphisms))


def test_enumerated_tables_are_tower_compatible_bijections():
    result = enumerate_automorphisms(PrimeContext(3, 2), ["plus"])
    for table in result.automorphisms:
        assert sorted(table) == list(range(9))
        assert all(table[x] % 3 == table[x % 3] % 3 for x in range(9))


def test_group_closure_and_inverses():
    result = enumerate_automorphisms(PrimeContext(3, 2), ["xor"])
    tables = set(result.automorphisms)
    for f in tables:
        inverse = [0] * len(f)
        for x, fx in enumerate(f):
            inverse[fx] = x
        assert tuple(inverse) in tables
        for g in tables:
            assert tuple(f[g[x]] for x in range(len(f))) in tables


def test_monotonicity_under_reduction():
    for ops in (["plus"], ["plus", "xor"]):
        fine = enumerate_automorphisms(PrimeContext(2, 4), ops)
        coarse = set(enumerate_automorphisms(PrimeContext(2, 3), ops).automorphisms)
        for table in fine.automorphisms:
            assert tuple(v % 8 for v in table[:8]) in coarse


def test_budget_exceeded_is_raised_not_truncated():
    with pytest.raises(BudgetExceeded):
        enumerate_automorphisms(PrimeContext(5, 2), ["plus"], node_budget=10)


def test_compare_plus_family():
    result = enumerate_automorphisms(PrimeContext(3, 2), ["plus"])
    comparison = compare_with_family(result)
    assert comparison.equal
    assert comparison.family_count == 6


def test_compare_and_family():
    result = enumerate_automorphisms(PrimeContext(5, 2), ["and"])
    comparison = compare_with_family(result)
    assert comparison.equal
    assert comparison.family_count == 4


def test_compare_xor_family():
    result = enumerate_automorphisms(PrimeContext(3, 2), ["xor"])
    comparison = compare_with_family(result)
    assert comparison.equal
    assert comparison.family_count == 12


def test_times_comparison_finds_quotient_extras_at_p2():
    # the quotient mod 8 admits two automorphisms beyond the family: the
    # units 3 and 7 have the same square and order, so swapping them is
    # multiplicative and tower-compatible, though it lifts to no scaling map
    result = enumerate_automorphisms(PrimeContext(2, 3), ["times"])
    comparison = compare_with_family(result)
    assert not comparison.equal
    assert comparison.missing == ()
    assert comparison.extra == (
        (0, 1, 2, 7, 4, 5, 6, 3),
        (0, 1, 6, 7, 4, 5, 2, 3),
    )


def test_times_comparison_equal_at_p3():
    result = enumerate_automorphisms(PrimeContext(3, 2), ["times"])
    comparison = compare_with_family(result)
    assert comparison.equal
    assert comparison.enumerated_count == 4


def test_family_tables_counts():
    assert len(family_tables(PrimeContext(3, 2), "add")) == 6
    assert len(family_tables(PrimeContext(2, 3), "xor")) == 8
    assert len(family_tables(PrimeContext(5, 2), "and")) == 4
    with pytest.raises(ValueError):
        family_tables(PrimeContext(3, 2), "nope")


def test_trivial_pairs_quotient_counts():
    # quotient-level ground truth: pairs with carry-free addition keep the
    # scalings A = 1 mod p**(k-1), whose distinguishing carries fall above
    # the precision window; all other pairs collapse to the identity
    report = verify_trivial_pairs(2, 3)
    counts = {r.ops: r.count for r in report.pairs}
    assert counts == {
        ("plus", "times"): 1,
        ("plus", "xor"): 2,
        ("plus", "and"): 1,
        ("times", "xor"): 2,
        ("times", "and"): 1,
        ("xor", "and"): 1,
    }
    assert not report.all_trivial
    witness = {r.ops: r.witness for r in report.pairs}[("plus", "xor")]
    assert witness == tuple(5 * x % 8 for x in range(8))

    report = verify_trivial_pairs(3, 2)
    counts = {r.ops: r.count for r in report.pairs}
    assert counts == {
        ("plus", "times"): 1,
        ("plus", "xor"): 3,
        ("plus", "and"): 1,
        ("times", "xor"): 1,
        ("times", "and"): 1,
        ("xor", "and"): 1,
    }


def test_trivial_pair_extras_do_not_lift():
    # the level-(k+1) survivors all reduce to the identity at level k
    fine = enumerate_automorphisms(PrimeContext(3, 3), ["plus", "xor"])
    assert fine.count == 3
    identity = tuple(range(9))
    for table in fine.automorphisms:
        assert tuple(v % 9 for v in table[:9]) == identity


def test_enumeration_result_json():
    result = enumerate_automorphisms(PrimeContext(3, 2), ["plus"])
    data = result.to_json()
    assert data["p"] == 3 and data["k"] == 2 and data["count"] == 6
    assert data["ops"] == ["plus"]
    assert len(data["automorphisms"]) == 6
