"""Tests for tower-compatible tables, the ball-coefficient transform, and the criteria."""

import itertools
import random

import pytest

from padiclab import (
    CompatibilityViolation,
    LipschitzFn,
    PrimeContext,
    compose,
    coordinate_subfunctions,
    fn_from_json,
    fn_to_json,
    is_bijective_mod,
    iter_all_lipschitz,
    preserves_measure_coord,
    preserves_measure_vdp,
    random_lipschitz,
    random_measure_preserving,
    series_from_json,
    vdp_inverse,
    vdp_transform,
)


def identity(ctx):
    return LipschitzFn.from_table(ctx, range(ctx.modulus), "identity")


def test_from_table_accepts_identity():
    ctx = PrimeContext(2, 2)
    assert identity(ctx).table == (0, 1, 2, 3)


def test_from_table_reports_first_violation():
    ctx = PrimeContext(2, 2)
    with pytest.raises(CompatibilityViolation) as err:
        LipschitzFn.from_table(ctx, [0, 2, 1, 3])
    assert (err.value.x, err.value.y, err.value.level) == (0, 2, 1)


def test_single_level_imposes_nothing():
    ctx = PrimeContext(3, 1)
    for perm in itertools.permutations(range(3)):
        LipschitzFn.from_table(ctx, perm)


def test_from_table_input_validation():
    ctx = PrimeContext(2, 2)
    with pytest.raises(ValueError):
        LipschitzFn.from_table(ctx, [0, 1, 2])
    with pytest.raises(ValueError):
        LipschitzFn.from_table(ctx, [0, 1, 2, 4])


def test_vdp_identity_coefficients():
    ctx = PrimeContext(3, 2)
    series = vdp_transform(identity(ctx))
    # the coefficient of m is its leading-digit contribution
    for m in range(1, ctx.modulus):
        n = len(str_digits(m, 3))
        leading = (m // 3 ** (n - 1)) * 3 ** (n - 1)
        assert series.coefficients[m] == leading
    assert series.coefficients[7] == 6
    assert series.normalized(7) == 2


def str_digits(m, p):
    out = []
    while m:
        out.append(m % p)
        m //= p
    return out


def test_vdp_constant_function():
    # every one-digit ball carries the constant; longer balls see no increment
    ctx = PrimeContext(3, 2)
    series = vdp_transform(LipschitzFn.from_table(ctx, [4] * 9))
    assert series.coefficients[:3] == (4, 4, 4)
    assert all(c == 0 for c in series.coefficients[3:])


def test_vdp_square_example():
    ctx = PrimeContext(2, 2)
    series = vdp_transform(LipschitzFn.from_table(ctx, [0, 1, 0, 1]))
    assert series.coefficients == (0, 1, 0, 0)


def test_vdp_roundtrip_random():
    rng = random.Random(11)
    for p, K in [(2, 4), (3, 3), (5, 2)]:
        ctx = PrimeContext(p, K)
        for i in range(60):
            f = random_lipschitz(ctx, rng) if i % 2 else random_measure_preserving(ctx, rng)
            assert vdp_inverse(vdp_transform(f)) == f


def test_vdp_series_json_roundtrip():
    ctx = PrimeContext(3, 2)
    series = vdp_transform(identity(ctx))
    again = series_from_json(series.to_json())
    assert again.coefficients == series.coefficients
    assert vdp_inverse(again) == identity(ctx)


def test_vdp_inverse_rejects_bad_divisibility():
    ctx = PrimeContext(2, 2)
    # B_2 = 1 is not divisible by 2: the evaluated table cannot be compatible
    series = series_from_json({"p": 2, "K": 2, "B": [0, 1, 1, 0]})
    with pytest.raises(CompatibilityViolation):
        vdp_inverse(series)


def test_measure_vdp_examples():
    ctx = PrimeContext(3, 2)
    assert preserves_measure_vdp(identity(ctx)).ok
    scaled = LipschitzFn.from_table(ctx, [3 * x % 9 for x in range(9)])
    report = preserves_measure_vdp(scaled)
    assert not report.ok
    assert report.failure == (0, 0)
    square = LipschitzFn.from_table(PrimeContext(2, 2), [0, 1, 0, 1])
    report = preserves_measure_vdp(square)
    assert not report.ok


def test_coordinate_subfunctions_identity_and_shift():
    ctx = PrimeContext(3, 2)
    for k in range(ctx.precision):
        for sub in coordinate_subfunctions(identity(ctx), k):
            assert sub.phi == (0, 1, 2)
    shift = LipschitzFn.from_table(ctx, [ctx.xor_values(x, 5) for x in range(9)])
    assert preserves_measure_coord(shift).ok
    for sub in coordinate_subfunctions(shift, 0):
        assert sorted(sub.phi) == [0, 1, 2]


def test_coordinate_criterion_digit_squares():
    ctx = PrimeContext(3, 2)
    squares = LipschitzFn.from_table(ctx, [ctx.and_values(x, x) for x in range(9)])
    report = preserves_measure_coord(squares)
    assert not report.ok
    assert report.failure == (0, 0)  # units digit map is 0,1,1


def test_first_failure_is_lexicographic():
    ctx = PrimeContext(2, 3)
    # identity at level 0; constant sub-functions at levels 1 and 2
    subs = [
        [(0, 1)],
        [(0, 0), (0, 0)],
        [(0, 0)] * 4,
    ]
    f = LipschitzFn.from_subfunctions(ctx, subs)
    assert preserves_measure_coord(f).failure == (1, 0)
    assert preserves_measure_vdp(f).failure == (1, 0)


def test_is_bijective_mod():
    ctx = PrimeContext(2, 2)
    assert all(is_bijective_mod(identity(ctx), k) for k in (1, 2))
    square = LipschitzFn.from_table(ctx, [0, 1, 0, 1])
    assert not is_bijective_mod(square, 2)
    plus_one = LipschitzFn.from_table(ctx, [(x + 1) % 4 for x in range(4)])
    assert all(is_bijective_mod(plus_one, k) for k in (1, 2))


def test_compose():
    ctx = PrimeContext(3, 2)
    ident = identity(ctx)
    plus_one = LipschitzFn.from_table(ctx, [(x + 1) % 9 for x in range(9)])
    plus_two = LipschitzFn.from_table(ctx, [(x + 2) % 9 for x in range(9)])
    assert compose(plus_one, ident) == plus_one
    assert compose(plus_one, plus_one) == plus_two
    a = LipschitzFn.from_table(ctx, [2 * x % 9 for x in range(9)])
    b = LipschitzFn.from_table(ctx, [5 * x % 9 for x in range(9)])
    ab = LipschitzFn.from_table(ctx, [10 * x % 9 for x in range(9)])
    assert compose(a, b) == ab


def test_compose_preserves_invertibility():
    rng = random.Random(5)
    ctx = PrimeContext(3, 3)
    for _ in range(20):
        f = random_measure_preserving(ctx, rng)
        g = random_measure_preserving(ctx, rng)
        h = compose(f, g)
        assert preserves_measure_coord(h).ok
        assert preserves_measure_vdp(h).ok


def test_criteria_agree_on_random_sample():
    rng = random.Random(3)
    for p, K in [(3, 3), (5, 2)]:
        ctx = PrimeContext(p, K)
        for i in range(200):
            f = random_lipschitz(ctx, rng) if i % 2 else random_measure_preserving(ctx, rng)
            a = preserves_measure_vdp(f).ok
            b = preserves_measure_coord(f).ok
            c = all(is_bijective_mod(f, k) for k in range(1, K + 1))
            assert a == b == c


def test_divisibility_for_compatible_functions():
    rng = random.Random(9)
    ctx = PrimeContext(3, 3)
    for _ in range(50):
        series = vdp_transform(random_lipschitz(ctx, rng))
        for m in range(ctx.modulus):
            series.normalized(m)  # raises if the guaranteed power is absent


def test_iter_all_lipschitz_counts():
    ctx = PrimeContext(2, 2)
    fns = list(iter_all_lipschitz(ctx))
    # (p**p) ** (1 + p) independent digit maps
    assert len(fns) == 4**3
    assert len(set(fns)) == 4**3
    with pytest.raises(ValueError):
        list(iter_all_lipschitz(PrimeContext(5, 3)))


def test_generator_respects_permutation_structure():
    rng = random.Random(1)
    ctx = PrimeContext(5, 2)
    for _ in range(30):
        f = random_measure_preserving(ctx, rng)
        assert preserves_measure_coord(f).ok


def test_fn_json_roundtrip():
    ctx = PrimeContext(3, 2)
    f = identity(ctx)
    data = fn_to_json(f)
    assert data["p"] == 3 and data["K"] == 2
    assert fn_from_json(data) == f
