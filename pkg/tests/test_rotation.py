import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from warpedbundle.exceptions import DepthExceedsExpansion, FloatLooksRational, InputError
from warpedbundle.rotation import (
    GOLDEN,
    RotationNumber,
    convergents,
    make_rotation,
    min_orbit_gap,
    parse_alpha,
    small_divisor,
    small_divisor_table,
)


def euclid_cf(fr: Fraction, limit=100):
    """Plain Euclidean algorithm on a rational in (0, 1)."""
    out = []
    num, den = fr.numerator, fr.denominator
    while num and len(out) < limit:
        a, r = divmod(den, num)
        out.append(a)
        den, num = num, r
    return out


def truncated_value(coeffs):
    """Exact value of [0; a_1, ..., a_k] by folding fractions."""
    x = Fraction(0)
    for a in reversed(coeffs):
        x = 1 / (a + x)
    return x


def test_golden_has_unit_quotients():
    a = make_rotation("golden")
    assert a.value == pytest.approx((math.sqrt(5) - 1) / 2, abs=0)
    assert a.cf_coeffs[:8] == (1,) * 8
    assert a.kind == "golden"


def test_float_0375_looks_rational():
    assert euclid_cf(Fraction(3, 8)) == [2, 1, 2]
    with pytest.raises(FloatLooksRational):
        make_rotation("float:0.375")


def test_float_with_giant_quotient_looks_rational():
    # 0.1 as a double sits within 6e-18 of 1/10
    with pytest.raises(FloatLooksRational):
        make_rotation(0.1)


def test_float_golden_expands_to_ones():
    a = make_rotation(f"float:{GOLDEN!r}", depth=20)
    assert a.cf_coeffs == (1,) * 20
    assert a.kind == "float_given"


def test_cf_two_converges_to_sqrt2_minus_1():
    a = make_rotation("cf:" + ",".join(["2"] * 10))
    q10 = a.convergents[9][1]
    assert abs(a.value - (math.sqrt(2) - 1)) < 1 / q10**2


@pytest.mark.parametrize("bad", ["cf:", "cf:1,0,2", "cf:x", "float:1.5", "float:abc", "pi", "foo:1"])
def test_bad_specs(bad):
    with pytest.raises(InputError):
        parse_alpha(bad)


def test_golden_convergents_are_fibonacci_ratios(golden):
    assert convergents(golden, 5) == [(1, 1), (1, 2), (2, 3), (3, 5), (5, 8)]


def test_first_convergent_is_one_over_a1():
    a = make_rotation([7, 3, 1])
    assert convergents(a, 1) == [(1, 7)]


def test_cf_two_convergents_match_fraction_oracle():
    a = make_rotation([2] * 6)
    expected = []
    for k in range(1, 5):
        fr = truncated_value([2] * k)
        expected.append((fr.numerator, fr.denominator))
    assert convergents(a, 4) == expected == [(1, 2), (2, 5), (5, 12), (12, 29)]


def test_depth_exceeds_expansion():
    with pytest.raises(DepthExceedsExpansion):
        convergents(make_rotation([1, 2, 3]), 4)


@given(st.lists(st.integers(1, 10**6), min_size=1, max_size=25))
def test_convergent_recurrence_matches_fraction_oracle(coeffs):
    a = make_rotation(coeffs)
    for k, (p, q) in enumerate(a.convergents, start=1):
        fr = truncated_value(coeffs[:k])
        assert (p, q) == (fr.numerator, fr.denominator)
    qs = [q for _, q in a.convergents]
    assert all(x < y for x, y in zip(qs, qs[1:])) or coeffs[0] == 1 and qs[0] == 1


def test_q_strictly_increasing_from_second(golden):
    qs = [q for _, q in golden.convergents]
    # q_1 = a_1 = 1 equals the seed q_0 = 1; from there on the sequence grows
    assert all(x < y for x, y in zip(qs[1:], qs[2:]))


def test_convergents_use_exact_integers():
    a = make_rotation([10**8] * 6)
    p, q = a.convergents[-1]
    assert isinstance(q, int) and q > 10**48


def test_approximation_bound_golden_high_precision(golden):
    mpmath.mp.dps = 60
    exact = (mpmath.sqrt(5) - 1) / 2
    conv = golden.convergents
    for k in range(len(conv) - 1):
        p, q = conv[k]
        assert abs(exact * q - p) < mpmath.mpf(1) / conv[k + 1][1]


def test_approximation_bound_cf_with_golden_tail():
    coeffs = [3, 1, 4, 1, 5, 9, 2, 6]
    a = make_rotation(coeffs)
    mpmath.mp.dps = 60
    x = (1 + mpmath.sqrt(5)) / 2
    for c in reversed(coeffs):
        x = c + 1 / x
    exact = 1 / x
    assert float(exact) == pytest.approx(a.value, abs=1e-15)
    for k in range(len(coeffs) - 1):
        p, q = a.convergents[k]
        assert abs(exact * q - p) < mpmath.mpf(1) / a.convergents[k + 1][1]


def test_small_divisor_closed_form(golden):
    assert small_divisor(golden, 0) == 0
    direct = abs(np.exp(2j * np.pi * golden.value) - 1)
    assert small_divisor(golden, 1) == pytest.approx(direct, abs=1e-15)


def test_small_divisor_matches_complex_exponential(golden):
    # high-precision |exp(2 pi i k alpha) - 1| for the stored double alpha
    mpmath.mp.dps = 40
    a = mpmath.mpf(golden.value)
    ks = np.arange(-2000, 2001)
    direct = np.array([float(abs(mpmath.expjpi(2 * k * a) - 1)) for k in ks])
    assert np.max(np.abs(small_divisor(golden, ks) - direct)) < 1e-14


def test_small_divisor_table_symmetry(golden):
    table = small_divisor_table(golden, 50)
    assert table[0] == 0
    for k in range(1, 51):
        assert table[k] == table[-k] > 0
    assert len(table.entries) == 101


@pytest.mark.parametrize("j", range(2, 14))
def test_convergent_denominators_are_window_minima(golden, j):
    q_j, q_next = golden.convergents[j][1], golden.convergents[j + 1][1]
    ks = np.arange(1, q_next)
    divs = small_divisor(golden, ks)
    assert ks[np.argmin(divs)] == q_j


def test_badly_approximable_lower_envelope(golden):
    ks = np.arange(1, 10**4 + 1)
    divs = small_divisor(golden, ks)
    C = float(np.min(ks * divs))
    # measured: C ~ 2 pi / (sqrt 5 + 1) ... bounded below by 2 pi / (sqrt5 + 2)
    assert C > 1.4
    at_q = [small_divisor(golden, q) for _, q in golden.convergents[1:19]]
    assert all(x > y for x, y in zip(at_q, at_q[1:]))


def brute_gap(alpha, n):
    """Exact rational scan over 1 <= |k| <= n of the distance from k alpha to Z."""
    a = Fraction(float(alpha))
    return float(min(abs(k * a - round(k * a)) for kk in range(1, n + 1) for k in (kk, -kk)))


def test_min_orbit_gap_small_cases(golden):
    assert min_orbit_gap(golden, 1) == pytest.approx(min(golden.value, 1 - golden.value))
    assert min_orbit_gap(golden, 8) == pytest.approx(brute_gap(golden.value, 8), abs=1e-16)
    assert min_orbit_gap(golden, 8) == pytest.approx(abs(8 * golden.value - 5), abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 0.99), st.integers(1, 300))
def test_min_orbit_gap_brute_force(x, n):
    assert min_orbit_gap(x, n) == pytest.approx(brute_gap(x, n), abs=1e-15)


def test_min_orbit_gap_monotone_and_positive(golden):
    Ns = [1, 2, 5, 10, 100, 1000, 10**4, 10**5, 10**6]
    gaps = [min_orbit_gap(golden, n) for n in Ns]
    assert all(g > 0 for g in gaps)
    assert all(a >= b for a, b in zip(gaps, gaps[1:]))


def test_min_orbit_gap_rejects_zero(golden):
    with pytest.raises(InputError):
        min_orbit_gap(golden, 0)


def test_spec_round_trip(liouville):
    for a in (RotationNumber.golden(), liouville, make_rotation("float:0.7071067811865476")):
        b = make_rotation(a.spec)
        assert b.value == a.value and b.cf_coeffs[: a.depth] == a.cf_coeffs
