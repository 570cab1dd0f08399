import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symsq.expsums import (
    CharSumSpec,
    GaussSumSpec,
    charsum_C1_bruteforce,
    charsum_C1_closed,
    charsum_C_bruteforce,
    charsum_C_closed,
    charsum_C_display,
    charsum_C_grid_bruteforce,
    gauss_grid_bruteforce,
    gauss_grid_closed,
    gauss_sum_bruteforce,
    gauss_sum_closed,
    half_modulus_inverse,
    ramanujan_sum,
    ramanujan_sum_bruteforce,
)
from symsq.modmath import ModArithError, mod_inverse


def naive_gauss(a, b, c):
    return sum(cmath.exp(2j * math.pi * (a * x * x + b * x) / c) for x in range(c))


@pytest.mark.parametrize(
    "abc, expected",
    [((1, 0, 1), 1), ((1, 1, 2), 2), ((1, 0, 4), 2 + 2j)],
)
def test_gauss_bruteforce_examples(abc, expected):
    assert abs(gauss_sum_bruteforce(GaussSumSpec(*abc)) - expected) < 1e-12
    assert abs(naive_gauss(*abc) - expected) < 1e-12


@pytest.mark.parametrize(
    "abc, expected",
    [((1, 0, 5), math.sqrt(5)), ((2, 0, 3), -1j * math.sqrt(3)), ((1, 0, 4), 2 + 2j)],
)
def test_gauss_closed_examples(abc, expected):
    assert abs(gauss_sum_closed(GaussSumSpec(*abc)) - expected) < 1e-12


def test_gauss_requires_coprime():
    with pytest.raises(ModArithError):
        GaussSumSpec(2, 1, 4)


@given(st.integers(1, 300), st.integers(-1000, 1000), st.integers(-1000, 1000))
def test_gauss_closed_matches_scalar_bruteforce(c, a, b):
    if math.gcd(a, c) != 1:
        return
    s = GaussSumSpec(a, b, c)
    assert abs(gauss_sum_closed(s) - gauss_sum_bruteforce(s)) <= 1e-9 * math.sqrt(c)


def test_gauss_grid_closed_vs_bruteforce_small():
    for c in range(1, 129):
        _, brute = gauss_grid_bruteforce(c)
        _, closed = gauss_grid_closed(c)
        assert np.abs(brute - closed).max() <= 1e-9 * math.sqrt(c)


def test_gauss_grid_row_is_literal_sum():
    a_vals, table = gauss_grid_bruteforce(12)
    for i, a in enumerate(a_vals):
        for b in range(12):
            assert abs(table[i, b] - naive_gauss(int(a), b, 12)) < 1e-10


def test_abs_gauss_odd_is_sqrt():
    for c in range(1, 1000, 2):
        for a in (1, 2, c - 1):
            if math.gcd(a, c) == 1:
                assert abs(abs(gauss_sum_closed(GaussSumSpec(a, 0, c))) - math.sqrt(c)) < 1e-9


def test_even_vanishing():
    for c in range(2, 257, 2):
        r = c // 2
        a_vals, table = gauss_grid_bruteforce(c)
        for i, a in enumerate(a_vals):
            odd = (int(a) * r + np.arange(c)) % 2 == 1
            assert np.abs(table[i, odd]).max(initial=0) < 1e-9


def test_ramanujan_examples():
    assert ramanujan_sum(1, 6) == 1
    assert ramanujan_sum(0, 9) == 6
    assert ramanujan_sum(3, 9) == -3


def test_ramanujan_divisor_formula_matches_definition():
    for q in range(1, 400):
        for r in range(-q, q + 1, max(1, q // 17)):
            assert abs(ramanujan_sum(r, q) - ramanujan_sum_bruteforce(r, q)) < 1e-8


@pytest.mark.parametrize(
    "l, q, expected",
    [(1, 9, 0), (2, 3, -1j * math.sqrt(3)), (3, 9, -3)],
)
def test_C1_examples(l, q, expected):
    assert abs(charsum_C1_closed(l, q) - expected) < 1e-12
    assert abs(charsum_C1_bruteforce(l, q) - expected) < 1e-9


def test_C_examples():
    assert abs(charsum_C_bruteforce(CharSumSpec(1, 0, 1, 7)) - 1) < 1e-12
    assert abs(charsum_C_bruteforce(CharSumSpec(1, 0, 3, 7)) + 1) < 1e-12
    assert abs(charsum_C_closed(CharSumSpec(1, 0, 3, 7)) + 1) < 1e-12
    assert abs(charsum_C_closed(CharSumSpec(1, 0, 1, 7)) - 1) < 1e-12
    s = CharSumSpec(2, 0, 15, 7)
    assert abs(charsum_C_closed(s) - charsum_C_bruteforce(s)) < 1e-9
    s = CharSumSpec(1, 1, 3, 7)
    assert abs(charsum_C_closed(s) - charsum_C_bruteforce(s)) < 1e-9


def test_C_display_differs_by_eps_for_q3():
    s = CharSumSpec(1, 0, 3, 7)
    assert abs(charsum_C_display(s) - 1j) < 1e-12
    assert charsum_C_closed(s, track_units=False) == charsum_C_display(s)


def test_C_rejects_p_dividing_q():
    with pytest.raises(ModArithError):
        CharSumSpec(1, 0, 14, 7)


@pytest.mark.parametrize("q", [1, 2, 3, 4, 6, 8, 9, 12, 16, 18, 24, 25, 27, 32, 40, 45, 48, 50, 64, 96])
def test_C_closed_all_parity_cases(q):
    ms = np.arange(1, 21)
    ns = np.arange(-10, 11)
    for p in (7, 11, 13):
        brute = charsum_C_grid_bruteforce(q, p, ms, ns)
        for i, m in enumerate(ms):
            for j, n in enumerate(ns):
                v = charsum_C_closed(CharSumSpec(int(m), int(n), q, p))
                assert abs(v - brute[i, j]) <= 1e-8 * math.sqrt(q)


def test_C_grid_matches_scalar_definition():
    grid = charsum_C_grid_bruteforce(12, 7, [1, 5], [-2, 3])
    for i, m in enumerate([1, 5]):
        for j, n in enumerate([-2, 3]):
            assert abs(grid[i, j] - charsum_C_bruteforce(CharSumSpec(m, n, 12, 7))) < 1e-10


def test_half_modulus_inverse_identity():
    for r in range(1, 200, 2):
        for a in range(1, 2 * r, 2):
            if math.gcd(a, r) == 1:
                assert half_modulus_inverse(a, r) == mod_inverse(a, 2 * r)
