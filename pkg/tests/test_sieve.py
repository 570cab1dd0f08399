import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symsq.modmath import is_square, jacobi_symbol
from symsq.sieve import (
    BudgetExceeded,
    QuadrupleCountSpec,
    SieveInstance,
    count_direct,
    count_represented,
    dyadic_spec,
    equal_d_pairs,
    jacobi_matrix,
    large_sieve_check,
    large_sieve_sweep,
    odd_squarefree_upto,
    pair_localization_check,
    quadruple_count,
    quadruple_report,
    random_instances,
    square_pair_mass,
    squarefree_kernel,
)


# ---------------------------------------------------------------- large sieve


def test_indicator_instance():
    r = large_sieve_check(SieveInstance(20, 1, np.ones(1)))
    assert r.lhs == len([1, 3, 5, 7, 11, 13, 15, 17, 19])
    assert r.rhs == 21 and r.ratio < 1


def test_zero_instance():
    r = large_sieve_check(SieveInstance(10, 8, np.zeros(8)))
    assert (r.lhs, r.rhs, r.ratio) == (0.0, 0.0, 0.0)


def test_instance_validation():
    with pytest.raises(ValueError):
        SieveInstance(0, 3, np.ones(3))
    with pytest.raises(ValueError):
        SieveInstance(3, 3, np.ones(2))
    with pytest.raises(ValueError):
        SieveInstance(3, 1, np.array([np.nan]))


def test_jacobi_matrix_rows():
    M = jacobi_matrix(15, 30)
    qs = odd_squarefree_upto(15)
    for i, q in enumerate(qs):
        assert [M[i, n - 1] for n in range(1, 31)] == [jacobi_symbol(n, q) for n in range(1, 31)]


def test_lhs_is_literal_sum():
    inst = random_instances(9, 12, 1, seed=3)[0]
    lhs = sum(abs(sum(inst.a[n - 1] * jacobi_symbol(n, q) for n in range(1, 13))) ** 2 for q in (1, 3, 5, 7))
    assert large_sieve_check(inst).lhs == pytest.approx(lhs, rel=1e-12)


@given(st.lists(st.integers(-10**6, 10**6).filter(lambda n: n != 0), min_size=1, max_size=40))
@settings(max_examples=60, deadline=None)
def test_squarefree_kernel_property(ns):
    k = squarefree_kernel(np.array(ns))
    for n, s in zip(ns, k):
        assert n % s == 0 and is_square(n // s)
        assert all(s % (p * p) for p in range(2, 60))


@given(st.integers(1, 60), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_square_pair_mass_is_pair_count(N, seed):
    a = np.random.default_rng(seed).random(N)
    ref = sum(a[i] * a[j] for i in range(N) for j in range(N) if is_square((i + 1) * (j + 1)))
    assert square_pair_mass(a) == pytest.approx(ref, rel=1e-12)


def test_random_instances_deterministic():
    a = random_instances(16, 16, 3, seed=7)
    b = random_instances(16, 16, 3, seed=7)
    assert all(np.array_equal(x.a, y.a) for x, y in zip(a, b))
    assert np.allclose(np.abs(a[0].a), 1.0)


def test_sweep_small():
    rep = large_sieve_sweep(grid=((16, 16), (32, 64)), count=20, seed=1)
    assert rep.passed and len(rep.by_id("sieve.ratio_max")) == 2


# ---------------------------------------------------------------- quadruples


def test_small_example():
    spec = QuadrupleCountSpec(3, (1, 2), (1, 2))
    r = quadruple_count(spec)
    assert r.direct == r.represented == 4


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadrupleCountSpec(4, (1, 2), (1, 2))
    with pytest.raises(ValueError):
        QuadrupleCountSpec(3, (2, 1), (1, 2))
    with pytest.raises(ValueError):
        QuadrupleCountSpec(3, (1, 2), (1, 2), D=0)
    with pytest.raises(BudgetExceeded):
        QuadrupleCountSpec(3, (1, 1000), (1, 100), budget=10**6)


def brute(spec):
    pts = [
        spec.p * n * n - 4 * m
        for n in range(spec.n_range[0], spec.n_range[1] + 1)
        for m in range(spec.m_range[0], spec.m_range[1] + 1)
        if (spec.p * n * n - 4 * m) % spec.D == 0
    ]
    return sum(1 for a in pts for b in pts if a * b >= 0 and math.isqrt(a * b) ** 2 == a * b)


@given(
    st.sampled_from([3, 5, 7, 11, 13]),
    st.integers(1, 30),
    st.integers(0, 25),
    st.integers(1, 8),
    st.integers(0, 6),
    st.sampled_from([1, 2, 3, 4, 6]),
)
@settings(max_examples=60, deadline=None)
def test_two_routes_agree(p, m0, dm, n0, dn, D):
    spec = QuadrupleCountSpec(p, (m0, m0 + dm), (n0, n0 + dn), D)
    c = count_direct(spec)
    assert c == count_represented(spec) == brute(spec)
    points = quadruple_count(spec).points
    assert c >= points


def test_divisor_chain_monotone():
    base = dict(p=11, m_range=(176, 352), n_range=(8, 24))
    counts = {D: count_direct(QuadrupleCountSpec(D=D, **base)) for D in (1, 2, 3, 4, 6, 8, 12)}
    for a, b in ((1, 2), (2, 4), (4, 8), (1, 3), (3, 6), (6, 12), (4, 12), (2, 6)):
        assert counts[b] <= counts[a]


def test_dyadic_ranges():
    spec = dyadic_spec(11, 64, 16)
    assert spec.n_range == (16, 32) and spec.m_range == (176, 352)


def test_equal_d_pairs_are_off_diagonal():
    spec = dyadic_spec(11, 64, 32)
    for n1, m1, n2, m2 in equal_d_pairs(spec)[:500]:
        assert n1 != n2 and 11 * n1 * n1 - 4 * m1 == 11 * n2 * n2 - 4 * m2


def test_localization_identity():
    # |n1^2 - n2^2| = 4|m1 - m2|/p bounds |n1 - n2| by that over n1 + n2
    spec = dyadic_spec(11, 64, 32)
    span = spec.m_range[1] - spec.m_range[0]
    for n1, _, n2, _ in equal_d_pairs(spec):
        assert abs(n1 - n2) <= 4 * span / 11 / (n1 + n2)
    rep = pair_localization_check(11, 32, 64)
    assert rep.pairs > 0 and rep.max_ratio <= 4


def test_quadruple_report_defaults():
    rep = quadruple_report()
    assert rep.passed
    assert len(rep.rows) == 6
