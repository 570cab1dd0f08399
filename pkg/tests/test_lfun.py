import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symsq.lfun import (
    BUILTIN_TABLES,
    CoefficientError,
    InsufficientCoefficients,
    L_value,
    S_N,
    dirichlet_partial,
    euler_product,
    exp_smoothing,
    fe_probe,
    gamma_factor,
    load_coefficients,
    local_factor,
    parse_coefficients,
    series_from_values,
    sym_square_coeffs,
    zero_table,
)
from symsq.params import ParameterBox
from symsq.weights import V_weight

HEADER = "# level=11\n# weight=2\n# label=test\n# normalization=deligne\n"


@pytest.fixture(scope="module")
def t11():
    return load_coefficients("11.2.a.a")


def small_file(t11, n_max=30, edit=None):
    vals = {n: float(t11.values[n]) for n in range(1, n_max + 1)}
    if edit:
        vals.update(edit)
    return HEADER + "".join(f"{n} {v!r}\n" for n, v in vals.items())


# ---------------------------------------------------------------- ingest


def test_builtin_tables_load_and_validate():
    for name in BUILTIN_TABLES:
        t = load_coefficients(name)
        assert t.values[1] == 1.0 and t.n_max >= 100000
        assert abs(t.values[t.level] ** 2 - 1 / t.level) < 1e-8


def test_level11_first_coefficients(t11):
    a = [round(t11.values[n] * math.sqrt(n)) for n in range(1, 11)]
    # q - 2q^2 - q^3 + 2q^4 + q^5 + 2q^6 - 2q^7 - 2q^9 - 2q^10
    assert a == [1, -2, -1, 2, 1, 2, -2, 0, -2, -2]
    assert t11.values[2] == pytest.approx(-1.41421356, abs=1e-8)


def test_parse_accepts_good_file(t11):
    t = parse_coefficients(small_file(t11))
    t.validate()
    assert t.level == 11 and t.n_max == 30


def test_rejects_broken_multiplicativity(t11):
    t = parse_coefficients(small_file(t11, edit={6: float(t11.values[6]) + 0.1}))
    with pytest.raises(CoefficientError, match="multiplicativity"):
        t.validate()


def test_rejects_lambda1_zero(t11):
    t = parse_coefficients(small_file(t11, edit={1: 0.0}))
    with pytest.raises(CoefficientError):
        t.validate()


def test_rejects_hecke_violation(t11):
    t = parse_coefficients(small_file(t11, edit={4: float(t11.values[4]) + 1e-6}))
    with pytest.raises(CoefficientError, match="Hecke"):
        t.validate()


def test_rejects_large_prime_value(t11):
    t = parse_coefficients(small_file(t11, n_max=6, edit={5: 2.5}))
    with pytest.raises(CoefficientError):
        t.validate()


@pytest.mark.parametrize(
    "text",
    [
        HEADER + "1 1.0\n2 abc\n",
        HEADER + "1 1.0\n3 0.5\n",
        HEADER + "1 1.0\n1 1.0\n",
        "# level=12\n# weight=2\n# normalization=deligne\n1 1.0\n",
        "# level=11\n# weight=2\n# normalization=analytic\n1 1.0\n",
        "1 1.0\n2 0.5\n",
    ],
)
def test_parse_rejects_malformed(text):
    with pytest.raises(CoefficientError):
        parse_coefficients(text)


def test_load_missing_file():
    with pytest.raises(FileNotFoundError):
        load_coefficients("/nonexistent/table.txt")


def test_lambda_beyond_table_by_multiplicativity(t11):
    t = parse_coefficients(small_file(t11, n_max=30))
    for n in (27 * 2, 29 * 3, 25 * 4):
        assert t(n) == pytest.approx(t11.values[n], abs=1e-12)
    with pytest.raises(InsufficientCoefficients):
        t(37)


# ---------------------------------------------------------------- sym^2 series


def test_sym_square_examples(t11):
    b = sym_square_coeffs(t11, 100).b
    assert b[1] == pytest.approx(1.0)
    assert b[2] == pytest.approx(1.0, abs=1e-12)
    assert b[4] == pytest.approx(0.0, abs=1e-12)


def test_sym_square_matches_definition(t11):
    X = 400
    b = sym_square_coeffs(t11, X).b
    for n in range(1, X + 1):
        ref = 0.0
        for d in range(1, math.isqrt(n) + 1):
            if n % (d * d) == 0 and d % 11:
                m = n // (d * d)
                ref += t11(m * m)
        assert abs(b[n] - ref) < 1e-10


def test_sym_square_insufficient(t11):
    t = parse_coefficients(small_file(t11, n_max=30))
    with pytest.raises(InsufficientCoefficients) as info:
        sym_square_coeffs(t, 10**4)
    assert "10000" in str(info.value) or "100" in str(info.value)


# ---------------------------------------------------------------- S(N)


def test_S_N_examples(t11):
    P = ParameterBox(N=1.0, t=0.0, p=11, K=4.0)
    assert S_N(t11, P, V_weight()) == pytest.approx(2.0, abs=1e-12)
    z = zero_table()
    P = ParameterBox(N=1.5, t=0.0, p=11, K=4.0)
    assert S_N(z, P) == pytest.approx(V_weight()(np.array([1 / 1.5]))[0])


@given(st.floats(1.0, 300.0), st.floats(0.0, 200.0))
@settings(max_examples=40, deadline=None)
def test_S_N_triangle_bound(t11, N, t):
    P = ParameterBox(N=N, t=t, p=11, K=4.0)
    top = int(2.5 * N)
    bound = np.abs(t11.square_values(top)[1:]).sum()
    assert abs(S_N(t11, P)) <= bound + 1e-9


# ---------------------------------------------------------------- L-values


def test_gamma_factor_examples():
    assert gamma_factor(1, 2) == pytest.approx(1 / (2 * math.pi), rel=1e-14)
    assert math.isfinite(abs(gamma_factor(0.5, 2)))
    for s in (0.3, 1.0, 2.7):
        g = gamma_factor(s, 2)
        assert g.real > 0 and abs(g.imag) < 1e-15 * g.real
    with pytest.raises(ValueError):
        gamma_factor(-1, 2)


def test_local_factor_at_level(t11):
    for s in (1.5, 2.0, 3.0, 0.7 + 2j):
        assert local_factor(t11, 11, s) == pytest.approx(1 / (1 - 11 ** (-(s + 1))), rel=1e-14)


def test_euler_vs_dirichlet(t11):
    series = sym_square_coeffs(t11, 5000)
    d = dirichlet_partial(series, 3.0)
    assert abs(d - euler_product(t11, 3.0, 10000)) <= 1e-8
    # primes below 100 only: the missing factors are ~1e-6
    assert abs(d - euler_product(t11, 3.0, 100)) > 1e-8


def test_L_value_trivial_series():
    s = series_from_values([1.0] + [0.0] * 999, 11, 2)
    assert L_value(s, 0.5 + 3j) == 1.0


def test_L_value_cutoff_too_large(t11):
    s = sym_square_coeffs(t11, 1000)
    with pytest.raises(InsufficientCoefficients):
        L_value(s, 0.5, X=10**4)


def test_L_value_half_stable(t11):
    s = sym_square_coeffs(t11, t11.n_max)
    a = L_value(s, 0.5)
    b = L_value(s, 0.5, X=s.length / 4)
    assert abs(a - b) <= 1e-3 * abs(a)
    c = L_value(s, 0.5, exp_smoothing(2.0))
    assert abs(c - 0.893396) < 1e-5


def test_fe_probe(t11):
    s = sym_square_coeffs(t11, t11.n_max)
    r = fe_probe(s, 2, 11, [0.5, 0.6, 0.7, 0.8])
    assert r.residuals[0.5][0] == 0.0 and r.residuals[1.0][0] == 0.0
    assert r.best == 1.0 and r.margin > 5
    assert not r.unstable


def test_fe_probe_flags_unstable(t11):
    s = sym_square_coeffs(t11, 2000)
    r = fe_probe(s, 2, 11, [0.6], X=50.0, stability_tol=1e-12)
    assert r.unstable == [0.6]
