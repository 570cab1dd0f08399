import numpy as np
import pytest

from symsq.audit import _Setup, audit_U, stage_B, stage_C, stage_D
from symsq.lfun import CoefficientTable, InsufficientCoefficients, S_N, audit_decomposition, load_coefficients
from symsq.params import ParameterBox
from symsq.weights import V_weight


@pytest.fixture(scope="module")
def setup():
    t11 = load_coefficients("11.2.a.a")
    return _Setup(t11, ParameterBox(N=2.0, t=3.0, p=11, K=0.25), V_weight(), audit_U())


def test_audit_U_covers_squares():
    U = audit_U()
    # V(n/N) lives on [1/2, 5/2], so U must be 1 on [1/4, 25/4]
    assert np.all(U(np.linspace(0.25, 6.25, 101)) == 1.0)


def test_stage_B_equals_A(setup):
    A = S_N(setup.table, setup.P, setup.V)
    B = sum(stage_B(setup).values())
    assert abs(B - A) <= 1e-3 * abs(A)
    assert abs(B - A) <= 1e-12


def test_stage_C_q1(setup):
    B = stage_B(setup)
    setup.qs, qs = [1], setup.qs
    try:
        C, reach = stage_C(setup)
    finally:
        setup.qs = qs
    assert abs(C[1] - B[1]) <= 1e-6 * abs(B[1])


def test_stage_D_q1(setup):
    B = stage_B(setup)
    D, skipped = stage_D(setup, 1.0, reach=12.0, qs=(1,))
    assert not skipped
    assert abs(D[1] - B[1]) <= 1e-2 * abs(B[1])


def test_zero_table_all_stages_zero():
    z = CoefficientTable(11, 2, np.zeros(4001), "zero")
    rep = audit_decomposition(z, ParameterBox(N=2.0, t=3.0, p=11, K=0.25), voronoi_qs=(1,))
    for row in rep.rows:
        assert row.value == 0 and row.oracle == 0 and row.passed


def test_audit_needs_coefficients():
    short = CoefficientTable(11, 2, np.r_[0.0, 1.0, np.zeros(10)], "short")
    with pytest.raises(InsufficientCoefficients):
        _Setup(short, ParameterBox(N=2.0, t=3.0, p=11, K=0.25), V_weight(), audit_U())
