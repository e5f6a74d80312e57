import math

import numpy as np
import pytest

from deformed_spectra import (
    OPEN,
    PERIODIC,
    DeformationParams,
    PiFraction,
    TridiagonalOperator,
    Truncation,
    build_general_lambda_operator,
    build_harper_operator,
    build_momentum_operator,
    build_position_operator,
    build_xnu_operator,
    deformation_value,
    energy_level,
)

ATOL = 1e-15
SQRT2 = math.sqrt(2.0)


def test_pi_fraction_reduces():
    f = PiFraction(4, 6)
    assert (f.p, f.q) == (2, 3)
    g = PiFraction(1, -2)
    assert (g.p, g.q) == (-1, 2)
    assert PiFraction(1, 2).value == math.pi / 2
    with pytest.raises(ValueError):
        PiFraction(1, 0)


def test_position_couplings_half_pi():
    # sin(n*pi/2)/sqrt(2): the even-n couplings must be exact zeros, not 1e-16
    params = DeformationParams(omega=PiFraction(1, 2))
    op = build_position_operator(params, Truncation(n_max=5))
    assert np.array_equal(op.diag, np.zeros(5))
    assert op.offdiag[1] == 0.0 and op.offdiag[3] == 0.0
    assert op.offdiag[0] == pytest.approx(1 / SQRT2, abs=ATOL)
    assert op.offdiag[2] == pytest.approx(-1 / SQRT2, abs=ATOL)
    assert op.corner is None and op.boundary == OPEN


def test_position_at_pi_is_zero_matrix():
    op = build_position_operator(DeformationParams(omega=PiFraction(1, 1)), Truncation(n_max=6))
    assert np.array_equal(op.offdiag, np.zeros(5))


def test_coupling_periodicity_is_bitwise():
    # offdiag[j + q] == (-1)^p * offdiag[j] exactly, thanks to integer folding
    for p, q in [(1, 3), (2, 5), (3, 7), (5, 8)]:
        op = build_position_operator(DeformationParams(omega=PiFraction(p, q)), Truncation(n_max=4 * q))
        sign = -1.0 if p % 2 else 1.0
        assert np.array_equal(op.offdiag[q:], sign * op.offdiag[: op.offdiag.shape[0] - q])


def test_mirror_frequency_same_magnitudes():
    # |couplings| at p/q and (q-p)/q agree bit for bit
    a = build_position_operator(DeformationParams(omega=PiFraction(1, 5)), Truncation(n_max=30))
    b = build_position_operator(DeformationParams(omega=PiFraction(4, 5)), Truncation(n_max=30))
    assert np.array_equal(np.abs(a.offdiag), np.abs(b.offdiag))


def test_xnu_couplings():
    params = DeformationParams(omega=PiFraction(1, 2), nu=math.pi / 2)
    op = build_xnu_operator(params, Truncation(n_max=4))
    assert op.offdiag == pytest.approx([2.0, 0.0, -2.0], abs=1e-14)


def test_xnu_scaling_identity():
    # at nu = pi/2 the cosine-profile chain is 2*sqrt(2) times the position chain
    for omega in [PiFraction(2, 7), 0.83]:
        params = DeformationParams(omega=omega)
        x = build_position_operator(params, Truncation(n_max=40))
        xnu = build_xnu_operator(params, Truncation(n_max=40))
        assert np.allclose(xnu.offdiag / (2 * SQRT2), x.offdiag, atol=1e-12)


def test_harper_third_flux():
    op = build_harper_operator(PiFraction(2, 3), 0.0, Truncation(n_max=3), boundary=PERIODIC)
    assert op.diag == pytest.approx([2.0, -1.0, -1.0], abs=1e-14)
    assert np.array_equal(op.offdiag, np.ones(2))
    assert op.corner == 1.0 and op.boundary == PERIODIC


def test_harper_window_offsets():
    t = Truncation(n_max=2, k_min=3, k_max=6)
    assert t.window == 4
    op = build_harper_operator(0.5, 0.1, t)
    expect = [2 * math.cos(0.5 * k - 0.1) for k in range(3, 7)]
    assert op.diag == pytest.approx(expect, abs=ATOL)


def test_general_lambda_zero_weight_is_uniform():
    params = DeformationParams(omega=PiFraction(1, 7), nu=0.3, lam=0.0)
    op = build_general_lambda_operator(params, Truncation(n_max=6))
    assert np.array_equal(op.offdiag, np.full(5, math.sqrt(1.0) / SQRT2))


def test_general_lambda_unit_weight():
    # radicand hits an exact zero where cos(2*omega*n) = -1
    params = DeformationParams(omega=PiFraction(1, 2), nu=0.0, lam=1.0)
    op = build_general_lambda_operator(params, Truncation(n_max=3))
    assert op.offdiag[0] == 0.0
    assert op.offdiag[1] == pytest.approx(SQRT2, abs=ATOL)


def test_momentum_alternating_signs():
    params = DeformationParams(omega=PiFraction(1, 4))
    op = build_momentum_operator(params, Truncation(n_max=3))
    assert op.offdiag == pytest.approx([-0.5, 1 / SQRT2], abs=ATOL)
    x = build_position_operator(params, Truncation(n_max=3))
    assert np.array_equal(np.abs(op.offdiag), np.abs(x.offdiag))
    with pytest.raises(ValueError):
        build_momentum_operator(params, Truncation(n_max=3), boundary=PERIODIC)


def test_periodic_corner_uses_next_coupling():
    params = DeformationParams(omega=PiFraction(1, 3))
    op = build_position_operator(params, Truncation(n_max=6), boundary=PERIODIC)
    assert op.corner == 0.0  # sin(6*pi/3) = sin(2*pi) exactly
    op5 = build_position_operator(params, Truncation(n_max=5), boundary=PERIODIC)
    assert op5.corner == pytest.approx(math.sin(5 * math.pi / 3) / SQRT2, abs=ATOL)


def test_deformation_value_and_energy():
    quarter = DeformationParams(omega=PiFraction(1, 4))
    assert deformation_value(quarter, 0) == pytest.approx(1 / SQRT2, abs=ATOL)
    assert energy_level(quarter, 0) == pytest.approx(0.25, abs=ATOL)
    half = DeformationParams(omega=PiFraction(1, 2))
    for n in range(8):
        assert energy_level(half, n) == 0.5  # sin values are exact 0 / +-1 here
    with pytest.raises(ValueError):
        energy_level(half, -1)


def test_general_lambda_energy_reduces():
    # lam = 1, nu = pi/2 must agree with the trigonometric branch
    omega = 0.7
    a = DeformationParams(omega=omega)
    b = DeformationParams(omega=omega, lam=1.0 + 1e-16)  # forces the general branch? no: equals 1.0
    assert b.lam == 1.0
    c = DeformationParams(omega=omega, lam=0.5)
    for n in range(5):
        rad_up = 1.25 + math.cos(2 * omega * (n + 1) - math.pi)
        rad_dn = 0.0 if n == 0 else 1.25 + math.cos(2 * omega * n - math.pi)
        assert energy_level(c, n) == pytest.approx(0.5 * (rad_up + rad_dn), abs=1e-13)
    assert energy_level(a, 3) == pytest.approx(
        0.5 * (math.sin(4 * omega) ** 2 + math.sin(3 * omega) ** 2), abs=ATOL
    )


def test_validation_errors():
    with pytest.raises(ValueError):
        DeformationParams(omega=float("nan"))
    with pytest.raises(ValueError):
        DeformationParams(omega=1.0, lam=-0.5)
    with pytest.raises(ValueError):
        Truncation(n_max=1)
    with pytest.raises(ValueError):
        Truncation(n_max=4, k_min=2, k_max=2)
    with pytest.raises(ValueError):
        build_position_operator(DeformationParams(omega=1.0, lam=2.0), Truncation(n_max=4))
    with pytest.raises(ValueError):
        TridiagonalOperator(diag=np.zeros(4), offdiag=np.zeros(4))
    with pytest.raises(ValueError):
        TridiagonalOperator(diag=np.array([1.0, np.inf]), offdiag=np.zeros(1))
    with pytest.raises(ValueError):
        build_position_operator(DeformationParams(omega=1.0), Truncation(n_max=4), boundary="moebius")


def test_operator_arrays_frozen():
    op = build_position_operator(DeformationParams(omega=0.9), Truncation(n_max=4))
    with pytest.raises(ValueError):
        op.offdiag[0] = 5.0
    dense = op.to_dense()
    assert np.array_equal(dense, dense.T)
    dense[0, 0] = 7.0  # to_dense hands out a copy
    assert op.diag[0] == 0.0
