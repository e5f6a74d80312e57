import math

import numpy as np
import pytest

from deformed_spectra import (
    DeformationParams,
    PiFraction,
    SolverConvergenceError,
    TridiagonalOperator,
    Truncation,
    build_harper_operator,
    build_position_operator,
    eigenpair_inverse_iteration,
    eigenvalues_bisection,
    eigenvalues_dense_oracle,
    solve_spectrum,
    sturm_count,
)

TOL = 1e-12
ROUTE_TOL = 1e-10  # bisection vs jacobi on the same matrix


def _random_chain(rng, n):
    return TridiagonalOperator(
        diag=rng.standard_normal(n), offdiag=rng.standard_normal(n - 1), label="random"
    )


def test_two_site_exact():
    op = TridiagonalOperator(diag=np.zeros(2), offdiag=np.ones(1))
    assert eigenvalues_bisection(op).eigenvalues == pytest.approx([-1.0, 1.0], abs=TOL)
    assert eigenvalues_dense_oracle(op).eigenvalues == pytest.approx([-1.0, 1.0], abs=TOL)


def test_zero_matrix():
    op = TridiagonalOperator(diag=np.zeros(3), offdiag=np.zeros(2))
    assert np.array_equal(eigenvalues_bisection(op).eigenvalues, np.zeros(3))
    assert np.array_equal(eigenvalues_dense_oracle(op).eigenvalues, np.zeros(3))


def test_degenerate_pairs_half_pi():
    # decoupled 2x2 blocks + a free site: eigenvalues {-b, -b, 0, b, b}
    op = build_position_operator(DeformationParams(omega=PiFraction(1, 2)), Truncation(n_max=5))
    b = 1 / math.sqrt(2.0)
    assert eigenvalues_bisection(op).eigenvalues == pytest.approx([-b, -b, 0.0, b, b], abs=TOL)


def test_sturm_count_monotone():
    rng = np.random.default_rng(3)
    op = _random_chain(rng, 30)
    ev = np.linalg.eigvalsh(op.to_dense())
    assert sturm_count(op, float(ev[0]) - 1.0) == 0
    assert sturm_count(op, float(ev[-1]) + 1.0) == 30
    for k in (5, 17, 29):
        x = 0.5 * (ev[k - 1] + ev[k])
        assert sturm_count(op, float(x)) == k
    with pytest.raises(ValueError):
        sturm_count(op, float("inf"))


def test_block_splitting_matches_union():
    diag = np.array([0.3, -0.1, 0.8, 0.2, -0.7])
    off = np.array([0.5, 0.0, 0.0, 1.1])  # two cuts -> three blocks
    op = TridiagonalOperator(diag=diag, offdiag=off)
    got = eigenvalues_bisection(op).eigenvalues
    a = np.linalg.eigvalsh(np.array([[0.3, 0.5], [0.5, -0.1]]))
    c = np.linalg.eigvalsh(np.array([[0.2, 1.1], [1.1, -0.7]]))
    expect = np.sort(np.concatenate([a, [0.8], c]))
    assert got == pytest.approx(expect, abs=TOL)


def test_routes_agree_random():
    rng = np.random.default_rng(11)
    for n in (7, 24, 50):
        op = _random_chain(rng, n)
        e_bis = eigenvalues_bisection(op).eigenvalues
        e_jac = eigenvalues_dense_oracle(op).eigenvalues
        e_lib = np.linalg.eigvalsh(op.to_dense())  # third opinion, library route
        assert np.max(np.abs(e_bis - e_jac)) < ROUTE_TOL
        assert np.max(np.abs(e_bis - e_lib)) < ROUTE_TOL


def test_harper_pi_flux():
    # diag alternates +2/-2 with unit hopping; compare against dense
    op = build_harper_operator(PiFraction(1, 1), 0.0, Truncation(n_max=12))
    got = eigenvalues_bisection(op).eigenvalues
    assert got == pytest.approx(np.linalg.eigvalsh(op.to_dense()), abs=ROUTE_TOL)


def test_periodic_ring_of_ones():
    op = TridiagonalOperator(diag=np.zeros(3), offdiag=np.ones(2), corner=1.0)
    got = eigenvalues_dense_oracle(op).eigenvalues
    assert got == pytest.approx([-1.0, -1.0, 2.0], abs=TOL)


def test_solver_routing():
    params = DeformationParams(omega=PiFraction(1, 3))
    open_op = build_position_operator(params, Truncation(n_max=9))
    ring_op = build_position_operator(params, Truncation(n_max=9), boundary="periodic")
    assert solve_spectrum(open_op).source_label.startswith("bisection")
    assert solve_spectrum(ring_op).source_label.startswith("jacobi")
    assert solve_spectrum(open_op).eigenvalues == pytest.approx(
        np.linalg.eigvalsh(open_op.to_dense()), abs=ROUTE_TOL
    )
    assert solve_spectrum(ring_op).eigenvalues == pytest.approx(
        np.linalg.eigvalsh(ring_op.to_dense()), abs=ROUTE_TOL
    )


def test_bisection_rejects_bad_input():
    op = TridiagonalOperator(diag=np.zeros(3), offdiag=np.ones(2), corner=0.5)
    with pytest.raises(ValueError):
        eigenvalues_bisection(op)
    with pytest.raises(ValueError):
        sturm_count(op, 0.0)
    open_op = TridiagonalOperator(diag=np.zeros(3), offdiag=np.ones(2))
    with pytest.raises(ValueError):
        eigenvalues_bisection(open_op, tol=0.0)


def test_oracle_dimension_cap():
    op = TridiagonalOperator(diag=np.zeros(2049), offdiag=np.zeros(2048))
    with pytest.raises(ValueError):
        eigenvalues_dense_oracle(op)


def test_inverse_iteration_eigenpair():
    rng = np.random.default_rng(5)
    op = _random_chain(rng, 40)
    ev = eigenvalues_bisection(op).eigenvalues
    norm = float(np.linalg.norm(op.to_dense()))
    for k in (0, 20, 39):
        pair = eigenpair_inverse_iteration(op, float(ev[k]))
        assert pair.residual <= 1e-8 * norm
        assert pair.value == pytest.approx(float(ev[k]), abs=1e-9 * norm)
        assert np.linalg.norm(pair.vector) == pytest.approx(1.0, abs=1e-12)


def test_inverse_iteration_reproducible():
    rng = np.random.default_rng(9)
    op = _random_chain(rng, 25)
    ev = float(eigenvalues_bisection(op).eigenvalues[10])
    v1 = eigenpair_inverse_iteration(op, ev).vector
    v2 = eigenpair_inverse_iteration(op, ev).vector
    assert np.array_equal(v1, v2)


def test_inverse_iteration_singular_shift():
    # shift exactly on an exact eigenvalue of a decoupled chain: the solver must
    # fall back to its perturbation ladder instead of dying on a zero pivot
    op = TridiagonalOperator(diag=np.zeros(4), offdiag=np.zeros(3))
    pair = eigenpair_inverse_iteration(op, 0.0)
    assert pair.residual == 0.0 and pair.value == 0.0


def test_inverse_iteration_periodic():
    op = TridiagonalOperator(diag=np.zeros(4), offdiag=np.ones(3), corner=1.0)
    ev = eigenvalues_dense_oracle(op).eigenvalues
    pair = eigenpair_inverse_iteration(op, float(ev[-1]))
    assert pair.value == pytest.approx(2.0, abs=1e-9)


def test_spectrum_is_frozen():
    op = TridiagonalOperator(diag=np.zeros(2), offdiag=np.ones(1))
    spec = eigenvalues_bisection(op)
    with pytest.raises(ValueError):
        spec.eigenvalues[0] = 3.0
    with pytest.raises(SolverConvergenceError):
        raise SolverConvergenceError("smoke")
