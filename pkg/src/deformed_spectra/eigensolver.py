"""Symmetric tridiagonal eigensolvers: Sturm-count bisection and a dense Jacobi oracle.

Two independent routes on purpose.  eigenvalues_bisection brackets each
eigenvalue with Sturm-sequence counts (exact zero couplings split the chain
into blocks first); eigenvalues_dense_oracle diagonalizes the full dense
matrix with cyclic Jacobi rotations and is the only route for ring-closed
matrices.  Cross-checking one against the other is part of the test contract,
so neither may be replaced by the other or by a library call.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .operator_core import OPEN, TridiagonalOperator

_EPS = float(np.finfo(float).eps)
_MAX_BISECT_ITER = 200
_MAX_JACOBI_SWEEPS = 60
_MAX_ORACLE_DIM = 2048
_INVIT_SEED = 20230517
_INVIT_MAX_ITER = 40
# deterministic shift perturbations, in units of 1e-12*scale, tried in order
_INVIT_SHIFT_STEPS = (1, -1, 2, -2, 4, -4, 8, -8, 16, -16, 64, -64)


class SolverConvergenceError(RuntimeError):
    """An iterative eigensolver failed to reach its tolerance."""


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Sorted eigenvalues with the tolerance they were computed to."""

    eigenvalues: np.ndarray
    tolerance: float
    source_label: str

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float).copy()
        ev.flags.writeable = False
        object.__setattr__(self, "eigenvalues", ev)

    @property
    def dimension(self) -> int:
        return self.eigenvalues.shape[0]


@dataclass(frozen=True, eq=False)
class EigenPair:
    value: float
    vector: np.ndarray
    residual: float

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=float).copy()
        v.flags.writeable = False
        object.__setattr__(self, "vector", v)


def _require_open(op: TridiagonalOperator, what: str):
    if op.boundary != OPEN:
        raise ValueError(f"{what} handles open chains only; use eigenvalues_dense_oracle")


def _sturm_counts(diag: np.ndarray, off2: np.ndarray, absoff: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Number of eigenvalues strictly below each shift in xs (vectorized over shifts).

    Signed-pivot recursion d_i = (a_i - x) - b_{i-1}^2 / d_{i-1}; a zero pivot is
    replaced by the standard |b|/eps surrogate, and an exactly zero coupling
    restarts the recursion (independent block).
    """
    x = np.asarray(xs, dtype=float)
    count = np.zeros(x.shape, dtype=np.int64)
    d = diag[0] - x
    count += d < 0
    for i in range(1, diag.shape[0]):
        b2 = off2[i - 1]
        if b2 == 0.0:
            d = diag[i] - x
        else:
            zero = d == 0.0
            if zero.any():
                sub = np.where(zero, absoff[i - 1] / _EPS, b2 / np.where(zero, 1.0, d))
            else:
                sub = b2 / d
            d = (diag[i] - x) - sub
        count += d < 0
    return count


def sturm_count(op: TridiagonalOperator, x: float) -> int:
    """Count of eigenvalues of an open chain strictly below x."""
    _require_open(op, "sturm_count")
    if not math.isfinite(x):
        raise ValueError("shift must be finite")
    off2 = op.offdiag * op.offdiag
    return int(_sturm_counts(op.diag, off2, np.abs(op.offdiag), np.array([x]))[0])


def _split_blocks(offdiag: np.ndarray) -> list[tuple[int, int]]:
    # blocks are maximal index ranges not crossing an exactly-zero coupling
    cuts = np.flatnonzero(offdiag == 0.0)
    starts = np.concatenate(([0], cuts + 1))
    ends = np.concatenate((cuts + 1, [offdiag.shape[0] + 1]))
    return list(zip(starts, ends))


def _bisect_block(diag: np.ndarray, off: np.ndarray, tol: float) -> np.ndarray:
    m = diag.shape[0]
    if m == 1:
        return diag.copy()
    off2 = off * off
    absoff = np.abs(off)
    radius = np.zeros(m)
    radius[:-1] += absoff
    radius[1:] += absoff
    lo0 = float(np.min(diag - radius))
    hi0 = float(np.max(diag + radius))
    hi0 += 1e-9 * (hi0 - lo0 + 1.0)  # strictly above the top eigenvalue
    lo = np.full(m, lo0)
    hi = np.full(m, hi0)
    ranks = np.arange(m)
    for _ in range(_MAX_BISECT_ITER):
        if float(np.max(hi - lo)) <= tol:
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        above = _sturm_counts(diag, off2, absoff, mid) > ranks
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    worst = int(np.argmax(hi - lo))
    raise SolverConvergenceError(
        f"bisection stalled at eigenvalue index {worst}: width {float(hi[worst] - lo[worst]):.3e}"
    )


def eigenvalues_bisection(op: TridiagonalOperator, tol: float = 1e-12) -> Spectrum:
    """All eigenvalues of an open chain, each bracketed to interval width <= tol."""
    _require_open(op, "eigenvalues_bisection")
    if not (math.isfinite(tol) and tol > 0.0):
        raise ValueError("tol must be positive and finite")
    vals = [
        _bisect_block(op.diag[a:b], op.offdiag[a : b - 1], tol) for a, b in _split_blocks(op.offdiag)
    ]
    ev = np.sort(np.concatenate(vals))
    return Spectrum(ev, tolerance=tol, source_label=f"bisection({op.label})")


def _round_robin_rounds(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    # circle-method schedule: n-1 rounds of disjoint index pairs covering all pairs
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps), np.array(qs)))
        players = [players[0], players[m - 1]] + players[1 : m - 1]
    return rounds


def _offdiag_norm(a: np.ndarray) -> float:
    b = a.copy()
    np.fill_diagonal(b, 0.0)
    return float(np.linalg.norm(b))


def eigenvalues_dense_oracle(op: TridiagonalOperator) -> Spectrum:
    """Cyclic Jacobi diagonalization of the dense matrix (works for rings too).

    Rotations are applied in the round-robin parallel ordering, a full sweep per
    pass, until the off-diagonal Frobenius norm falls below 1e-12 times the
    matrix norm.  Dimension is capped: this is the expensive cross-check route.
    """
    n = op.dimension
    if n > _MAX_ORACLE_DIM:
        raise ValueError(f"dense oracle capped at dimension {_MAX_ORACLE_DIM}")
    a = op.to_dense()
    norm = float(np.linalg.norm(a))
    if norm == 0.0:
        return Spectrum(np.zeros(n), tolerance=0.0, source_label=f"jacobi({op.label})")
    threshold = 1e-12 * norm
    rounds = _round_robin_rounds(n)
    for _ in range(_MAX_JACOBI_SWEEPS):
        if _offdiag_norm(a) <= threshold:
            break
        for pp, qq in rounds:
            apq = a[pp, qq]
            nz = apq != 0.0
            if not nz.any():
                continue
            p, q, apq = pp[nz], qq[nz], apq[nz]
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            t = np.where(
                theta == 0.0, 1.0, np.sign(theta) / (np.abs(theta) + np.hypot(1.0, theta))
            )
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rp - s[:, None] * rq
            a[q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = c[None, :] * cp - s[None, :] * cq
            a[:, q] = s[None, :] * cp + c[None, :] * cq
    else:
        raise SolverConvergenceError(
            f"jacobi sweeps exhausted: off-norm {_offdiag_norm(a):.3e} > {threshold:.3e}"
        )
    return Spectrum(np.sort(np.diag(a)), tolerance=threshold, source_label=f"jacobi({op.label})")


def solve_spectrum(op: TridiagonalOperator, tol: float = 1e-12) -> Spectrum:
    """Route by boundary: bisection for open chains, the dense oracle for rings."""
    if op.boundary == OPEN:
        return eigenvalues_bisection(op, tol)
    return eigenvalues_dense_oracle(op)


def _apply(op: TridiagonalOperator, v: np.ndarray) -> np.ndarray:
    out = op.diag * v
    out[:-1] += op.offdiag * v[1:]
    out[1:] += op.offdiag * v[:-1]
    if op.corner is not None:
        out[0] += op.corner * v[-1]
        out[-1] += op.corner * v[0]
    return out


def _tridiag_solve_shifted(
    diag: np.ndarray, off: np.ndarray, sigma: float, rhs: np.ndarray
) -> np.ndarray:
    """Solve (T - sigma*I) x = rhs by LU with partial pivoting (one fill-in band)."""
    n = diag.shape[0]
    b = diag - sigma
    c = np.zeros(n)
    d = np.zeros(n)
    if n > 1:
        c[: n - 1] = off
    x = np.array(rhs, dtype=float)
    for i in range(n - 1):
        s = off[i]
        if abs(s) > abs(b[i]):
            bi, ci, di = b[i], c[i], d[i]
            b[i], c[i] = s, b[i + 1]
            d[i] = c[i + 1] if i + 2 < n else 0.0
            xi = x[i]
            x[i] = x[i + 1]
            m = bi / b[i]
            x[i + 1] = xi - m * x[i]
            b[i + 1] = ci - m * c[i]
            if i + 2 < n:
                c[i + 1] = di - m * d[i]
        else:
            if b[i] == 0.0:
                raise ZeroDivisionError("zero pivot")
            m = s / b[i]
            b[i + 1] -= m * c[i]
            if i + 2 < n:
                c[i + 1] -= m * d[i]
            x[i + 1] -= m * x[i]
    if b[n - 1] == 0.0:
        raise ZeroDivisionError("zero pivot")
    x[n - 1] /= b[n - 1]
    if n > 1:
        x[n - 2] = (x[n - 2] - c[n - 2] * x[n - 1]) / b[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (x[i] - c[i] * x[i + 1] - d[i] * x[i + 2]) / b[i]
    return x


def eigenpair_inverse_iteration(op: TridiagonalOperator, value: float) -> EigenPair:
    """Eigenvector for a known eigenvalue estimate by shifted inverse iteration.

    The start vector is drawn from a fixed-seed generator, so results are
    reproducible.  If the shifted solve breaks down (exactly singular), the
    shift is nudged through the fixed sequence value + k*1e-12*scale with
    k in (1, -1, 2, -2, 4, ...) until a solve succeeds.
    """
    if not math.isfinite(value):
        raise ValueError("value must be finite")
    n = op.dimension
    norm = float(np.linalg.norm(op.to_dense())) or 1.0
    rng = np.random.default_rng(_INVIT_SEED)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    dense = op.to_dense() if op.corner is not None else None
    shifts = [value] + [value + k * 1e-12 * max(1.0, abs(value), norm) for k in _INVIT_SHIFT_STEPS]
    shift_idx = 0
    for _ in range(_INVIT_MAX_ITER):
        y = None
        while y is None:
            sigma = shifts[shift_idx]
            try:
                if dense is None:
                    y = _tridiag_solve_shifted(op.diag, op.offdiag, sigma, v)
                else:
                    y = np.linalg.solve(dense - sigma * np.eye(n), v)
                if not np.all(np.isfinite(y)) or float(np.linalg.norm(y)) == 0.0:
                    y = None
                    raise ZeroDivisionError
            except (ZeroDivisionError, np.linalg.LinAlgError):
                shift_idx += 1
                if shift_idx >= len(shifts):
                    raise SolverConvergenceError(
                        f"inverse iteration: all shift perturbations near {value!r} are singular"
                    ) from None
        v = y / np.linalg.norm(y)
        rayleigh = float(v @ _apply(op, v))
        residual = float(np.linalg.norm(_apply(op, v) - rayleigh * v))
        if residual <= 1e-8 * norm:
            return EigenPair(value=rayleigh, vector=v, residual=residual)
    raise SolverConvergenceError(
        f"inverse iteration did not converge near {value!r}: residual {residual:.3e}"
    )
