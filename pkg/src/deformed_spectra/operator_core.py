"""Tridiagonal operator builders for oscillators with quasiperiodic couplings.

All operators are real symmetric tridiagonal matrices, optionally closed into a
ring by a single corner entry.  Frequencies may be given either as plain floats
or as exact rational multiples of pi; the rational path reduces every trig
argument in integer arithmetic first, so couplings that vanish in exact
arithmetic come out as exact floating-point zeros and periodicity relations
hold bitwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_SQRT2 = math.sqrt(2.0)

OPEN = "open"
PERIODIC = "periodic"


@dataclass(frozen=True)
class PiFraction:
    """Exact rational multiple of pi: value = p*pi/q. Stored reduced, q > 0."""

    p: int
    q: int

    def __post_init__(self):
        if self.q == 0:
            raise ValueError("PiFraction denominator must be nonzero")
        p, q = self.p, self.q
        if q < 0:
            p, q = -p, -q
        g = math.gcd(p, q)
        if g > 1:
            p, q = p // g, q // g
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def value(self) -> float:
        return self.p * math.pi / self.q

    def label(self) -> str:
        return f"pi*{self.p}/{self.q}"


def omega_value(omega: float | PiFraction) -> float:
    return omega.value if isinstance(omega, PiFraction) else float(omega)


def omega_label(omega: float | PiFraction) -> str:
    return omega.label() if isinstance(omega, PiFraction) else repr(float(omega))


def _sin_pi_fraction(num: int, den: int) -> float:
    # sin(num*pi/den): reduce num mod 2*den, pull the sign of the second
    # half-period out, then fold onto [0, den/2] so equal magnitudes are
    # computed from identical float arguments (bitwise-stable symmetries).
    r = num % (2 * den)
    sign = 1.0
    if r >= den:
        r -= den
        sign = -1.0
    if r == 0:
        return 0.0
    if 2 * r > den:
        r = den - r
    return sign * math.sin(math.pi * r / den)


def _cos_pi_fraction(num: int, den: int) -> float:
    # cos(num*pi/den) with exact values at multiples of pi/2.
    r = num % (2 * den)
    if r > den:
        r = 2 * den - r
    sign = 1.0
    if 2 * r > den:
        r = den - r
        sign = -1.0
    if 2 * r == den:
        return 0.0
    return sign * math.cos(math.pi * r / den)


def sin_omega_n(omega: float | PiFraction, n: int) -> float:
    """sin(omega*n), exact at rational omega where the true value is 0 or +-1."""
    if isinstance(omega, PiFraction):
        return _sin_pi_fraction(n * omega.p, omega.q)
    return math.sin(omega * n)


def cos_omega_n(omega: float | PiFraction, n: int, shift: float = 0.0, mult: int = 1) -> float:
    """cos(mult*omega*n - shift); rational omega reduces mult*omega*n mod 2pi first."""
    if isinstance(omega, PiFraction):
        num = mult * n * omega.p
        if shift == 0.0:
            return _cos_pi_fraction(num, omega.q)
        angle = (num % (2 * omega.q)) * math.pi / omega.q
        return math.cos(angle - shift)
    return math.cos(mult * omega * n - shift)


@dataclass(frozen=True)
class DeformationParams:
    """Frequency, phase offset and asymmetry weight of the coupling profile.

    nu defaults to pi/2, the canonical member: there the cosine-profile
    operator is exactly 2*sqrt(2) times the sine-profile position operator.
    """

    omega: float | PiFraction
    nu: float = math.pi / 2
    lam: float = 1.0

    def __post_init__(self):
        if not isinstance(self.omega, PiFraction):
            object.__setattr__(self, "omega", float(self.omega))
        if not math.isfinite(omega_value(self.omega)):
            raise ValueError("omega must be finite")
        if not math.isfinite(self.nu):
            raise ValueError("nu must be finite")
        if not (math.isfinite(self.lam) and self.lam >= 0.0):
            raise ValueError("lam must be finite and >= 0")

    def label(self) -> str:
        bits = [f"omega={omega_label(self.omega)}"]
        if self.nu != math.pi / 2:
            bits.append(f"nu={self.nu!r}")
        if self.lam != 1.0:
            bits.append(f"lambda={self.lam!r}")
        return ",".join(bits)


@dataclass(frozen=True)
class Truncation:
    """Finite matrix sizes: number states 0..n_max-1, window states k_min..k_max."""

    n_max: int
    k_min: int = 0
    k_max: int | None = None

    def __post_init__(self):
        if self.n_max < 2:
            raise ValueError("n_max must be >= 2")
        if self.k_max is None:
            object.__setattr__(self, "k_max", self.k_min + self.n_max - 1)
        if self.k_max - self.k_min + 1 < 2:
            raise ValueError("window must hold at least 2 states")

    @property
    def window(self) -> int:
        return self.k_max - self.k_min + 1


@dataclass(frozen=True, eq=False)
class TridiagonalOperator:
    """Real symmetric tridiagonal matrix; corner != None closes it into a ring."""

    diag: np.ndarray
    offdiag: np.ndarray
    corner: float | None = None
    label: str = ""

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=float)
        off = np.asarray(self.offdiag, dtype=float)
        if diag.ndim != 1 or off.ndim != 1 or off.shape[0] != max(diag.shape[0] - 1, 0):
            raise ValueError("offdiag length must be dimension - 1")
        if diag.shape[0] < 1:
            raise ValueError("dimension must be >= 1")
        if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(off))):
            raise ValueError("matrix entries must be finite")
        if self.corner is not None and not math.isfinite(self.corner):
            raise ValueError("corner must be finite")
        diag = diag.copy()
        off = off.copy()
        diag.flags.writeable = False
        off.flags.writeable = False
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", off)

    @property
    def dimension(self) -> int:
        return self.diag.shape[0]

    @property
    def boundary(self) -> str:
        return OPEN if self.corner is None else PERIODIC

    def to_dense(self) -> np.ndarray:
        a = np.diag(self.diag)
        if self.dimension > 1:
            a += np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
            if self.corner is not None:
                a[0, -1] += self.corner
                a[-1, 0] += self.corner
        return a


def deformation_value(params: DeformationParams, n: int) -> float:
    """Coupling profile F(n), the factor the chain builders multiply by sqrt((n+1)/2).

    For lam == 1 this is the signed trigonometric profile sin(omega*(n+1))/sqrt(n+1)
    consumed by build_position_operator; otherwise the asymmetric-weight magnitude
    sqrt(1 + lam^2 + 2*lam*cos(2*omega*(n+1) - 2*nu))/sqrt(n+1) consumed by
    build_general_lambda_operator.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if params.lam == 1.0:
        return sin_omega_n(params.omega, n + 1) / math.sqrt(n + 1)
    rad = 1.0 + params.lam**2 + 2.0 * params.lam * cos_omega_n(
        params.omega, n + 1, shift=2.0 * params.nu, mult=2
    )
    return math.sqrt(max(rad, 0.0)) / math.sqrt(n + 1)


def energy_level(params: DeformationParams, n: int) -> float:
    """Oscillator level E_n = (F(n)^2*(n+1) + F(n-1)^2*n)/2; the n=0 second term vanishes."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if params.lam == 1.0:
        # avoid the sqrt(n+1) round-trip so exact sine zeros stay exact
        s_up = sin_omega_n(params.omega, n + 1)
        s_dn = 0.0 if n == 0 else sin_omega_n(params.omega, n)
        return 0.5 * (s_up * s_up + s_dn * s_dn)
    up = deformation_value(params, n) ** 2 * (n + 1)
    down = 0.0 if n == 0 else deformation_value(params, n - 1) ** 2 * n
    return 0.5 * (up + down)


def _close_ring(boundary: str, coupling_at_nmax: float) -> float | None:
    if boundary == OPEN:
        return None
    if boundary == PERIODIC:
        return coupling_at_nmax
    raise ValueError(f"unknown boundary {boundary!r}")


def build_position_operator(
    params: DeformationParams, trunc: Truncation, boundary: str = OPEN
) -> TridiagonalOperator:
    """Zero-diagonal chain with couplings sin(omega*n)/sqrt(2), n = 1..n_max-1.

    Realizes the canonical (nu = pi/2) member of the coupling family; lam must
    be 1 (use build_general_lambda_operator otherwise).  At rational omega the
    couplings vanish exactly on the period lattice, so the chain decouples.
    """
    if params.lam != 1.0:
        raise ValueError("position operator is defined for lam == 1")
    d = trunc.n_max
    off = np.array([sin_omega_n(params.omega, n) / _SQRT2 for n in range(1, d)])
    corner = _close_ring(boundary, sin_omega_n(params.omega, d) / _SQRT2)
    return TridiagonalOperator(
        np.zeros(d), off, corner, label=f"X[{params.label()},n_max={d},{boundary}]"
    )


def build_xnu_operator(
    params: DeformationParams, trunc: Truncation, boundary: str = OPEN
) -> TridiagonalOperator:
    """Zero-diagonal chain with couplings 2*cos(omega*n - nu), n = 1..n_max-1.

    Entrywise equal to 2*sqrt(2) times build_position_operator when nu = pi/2.
    """
    d = trunc.n_max
    off = np.array([2.0 * cos_omega_n(params.omega, n, shift=params.nu) for n in range(1, d)])
    corner = _close_ring(boundary, 2.0 * cos_omega_n(params.omega, d, shift=params.nu))
    return TridiagonalOperator(
        np.zeros(d), off, corner, label=f"Xnu[{params.label()},nu={params.nu!r},n_max={d},{boundary}]"
    )


def build_harper_operator(
    omega_tilde: float | PiFraction,
    nu_tilde: float,
    trunc: Truncation,
    boundary: str = OPEN,
) -> TridiagonalOperator:
    """Harper chain on the window: diagonal 2*cos(omega_tilde*k - nu_tilde), couplings 1."""
    k0, k1 = trunc.k_min, trunc.k_max
    diag = np.array([2.0 * cos_omega_n(omega_tilde, k, shift=nu_tilde) for k in range(k0, k1 + 1)])
    corner = _close_ring(boundary, 1.0)
    return TridiagonalOperator(
        diag,
        np.ones(k1 - k0),
        corner,
        label=f"Harper[omega_tilde={omega_label(omega_tilde)},nu_tilde={nu_tilde!r},k={k0}..{k1},{boundary}]",
    )


def build_general_lambda_operator(
    params: DeformationParams, trunc: Truncation, boundary: str = OPEN
) -> TridiagonalOperator:
    """Asymmetric-weight chain: couplings sqrt(1 + lam^2 + 2*lam*cos(2*omega*n - 2*nu))/sqrt(2).

    The complex phase of the underlying profile is removed by a diagonal gauge,
    so only the magnitude enters.  lam = 1 reduces to sqrt(2)*|cos(omega*n - nu)|,
    i.e. 1/sqrt(2) times the xnu coupling magnitudes.
    """

    def coupling(n: int) -> float:
        rad = 1.0 + params.lam**2 + 2.0 * params.lam * cos_omega_n(
            params.omega, n, shift=2.0 * params.nu, mult=2
        )
        return math.sqrt(max(rad, 0.0)) / _SQRT2

    d = trunc.n_max
    off = np.array([coupling(n) for n in range(1, d)])
    corner = _close_ring(boundary, coupling(d))
    return TridiagonalOperator(
        np.zeros(d),
        off,
        corner,
        label=f"GeneralLambda[{params.label()},lambda={params.lam!r},n_max={d},{boundary}]",
    )


def build_momentum_operator(
    params: DeformationParams, trunc: Truncation, boundary: str = OPEN
) -> TridiagonalOperator:
    """Real isospectral representative of the conjugate (momentum) operator.

    Conjugating the position chain by the diagonal phase i^N makes the couplings
    imaginary; a second diagonal sign gauge restores a real matrix with the
    alternating pattern (-1)^n sin(omega*n)/sqrt(2).  On the open chain any such
    sign pattern is gauge-equivalent, so the spectrum equals the momentum
    spectrum exactly.  Periodic closure is rejected: the loop product of coupling
    signs is gauge-invariant on a ring, so the open-chain argument does not apply.
    """
    if params.lam != 1.0:
        raise ValueError("momentum operator is defined for lam == 1")
    if boundary != OPEN:
        raise ValueError("momentum operator supports only the open boundary")
    d = trunc.n_max
    off = np.array(
        [((-1.0) ** n) * sin_omega_n(params.omega, n) / _SQRT2 for n in range(1, d)]
    )
    return TridiagonalOperator(
        np.zeros(d), off, None, label=f"Momentum[{params.label()},n_max={d},{boundary}]"
    )
