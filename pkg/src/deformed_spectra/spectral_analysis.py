"""Band structure, frequency sweeps, edge-state diagnostics and fractal statistics.

Everything here consumes Spectrum objects (or produces them through the
solvers) and is deterministic: sweeps fan out over a frequency grid with an
ordered result buffer, so the output bytes do not depend on the thread count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .eigensolver import (
    SolverConvergenceError,
    Spectrum,
    eigenpair_inverse_iteration,
    solve_spectrum,
)
from .operator_core import (
    OPEN,
    PERIODIC,
    DeformationParams,
    PiFraction,
    TridiagonalOperator,
    Truncation,
)

_EPS = float(np.finfo(float).eps)

OperatorBuilder = Callable[[DeformationParams, Truncation, str], TridiagonalOperator]


@dataclass(frozen=True)
class BandSet:
    """Disjoint ascending bands plus eigenvalues reclassified as in-gap."""

    bands: tuple[tuple[float, float], ...]
    in_gap: tuple[tuple[float, int], ...]
    gap_threshold: float
    band_counts: tuple[int, ...] = ()
    note: str = ""

    def __post_init__(self):
        prev_hi = -math.inf
        for lo, hi in self.bands:
            if not (lo <= hi and lo > prev_hi):
                raise ValueError("bands must be disjoint and ascending")
            prev_hi = hi


def detect_bands(
    spec: Spectrum, gap_threshold: float | None = None, q_hint: int | None = None
) -> BandSet:
    """Greedy clustering of the sorted spectrum into bands.

    A new band starts wherever consecutive eigenvalues are separated by more
    than the threshold.  With no explicit threshold, it is set to 8x the median
    spacing inside the densest contiguous quartile of the spectrum (floored at
    64*eps*span), which keeps genuinely split bands apart without slicing the
    interior of a band.  When q_hint is given (rational frequency p*pi/q),
    clusters holding fewer than ceil(dim/(4*q_hint)) eigenvalues that sit
    strictly between two larger clusters are reclassified as in-gap edge
    states.  Note for even q_hint: the two central bands of a cosine chain
    touch at zero and merge under any spacing threshold, so such runs report
    q_hint - 1 clusters; the note field records this.
    """
    ev = spec.eigenvalues
    m = ev.shape[0]
    span = float(ev[-1] - ev[0]) if m > 1 else 0.0
    if gap_threshold is None:
        if m > 1:
            qsize = max(2, m // 4)
            best_start, best_span = 0, math.inf
            for s in range(0, m - qsize + 1, max(1, qsize // 2)):
                w = float(ev[s + qsize - 1] - ev[s])
                if w < best_span:
                    best_start, best_span = s, w
            med = float(np.median(np.diff(ev[best_start : best_start + qsize])))
            gap_threshold = 8.0 * med
        else:
            gap_threshold = 0.0
        gap_threshold = max(gap_threshold, 64.0 * _EPS * max(1.0, span))
    elif not (math.isfinite(gap_threshold) and gap_threshold > 0.0):
        raise ValueError("gap_threshold must be positive")

    clusters: list[tuple[int, int]] = []
    start = 0
    for i in range(1, m):
        if ev[i] - ev[i - 1] > gap_threshold:
            clusters.append((start, i - 1))
            start = i
    clusters.append((start, m - 1))

    in_gap: list[tuple[float, int]] = []
    note = ""
    if q_hint:
        small = math.ceil(m / (4 * q_hint))
        sizes = [b - a + 1 for a, b in clusters]
        big = [i for i, sz in enumerate(sizes) if sz >= small]
        if big:
            kept = []
            for i, c in enumerate(clusters):
                if sizes[i] < small and min(big) < i < max(big):
                    vals, counts = np.unique(ev[c[0] : c[1] + 1], return_counts=True)
                    in_gap.extend((float(v), int(c_)) for v, c_ in zip(vals, counts))
                else:
                    kept.append(c)
            clusters = kept
        if q_hint % 2 == 0 and len(clusters) != q_hint:
            note = (
                f"even q_hint={q_hint}: central bands touch at 0 and merge, "
                f"{len(clusters)} clusters reported"
            )
    return BandSet(
        bands=tuple((float(ev[a]), float(ev[b])) for a, b in clusters),
        in_gap=tuple(in_gap),
        gap_threshold=float(gap_threshold),
        band_counts=tuple(b - a + 1 for a, b in clusters),
        note=note,
    )


def total_bandwidth(bands: BandSet) -> float:
    """Sum of band lengths: the Lebesgue-measure proxy for the spectrum."""
    return float(sum(hi - lo for lo, hi in bands.bands))


def band_gap_depth(x: float, bands: BandSet) -> float:
    """Distance from x to the nearest band (0 inside a band)."""
    depth = math.inf
    for lo, hi in bands.bands:
        if lo <= x <= hi:
            return 0.0
        depth = min(depth, abs(x - lo), abs(x - hi))
    return depth


@dataclass(frozen=True, eq=False)
class ButterflyResult:
    """All eigenvalues over a rational frequency grid omega = p*pi/q_grid."""

    grid: tuple[tuple[int, int], ...]
    row_index: np.ndarray
    row_eigenvalue: np.ndarray
    dimension: int
    trunc_label: str
    boundary: str

    def __post_init__(self):
        idx = np.asarray(self.row_index, dtype=np.int64).copy()
        ev = np.asarray(self.row_eigenvalue, dtype=float).copy()
        if idx.shape != ev.shape:
            raise ValueError("row arrays must align")
        counts = np.bincount(idx, minlength=len(self.grid))
        if idx.size and (idx.min() < 0 or idx.max() >= len(self.grid)):
            raise ValueError("row index out of range")
        if np.any(counts != self.dimension):
            raise ValueError("each grid point must carry exactly `dimension` eigenvalues")
        idx.flags.writeable = False
        ev.flags.writeable = False
        object.__setattr__(self, "row_index", idx)
        object.__setattr__(self, "row_eigenvalue", ev)

    def rows(self):
        return zip(self.row_index.tolist(), self.row_eigenvalue.tolist())

    def eigenvalues_at(self, grid_index: int) -> np.ndarray:
        return self.row_eigenvalue[self.row_index == grid_index]


def butterfly_sweep(
    q_grid: int,
    builder: OperatorBuilder,
    trunc: Truncation,
    boundary: str = OPEN,
    nu: float = math.pi / 2,
    lam: float = 1.0,
    threads: int | None = None,
) -> ButterflyResult:
    """Solve the chosen operator at omega = p*pi/q_grid for p = 1..q_grid.

    Work fans out over a thread pool (threads=None or <=1 runs serially); the
    results are aggregated in grid order, so output is identical for any
    thread count.  Solver failures are re-raised annotated with the grid p.
    """
    if q_grid < 2:
        raise ValueError("q_grid must be >= 2")

    def one(p: int) -> np.ndarray:
        params = DeformationParams(omega=PiFraction(p, q_grid), nu=nu, lam=lam)
        op = builder(params, trunc, boundary)
        try:
            return solve_spectrum(op).eigenvalues
        except SolverConvergenceError as exc:
            raise SolverConvergenceError(f"grid point p={p}/{q_grid}: {exc}") from exc

    ps = list(range(1, q_grid + 1))
    if threads is None or threads <= 1:
        spectra = [one(p) for p in ps]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            spectra = list(pool.map(one, ps))
    dim = spectra[0].shape[0]
    return ButterflyResult(
        grid=tuple((p, q_grid) for p in ps),
        row_index=np.repeat(np.arange(len(ps)), [s.shape[0] for s in spectra]),
        row_eigenvalue=np.concatenate(spectra),
        dimension=dim,
        trunc_label=f"n_max={trunc.n_max}",
        boundary=boundary,
    )


class EdgeSuspect(NamedTuple):
    omega_index: int
    eigenvalue: float
    localization_weight: float
    moved_under_resize: bool
    moved_under_periodic: bool


@dataclass(frozen=True)
class EdgeStateReport:
    """Gap eigenvalues that move under resize, with boundary-condition response."""

    suspects: tuple[EdgeSuspect, ...]
    n_max_a: int
    n_max_b: int
    q_grid: int
    params_label: str
    suspect_mean_displacement: float
    bulk_median_displacement: float

    def __post_init__(self):
        for s in self.suspects:
            if not (0.0 <= s.localization_weight <= 1.0):
                raise ValueError("localization_weight must lie in [0, 1]")

    def as_dict(self) -> dict:
        return {
            "suspects": [list(s) for s in self.suspects],
            "n_max_a": self.n_max_a,
            "n_max_b": self.n_max_b,
            "q_grid": self.q_grid,
            "params_label": self.params_label,
            "suspect_mean_displacement": self.suspect_mean_displacement,
            "bulk_median_displacement": self.bulk_median_displacement,
        }


def _nearest_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # distance from each entry of sorted a to its nearest neighbour in sorted b
    idx = np.clip(np.searchsorted(b, a), 1, b.shape[0] - 1)
    return np.minimum(np.abs(a - b[idx - 1]), np.abs(a - b[idx]))


def edge_state_scan(
    builder: OperatorBuilder,
    params: DeformationParams,
    n_max_a: int,
    n_max_b: int,
    q_grid: int,
    threads: int | None = None,
) -> EdgeStateReport:
    """Compare two truncation sizes over the frequency grid and flag edge states.

    A suspect at size a must (i) sit in a band gap deeper than the matching
    tolerance and (ii) have no size-b eigenvalue nearby, where the tolerance is
    the larger of the bulk drift (median nearest-neighbour displacement between
    the two sizes) and a rounding floor.  Each suspect gets a localization
    weight (tail weight of its eigenvector over the last max(5, n_max/40)
    sites) and a periodic-boundary verdict: re-solving on the ring removes the
    open ends, and the suspect counts as moved when its gap depth shrinks by
    more than the bulk open-vs-ring drift.  The omega field of `params` is
    ignored; each grid point uses omega = p*pi/q_grid.
    """
    if n_max_a == n_max_b:
        raise ValueError("the two sizes must differ")
    if q_grid < 2:
        raise ValueError("q_grid must be >= 2")
    trunc_a, trunc_b = Truncation(n_max=n_max_a), Truncation(n_max=n_max_b)
    tail = max(5, n_max_a // 40)

    def one(p: int):
        dp = DeformationParams(omega=PiFraction(p, q_grid), nu=params.nu, lam=params.lam)
        op_a = builder(dp, trunc_a, OPEN)
        spec_a = solve_spectrum(op_a)
        ev_a = spec_a.eigenvalues
        ev_b = solve_spectrum(builder(dp, trunc_b, OPEN)).eigenvalues
        ev_ring = solve_spectrum(builder(dp, trunc_a, PERIODIC)).eigenvalues
        bands = detect_bands(spec_a, q_hint=dp.omega.q)
        span = float(ev_a[-1] - ev_a[0])
        floor = 1e-12 * max(1.0, span)
        drift = max(float(np.median(_nearest_distances(ev_a, ev_b))), floor)
        ring_gap = np.abs(ev_a - ev_ring)
        point_bulk = max(float(np.median(ring_gap)), floor)
        found = []
        displacements = []
        for i, x in enumerate(ev_a):
            depth = band_gap_depth(float(x), bands)
            if depth <= drift or _nearest_distances(np.array([x]), ev_b)[0] <= drift:
                continue
            pair = eigenpair_inverse_iteration(op_a, float(x))
            weight = float(np.sum(pair.vector[-tail:] ** 2))
            j = int(np.argmin(np.abs(ev_ring - x)))
            moved = depth - band_gap_depth(float(ev_ring[j]), bands)
            displacements.append(moved)
            found.append(
                EdgeSuspect(
                    omega_index=p,
                    eigenvalue=float(x),
                    localization_weight=min(max(weight, 0.0), 1.0),
                    moved_under_resize=True,
                    moved_under_periodic=bool(moved > point_bulk),
                )
            )
        return found, displacements, ring_gap

    ps = list(range(1, q_grid + 1))
    if threads is None or threads <= 1:
        results = [one(p) for p in ps]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, ps))

    suspects: list[EdgeSuspect] = []
    pool_disp: list[float] = []
    pool_bulk: list[np.ndarray] = []
    for found, displacements, ring_gap in results:
        suspects.extend(found)
        pool_disp.extend(displacements)
        pool_bulk.append(ring_gap)
    bulk_median = float(np.median(np.concatenate(pool_bulk)))
    mean_disp = float(np.mean(pool_disp)) if pool_disp else 0.0
    return EdgeStateReport(
        suspects=tuple(suspects),
        n_max_a=n_max_a,
        n_max_b=n_max_b,
        q_grid=q_grid,
        params_label=params.label(),
        suspect_mean_displacement=mean_disp,
        bulk_median_displacement=bulk_median,
    )


@dataclass(frozen=True)
class BoxCountEstimate:
    """Least-squares box-counting slope; degenerate means the fit carried no signal."""

    dimension: float
    scales: tuple[float, ...]
    counts: tuple[int, ...]
    degenerate: bool


def box_counting_dimension(
    spec: Spectrum | np.ndarray, scales: "list[float]"
) -> BoxCountEstimate:
    """Box-counting estimate of the spectral point set over the given scales.

    Boxes of each scale are laid from the lower end of the spectral span; the
    dimension is the least-squares slope of log(count) against log(1/scale).
    Exploratory output only: a finite spectrum always has true dimension 0, so
    the estimate describes the resolution window, not a limit.
    """
    pts = spec.eigenvalues if isinstance(spec, Spectrum) else np.sort(np.asarray(spec, dtype=float))
    scl = [float(s) for s in scales]
    if len(scl) < 3:
        raise ValueError("need at least 3 scales")
    if any(not (math.isfinite(s) and s > 0) for s in scl):
        raise ValueError("scales must be positive")
    if max(scl) / min(scl) < 100.0:
        raise ValueError("scales must span at least two decades")
    lo, hi = float(pts[0]), float(pts[-1])
    counts = []
    for s in scl:
        if hi == lo:
            counts.append(1)
            continue
        nb = int(math.ceil((hi - lo) / s))
        idx = np.minimum(((pts - lo) / s).astype(np.int64), nb - 1)
        counts.append(int(np.unique(idx).shape[0]))
    degenerate = len(set(counts)) == 1
    if degenerate:
        slope = 0.0
    else:
        logs = np.log(1.0 / np.asarray(scl))
        design = np.column_stack([logs, np.ones_like(logs)])
        slope = float(np.linalg.lstsq(design, np.log(counts), rcond=None)[0][0])
    return BoxCountEstimate(
        dimension=slope, scales=tuple(scl), counts=tuple(counts), degenerate=degenerate
    )
