"""Command-line surface and file emission.

Subcommands cover the spectrum/butterfly/band/edge-state workflows plus the
unitary-map verification reports.  Output is plain files: CSV tables, JSON
reports, SVG scatter plots, and a manifest with content hashes.  Everything
except the manifest's wall time is byte-deterministic for a fixed config.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from . import __version__
from .eigensolver import SolverConvergenceError, Spectrum, solve_spectrum
from .operator_core import (
    OPEN,
    PERIODIC,
    DeformationParams,
    PiFraction,
    Truncation,
    build_general_lambda_operator,
    build_harper_operator,
    build_momentum_operator,
    build_position_operator,
    build_xnu_operator,
    energy_level,
)
from .spectral_analysis import (
    ButterflyResult,
    butterfly_sweep,
    detect_bands,
    edge_state_scan,
    total_bandwidth,
)
from .unitary_map import conjugate_to_harper, verify_translation_relations

THREADS_ENV_VAR = "DEFORMED_SPECTRA_THREADS"

COMMANDS = ("spectrum", "butterfly", "bands", "edge-states", "verify-map", "energy-levels")
OPERATORS = ("X", "Xnu", "Harper", "GeneralLambda", "Momentum")
FORMATS = ("csv", "json", "svg")

OmegaSpec = Union[tuple, float]


@dataclass(frozen=True)
class RunConfig:
    command: str
    operator: str = "X"
    omega_spec: OmegaSpec = (1, 2)
    nu: float = math.pi / 2
    lam: float = 1.0
    n_max: int = 200
    q_grid: int = 200
    boundary: str = OPEN
    output_dir: str = "."
    formats: frozenset = frozenset()
    threads: Optional[int] = None
    n_max_b: Optional[int] = None  # edge-states second chain length, defaults n_max + 10
    count: int = 10  # energy-levels table length

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.operator not in OPERATORS:
            raise ValueError(f"unknown operator {self.operator!r}")
        if isinstance(self.omega_spec, tuple):
            p, q = self.omega_spec
            if q <= 0:
                raise ValueError("rational frequency needs a positive denominator")
        elif not math.isfinite(self.omega_spec):
            raise ValueError("frequency must be finite")
        if self.n_max < 2:
            raise ValueError("n_max must be at least 2")
        if self.q_grid < 1:
            raise ValueError("q_grid must be positive")
        if self.boundary not in (OPEN, PERIODIC):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        bad = set(self.formats) - set(FORMATS)
        if bad:
            raise ValueError(f"unknown formats: {sorted(bad)}")
        if self.threads is not None and self.threads < 1:
            raise ValueError("threads must be positive")
        if self.n_max_b is not None and self.n_max_b <= self.n_max:
            raise ValueError("the resized chain must be longer than the first")
        if self.count < 1:
            raise ValueError("count must be positive")

    def omega_value(self):
        if isinstance(self.omega_spec, tuple):
            return PiFraction(*self.omega_spec)
        return float(self.omega_spec)

    def as_dict(self) -> dict:
        omega = (
            list(self.omega_spec) if isinstance(self.omega_spec, tuple) else self.omega_spec
        )
        return {
            "command": self.command,
            "operator": self.operator,
            "omega_spec": omega,
            "nu": self.nu,
            "lambda": self.lam,
            "n_max": self.n_max,
            "q_grid": self.q_grid,
            "boundary": self.boundary,
            "output_dir": self.output_dir,
            "formats": sorted(self.formats),
            "threads": self.threads,
            "n_max_b": self.n_max_b,
            "count": self.count,
        }


# natural artifact formats per command; requests outside these are ignored
_SUPPORTED = {
    "spectrum": {"csv", "json"},
    "butterfly": {"csv", "svg"},
    "bands": {"json"},
    "edge-states": {"json"},
    "verify-map": {"json"},
    "energy-levels": {"csv"},
}

_DEFAULT_FORMATS = {
    "spectrum": {"csv"},
    "butterfly": {"csv", "svg"},
    "bands": {"json"},
    "edge-states": {"json"},
    "verify-map": {"json"},
    "energy-levels": {"csv"},
}

_DEFAULT_Q_GRID = {"edge-states": 17}


def format_float(x: float) -> str:
    # shortest repr that round-trips; +0.0 folds the sign of a negative zero
    return repr(float(x) + 0.0)


def write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(
                ",".join(
                    format_float(c) if isinstance(c, float) else str(c) for c in row
                )
                + "\n"
            )


def write_json_report(path: Path, payload: dict) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


@dataclass(frozen=True)
class PlotStyle:
    width: int = 900
    height: int = 620
    margin_left: int = 64
    margin_right: int = 16
    margin_top: int = 16
    margin_bottom: int = 44
    point_radius: float = 0.8
    point_color: str = "#1f3b73"


def write_svg_scatter(
    path: Path,
    x,
    y,
    style: PlotStyle = PlotStyle(),
    x_label: str = "omega / pi",
    y_label: str = "eigenvalue",
) -> None:
    """Scatter plot as standalone SVG 1.1; x axis always spans [0, 1]."""
    xs = [float(v) for v in x]
    ys = [float(v) for v in y]
    if len(xs) != len(ys):
        raise ValueError("x and y lengths differ")
    w, h = style.width, style.height
    x0, x1 = style.margin_left, w - style.margin_right
    y0, y1 = h - style.margin_bottom, style.margin_top  # svg y grows downward
    if ys:
        lo, hi = min(ys), max(ys)
        pad = 0.05 * (hi - lo) if hi > lo else 1.0
        lo, hi = lo - pad, hi + pad
    else:
        lo, hi = -1.0, 1.0

    def px(v: float) -> str:
        return "%.2f" % (x0 + v * (x1 - x0))

    def py(v: float) -> str:
        return "%.2f" % (y0 + (v - lo) * (y1 - y0) / (hi - lo))

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>\n',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{w}" height="{h}" viewBox="0 0 {w} {h}">\n',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>\n',
        f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" '
        f'fill="none" stroke="black" stroke-width="1"/>\n',
    ]
    for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
        tx = px(tick)
        parts.append(
            f'<line x1="{tx}" y1="{y0}" x2="{tx}" y2="{y0 + 5}" stroke="black"/>\n'
            f'<text x="{tx}" y="{y0 + 18}" font-size="11" text-anchor="middle">'
            f"{tick:g}</text>\n"
        )
    for tick in sorted({lo, 0.0, hi} if lo < 0.0 < hi else {lo, hi}):
        ty = py(tick)
        parts.append(
            f'<line x1="{x0 - 5}" y1="{ty}" x2="{x0}" y2="{ty}" stroke="black"/>\n'
            f'<text x="{x0 - 8}" y="{ty}" font-size="11" text-anchor="end" '
            f'dominant-baseline="middle">{tick:.3g}</text>\n'
        )
    parts.append(
        f'<text x="{(x0 + x1) // 2}" y="{h - 8}" font-size="13" '
        f'text-anchor="middle">{x_label}</text>\n'
    )
    parts.append(
        f'<text x="14" y="{(y0 + y1) // 2}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 14 {(y0 + y1) // 2})">{y_label}</text>\n'
    )
    parts.append(f'<g fill="{style.point_color}">\n')
    r = "%.2f" % style.point_radius
    for vx, vy in zip(xs, ys):
        parts.append(f'<circle cx="{px(vx)}" cy="{py(vy)}" r="{r}"/>\n')
    parts.append("</g>\n</svg>\n")
    with open(path, "w", newline="") as fh:
        fh.write("".join(parts))


def _family_builder(operator: str):
    if operator == "Harper":
        # the given frequency is used as the cosine frequency itself
        def harper(params, trunc, boundary):
            return build_harper_operator(params.omega, params.nu, trunc, boundary)

        return harper
    return {
        "X": build_position_operator,
        "Xnu": build_xnu_operator,
        "GeneralLambda": build_general_lambda_operator,
        "Momentum": build_momentum_operator,
    }[operator]


def _make_operator(cfg: RunConfig):
    params = DeformationParams(omega=cfg.omega_value(), nu=cfg.nu, lam=cfg.lam)
    builder = _family_builder(cfg.operator)
    return builder(params, Truncation(n_max=cfg.n_max), cfg.boundary)


def _spectrum_payload(spec: Spectrum) -> dict:
    return {
        "eigenvalues": [float(v) for v in spec.eigenvalues],
        "dimension": spec.dimension,
        "tolerance": spec.tolerance,
        "source_label": spec.source_label,
    }


def _run_spectrum(cfg: RunConfig, out: Path) -> list:
    spec = solve_spectrum(_make_operator(cfg))
    files = []
    if "csv" in cfg.formats:
        path = out / "spectrum.csv"
        write_csv(
            path,
            ("index", "eigenvalue"),
            ((i, float(v)) for i, v in enumerate(spec.eigenvalues)),
        )
        files.append(path)
    if "json" in cfg.formats:
        path = out / "spectrum.json"
        write_json_report(path, _spectrum_payload(spec))
        files.append(path)
    return files


def _run_butterfly(cfg: RunConfig, out: Path) -> list:
    result = butterfly_sweep(
        cfg.q_grid,
        _family_builder(cfg.operator),
        Truncation(n_max=cfg.n_max),
        boundary=cfg.boundary,
        nu=cfg.nu,
        lam=cfg.lam,
        threads=cfg.threads,
    )
    files = []
    if "csv" in cfg.formats:
        path = out / "butterfly.csv"
        write_csv(path, ("p", "q", "omega_over_pi", "eigenvalue_index", "eigenvalue"), _butterfly_rows(result))
        files.append(path)
    if "svg" in cfg.formats:
        path = out / "butterfly.svg"
        q = cfg.q_grid
        xs = [(result.grid[i][0]) / q for i in result.row_index]
        write_svg_scatter(path, xs, result.row_eigenvalue)
        files.append(path)
    return files


def _butterfly_rows(result: ButterflyResult):
    dim = result.dimension
    for gi, (p, q) in enumerate(result.grid):
        ev = result.eigenvalues_at(gi)
        for j in range(dim):
            yield (p, q, p / q, j, float(ev[j]))


def _run_bands(cfg: RunConfig, out: Path) -> list:
    omega = cfg.omega_value()
    q_hint = omega.q if isinstance(omega, PiFraction) else None
    bands = detect_bands(solve_spectrum(_make_operator(cfg)), q_hint=q_hint)
    payload = {
        "bands": [[lo, hi] for lo, hi in bands.bands],
        "band_counts": list(bands.band_counts),
        "in_gap": [[v, m] for v, m in bands.in_gap],
        "gap_threshold": bands.gap_threshold,
        "total_bandwidth": total_bandwidth(bands),
        "note": bands.note,
    }
    files = []
    if "json" in cfg.formats:
        path = out / "bands.json"
        write_json_report(path, payload)
        files.append(path)
    return files


def _run_edge_states(cfg: RunConfig, out: Path) -> list:
    n_max_b = cfg.n_max_b if cfg.n_max_b is not None else cfg.n_max + 10
    params = DeformationParams(omega=cfg.omega_value(), nu=cfg.nu, lam=cfg.lam)
    report = edge_state_scan(
        _family_builder(cfg.operator),
        params,
        n_max_a=cfg.n_max,
        n_max_b=n_max_b,
        q_grid=cfg.q_grid,
        threads=cfg.threads,
    )
    files = []
    if "json" in cfg.formats:
        path = out / "edge_states.json"
        write_json_report(path, report.as_dict())
        files.append(path)
    return files


def _run_verify_map(cfg: RunConfig, out: Path) -> list:
    omega = cfg.omega_value()
    window = 4 * omega.q if isinstance(omega, PiFraction) else 20
    trunc = Truncation(n_max=cfg.n_max, k_min=0, k_max=window - 1)
    translation = verify_translation_relations(omega, cfg.nu, trunc)
    conjugation = conjugate_to_harper(omega, cfg.nu, trunc)
    files = []
    if "json" in cfg.formats:
        path = out / "verify_map.json"
        write_json_report(
            path,
            {"translation": translation.as_dict(), "conjugation": conjugation.as_dict()},
        )
        files.append(path)
    return files


def _run_energy_levels(cfg: RunConfig, out: Path) -> list:
    params = DeformationParams(omega=cfg.omega_value(), nu=cfg.nu, lam=cfg.lam)
    files = []
    if "csv" in cfg.formats:
        path = out / "energies.csv"
        write_csv(
            path,
            ("index", "energy"),
            ((n, energy_level(params, n)) for n in range(cfg.count)),
        )
        files.append(path)
    return files


_RUNNERS = {
    "spectrum": _run_spectrum,
    "butterfly": _run_butterfly,
    "bands": _run_bands,
    "edge-states": _run_edge_states,
    "verify-map": _run_verify_map,
    "energy-levels": _run_energy_levels,
}


def run(cfg: RunConfig) -> list:
    """Execute one command, write its files plus manifest.json, return paths."""
    start = time.perf_counter()
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = _RUNNERS[cfg.command](cfg, out)
    hashes = {}
    for path in files:
        hashes[path.name] = hashlib.sha256(path.read_bytes()).hexdigest()
    manifest = {
        "config": cfg.as_dict(),
        "version": __version__,
        "wall_time_seconds": time.perf_counter() - start,
        "files": hashes,
    }
    manifest_path = out / "manifest.json"
    write_json_report(manifest_path, manifest)
    return files + [manifest_path]


def _parse_fraction(text: str):
    try:
        p_str, q_str = text.split("/")
        return (int(p_str), int(q_str))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a fraction like 1/2, got {text!r}")


def _parse_formats(text: str):
    return frozenset(tok.strip() for tok in text.split(",") if tok.strip())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="JSON config file; flags override it")
    common.add_argument("--operator", choices=OPERATORS, default=None)
    common.add_argument(
        "--omega-pi", type=_parse_fraction, default=None, metavar="P/Q",
        help="frequency as an exact rational multiple of pi",
    )
    common.add_argument("--omega", type=float, default=None, help="frequency as a plain float")
    common.add_argument("--nu", type=float, default=None)
    common.add_argument("--lambda", dest="lam", type=float, default=None)
    common.add_argument("--n-max", type=int, default=None)
    common.add_argument("--q-grid", type=int, default=None)
    common.add_argument("--boundary", choices=(OPEN, PERIODIC), default=None)
    common.add_argument("--output-dir", default=None)
    common.add_argument(
        "--formats", type=_parse_formats, default=None, metavar="LIST",
        help="comma-separated subset of csv,json,svg",
    )
    common.add_argument("--threads", type=int, default=None)

    parser = argparse.ArgumentParser(
        prog="deformed-spectra",
        description="spectra of deformed-oscillator position chains and their cosine-chain partners",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="eigenvalues of one operator")
    sub.add_parser("butterfly", parents=[common], help="eigenvalue sweep over a rational frequency grid")
    sub.add_parser("bands", parents=[common], help="band/gap decomposition of one spectrum")
    edge = sub.add_parser("edge-states", parents=[common], help="in-gap state scan across two chain lengths")
    edge.add_argument("--n-max-b", type=int, default=None, help="second chain length (default n_max + 10)")
    sub.add_parser("verify-map", parents=[common], help="translation and conjugation residual reports")
    levels = sub.add_parser("energy-levels", parents=[common], help="tabulate oscillator level energies")
    levels.add_argument("--count", type=int, default=None, help="number of levels")
    return parser


def _load_config_file(path: str) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    return data


def _config_from_namespace(ns: argparse.Namespace) -> RunConfig:
    values = {
        "command": ns.command,
        "formats": frozenset(_DEFAULT_FORMATS[ns.command]),
        "q_grid": _DEFAULT_Q_GRID.get(ns.command, 200),
    }
    if ns.config:
        file_data = _load_config_file(ns.config)
        for key, value in file_data.items():
            attr = "lam" if key == "lambda" else key
            if attr == "omega_spec" and isinstance(value, list):
                value = tuple(value)
            elif attr == "formats":
                value = frozenset(value)
            elif attr == "command":
                continue  # the subcommand on the command line wins
            values[attr] = value

    flag_omega = None
    if ns.omega_pi is not None and ns.omega is not None:
        raise ValueError("--omega-pi and --omega are mutually exclusive")
    if ns.omega_pi is not None:
        flag_omega = ns.omega_pi
    elif ns.omega is not None:
        flag_omega = ns.omega
    if flag_omega is not None:
        values["omega_spec"] = flag_omega

    for attr in ("operator", "nu", "lam", "n_max", "q_grid", "boundary",
                 "output_dir", "formats", "threads"):
        flag = getattr(ns, attr, None)
        if flag is not None:
            values[attr] = flag
    for attr in ("n_max_b", "count"):
        flag = getattr(ns, attr, None)
        if flag is not None:
            values[attr] = flag

    env_threads = os.environ.get(THREADS_ENV_VAR)
    if env_threads:
        values["threads"] = int(env_threads)

    if ns.command == "verify-map" and "n_max" not in values:
        omega = values.get("omega_spec", (1, 2))
        values["n_max"] = 8 * PiFraction(*omega).q if isinstance(omega, tuple) else 120
    return RunConfig(**values)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses exit code 2 for usage errors
        return int(exc.code or 0)
    try:
        cfg = _config_from_namespace(ns)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"deformed-spectra: {exc}", file=sys.stderr)
        return 2
    try:
        run(cfg)
    except SolverConvergenceError as exc:
        print(f"deformed-spectra: solver failure: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"deformed-spectra: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
