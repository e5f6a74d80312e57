"""Spectra of quasiperiodically modulated oscillator chains.

Builders for the tridiagonal position / momentum operators of an oscillator
whose couplings are modulated by an incommensurate (or rational) frequency,
eigensolvers with two independent routes, the unitary map onto a cosine-chain
(Harper-type) operator, and band / butterfly / edge-state analysis on top.
"""
from .eigensolver import (
    EigenPair,
    SolverConvergenceError,
    Spectrum,
    eigenpair_inverse_iteration,
    eigenvalues_bisection,
    eigenvalues_dense_oracle,
    solve_spectrum,
    sturm_count,
)
from .spectral_analysis import (
    BandSet,
    BoxCountEstimate,
    ButterflyResult,
    EdgeStateReport,
    EdgeSuspect,
    band_gap_depth,
    box_counting_dimension,
    butterfly_sweep,
    detect_bands,
    edge_state_scan,
    total_bandwidth,
)
from .unitary_map import (
    ResidualReport,
    TransformMatrix,
    basis_phase,
    build_transform,
    conjugate_to_harper,
    verify_translation_relations,
)
from .operator_core import (
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
    omega_label,
    omega_value,
)

__version__ = "0.1.0"

__all__ = [
    "OPEN",
    "PERIODIC",
    "BandSet",
    "BoxCountEstimate",
    "ButterflyResult",
    "DeformationParams",
    "EdgeStateReport",
    "EdgeSuspect",
    "EigenPair",
    "PiFraction",
    "ResidualReport",
    "SolverConvergenceError",
    "Spectrum",
    "TransformMatrix",
    "TridiagonalOperator",
    "Truncation",
    "band_gap_depth",
    "basis_phase",
    "box_counting_dimension",
    "build_general_lambda_operator",
    "build_harper_operator",
    "build_momentum_operator",
    "build_position_operator",
    "build_transform",
    "build_xnu_operator",
    "butterfly_sweep",
    "conjugate_to_harper",
    "deformation_value",
    "detect_bands",
    "edge_state_scan",
    "eigenpair_inverse_iteration",
    "eigenvalues_bisection",
    "eigenvalues_dense_oracle",
    "energy_level",
    "omega_label",
    "omega_value",
    "solve_spectrum",
    "sturm_count",
    "total_bandwidth",
    "verify_translation_relations",
    "__version__",
]
