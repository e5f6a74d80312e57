#!/usr/bin/env python3
"""Check numerically that the shifted position operator is unitarily
equivalent to a cosine chain with doubled frequency and doubled phase.

Conjugates the operator by the explicit plane-wave-like transform and prints
the residuals: interior entries match a wrapped cosine-chain band to near
machine precision once the comparison window is aligned with the period.
"""
import math

from deformed_spectra import (
    PiFraction,
    Truncation,
    conjugate_to_harper,
    verify_translation_relations,
)

NU = 0.61

for omega, n_max, window in [
    (PiFraction(1, 5), 40, 20),
    (PiFraction(3, 8), 64, 32),
    (math.pi / 5 + 0.013, 120, 20),  # off the rational grid
]:
    trunc = Truncation(n_max=n_max, k_min=0, k_max=window - 1)
    trans = verify_translation_relations(omega, NU, trunc)
    conj = conjugate_to_harper(omega, NU, trunc)
    tag = f"p*pi/q = {omega.p}/{omega.q}" if isinstance(omega, PiFraction) else f"omega = {omega:.4f}"
    print(f"--- {tag}, window {window}, chain length {n_max}")
    print(f"  translation relations: interior {trans.max_interior_residual:.2e}, "
          f"boundary {trans.max_boundary_residual:.2e}")
    print(f"  conjugated matrix:     interior {conj.max_interior_residual:.2e} "
          f"(aligned: {conj.details['aligned']})")
    print(f"  diagonal vs 2cos(2*omega*k - 2*nu): "
          f"residual {conj.details['diag_fit_residual_doubled_freq']:.2e}, "
          f"fitted frequency doubling amp {conj.details['diag_fit_amplitude']:.4f}")
print()
print("The doubled-frequency cosine fit holds even off the rational grid;")
print("exact interior agreement needs the window aligned with the period q.")
