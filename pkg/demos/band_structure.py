#!/usr/bin/env python3
"""Band structure at rational frequencies: q bands, shrinking total width.

At omega = p*pi/q the open position chain decouples into finite blocks and
the spectrum collapses onto q points; the cosine-chain partner at the same
flux shows the q continuous bands whose total width shrinks along the
Fibonacci approximants to the golden mean.
"""
from deformed_spectra import (
    DeformationParams,
    PiFraction,
    Truncation,
    build_harper_operator,
    build_position_operator,
    detect_bands,
    solve_spectrum,
    total_bandwidth,
)

print("position chain at omega = pi/q (point bands):")
for q in (3, 5, 7):
    op = build_position_operator(
        DeformationParams(omega=PiFraction(1, q)), Truncation(n_max=70 * q)
    )
    bands = detect_bands(solve_spectrum(op), q_hint=q)
    centers = ", ".join(f"{lo:+.4f}" for lo, _ in bands.bands)
    print(f"  q = {q}: {len(bands.bands)} bands at [{centers}]")

print()
print("cosine chain along Fibonacci fluxes (bandwidth trend):")
prev = None
for p, q in ((1, 2), (2, 3), (3, 5), (5, 8), (8, 13)):
    op = build_harper_operator(PiFraction(2 * p, q), 0.0, Truncation(n_max=40 * q))
    bands = detect_bands(solve_spectrum(op), q_hint=q)
    width = total_bandwidth(bands)
    arrow = "" if prev is None else ("  (smaller)" if width < prev else "  (LARGER?)")
    print(f"  flux {p}/{q}: {len(bands.bands)} bands, total width {width:.6f}{arrow}")
    prev = width
