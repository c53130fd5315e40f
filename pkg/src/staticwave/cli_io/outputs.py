"""Deterministic file outputs: CSV tables and the run metadata JSON.

Floats are written with 17 significant digits and rows in a fixed order,
so identical configurations produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from ..evolution import FieldState
from ..geometry import DisjointHalfLines
from ..spectral import SpectralData

__all__ = [
    "fmt",
    "write_spectrum_csv",
    "write_snapshots_csv",
    "write_conserved_csv",
    "write_greens_csv",
    "write_meta",
    "content_hash",
]


def fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _write(path: Path, header: list[str], rows) -> bytes:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) if isinstance(v, float) else str(v) for v in row))
    blob = ("\n".join(lines) + "\n").encode()
    path.write_bytes(blob)
    return blob


def write_spectrum_csv(path: Path, spec: SpectralData) -> bytes:
    """Rows: one per basis mode, eigenvalues repeated for multiplicity pairs."""
    header = [
        "index",
        "lambda",
        "multiplicity",
        "mode_kind",
        "coef1_re",
        "coef1_im",
        "coef2_re",
        "coef2_im",
        "wavenumber",
        "component",
        "flag",
    ]
    rows = []
    idx = 0
    for line in spec.lines:
        for mode in line.modes:
            coeffs = mode.coeffs
            if mode.kind in ("trig", "hyperbolic"):
                c1, c2, k = complex(coeffs[0]), complex(coeffs[1]), float(coeffs[2])
            elif mode.kind == "linear":
                c1, c2, k = complex(coeffs[0]), complex(coeffs[1]), 0.0
            elif mode.kind == "exp_decay":
                c1, c2, k = complex(coeffs[0]), 0j, float(coeffs[1])
            else:  # fourier
                c1, c2, k = complex(coeffs[0]), 0j, float(coeffs[1])
            rows.append(
                (
                    idx,
                    float(line.lam),
                    line.multiplicity,
                    mode.kind,
                    c1.real,
                    c1.imag,
                    c2.real,
                    c2.imag,
                    k,
                    mode.component,
                    line.flag or "-",
                )
            )
            idx += 1
    return _write(path, header, rows)


def write_snapshots_csv(path: Path, states: list[FieldState], disjoint: bool) -> bytes:
    header = ["t", "x", "phi_re", "phi_im", "phidot_re", "phidot_im"]
    if disjoint:
        header = ["component"] + header
    rows = []
    for st in states:
        for comp, (grid, phi, dot) in enumerate(zip(st.grids, st.phi, st.phidot)):
            for j in range(len(grid)):
                row = (
                    float(st.t),
                    float(grid[j]),
                    float(np.real(phi[j])),
                    float(np.imag(phi[j])),
                    float(np.real(dot[j])),
                    float(np.imag(dot[j])),
                )
                rows.append((comp,) + row if disjoint else row)
    return _write(path, header, rows)


def write_conserved_csv(path: Path, times, energy, symp, leak, norms) -> bytes:
    header = ["t", "energy", "symplectic", "leakage", "phi_norm"]
    rows = [
        (float(t), float(e), float(s), float(l), float(n))
        for t, e, s, l, n in zip(times, energy, symp, leak, norms)
    ]
    return _write(path, header, rows)


def write_greens_csv(path: Path, rows) -> bytes:
    header = ["x", "y", "lambda_re", "lambda_im", "g_re", "g_im"]
    return _write(path, header, rows)


def content_hash(blobs: list[bytes]) -> str:
    h = hashlib.sha256()
    for b in blobs:
        h.update(b)
    return h.hexdigest()


def write_meta(path: Path, meta: dict) -> bytes:
    blob = (json.dumps(meta, indent=2, sort_keys=True) + "\n").encode()
    path.write_bytes(blob)
    return blob


def is_disjoint(manifold) -> bool:
    return isinstance(manifold, DisjointHalfLines)
