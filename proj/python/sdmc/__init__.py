"""Secure distributed matrix computation on a simulated server network.

Matrices are lists of rows of integers; entries are reduced mod q.
Cost reports are dicts with exact rationals as "a/b" strings.
"""

import json
from fractions import Fraction

from ._sdmc import (
    SdmcError,
    dft,
    find_field,
    idft,
    primitive_root,
    reconstruct,
    share,
)
from . import _sdmc

__all__ = [
    "SdmcError",
    "audit_exhaustive",
    "dft",
    "find_field",
    "idft",
    "multiply",
    "primitive_root",
    "reconstruct",
    "run",
    "share",
    "upload_comparison",
]


def _matrix(j):
    rows, cols, data = j["rows"], j["cols"], j["data"]
    return [data[r * cols:(r + 1) * cols] for r in range(rows)]


def multiply(a, b, *, q, n, t, seed=1, variant="sdmm2"):
    """Secure product of a and b on n servers tolerating t colluders.

    variant: "sdmm2", "usersecure", "own_data" or "pipeline".
    Returns (product, report).
    """
    if variant not in ("sdmm2", "usersecure", "own_data", "pipeline"):
        raise ValueError(f"unknown variant {variant!r}")
    c, report = _sdmc._product(a, b, q, n, t, seed, variant)
    return c, json.loads(report)


def run(descriptor):
    """Runs a protocol descriptor (dict) and returns result, expected and report."""
    out = json.loads(_sdmc._run(json.dumps(descriptor)))
    for key in ("result", "expected"):
        if key in out:
            out[key] = _matrix(out[key])
    return out


def upload_comparison(n=20, t_max=9):
    """Upload cost per scheme for T = 0..t_max as Fractions (None if inadmissible)."""
    rows = json.loads(_sdmc._upload_comparison(n, t_max))
    for row in rows:
        for key, value in row.items():
            if isinstance(value, str):
                row[key] = Fraction(value)
    return rows


def audit_exhaustive(n, k, t, q, *, side="left", rows=1, cols=1, colluders=None):
    """Exhaustive secrecy check of every colluding set's view."""
    return json.loads(_sdmc._audit_exhaustive(n, k, t, side, q, rows, cols, colluders))
