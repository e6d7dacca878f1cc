"""Global tolerance configuration.

All rank/zero decisions in the package use a relative tolerance scaled by the
largest magnitude involved.  The default can be overridden per process with the
GENTESS_TOL environment variable or programmatically via :func:`set_rel_tol`.
"""

from __future__ import annotations

import os

DEFAULT_REL_TOL = 1e-9

_rel_tol = float(os.environ.get("GENTESS_TOL", DEFAULT_REL_TOL))


def rel_tol() -> float:
    return _rel_tol


def set_rel_tol(value: float) -> None:
    global _rel_tol
    if value <= 0:
        raise ValueError("tolerance must be positive")
    _rel_tol = value
