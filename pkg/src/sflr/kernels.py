"""Kernel backend selection.

Prefers the compiled Cython kernel, falling back to the pure-NumPy
implementation. Set SFLR_FORCE_PYTHON=1 to force the fallback (used by
the benchmark and the kernel-equivalence tests).
"""
from __future__ import annotations

import os

if os.environ.get("SFLR_FORCE_PYTHON", "") == "1":
    from ._pyboor import eval_basis_matrix
    BACKEND = "python"
else:
    try:
        from ._cyboor import eval_basis_matrix  # type: ignore[no-redef]
        BACKEND = "cython"
    except ImportError:
        from ._pyboor import eval_basis_matrix  # type: ignore[no-redef]
        BACKEND = "python"

__all__ = ["eval_basis_matrix", "BACKEND"]
