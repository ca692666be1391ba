"""Backend selection for the hot kernels.

The compiled ``_ckernels`` extension is used when it was built; otherwise the
pure-Python ``_pykernels`` module is used.  Setting ``HYPORATE_PURE=1`` forces
the fallback (handy for testing both paths).
"""

from __future__ import annotations

import os

from . import _pykernels

_backend = _pykernels
BACKEND = "python"

if os.environ.get("HYPORATE_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _backend  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _backend = _pykernels

H1, H2, H2_TILDE, H3, DIFFUSION = 0, 1, 2, 3, 4

disc_value = _backend.disc_value
min_over_delta = _backend.min_over_delta
max_rate = _backend.max_rate
propagate = _backend.propagate
hplus = _backend.hplus
gt_B_integral = _backend.gt_B_integral


def backend_module(name: str):
    """Return the kernel module called ``name`` ("python" or "cython")."""
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")
