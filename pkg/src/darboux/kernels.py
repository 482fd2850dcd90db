"""Kernel backend selection.

The compiled Cython extension is used when it imports; otherwise, or when
``DARBOUX_PURE_PYTHON=1`` is set, the pure-Python reference kernels are used.
Both expose ``midpoint_step``, ``midpoint_run``, ``numerov_shoot`` and
``numerov_sweep`` with identical semantics.
"""

import os

from . import _pykernels

OK = _pykernels.OK
NO_CONVERGENCE = _pykernels.NO_CONVERGENCE
DOMAIN_EXIT = _pykernels.DOMAIN_EXIT
MODEL_CODES = _pykernels.MODEL_CODES


def _load_compiled():
    if os.environ.get("DARBOUX_PURE_PYTHON", "") not in ("", "0"):
        return None
    try:
        from . import _ckernels
    except ImportError:
        return None
    return _ckernels


_compiled = _load_compiled()
backend = _compiled if _compiled is not None else _pykernels
BACKEND = "cython" if _compiled is not None else "python"

midpoint_step = backend.midpoint_step
midpoint_run = backend.midpoint_run
numerov_shoot = backend.numerov_shoot
numerov_sweep = backend.numerov_sweep


def available_backends():
    """Mapping name -> module for every importable backend."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
