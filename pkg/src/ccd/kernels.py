"""Backend selection for the inner loops.

The compiled module is used when it imports; otherwise, or when the
``CCD_PURE_PYTHON`` environment variable is set to a non-empty value other
than ``0``, the pure-Python twin is used. Both produce identical results.
"""

import os

from . import _kernels_py as python_backend

compiled_backend = None
try:
    from . import _kernels as compiled_backend
except ImportError:  # extension not built
    pass

if compiled_backend is not None and os.environ.get("CCD_PURE_PYTHON", "") in ("", "0"):
    _impl = compiled_backend
    BACKEND = "cython"
else:
    _impl = python_backend
    BACKEND = "python"

louvain_move = _impl.louvain_move
leiden_refine = _impl.leiden_refine
lp_sweep = _impl.lp_sweep
lp_is_stable = _impl.lp_is_stable

_NAMES = ("louvain_move", "leiden_refine", "lp_sweep", "lp_is_stable")


def _bind(module, name):
    global BACKEND, _impl
    for fn in _NAMES:
        globals()[fn] = getattr(module, fn)
    _impl, BACKEND = module, name


class use_backend:
    """Temporarily route the kernels to ``"python"`` or ``"cython"``.

    Not thread-safe; meant for tests and benchmarks.
    """

    def __init__(self, name: str):
        if name == "python":
            self._module = python_backend
        elif name == "cython":
            if compiled_backend is None:
                raise RuntimeError("compiled extension is not available")
            self._module = compiled_backend
        else:
            raise ValueError(f"unknown backend {name!r}")
        self._name = name

    def __enter__(self):
        self._saved = (BACKEND, _impl)
        _bind(self._module, self._name)
        return self

    def __exit__(self, *exc):
        name, module = self._saved
        _bind(module, name)
        return False
