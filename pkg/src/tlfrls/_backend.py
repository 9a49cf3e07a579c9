"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy kernels.
Set ``TLFRLS_BACKEND=python`` to force the fallback at import time, or call
:func:`use` to switch at runtime (the benchmark does this).
"""

import os

from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

K = _pykernels
name = "python"


def available():
    return ["compiled", "python"] if _compiled is not None else ["python"]


def get(which):
    if which == "python":
        return _pykernels
    if which == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built; run `pip install -e .`")
        return _compiled
    raise ValueError(f"unknown backend {which!r}")


def use(which):
    """Route all package kernels through ``which`` ('compiled' or 'python')."""
    global K, name
    K = get(which)
    name = which
    return K


if os.environ.get("TLFRLS_BACKEND", "").lower() != "python" and _compiled is not None:
    use("compiled")
