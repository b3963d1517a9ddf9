"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
mirror. Set ``TRIHAUSDORFF_BACKEND=python`` to force the fallback.
"""
import os
from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels


def available() -> list[str]:
    return sorted(_BACKENDS)


def get(name: str | None = None) -> ModuleType:
    """Return the kernel module called ``name`` (default: the active one)."""
    if name is None:
        return kernels
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {available()}") from None


def _select() -> ModuleType:
    wanted = os.environ.get("TRIHAUSDORFF_BACKEND", "").strip().lower()
    if wanted:
        return get(wanted)
    return _ckernels if _ckernels is not None else _pykernels


kernels = _select()
BACKEND: str = kernels.BACKEND
