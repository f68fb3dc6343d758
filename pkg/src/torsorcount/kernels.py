"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``TORSORCOUNT_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def available_backends() -> list[str]:
    return ["python"] + (["cython"] if _ckernels is not None else [])


def get_backend(name: str | None = None) -> ModuleType:
    """Kernel module by name ('cython' or 'python'); None picks the default."""
    if name is None:
        name = BACKEND
    if name == "python":
        return _pykernels
    if name == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not built; run `pip install -e .`")
        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


if _ckernels is not None and not os.environ.get("TORSORCOUNT_PURE_PYTHON"):
    BACKEND = "cython"
else:
    BACKEND = "python"

n1_orbits = get_backend().n1_orbits
n2_orbits = get_backend().n2_orbits
