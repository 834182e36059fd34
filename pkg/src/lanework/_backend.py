"""Backend selection: compiled (numba) hot kernels vs. the pure NumPy path.

The default is resolved once at import time from the ``LANEWORK_BACKEND``
environment variable:

    LANEWORK_BACKEND=auto    use numba when importable (the default)
    LANEWORK_BACKEND=numba   require numba; fail fast if it is missing
    LANEWORK_BACKEND=numpy   force the pure fallback path

``use_backend`` temporarily overrides the choice; the backend benchmark and
the cross-backend tests rely on it.
"""

import os
from contextlib import contextmanager

try:
    import numba  # noqa: F401

    NUMBA_AVAILABLE = True
except ImportError:
    NUMBA_AVAILABLE = False

ENV_VAR = "LANEWORK_BACKEND"
_BACKENDS = ("numba", "numpy")


def _resolve_default() -> str:
    value = os.environ.get(ENV_VAR, "auto").strip().lower()
    if value in ("", "auto"):
        return "numba" if NUMBA_AVAILABLE else "numpy"
    if value == "numba":
        if not NUMBA_AVAILABLE:
            raise ImportError(f"{ENV_VAR}=numba but numba is not importable")
        return "numba"
    if value in ("numpy", "python", "pure"):
        return "numpy"
    raise ValueError(f"unrecognized {ENV_VAR}={value!r}; expected auto, numba or numpy")


_active = _resolve_default()


def backend_name() -> str:
    """Name of the backend currently in effect ("numba" or "numpy")."""
    return _active


def numba_active() -> bool:
    return _active == "numba"


@contextmanager
def use_backend(name: str):
    """Run a block under an explicit backend, restoring the previous one after."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; expected one of {_BACKENDS}")
    if name == "numba" and not NUMBA_AVAILABLE:
        raise ImportError("numba backend requested but numba is not importable")
    previous = _active
    _active = name
    try:
        yield
    finally:
        _active = previous
