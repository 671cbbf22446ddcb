"""Kernel backend selection.

Prefers the compiled extension ``gssdecon._fast``; falls back to the NumPy
implementation when the extension was not built or when the environment
variable ``GSSDECON_PURE`` is set to a truthy value.
"""

import os

from . import _kernels_py

_force_pure = os.environ.get("GSSDECON_PURE", "").strip().lower() in {"1", "true", "yes"}

if _force_pure:
    _impl = _kernels_py
    HAVE_FAST = False
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]

        HAVE_FAST = True
    except ImportError:
        _impl = _kernels_py
        HAVE_FAST = False

sin_sums = _impl.sin_sums
cos_sin_sums = _impl.cos_sin_sums
cos_sin_transform = _impl.cos_sin_transform
sin_transform = _impl.sin_transform
tk_vector = _impl.tk_vector


def backend_name() -> str:
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return "compiled" if HAVE_FAST else "python"
