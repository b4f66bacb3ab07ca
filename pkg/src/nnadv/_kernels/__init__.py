"""Hot-loop kernels: compiled extension when available, pure Python otherwise.

Set ``NN_ADV_KERNEL=python`` to force the pure-Python implementation even
when the compiled module is importable (useful for debugging and for the
backend benchmark).  Both implementations expose the same functions with
identical semantics; ``BACKEND`` names the one in use.
"""
from __future__ import annotations

import os

_forced = os.environ.get("NN_ADV_KERNEL", "").strip().lower()

if _forced in ("py", "python", "pure"):
    from . import fallback as impl
elif _forced in ("c", "cython", "compiled"):
    from . import _core as impl  # type: ignore[no-redef]
else:
    try:
        from . import _core as impl  # type: ignore[no-redef]
    except ImportError:
        from . import fallback as impl  # type: ignore[no-redef]

BACKEND: str = impl.BACKEND

__all__ = ["impl", "BACKEND"]
