"""Select the kernel implementation at import time.

The compiled extension is preferred; the numpy fallback is used when it is
missing.  Set SELFISH_MATCHING_BACKEND=python (or =compiled) to force one.
"""

from __future__ import annotations

import os

_forced = os.environ.get("SELFISH_MATCHING_BACKEND", "auto").strip().lower()

if _forced in ("auto", ""):
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels  # type: ignore[no-redef]
elif _forced in ("compiled", "c"):
    from . import _kernels as kernels  # type: ignore[attr-defined,no-redef]
elif _forced in ("python", "py", "pure"):
    from . import _kernels_py as kernels  # type: ignore[no-redef]
else:
    raise ImportError(
        f"SELFISH_MATCHING_BACKEND={_forced!r} not recognized; "
        "use 'auto', 'compiled', or 'python'"
    )

COMPILED = kernels.BACKEND_NAME == "compiled"


def backend_name() -> str:
    return kernels.BACKEND_NAME
