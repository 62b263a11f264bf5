"""Pick the kernel implementation once, at import.

The compiled ``_core`` extension is used when it imports cleanly; set
``CTLSEARCH_BACKEND=python`` to force the pure-Python twin.
"""
from __future__ import annotations

import os

from ctlsearch import _pure

_requested = os.environ.get("CTLSEARCH_BACKEND", "auto").lower()

impl = _pure
if _requested != "python":
    try:
        from ctlsearch import _core as impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "compiled":
            raise
        impl = _pure

NAME = "compiled" if impl is not _pure else "python"
COMPILED = impl is not _pure


def get(name: str):
    """Return backend module by name (``"compiled"`` or ``"python"``)."""
    if name == "python":
        return _pure
    if name == "compiled":
        from ctlsearch import _core

        return _core
    raise ValueError(f"unknown backend {name!r}")
