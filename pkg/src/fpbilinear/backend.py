"""Selects the hot-kernel implementation at import time.

The compiled Cython core is preferred; the pure numpy twin is the
fallback.  Set FPBILINEAR_BACKEND=pure (or =compiled) to force one, or
call set_backend() at runtime (useful for the twin-equivalence tests and
the benchmark).
"""

from __future__ import annotations

import os

from . import _core_py as _pure

try:
    from . import _core as _compiled
except ImportError:
    _compiled = None

_BACKENDS = {"pure": _pure}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled

_forced = os.environ.get("FPBILINEAR_BACKEND")
if _forced:
    if _forced not in _BACKENDS:
        raise ImportError(
            f"FPBILINEAR_BACKEND={_forced!r} unavailable; have {sorted(_BACKENDS)}"
        )
    impl = _BACKENDS[_forced]
else:
    impl = _compiled if _compiled is not None else _pure


def backend_name() -> str:
    return "compiled" if impl is not _pure else "pure"


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def set_backend(name: str) -> None:
    global impl
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; have {sorted(_BACKENDS)}")
    impl = _BACKENDS[name]
