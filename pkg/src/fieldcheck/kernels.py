"""Backend selection for the retarded-kernel sums.

The compiled extension is used when it imports; otherwise the numpy version.
Set ``FIELDCHECK_BACKEND=python`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _kernel_py

_requested = os.environ.get("FIELDCHECK_BACKEND", "auto").lower()

_compiled = None
if _requested != "python":
    try:
        from . import _kernel as _compiled  # type: ignore[attr-defined]
    except ImportError:
        if _requested == "compiled":
            raise

_BACKENDS = {"python": _kernel_py}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled

_active = _BACKENDS.get("compiled", _kernel_py)
_threads = 1


def _threads_from_env() -> int:
    raw = os.environ.get("FIELDCHECK_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


_threads = _threads_from_env()


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def backend_name() -> str:
    return _active.BACKEND


def use_backend(name: str) -> None:
    global _active
    try:
        _active = _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}") from None


def set_threads(n: int) -> None:
    global _threads
    _threads = max(1, int(n))


def get_threads() -> int:
    return _threads


def retarded_sums(*args, **kwargs):
    kwargs.setdefault("threads", _threads)
    return _active.retarded_sums(*args, **kwargs)
