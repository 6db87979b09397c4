"""Select the moment-grid kernel: compiled extension if importable, else pure Python.

Set ``CRITLINE_BACKEND=python`` to force the fallback.
"""

import os

from . import _kernel_py

BACKEND = "python"
moment_grid = _kernel_py.moment_grid

if os.environ.get("CRITLINE_BACKEND", "").lower() != "python":
    try:
        from ._kernel_c import moment_grid  # noqa: F811
    except ImportError:
        pass
    else:
        BACKEND = "compiled"


def worker_count() -> int:
    """Worker cap: ``CRITLINE_THREADS`` if set, else available CPUs."""
    env = os.environ.get("CRITLINE_THREADS", "").strip()
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"CRITLINE_THREADS must be an integer, got {env!r}") from None
        return max(1, n)
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:
        return max(1, os.cpu_count() or 1)
